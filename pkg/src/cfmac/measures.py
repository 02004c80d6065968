"""Discrete information measures, in bits.

Conventions used throughout: ``0 * log 0 = 0`` and ``0^2 / 0 = 0``; a
divergence whose support condition fails is the distinguished value
``math.inf`` rather than an exception.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AlphabetMismatchError, InvalidPmfError, OutOfRangeError

__all__ = [
    "PROB_TOL",
    "Pmf",
    "JointPmf",
    "ConditionedJoint",
    "entropy",
    "binary_entropy",
    "mutual_information",
    "conditional_mutual_information",
    "kl_divergence",
    "chi2_divergence",
    "l1_distance",
]

PROB_TOL = 1e-9
_NEG_TOL = 1e-12


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


def _check_mass(arr: np.ndarray, what: str) -> None:
    if arr.size == 0:
        raise InvalidPmfError(f"{what} is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidPmfError(f"{what} has non-finite entries")
    if np.any(arr < -_NEG_TOL):
        raise InvalidPmfError(f"{what} has negative entries")
    total = float(arr.sum())
    if abs(total - 1.0) > PROB_TOL:
        raise InvalidPmfError(f"{what} sums to {total!r}, not 1")


def _as_dist(p, ndim: int, what: str = "distribution") -> np.ndarray:
    """Coerce a Pmf/JointPmf/array-like to a validated nonnegative array."""
    arr = np.asarray(getattr(p, "probs", p), dtype=np.float64)
    if arr.ndim != ndim:
        raise InvalidPmfError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    _check_mass(arr, what)
    return np.maximum(arr, 0.0)


@dataclass(frozen=True)
class Pmf:
    """Probability mass function over a finite alphabet."""

    probs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.probs, dtype=np.float64)
        if arr.ndim != 1:
            raise InvalidPmfError("Pmf must be one-dimensional")
        _check_mass(arr, "Pmf")
        object.__setattr__(self, "probs", _freeze(arr))

    @property
    def size(self) -> int:
        return self.probs.shape[0]


@dataclass(frozen=True)
class JointPmf:
    """Joint distribution over a product alphabet A x B."""

    probs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.probs, dtype=np.float64)
        if arr.ndim != 2:
            raise InvalidPmfError("JointPmf must be two-dimensional")
        _check_mass(arr, "JointPmf")
        object.__setattr__(self, "probs", _freeze(arr))

    @property
    def shape(self) -> tuple[int, int]:
        return self.probs.shape

    def marginal_a(self) -> Pmf:
        return Pmf(self.probs.sum(axis=1))

    def marginal_b(self) -> Pmf:
        return Pmf(self.probs.sum(axis=0))


@dataclass(frozen=True)
class ConditionedJoint:
    """A mixture of joint distributions: weights p(u) and conditionals p(a,b|u)."""

    weights: np.ndarray
    conditionals: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        cond = np.asarray(self.conditionals, dtype=np.float64)
        if w.ndim != 1:
            raise InvalidPmfError("weights must be one-dimensional")
        _check_mass(w, "weights")
        if cond.ndim != 3 or cond.shape[0] != w.shape[0]:
            raise InvalidPmfError(
                f"conditionals must have shape (u, a, b) with u={w.shape[0]}, got {cond.shape}"
            )
        for u in range(cond.shape[0]):
            _check_mass(cond[u], f"conditional #{u}")
        object.__setattr__(self, "weights", _freeze(w))
        object.__setattr__(self, "conditionals", _freeze(cond))

    @property
    def u_size(self) -> int:
        return self.weights.shape[0]

    def joint(self) -> np.ndarray:
        """Average the conditionals into the unconditioned joint p(a,b)."""
        return np.tensordot(self.weights, self.conditionals, axes=(0, 0))


# --- scalar helpers on raw arrays (no validation) ----------------------------

def _entropy_arr(p: np.ndarray) -> float:
    p = p[p > 0.0]
    return float(-np.dot(p, np.log2(p)))


def _mi_arr(j: np.ndarray) -> float:
    """Mutual information of a 2-D joint array, in bits."""
    pa = j.sum(axis=1)
    pb = j.sum(axis=0)
    mask = j > 0.0
    ratio = j[mask] / np.outer(pa, pb)[mask]
    val = float(np.dot(j[mask], np.log2(ratio)))
    return max(val, 0.0)


def _kl_arr(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0.0
    if np.any(q[mask] <= 0.0):
        return math.inf
    return float(np.dot(p[mask], np.log2(p[mask] / q[mask])))


# --- public operations --------------------------------------------------------

def entropy(p) -> float:
    """Shannon entropy of a distribution (any shape coerces to its mass)."""
    arr = np.asarray(getattr(p, "probs", p), dtype=np.float64)
    _check_mass(arr, "distribution")
    return _entropy_arr(np.maximum(arr, 0.0).ravel())


def binary_entropy(p: float) -> float:
    """Entropy of a Bernoulli(p) variable in bits; requires 0 <= p <= 1."""
    if not (0.0 <= p <= 1.0):
        raise OutOfRangeError(f"binary_entropy needs p in [0, 1], got {p!r}")
    if p in (0.0, 1.0):
        return 0.0
    return float(-p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p))


def mutual_information(joint) -> float:
    """I(A;B) of a joint distribution over A x B, in bits."""
    return _mi_arr(_as_dist(joint, 2, "joint"))


def conditional_mutual_information(cj: ConditionedJoint) -> float:
    """I(A;B|U) of a ConditionedJoint, in bits."""
    if not isinstance(cj, ConditionedJoint):
        cj = ConditionedJoint(*cj)
    total = 0.0
    for u in range(cj.u_size):
        w = float(cj.weights[u])
        if w > 0.0:
            total += w * _mi_arr(np.maximum(cj.conditionals[u], 0.0))
    return total


def _pair(p, q, what: str) -> tuple[np.ndarray, np.ndarray]:
    ap = _as_dist(np.asarray(getattr(p, "probs", p)).ravel(), 1, f"{what} first argument")
    aq = _as_dist(np.asarray(getattr(q, "probs", q)).ravel(), 1, f"{what} second argument")
    if ap.shape != aq.shape:
        raise AlphabetMismatchError(
            f"{what} arguments have different sizes {ap.shape[0]} and {aq.shape[0]}"
        )
    return ap, aq


def kl_divergence(p, q) -> float:
    """D(p || q) in bits; math.inf when support(p) is not inside support(q)."""
    ap, aq = _pair(p, q, "kl_divergence")
    return _kl_arr(ap, aq)


def chi2_divergence(p, q) -> float:
    """Chi-squared divergence sum of (p-q)^2 / q; math.inf on support violation."""
    ap, aq = _pair(p, q, "chi2_divergence")
    pos = aq > 0.0
    if np.any(ap[~pos] > 0.0):
        return math.inf
    d = ap[pos] - aq[pos]
    return float(np.sum(d * d / aq[pos]))


def l1_distance(p, q) -> float:
    """Total variation's L1 form: sum of |p - q|."""
    ap, aq = _pair(p, q, "l1_distance")
    return float(np.abs(ap - aq).sum())
