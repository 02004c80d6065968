"""Discrete memoryless multiple access channels and finite table codes.

A channel is a stochastic tensor ``transition[x1][x2][y]``.  Words are
1-D integer arrays; the n-letter extension acts coordinate by coordinate.

The module also provides the classic two-sender deterministic channel in
which one sender's letter can collapse pairs of the other sender's letters
into an erasure symbol (``dueck_mac``), plus the generic
conferencing-encoder code container ``CfCode`` and its evaluator.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .errors import (
    LengthMismatchError,
    NegativeEntryError,
    NonStochasticRowError,
    NotDeterministicError,
    PreimageCapExceededError,
    StateSpaceCapExceededError,
    SymbolOutOfRangeError,
    ValidationError,
)

__all__ = [
    "DiscreteMac",
    "validate_mac",
    "dueck_mac",
    "apply_n",
    "erasure_count",
    "enumerate_preimages",
    "CfCode",
    "ErrorReport",
    "evaluate_cf_code",
    "X1_SYMBOLS",
    "Y1_SYMBOLS",
    "Y1_ERASURES",
    "DUECK_W1",
]

ROW_TOL = 1e-9

# Sender-1 alphabet and the first output component, in their fixed encodings.
X1_SYMBOLS = "abAB"            # codes 0..3
Y1_SYMBOLS = "abcABC"          # codes 0..5
Y1_ERASURES = (2, 5)           # 'c' and 'C'

# First output component of the collapse channel: DUECK_W1[x1][x2] -> y1 code.
DUECK_W1 = np.array(
    [
        [2, 0],  # a: (a,0) -> c, (a,1) -> a
        [2, 1],  # b: (b,0) -> c, (b,1) -> b
        [3, 5],  # A: (A,0) -> A, (A,1) -> C
        [4, 5],  # B: (B,0) -> B, (B,1) -> C
    ],
    dtype=np.int64,
)


@dataclass(frozen=True)
class DiscreteMac:
    """A validated two-sender discrete memoryless channel.

    ``deterministic_map[x1][x2]`` is present exactly when every transition
    row is a point mass.  ``y_split`` optionally records that the output
    alphabet is a product Y1 x Y2 flattened as ``y = y1 * y2_size + y2``.
    """

    x1_size: int
    x2_size: int
    y_size: int
    transition: np.ndarray
    deterministic_map: np.ndarray | None = None
    y_split: tuple[int, int] | None = None

    def is_deterministic(self) -> bool:
        return self.deterministic_map is not None


def validate_mac(transition, y_split: tuple[int, int] | None = None) -> DiscreteMac:
    """Check a transition tensor and wrap it in a DiscreteMac.

    Raises NegativeEntryError for negative mass and NonStochasticRowError for
    any row whose sum is off one by more than 1e-9.
    """
    t = np.asarray(transition, dtype=np.float64)
    if t.ndim != 3 or min(t.shape) < 1:
        raise ValidationError(f"transition must be (x1, x2, y) with positive sizes, got {t.shape}")
    if not np.all(np.isfinite(t)):
        raise NegativeEntryError("transition has non-finite entries")
    if np.any(t < 0.0):
        bad = np.argwhere(t < 0.0)[0]
        raise NegativeEntryError(f"negative transition entry at {tuple(int(i) for i in bad)}")
    sums = t.sum(axis=2)
    off = np.abs(sums - 1.0) > ROW_TOL
    if np.any(off):
        bad = np.argwhere(off)[0]
        raise NonStochasticRowError(
            f"row x1={int(bad[0])}, x2={int(bad[1])} sums to {float(sums[tuple(bad)])!r}"
        )
    if y_split is not None:
        y1s, y2s = int(y_split[0]), int(y_split[1])
        if y1s * y2s != t.shape[2]:
            raise ValidationError(
                f"y_split {y_split} does not factor the output size {t.shape[2]}"
            )
        y_split = (y1s, y2s)

    det: np.ndarray | None = None
    peak = t.max(axis=2)
    if np.all(peak >= 1.0 - ROW_TOL):
        det = t.argmax(axis=2).astype(np.int64)
        det.setflags(write=False)

    t = t.copy()
    t.setflags(write=False)
    return DiscreteMac(
        x1_size=t.shape[0],
        x2_size=t.shape[1],
        y_size=t.shape[2],
        transition=t,
        deterministic_map=det,
        y_split=y_split,
    )


def dueck_mac() -> DiscreteMac:
    """The deterministic collapse channel: X1 = {a,b,A,B}, X2 = {0,1}.

    Output is (y1, y2) with y1 in {a,b,c,A,B,C} and y2 = x2, flattened as
    ``y = y1 * 2 + y2``.  Sending x2 = 0 collapses {a,b} to the erasure 'c';
    sending x2 = 1 collapses {A,B} to the erasure 'C'; otherwise y1 = x1.
    """
    t = np.zeros((4, 2, 12), dtype=np.float64)
    for x1 in range(4):
        for x2 in range(2):
            t[x1, x2, int(DUECK_W1[x1, x2]) * 2 + x2] = 1.0
    return validate_mac(t, y_split=(6, 2))


def _check_word(word, size: int, what: str) -> np.ndarray:
    arr = np.asarray(word, dtype=np.int64).ravel()
    if arr.size and (arr.min() < 0 or arr.max() >= size):
        raise SymbolOutOfRangeError(f"{what} contains symbols outside [0, {size})")
    return arr


def apply_n(
    mac: DiscreteMac,
    x1_word,
    x2_word,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Send a pair of words through the n-letter extension of the channel.

    Deterministic channels ignore ``rng``; stochastic ones require it.
    """
    x1 = _check_word(x1_word, mac.x1_size, "x1 word")
    x2 = _check_word(x2_word, mac.x2_size, "x2 word")
    if x1.shape[0] != x2.shape[0]:
        raise LengthMismatchError(f"word lengths differ: {x1.shape[0]} vs {x2.shape[0]}")
    n = x1.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    if mac.deterministic_map is not None:
        return mac.deterministic_map[x1, x2]
    if rng is None:
        raise ValidationError("stochastic channel requires a random generator")
    rows = mac.transition[x1, x2]              # (n, y)
    cum = np.cumsum(rows, axis=1)
    u = rng.random(n)
    y = (u[:, None] > cum).sum(axis=1)
    return np.minimum(y, mac.y_size - 1).astype(np.int64)


def erasure_count(y1_word) -> int:
    """Number of coordinates of a first-output word that are erasures."""
    arr = _check_word(y1_word, 6, "y1 word")
    return int(np.count_nonzero((arr == Y1_ERASURES[0]) | (arr == Y1_ERASURES[1])))


def enumerate_preimages(
    mac: DiscreteMac,
    y_word,
    cap: int = 1 << 24,
) -> set[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All input word pairs a deterministic channel maps onto ``y_word``.

    The preimage is a coordinate-wise product set; its size is checked
    against ``cap`` before materialization.
    """
    if mac.deterministic_map is None:
        raise NotDeterministicError("preimages are only defined for deterministic channels")
    y = _check_word(y_word, mac.y_size, "y word")
    per_coord: list[list[tuple[int, int]]] = []
    total = 1
    for yt in y:
        pairs = [tuple(int(v) for v in idx) for idx in np.argwhere(mac.deterministic_map == yt)]
        if not pairs:
            return set()
        per_coord.append(pairs)
        total *= len(pairs)
        if total > cap:
            raise PreimageCapExceededError(f"preimage has {total}+ elements, cap is {cap}")
    out: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
    for combo in product(*per_coord):
        x1 = tuple(p[0] for p in combo)
        x2 = tuple(p[1] for p in combo)
        out.add((x1, x2))
    return out


# --- conferencing-encoder table codes -----------------------------------------

Decoder = Callable[[np.ndarray], tuple[int, int]]


@dataclass(frozen=True)
class CfCode:
    """A finite-table code whose encoders share a little conferencing output.

    ``phi1``/``phi2`` compress the messages, ``psi1``/``psi2`` turn the two
    compressed values into per-encoder side information, and ``f1``/``f2`` map
    (message, side information) to channel words.  The decoder ``g`` may be an
    arbitrary callable from an output word to a message pair.
    """

    m1: int
    m2: int
    k1_in: int
    k2_in: int
    k1_out: int
    k2_out: int
    n: int
    phi1: np.ndarray
    phi2: np.ndarray
    psi1: np.ndarray
    psi2: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    g: Decoder

    def __post_init__(self):
        def table(name, value, shape, bound):
            arr = np.asarray(value, dtype=np.int64)
            if arr.shape != shape:
                raise ValidationError(f"{name} must have shape {shape}, got {arr.shape}")
            if arr.size and (arr.min() < 0 or arr.max() >= bound):
                raise ValidationError(f"{name} has entries outside [0, {bound})")
            arr.setflags(write=False)
            return arr

        object.__setattr__(self, "phi1", table("phi1", self.phi1, (self.m1,), self.k1_in))
        object.__setattr__(self, "phi2", table("phi2", self.phi2, (self.m2,), self.k2_in))
        object.__setattr__(
            self, "psi1", table("psi1", self.psi1, (self.k1_in, self.k2_in), self.k1_out)
        )
        object.__setattr__(
            self, "psi2", table("psi2", self.psi2, (self.k1_in, self.k2_in), self.k2_out)
        )
        # f-tables carry channel words; symbol ranges are checked at use time
        f1 = np.asarray(self.f1, dtype=np.int64)
        f2 = np.asarray(self.f2, dtype=np.int64)
        if f1.shape != (self.m1, self.k1_out, self.n):
            raise ValidationError(f"f1 must have shape {(self.m1, self.k1_out, self.n)}")
        if f2.shape != (self.m2, self.k2_out, self.n):
            raise ValidationError(f"f2 must have shape {(self.m2, self.k2_out, self.n)}")
        f1.setflags(write=False)
        f2.setflags(write=False)
        object.__setattr__(self, "f1", f1)
        object.__setattr__(self, "f2", f2)
        if not callable(self.g):
            raise ValidationError("g must be callable")


@dataclass(frozen=True)
class ErrorReport:
    """Per-pair error table for a code, with its average and maximum."""

    lambda_table: np.ndarray
    p_avg: float
    p_max: float
    method: str
    trials: int | None = None

    def __post_init__(self):
        arr = np.asarray(self.lambda_table, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "lambda_table", arr)
        if self.p_avg > self.p_max + 1e-12:
            raise ValidationError("p_avg cannot exceed p_max")


def _code_inputs(code: CfCode, w1: int, w2: int) -> tuple[np.ndarray, np.ndarray]:
    v1 = code.phi1[w1]
    v2 = code.phi2[w2]
    z1 = code.psi1[v1, v2]
    z2 = code.psi2[v1, v2]
    return code.f1[w1, z1], code.f2[w2, z2]


def evaluate_cf_code(
    mac: DiscreteMac,
    code: CfCode,
    method: str = "exact",
    trials: int = 10_000,
    seed: int = 0,
    state_cap: int = 1 << 24,
) -> ErrorReport:
    """Exact or sampled error probabilities of a CfCode on a channel.

    Exact evaluation on a stochastic channel enumerates all |Y|^n output
    words (capped by ``state_cap``).  Monte Carlo derives one generator per
    (w1, w2, trial) from the seed, so results do not depend on evaluation
    order.
    """
    lam = np.zeros((code.m1, code.m2), dtype=np.float64)
    if method == "exact":
        if mac.deterministic_map is not None:
            for w1 in range(code.m1):
                for w2 in range(code.m2):
                    x1, x2 = _code_inputs(code, w1, w2)
                    y = apply_n(mac, x1, x2)
                    lam[w1, w2] = 0.0 if code.g(y) == (w1, w2) else 1.0
        else:
            n_words = mac.y_size**code.n
            if n_words > state_cap:
                raise StateSpaceCapExceededError(
                    f"|Y|^n = {n_words} exceeds the state cap {state_cap}"
                )
            words = np.array(list(product(range(mac.y_size), repeat=code.n)), dtype=np.int64)
            decoded = [code.g(w) for w in words]
            for w1 in range(code.m1):
                for w2 in range(code.m2):
                    x1, x2 = _code_inputs(code, w1, w2)
                    probs = mac.transition[x1, x2, words].prod(axis=1) if code.n else np.ones(1)
                    good = sum(
                        float(probs[i]) for i, d in enumerate(decoded) if d == (w1, w2)
                    )
                    lam[w1, w2] = min(max(1.0 - good, 0.0), 1.0)
        report_trials = None
    elif method == "monte_carlo":
        if trials < 1:
            raise ValidationError("monte_carlo needs at least one trial")
        for w1 in range(code.m1):
            for w2 in range(code.m2):
                x1, x2 = _code_inputs(code, w1, w2)
                errs = 0
                for t in range(trials):
                    rng = np.random.default_rng([seed, w1, w2, t])
                    y = apply_n(mac, x1, x2, rng=rng)
                    if code.g(y) != (w1, w2):
                        errs += 1
                lam[w1, w2] = errs / trials
        report_trials = trials
    else:
        raise ValidationError(f"unknown method {method!r}")

    return ErrorReport(
        lambda_table=lam,
        p_avg=float(lam.mean()),
        p_max=float(lam.max()),
        method=method,
        trials=report_trials,
    )
