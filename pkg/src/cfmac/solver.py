"""Multi-start projected ascent for dependence-constrained rate maximization.

The problem solved here: over a mixing weight w(u) and per-component joint
input distributions Q_u(x1, x2), maximize the average input-output
information of a fixed channel subject to an average dependence budget

    sum_u w(u) * I(X1; X2 | U=u)  <=  delta.

The constraint is handled by an exterior quadratic penalty during ascent,
followed by an exact projection to feasibility that scales each component
toward its product of marginals (which preserves the marginals and moves the
dependence monotonically to zero).  Reported values always come from a
feasible point, so they are certified lower bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDeltaError, SolverDivergedError

__all__ = ["SolverConfig", "SigmaSolution", "project_simplex", "solve_sigma"]

_INV_LN2 = 1.0 / math.log(2.0)
_GRAD_FLOOR = 1e-30
_VALUE_FLOOR = 1e-300


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the ascent; defaults follow the package-wide contracts."""

    restarts: int = 64
    max_iters: int = 10_000
    tol: float = 1e-9
    seed: int = 0
    u_size: int = 2


@dataclass(frozen=True)
class SigmaSolution:
    value: float
    weights: np.ndarray
    conditionals: np.ndarray  # (u, x1, x2)
    slack: float
    restarts: int


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of a vector onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    cond = u - css / idx > 0
    rho = int(np.nonzero(cond)[0][-1])
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


class _Landscape:
    """Cached channel views: everything is indexed by flattened (x1, x2) cells."""

    def __init__(self, transition: np.ndarray):
        t = np.asarray(transition, dtype=np.float64)
        self.nx1, self.nx2, self.ny = t.shape
        self.cells = self.nx1 * self.nx2
        self.rows = t.reshape(self.cells, self.ny)
        self._row_mask = self.rows > 0.0
        self._row_log = np.where(self._row_mask, np.log2(np.maximum(self.rows, _VALUE_FLOOR)), 0.0)

    # -- exact evaluations (masked; no floors) --------------------------------

    def sum_info(self, q: np.ndarray) -> float:
        """I(X1,X2 ; Y) in bits for one joint input distribution q over cells."""
        r = q @ self.rows
        out_ent = float(-np.dot(r[r > 0.0], np.log2(r[r > 0.0])))
        cond_ent = float(np.dot(q, -np.sum(self.rows * self._row_log, axis=1)))
        return max(out_ent - cond_ent, 0.0)

    def dep_info(self, q: np.ndarray) -> float:
        """I(X1 ; X2) in bits for a joint over cells."""
        j = q.reshape(self.nx1, self.nx2)
        pa = j.sum(axis=1)
        pb = j.sum(axis=0)
        mask = j > 0.0
        if not mask.any():
            return 0.0
        ratio = j[mask] / np.outer(pa, pb)[mask]
        return max(float(np.dot(j[mask], np.log2(ratio))), 0.0)

    def averages(self, w: np.ndarray, Q: np.ndarray) -> tuple[float, float]:
        val = 0.0
        dep = 0.0
        for u in range(w.shape[0]):
            if w[u] > 0.0:
                val += w[u] * self.sum_info(Q[u])
                dep += w[u] * self.dep_info(Q[u])
        return val, dep

    # -- gradient pieces (floored logs so they stay finite) -------------------

    def sum_info_with_grad(self, q: np.ndarray) -> tuple[float, np.ndarray]:
        r = q @ self.rows
        lg = self._row_log - np.log2(np.maximum(r, _VALUE_FLOOR))[None, :]
        per_cell = np.sum(np.where(self._row_mask, self.rows * lg, 0.0), axis=1)
        val = float(np.dot(q, np.clip(per_cell, -1e12, 1e12)))
        return max(val, 0.0), per_cell - _INV_LN2

    def dep_info_with_grad(self, q: np.ndarray) -> tuple[float, np.ndarray]:
        j = q.reshape(self.nx1, self.nx2)
        pa = np.maximum(j.sum(axis=1), _GRAD_FLOOR)
        pb = np.maximum(j.sum(axis=0), _GRAD_FLOOR)
        lg = np.log2(np.maximum(j, _GRAD_FLOOR) / np.outer(pa, pb))
        val = float(np.sum(np.where(j > 0.0, j * lg, 0.0)))
        return max(val, 0.0), (lg - _INV_LN2).ravel()

    def product_point(self, q: np.ndarray) -> np.ndarray:
        j = q.reshape(self.nx1, self.nx2)
        return np.outer(j.sum(axis=1), j.sum(axis=0)).ravel()


def _penalized(land: _Landscape, w, Q, mu: float, delta: float) -> float:
    val, dep = land.averages(w, Q)
    gap = max(0.0, dep - delta)
    return val - mu * gap * gap


def _ascend(land, w, Q, delta, mu, iters, tol):
    """Backtracking projected gradient ascent on the penalized objective."""
    fcur = _penalized(land, w, Q, mu, delta)
    if not math.isfinite(fcur):
        raise SolverDivergedError("non-finite objective at ascent start")
    u_size = w.shape[0]
    step = 1.0
    stall = 0
    for _ in range(iters):
        fvals = np.empty(u_size)
        cvals = np.empty(u_size)
        gQ = np.empty_like(Q)
        cgrads = np.empty_like(Q)
        for u in range(u_size):
            fvals[u], gQ[u] = land.sum_info_with_grad(Q[u])
            cvals[u], cgrads[u] = land.dep_info_with_grad(Q[u])
        dep = float(w @ cvals)
        gap = max(0.0, dep - delta)
        for u in range(u_size):
            gQ[u] = w[u] * (gQ[u] - 2.0 * mu * gap * cgrads[u])
        gw = fvals - 2.0 * mu * gap * cvals if u_size > 1 else None

        accepted = False
        s = min(step * 2.0, 1e4)
        while s >= 1e-18:
            Qn = np.stack([project_simplex(Q[u] + s * gQ[u]) for u in range(u_size)])
            wn = project_simplex(w + s * gw) if gw is not None else w
            fn = _penalized(land, wn, Qn, mu, delta)
            if math.isfinite(fn) and fn > fcur + 1e-15:
                accepted = True
                break
            s *= 0.25
        if not accepted:
            break
        rel = (fn - fcur) / max(1.0, abs(fn))
        w, Q, fcur, step = wn, Qn, fn, s
        if rel < tol:
            stall += 1
            if stall >= 25:
                break
        else:
            stall = 0
    if not math.isfinite(fcur):
        raise SolverDivergedError("ascent diverged")
    return w, Q


def _blend_feasible(land, w, Q, delta):
    """Scale all components toward their conditional products until feasible.

    Along q_t = (1-t) * product + t * q the marginals are constant, so the
    dependence is convex in t, zero at t = 0, and therefore nondecreasing:
    bisection on t is exact.
    """
    prods = np.stack([land.product_point(Q[u]) for u in range(w.shape[0])])

    def mix(t: float) -> np.ndarray:
        return (1.0 - t) * prods + t * Q

    def dep_at(t: float) -> float:
        m = mix(t)
        return sum(float(w[u]) * land.dep_info(m[u]) for u in range(w.shape[0]))

    if dep_at(1.0) <= delta + 1e-12:
        return w, Q
    if delta <= 1e-15:
        return w, prods
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if dep_at(mid) <= delta:
            lo = mid
        else:
            hi = mid
    # lo always evaluated feasible above; re-check against fp drift
    for _ in range(8):
        if dep_at(lo) <= delta:
            return w, mix(lo)
        lo *= 0.5
    return w, prods


def _initial_point(rng: np.random.Generator, land: _Landscape, u_size: int, style: int):
    w = np.full(u_size, 1.0 / u_size)
    if style % 3 == 2:
        w = rng.dirichlet(np.ones(u_size)) if u_size > 1 else w
    Q = np.empty((u_size, land.cells))
    for u in range(u_size):
        if style % 3 == 0:
            Q[u] = rng.dirichlet(np.ones(land.cells))
        elif style % 3 == 1:
            Q[u] = np.outer(
                rng.dirichlet(np.ones(land.nx1)), rng.dirichlet(np.ones(land.nx2))
            ).ravel()
        else:
            Q[u] = rng.dirichlet(np.full(land.cells, 0.3))
    return w, Q


_MU_STAGES = (1e2, 1e4, 1e6)


def solve_sigma(transition: np.ndarray, delta: float, cfg: SolverConfig) -> SigmaSolution:
    """Best feasible point found across restarts; ties keep the earliest restart."""
    if delta < 0:
        raise InvalidDeltaError(f"dependence budget must be >= 0, got {delta}")
    if cfg.u_size < 1 or cfg.restarts < 1:
        raise InvalidDeltaError("u_size and restarts must be positive")
    land = _Landscape(transition)
    stage_iters = max(cfg.max_iters // len(_MU_STAGES), 10)

    best_val = -1.0
    best_point = None
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        w, Q = _initial_point(rng, land, cfg.u_size, r)
        for mu in _MU_STAGES:
            w, Q = _ascend(land, w, Q, delta, mu, stage_iters, cfg.tol)
            wf, Qf = _blend_feasible(land, w, Q, delta)
            val, dep = land.averages(wf, Qf)
            if dep <= delta + 1e-9 and val > best_val + 1e-15:
                best_val = val
                best_point = (wf, Qf)
    if best_point is None:
        raise SolverDivergedError("no feasible point found")

    w, Q = best_point
    value, dep = land.averages(w, Q)
    return SigmaSolution(
        value=float(value),
        weights=w,
        conditionals=Q.reshape(w.shape[0], land.nx1, land.nx2),
        slack=float(delta - dep),
        restarts=cfg.restarts,
    )
