"""Two-phase coding with a constant number of conference bits.

Phase 1 (``n1`` channel uses) carries the payload: sender 1 transmits a
codeword over ``a, b, A, B``; sender 2 transmits its ``n1``-bit message,
possibly complemented.  The second channel output reveals sender 2's word
exactly, while sender 1's word is received with ambiguous coordinates
wherever the two inputs collide (lowercase against 0, uppercase against 1).
Complementing sender 2's word when more than half the coordinates would
collide keeps the ambiguity below half the block — that choice is the first
conference bit.  The receiver then forms a short list of message pairs
consistent with the channel output and the complement rule; the remaining
conference bits carry the true pair's position in that list, which sender 2
transmits noiselessly during phase 2 (``n2 = n - n1`` uses).

Message sizes are ``m1 = 2**floor((1.5 - delta) * n1)`` and ``m2 = 2**n1``,
the list cap is ``ell = 2 * ceil(3 / delta)``, and the conference uses
``k = ceil(log2 ell) + 1`` bits total, independent of the blocklength.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .codebooks import even_mask, gen_codebook, spread_bits, scan_hits, unpack_x1_word
from .errors import (
    BadOutputError,
    DegenerateRatesError,
    ExhaustiveCapExceededError,
    IndexOutOfListError,
    InvalidDeltaError,
    ListOverflowError,
    Phase2TooShortError,
    ValidationError,
)

__all__ = [
    "SchemeParams",
    "derive_params",
    "CfOutput",
    "ListDecodeResult",
    "SchemeStats",
    "psi2",
    "encode",
    "list_decode_phase1",
    "decode",
    "run_scheme",
    "claim1_check",
    "claim2_stats",
]

_EXHAUSTIVE_CAP = 1 << 26


@dataclass(frozen=True)
class SchemeParams:
    """Derived blocklengths, message sizes, and conference budget."""

    n: int
    epsilon: float
    delta: float
    n1: int
    n2: int
    log2_m1: int
    log2_m2: int
    ell: int
    k: int

    @property
    def m1(self) -> int:
        return 1 << self.log2_m1

    @property
    def m2(self) -> int:
        return 1 << self.log2_m2

    @property
    def rate_sum(self) -> float:
        """(log2 m1 + log2 m2) / n, the sum rate over the full block."""
        return (self.log2_m1 + self.log2_m2) / self.n

    @property
    def rate_sum_phase1(self) -> float:
        """(log2 m1 + log2 m2) / n1, the payload rate per phase-1 use."""
        return (self.log2_m1 + self.log2_m2) / self.n1


def derive_params(n: int, epsilon: float, delta: float) -> SchemeParams:
    """Resolve the scheme configuration for a total blocklength ``n``.

    Raises :class:`Phase2TooShortError` when phase 2 cannot carry the list
    index, and :class:`DegenerateRatesError` when the first message set
    would collapse.
    """
    if n < 2:
        raise ValidationError("n must be at least 2")
    if not 0.0 < epsilon < 1.0:
        raise ValidationError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0.0 < delta < 1.5:
        raise InvalidDeltaError(f"delta must lie in (0, 1.5), got {delta}")
    n2 = math.ceil(epsilon * n)
    n1 = n - n2
    if n1 < 1:
        raise DegenerateRatesError("no phase-1 uses remain")
    log2_m1 = math.floor((1.5 - delta) * n1)
    if log2_m1 < 1:
        raise DegenerateRatesError(f"first message set degenerates (exponent {log2_m1})")
    ell = 2 * math.ceil(3.0 / delta)
    k = math.ceil(math.log2(ell)) + 1
    if n2 < k - 1:
        raise Phase2TooShortError(
            f"phase 2 has {n2} uses but the list index needs {k - 1}"
        )
    return SchemeParams(
        n=n,
        epsilon=float(epsilon),
        delta=float(delta),
        n1=n1,
        n2=n2,
        log2_m1=log2_m1,
        log2_m2=n1,
        ell=ell,
        k=k,
    )


@dataclass(frozen=True)
class ListDecodeResult:
    """Phase-1 list: message pairs consistent with the received block."""

    entries: tuple[tuple[int, int], ...]
    e_obs: int
    hits: int
    overflow: bool


@dataclass(frozen=True)
class CfOutput:
    """Everything both senders emit for one message pair."""

    w1: int
    w2: int
    psi21: int
    psi22: int
    x1_codes: np.ndarray
    x2_bits: np.ndarray
    list_size: int

    def conference_message(self, params: SchemeParams) -> int:
        """The full conference word: flip bit above the index bits."""
        return (self.psi21 << (params.k - 1)) | self.psi22


def _phase1_state(codebook, params: SchemeParams, w1: int, w2: int):
    """Encoder-side phase-1 quantities, all as packed integers."""
    n1 = params.n1
    em = even_mask(n1)
    full = (1 << n1) - 1
    x1p = codebook.codeword_int(w1)
    hb = (x1p >> 1) & em
    mask_u = ~(hb ^ spread_bits(w2, n1)) & em
    e_u = mask_u.bit_count()
    flip = 2 * e_u > n1
    if flip:
        v = w2 ^ full
        mask_obs = em ^ mask_u
        e_obs = n1 - e_u
    else:
        v = w2
        mask_obs = mask_u
        e_obs = e_u
    base = x1p & ~mask_obs
    return x1p, v, base, mask_obs, e_obs, flip


def _assemble_list(
    codebook, params: SchemeParams, base: int, mask_obs: int, e_obs: int, v: int
) -> ListDecodeResult:
    n1 = params.n1
    full = (1 << n1) - 1
    hits = scan_hits(codebook, base, mask_obs)
    hyps = [v] if 2 * e_obs == n1 else sorted((v, v ^ full))
    entries = tuple(
        (int(w), int(h)) for w in hits for h in hyps
    )
    entries = tuple(sorted(entries))
    return ListDecodeResult(
        entries=entries,
        e_obs=e_obs,
        hits=int(hits.size),
        overflow=len(entries) > params.ell,
    )


def psi2(codebook, params: SchemeParams, w1: int, w2: int) -> tuple[int, int]:
    """Conference message for one pair: (flip bit, list index).

    Raises :class:`ListOverflowError` when the consistency list exceeds the
    cap ``ell`` and the index no longer fits the conference budget.
    """
    _, v, base, mask_obs, e_obs, flip = _phase1_state(codebook, params, w1, w2)
    res = _assemble_list(codebook, params, base, mask_obs, e_obs, v)
    if res.overflow:
        err = ListOverflowError(
            f"consistency list holds {len(res.entries)} entries, cap is {params.ell}"
        )
        err.list_size = len(res.entries)
        raise err
    return int(flip), res.entries.index((w1, w2))


def encode(codebook, params: SchemeParams, w1: int, w2: int) -> CfOutput:
    """Both senders' transmitted words for one message pair."""
    if not 0 <= w1 < params.m1:
        raise ValidationError(f"w1 = {w1} out of range for m1 = {params.m1}")
    if not 0 <= w2 < params.m2:
        raise ValidationError(f"w2 = {w2} out of range for m2 = {params.m2}")
    x1p, v, base, mask_obs, e_obs, flip = _phase1_state(codebook, params, w1, w2)
    res = _assemble_list(codebook, params, base, mask_obs, e_obs, v)
    if res.overflow:
        err = ListOverflowError(
            f"consistency list holds {len(res.entries)} entries, cap is {params.ell}"
        )
        err.list_size = len(res.entries)
        raise err
    index = res.entries.index((w1, w2))

    x1_codes = np.zeros(params.n, dtype=np.int64)
    x1_codes[: params.n1] = unpack_x1_word(x1p, params.n1)
    x2_bits = np.zeros(params.n, dtype=np.int64)
    for i in range(params.n1):
        x2_bits[i] = (v >> i) & 1
    kk = params.k - 1
    for j in range(kk):
        x2_bits[params.n - kk + j] = (index >> (kk - 1 - j)) & 1
    return CfOutput(
        w1=w1,
        w2=w2,
        psi21=int(flip),
        psi22=index,
        x1_codes=x1_codes,
        x2_bits=x2_bits,
        list_size=len(res.entries),
    )


def list_decode_phase1(codebook, params: SchemeParams, y1_codes, y2_bits) -> ListDecodeResult:
    """Reconstruct the consistency list from the phase-1 channel output."""
    y1 = np.asarray(y1_codes, dtype=np.int64)
    y2 = np.asarray(y2_bits, dtype=np.int64)
    n1 = params.n1
    if y1.shape != (n1,) or y2.shape != (n1,):
        raise ValidationError(f"phase-1 outputs must have length {n1}")
    if y1.min() < 0 or y1.max() > 5 or np.any((y2 != 0) & (y2 != 1)):
        raise BadOutputError("phase-1 output symbols out of range")
    erased = (y1 == 2) | (y1 == 5)
    e_obs = int(erased.sum())
    if 2 * e_obs > n1:
        raise BadOutputError(
            f"{e_obs} ambiguous coordinates in {n1} uses cannot arise from a complying encoder"
        )
    x2_implied = np.where(erased, (y1 == 5).astype(np.int64), (y1 <= 1).astype(np.int64))
    if np.any(x2_implied != y2):
        raise BadOutputError("second output word contradicts the first")
    hb = (y1 >= 3).astype(np.int64)
    low = ((y1 == 1) | (y1 == 4)).astype(np.int64)
    base = 0
    mask_obs = 0
    v = 0
    for i in range(n1):
        base |= (int(low[i]) << (2 * i)) | (int(hb[i]) << (2 * i + 1))
        if erased[i]:
            mask_obs |= 1 << (2 * i)
        v |= int(y2[i]) << i
    return _assemble_list(codebook, params, base, mask_obs, e_obs, v)


def decode(codebook, params: SchemeParams, y1_codes, y2_bits) -> tuple[int, int]:
    """Full receiver: phase-1 list plus the phase-2 index bits."""
    y1 = np.asarray(y1_codes, dtype=np.int64)
    y2 = np.asarray(y2_bits, dtype=np.int64)
    if y1.shape != (params.n,) or y2.shape != (params.n,):
        raise ValidationError(f"outputs must have length {params.n}")
    res = list_decode_phase1(codebook, params, y1[: params.n1], y2[: params.n1])
    kk = params.k - 1
    index = 0
    for j in range(kk):
        index = (index << 1) | int(y2[params.n - kk + j])
    if index >= len(res.entries):
        raise IndexOutOfListError(
            f"index {index} with only {len(res.entries)} consistent pairs"
        )
    return res.entries[index]


# --- simulation -----------------------------------------------------------------


@dataclass(frozen=True)
class SchemeStats:
    """Round-trip statistics over a set of message pairs.

    The serialized form intentionally omits the worker count: reports are
    required to be byte-identical however the work was split.
    """

    params: SchemeParams
    mode: str
    pairs_tested: int
    decode_errors: int
    overflow_count: int
    in_list_count: int
    good_count: int
    max_list_size: int
    histogram: dict[int, int] = field(compare=False)
    p_avg_estimate: float = 0.0
    p_max_estimate: float = 0.0
    workers: int = 1

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "pairs_tested": self.pairs_tested,
            "decode_errors": self.decode_errors,
            "overflow_count": self.overflow_count,
            "in_list_count": self.in_list_count,
            "good_count": self.good_count,
            "max_list_size": self.max_list_size,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "p_avg_estimate": self.p_avg_estimate,
            "p_max_estimate": self.p_max_estimate,
        }


def _roundtrip_chunk(codebook, params: SchemeParams, w1s, w2s):
    """Encode, pass through the noiseless channel, list-decode, compare."""
    errors = 0
    overflow = 0
    in_list = 0
    good = 0
    max_list = 0
    hist: dict[int, int] = {}
    for w1, w2 in zip(w1s, w2s):
        w1 = int(w1)
        w2 = int(w2)
        _, v, base, mask_obs, e_obs, _ = _phase1_state(codebook, params, w1, w2)
        res = _assemble_list(codebook, params, base, mask_obs, e_obs, v)
        if 2 * e_obs <= params.n1:
            good += 1
        size = len(res.entries)
        hist[size] = hist.get(size, 0) + 1
        if size > max_list:
            max_list = size
        if (w1, w2) in res.entries:
            in_list += 1
        else:
            errors += 1
            continue
        if res.overflow:
            overflow += 1
            errors += 1
    return errors, overflow, in_list, good, max_list, hist


def run_scheme(
    codebook,
    params: SchemeParams,
    mode: str = "sample",
    samples: int = 10_000,
    seed: int = 0,
    workers: int = 1,
) -> SchemeStats:
    """Drive the scheme over message pairs and tally decode failures.

    ``mode="exhaustive"`` walks every pair (capped at 2**26);
    ``mode="sample"`` draws pairs uniformly.  Sampled pairs are generated
    up front from the seed, so results do not depend on ``workers``.
    """
    if workers < 1:
        raise ValidationError("workers must be positive")
    if mode == "exhaustive":
        total = params.m1 * params.m2
        if total > _EXHAUSTIVE_CAP:
            raise ExhaustiveCapExceededError(
                f"{total} pairs exceed the exhaustive cap {_EXHAUSTIVE_CAP}"
            )
        flat = np.arange(total, dtype=np.uint64)
        w1s = flat // np.uint64(params.m2)
        w2s = flat % np.uint64(params.m2)
    elif mode == "sample":
        if samples < 1:
            raise ValidationError("samples must be positive")
        rng = np.random.default_rng([int(seed), 0xD0E5A3])
        w1s = rng.integers(0, params.m1 - 1, size=samples, dtype=np.uint64, endpoint=True)
        w2s = rng.integers(0, params.m2 - 1, size=samples, dtype=np.uint64, endpoint=True)
        total = samples
    else:
        raise ValidationError(f"unknown mode {mode!r}")

    n_chunks = max(1, min(8 * workers, total))
    bounds_ = np.linspace(0, total, n_chunks + 1).astype(np.int64)
    chunks = [(w1s[a:b], w2s[a:b]) for a, b in zip(bounds_[:-1], bounds_[1:]) if b > a]
    if workers == 1:
        results = [_roundtrip_chunk(codebook, params, a, b) for a, b in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_roundtrip_chunk, codebook, params, a, b) for a, b in chunks
            ]
            results = [f.result() for f in futures]

    errors = 0
    overflow = 0
    in_list = 0
    good = 0
    max_list = 0
    hist: dict[int, int] = {}
    for e, o, il, g, m, h in results:
        errors += e
        overflow += o
        in_list += il
        good += g
        max_list = max(max_list, m)
        for kk, vv in h.items():
            hist[kk] = hist.get(kk, 0) + vv
    return SchemeStats(
        params=params,
        mode=mode,
        pairs_tested=int(total),
        decode_errors=errors,
        overflow_count=overflow,
        in_list_count=in_list,
        good_count=good,
        max_list_size=max_list,
        histogram=hist,
        p_avg_estimate=errors / total,
        p_max_estimate=1.0 if errors else 0.0,
        workers=workers,
    )


def claim1_check(n1_values=(12, 33), samples: int = 100_000, seed: int = 0) -> dict:
    """Verify that a bad block always turns good under complementation.

    Per symbol: for each first-sender letter, exactly one of the two
    second-sender values collides into an ambiguous output.  Per block: if
    more than half the coordinates of ``(x1_word, w2)`` collide, then under
    the complemented word ``~w2`` at most half do.  Returns the per-symbol
    verdict and, per blocklength, the number of sampled words that were bad
    and the number of counterexamples (bad both ways) — which must be zero.
    """
    from .mac import DUECK_W1, Y1_ERASURES

    per_symbol_ok = all(
        sum(int(DUECK_W1[x1, x2] in Y1_ERASURES) for x2 in (0, 1)) == 1
        for x1 in range(4)
    )
    blocks = {}
    for n1 in n1_values:
        rng = np.random.default_rng([int(seed), 0xC1A1, int(n1)])
        x1 = rng.integers(0, 4, size=(samples, n1))
        x2 = rng.integers(0, 2, size=(samples, n1))
        e = (((x1 >= 2).astype(np.int64)) == x2).sum(axis=1)
        bad = 2 * e > n1
        complement_bad = 2 * (n1 - e) > n1
        blocks[int(n1)] = {
            "samples": int(samples),
            "bad_count": int(bad.sum()),
            "counterexamples": int((bad & complement_bad).sum()),
        }
    return {"per_symbol_ok": per_symbol_ok, "blocks": blocks}


def claim2_stats(
    codebook,
    params: SchemeParams,
    samples: int = 10_000,
    seed: int = 0,
    workers: int = 1,
) -> dict:
    """Size statistics of the codeword-ambiguity set over random pairs.

    For each sampled pair, counts the codewords consistent with the phase-1
    output (always at least one, the true word).  Conditioned on ``e``
    ambiguous coordinates the exact expected count is
    ``1 + (m1 - 1) (2**e - 1) / (4**n1 - 1)``; the cruder estimate
    ``m1 * 2**(e - 2 n1)`` ignores the guaranteed hit.  Both are averaged
    over the sampled outputs for comparison with the empirical mean.
    """
    if samples < 2:
        raise ValidationError("samples must be at least 2")
    rng = np.random.default_rng([int(seed), 0xC1A2])
    w1s = rng.integers(0, params.m1 - 1, size=samples, dtype=np.uint64, endpoint=True)
    w2s = rng.integers(0, params.m2 - 1, size=samples, dtype=np.uint64, endpoint=True)

    def chunk_stats(w1c, w2c):
        hits_list = []
        sizes = []
        e_list = []
        for w1, w2 in zip(w1c, w2c):
            _, v, base, mask_obs, e_obs, _ = _phase1_state(codebook, params, int(w1), int(w2))
            res = _assemble_list(codebook, params, base, mask_obs, e_obs, v)
            hits_list.append(res.hits)
            sizes.append(len(res.entries))
            e_list.append(e_obs)
        return hits_list, sizes, e_list

    total = samples
    n_chunks = max(1, min(8 * workers, total))
    bounds_ = np.linspace(0, total, n_chunks + 1).astype(np.int64)
    chunks = [(w1s[a:b], w2s[a:b]) for a, b in zip(bounds_[:-1], bounds_[1:]) if b > a]
    if workers == 1:
        parts = [chunk_stats(a, b) for a, b in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(chunk_stats, a, b) for a, b in chunks]
            parts = [f.result() for f in futures]

    hits = np.concatenate([np.array(p[0], dtype=np.float64) for p in parts])
    sizes = np.concatenate([np.array(p[1], dtype=np.int64) for p in parts])
    e_obs = np.concatenate([np.array(p[2], dtype=np.float64) for p in parts])

    n1 = params.n1
    m1 = params.m1
    cond_mean = 1.0 + (m1 - 1) * (np.exp2(e_obs) - 1.0) / (4.0**n1 - 1.0)
    excess = hits - cond_mean
    crude_mean = float(np.mean(m1 * np.exp2(e_obs - 2.0 * n1)))
    half_cap = math.ceil(3.0 / params.delta)
    hist: dict[int, int] = {}
    for s in sizes:
        hist[int(s)] = hist.get(int(s), 0) + 1
    return {
        "samples": int(samples),
        "mean_hits": float(hits.mean()),
        "stderr_hits": float(hits.std(ddof=1) / math.sqrt(samples)),
        "exact_mean_hits": float(cond_mean.mean()),
        "crude_mean_hits": crude_mean,
        "mean_excess_over_analytic": float(excess.mean()),
        "stderr_excess": float(excess.std(ddof=1) / math.sqrt(samples)),
        "mean_list_size": float(sizes.mean()),
        "max_list_size": int(sizes.max()),
        "frac_hits_above_half_cap": float(np.mean(hits > half_cap)),
        "frac_list_overflow": float(np.mean(sizes > params.ell)),
        "histogram": hist,
        "mean_e_obs": float(e_obs.mean()),
    }
