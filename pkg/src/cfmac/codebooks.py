"""Codebooks over the four-letter first-sender alphabet, at two scales.

A codeword of blocklength ``n1`` is packed into an unsigned 64-bit integer,
two bits per coordinate, coordinate 0 in the lowest bits (symbol order
``a, b, A, B`` = 0..3).  Two interchangeable backends provide the same
lookup interface:

* :class:`ExplicitCodebook` materializes the words drawn by sequential
  rejection: independent uniform draws with repeats discarded, keeping the
  first occurrence of each distinct word.  Suited to at most a few million
  words.
* :class:`KeyedCodebook` realizes the codebook as the image of
  ``{0, .., m1-1}`` under a keyed Feistel permutation of the packed-word
  space, so membership is one inverse evaluation.  This supports sizes such
  as 2**40 that could never be stored, at the price of the words being
  pseudo-random rather than independent draws.

The decoder's inner loop — enumerate every ambiguous variant of a received
word and test membership — is compiled with numba when available; a
vectorized numpy path covers interpreters without it.
"""

from __future__ import annotations

import numpy as np

from .errors import TooManyCodewordsError, ValidationError
from .mac import X1_SYMBOLS

__all__ = [
    "ExplicitCodebook",
    "KeyedCodebook",
    "gen_codebook",
    "pack_x1_word",
    "unpack_x1_word",
    "word_to_str",
    "str_to_word",
    "spread_bits",
    "even_mask",
    "scan_hits",
    "HAVE_NUMBA",
]

_M64 = (1 << 64) - 1
_ROUNDS = 12
_EXPLICIT_CAP = 1 << 22

# Feistel round constants (64-bit odd multipliers from the splitmix64 finalizer).
_C1 = 0xBF58476D1CE4E5B9
_C2 = 0x94D049BB133111EB


# --- packed-word helpers --------------------------------------------------------


def pack_x1_word(word) -> int:
    """Pack symbol codes 0..3 into an int, coordinate 0 in the low two bits."""
    arr = np.asarray(word, dtype=np.int64)
    if arr.ndim != 1 or arr.size > 32:
        raise ValidationError("word must be one-dimensional with at most 32 symbols")
    if arr.size and (arr.min() < 0 or arr.max() > 3):
        raise ValidationError("symbol codes must lie in 0..3")
    out = 0
    for i, s in enumerate(arr):
        out |= int(s) << (2 * i)
    return out


def unpack_x1_word(x: int, n1: int) -> np.ndarray:
    """Inverse of :func:`pack_x1_word`."""
    return np.array([(x >> (2 * i)) & 3 for i in range(n1)], dtype=np.int64)


def word_to_str(x: int, n1: int) -> str:
    return "".join(X1_SYMBOLS[(x >> (2 * i)) & 3] for i in range(n1))


def str_to_word(s: str) -> int:
    out = 0
    for i, ch in enumerate(s):
        k = X1_SYMBOLS.find(ch)
        if k < 0:
            raise ValidationError(f"invalid codeword symbol {ch!r}")
        out |= k << (2 * i)
    return out


def even_mask(n1: int) -> int:
    """Bits 2i set for i in 0..n1-1 (the low bit of every packed symbol)."""
    return sum(1 << (2 * i) for i in range(n1))


_SPREAD_TABLE = np.zeros(256, dtype=np.uint64)
for _b in range(256):
    _v = 0
    for _j in range(8):
        if (_b >> _j) & 1:
            _v |= 1 << (2 * _j)
    _SPREAD_TABLE[_b] = _v


def spread_bits(v: int, n1: int) -> int:
    """Move bit i of ``v`` to bit 2i (an n1-bit mask into symbol low bits)."""
    v &= (1 << n1) - 1
    out = 0
    g = 0
    while v:
        out |= int(_SPREAD_TABLE[v & 0xFF]) << (16 * g)
        v >>= 8
        g += 1
    return out


# --- keyed permutation ----------------------------------------------------------


def _mix64(z: int) -> int:
    z &= _M64
    z = ((z ^ (z >> 30)) * _C1) & _M64
    z = ((z ^ (z >> 27)) * _C2) & _M64
    return (z ^ (z >> 31)) & _M64


def _feistel_keys(seed: int) -> np.ndarray:
    ss = np.random.SeedSequence([int(seed) & _M64, 0xFE157E1])
    return ss.generate_state(_ROUNDS, dtype=np.uint64)


def _encrypt_int(x: int, keys, n1: int) -> int:
    hm = (1 << n1) - 1
    lo, hi = x & hm, (x >> n1) & hm
    for k in keys:
        lo, hi = hi, lo ^ (_mix64(hi ^ int(k)) & hm)
    return (hi << n1) | lo


def _decrypt_int(y: int, keys, n1: int) -> int:
    hm = (1 << n1) - 1
    lo, hi = y & hm, (y >> n1) & hm
    for k in reversed(keys):
        lo, hi = hi ^ (_mix64(lo ^ int(k)) & hm), lo
    return (hi << n1) | lo


def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_C1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_C2)
    return z ^ (z >> np.uint64(31))


def _decrypt_np(y: np.ndarray, keys: np.ndarray, n1: int) -> np.ndarray:
    hm = np.uint64((1 << n1) - 1)
    sh = np.uint64(n1)
    lo = y & hm
    hi = (y >> sh) & hm
    with np.errstate(over="ignore"):
        for k in keys[::-1]:
            lo, hi = hi ^ (_mix64_np(lo ^ k) & hm), lo
    return (hi << sh) | lo


def _encrypt_np(x: np.ndarray, keys: np.ndarray, n1: int) -> np.ndarray:
    hm = np.uint64((1 << n1) - 1)
    sh = np.uint64(n1)
    lo = x & hm
    hi = (x >> sh) & hm
    with np.errstate(over="ignore"):
        for k in keys:
            lo, hi = hi, lo ^ (_mix64_np(hi ^ k) & hm)
    return (hi << sh) | lo


# --- compiled candidate scans ---------------------------------------------------

try:  # pragma: no cover - exercised implicitly on numba installs
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


if HAVE_NUMBA:

    @numba.njit(cache=True, nogil=True, inline="always")
    def _nb_decrypt(y, keys, n1):
        hm = (np.uint64(1) << np.uint64(n1)) - np.uint64(1)
        sh = np.uint64(n1)
        lo = y & hm
        hi = (y >> sh) & hm
        for i in range(keys.shape[0] - 1, -1, -1):
            z = lo ^ keys[i]
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_C1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_C2)
            z = z ^ (z >> np.uint64(31))
            lo, hi = hi ^ (z & hm), lo
        return (hi << sh) | lo

    @numba.njit(cache=True, nogil=True)
    def _nb_scan_keyed(base, spread, keys, n1, m1, out):
        count = 0
        x = base
        w = _nb_decrypt(x, keys, n1)
        if w < m1:
            if count < out.shape[0]:
                out[count] = np.int64(w)
            count += 1
        total = np.int64(1) << np.int64(spread.shape[0])
        for k in range(1, total):
            kk = k
            tz = 0
            while kk & 1 == 0:
                kk >>= 1
                tz += 1
            x = x ^ spread[tz]
            w = _nb_decrypt(x, keys, n1)
            if w < m1:
                if count < out.shape[0]:
                    out[count] = np.int64(w)
                count += 1
        return count

    @numba.njit(cache=True, nogil=True)
    def _nb_scan_explicit(base, spread, sorted_words, order, out):
        count = 0
        x = base
        total = np.int64(1) << np.int64(spread.shape[0])
        for k in range(total):
            if k > 0:
                kk = k
                tz = 0
                while kk & 1 == 0:
                    kk >>= 1
                    tz += 1
                x = x ^ spread[tz]
            lo = 0
            hi = sorted_words.shape[0]
            while lo < hi:
                mid = (lo + hi) >> 1
                if sorted_words[mid] < x:
                    lo = mid + 1
                else:
                    hi = mid
            if lo < sorted_words.shape[0] and sorted_words[lo] == x:
                if count < out.shape[0]:
                    out[count] = order[lo]
                count += 1
        return count


def _byte_tables(spread: np.ndarray) -> list[np.ndarray]:
    tables = []
    for g in range(0, spread.size, 8):
        chunk = spread[g : g + 8]
        t = np.zeros(256, dtype=np.uint64)
        for b in range(256):
            v = np.uint64(0)
            for j in range(chunk.size):
                if (b >> j) & 1:
                    v ^= chunk[j]
            t[b] = v
        tables.append(t)
    return tables


def _scan_numpy(codebook, base: int, spread: np.ndarray) -> np.ndarray:
    tables = _byte_tables(spread)
    total = 1 << spread.size
    hits = []
    for start in range(0, total, 1 << 18):
        ks = np.arange(start, min(start + (1 << 18), total), dtype=np.uint64)
        cand = np.full(ks.shape, np.uint64(base), dtype=np.uint64)
        for g, t in enumerate(tables):
            cand ^= t[((ks >> np.uint64(8 * g)) & np.uint64(255)).astype(np.int64)]
        w = codebook.lookup_ints(cand)
        hits.append(w[w >= 0])
    return np.concatenate(hits) if hits else np.empty(0, dtype=np.int64)


def scan_hits(codebook, base: int, spread_mask: int) -> np.ndarray:
    """Codeword indices among ``base`` xor every subset of ``spread_mask``.

    ``spread_mask`` may only occupy packed low-symbol bits (even positions);
    the scan covers all 2**popcount variants.  Returns sorted indices.
    """
    positions = []
    m = spread_mask
    while m:
        b = m & -m
        positions.append(b)
        m ^= b
    spread = np.array(positions, dtype=np.uint64)
    if HAVE_NUMBA:
        size = 1 << 12
        while True:
            out = np.empty(size, dtype=np.int64)
            count = codebook._nb_scan(np.uint64(base), spread, out)
            if count <= size:
                return np.sort(out[:count])
            size = int(count) + 16
    return np.sort(_scan_numpy(codebook, base, spread))


# --- backends -------------------------------------------------------------------


class ExplicitCodebook:
    """Materialized codebook: distinct uniform words in draw order."""

    backend = "explicit"

    def __init__(self, n1: int, words: np.ndarray, seed: int = -1):
        if not 1 <= n1 <= 32:
            raise ValidationError("n1 must be in 1..32")
        words = np.asarray(words, dtype=np.uint64)
        if words.ndim != 1 or words.size == 0:
            raise ValidationError("words must be a nonempty vector")
        if words.size != np.unique(words).size:
            raise ValidationError("codewords must be distinct")
        if int(words.max()) >= 1 << (2 * n1):
            raise ValidationError("packed codeword exceeds the word space")
        self.n1 = n1
        self.m1 = int(words.size)
        self.seed = seed
        self.words = words
        self._sort_idx = np.argsort(words, kind="stable")
        self._sorted = words[self._sort_idx]
        self._order = self._sort_idx.astype(np.int64)

    @classmethod
    def sample(cls, n1: int, m1: int, seed: int) -> "ExplicitCodebook":
        if m1 > _EXPLICIT_CAP:
            raise TooManyCodewordsError(
                f"m1 = {m1} exceeds the explicit-backend cap {_EXPLICIT_CAP}; use the keyed backend"
            )
        domain = 1 << (2 * n1)
        if m1 > domain:
            raise TooManyCodewordsError(f"m1 = {m1} exceeds the word space 4**{n1}")
        rng = np.random.default_rng([int(seed), 0xC0DEB00C])
        chunks: list[np.ndarray] = []
        total = 0
        for _ in range(200):
            batch = max(2 * m1, 1024)
            draw = rng.integers(0, domain - 1, size=batch, dtype=np.uint64, endpoint=True)
            chunks.append(draw)
            total += batch
            arr = np.concatenate(chunks)
            _, first = np.unique(arr, return_index=True)
            if first.size >= m1:
                keep = arr[np.sort(first)][:m1]
                return cls(n1, keep, seed=seed)
        raise TooManyCodewordsError(f"could not draw {m1} distinct words")  # pragma: no cover

    def codeword_int(self, w: int) -> int:
        return int(self.words[w])

    def contains_int(self, x: int) -> int:
        j = int(np.searchsorted(self._sorted, np.uint64(x)))
        if j < self.m1 and int(self._sorted[j]) == x:
            return int(self._order[j])
        return -1

    def lookup_ints(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.uint64)
        j = np.searchsorted(self._sorted, xs)
        j = np.minimum(j, self.m1 - 1)
        hit = self._sorted[j] == xs
        out = np.where(hit, self._order[j], np.int64(-1))
        return out.astype(np.int64)

    def _nb_scan(self, base, spread, out):
        return _nb_scan_explicit(base, spread, self._sorted, self._order, out)

    def dump(self, path: str) -> None:
        with open(path, "w", encoding="ascii") as fh:
            for w in self.words:
                fh.write(word_to_str(int(w), self.n1) + "\n")

    @classmethod
    def load(cls, path: str) -> "ExplicitCodebook":
        words = []
        n1 = None
        with open(path, "r", encoding="ascii") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if n1 is None:
                    n1 = len(line)
                elif len(line) != n1:
                    raise ValidationError("codeword lines must share one length")
                words.append(str_to_word(line))
        if n1 is None:
            raise ValidationError("codebook file holds no codewords")
        return cls(n1, np.array(words, dtype=np.uint64))


class KeyedCodebook:
    """Codebook as a keyed permutation image; membership via one inverse."""

    backend = "keyed"

    def __init__(self, n1: int, m1: int, seed: int):
        if not 1 <= n1 <= 32:
            raise ValidationError("n1 must be in 1..32")
        if not 1 <= m1 <= 1 << (2 * n1):
            raise TooManyCodewordsError(f"m1 = {m1} exceeds the word space 4**{n1}")
        self.n1 = n1
        self.m1 = int(m1)
        self.seed = int(seed)
        self.keys = _feistel_keys(seed)

    def codeword_int(self, w: int) -> int:
        if not 0 <= w < self.m1:
            raise ValidationError(f"codeword index {w} out of range")
        return _encrypt_int(w, self.keys, self.n1)

    def codeword_ints(self, ws: np.ndarray) -> np.ndarray:
        return _encrypt_np(np.asarray(ws, dtype=np.uint64), self.keys, self.n1)

    def contains_int(self, x: int) -> int:
        w = _decrypt_int(x, self.keys, self.n1)
        return w if w < self.m1 else -1

    def lookup_ints(self, xs: np.ndarray) -> np.ndarray:
        w = _decrypt_np(np.asarray(xs, dtype=np.uint64), self.keys, self.n1)
        return np.where(w < np.uint64(self.m1), w.astype(np.int64), np.int64(-1))

    def _nb_scan(self, base, spread, out):
        return _nb_scan_keyed(base, spread, self.keys, self.n1, np.uint64(self.m1), out)


def gen_codebook(n1: int, m1: int, seed: int, backend: str = "auto"):
    """Build a codebook of ``m1`` words of length ``n1``.

    ``backend`` is ``"explicit"``, ``"keyed"``, or ``"auto"`` (explicit up
    to 2**20 words, keyed beyond).
    """
    if m1 < 1:
        raise ValidationError("m1 must be positive")
    if n1 < 1 or n1 > 32:
        raise ValidationError("n1 must be in 1..32")
    if m1 > 1 << (2 * n1):
        raise TooManyCodewordsError(f"m1 = {m1} exceeds the word space 4**{n1}")
    if backend == "auto":
        backend = "explicit" if m1 <= (1 << 20) else "keyed"
    if backend == "explicit":
        return ExplicitCodebook.sample(n1, m1, seed)
    if backend == "keyed":
        return KeyedCodebook(n1, m1, seed)
    raise ValidationError(f"unknown backend {backend!r}")
