import numpy as np
import pytest

from cfmac import ExplicitCodebook, KeyedCodebook, gen_codebook
from cfmac.codebooks import (
    HAVE_NUMBA,
    _scan_numpy,
    even_mask,
    pack_x1_word,
    scan_hits,
    spread_bits,
    str_to_word,
    unpack_x1_word,
    word_to_str,
)
from cfmac.errors import TooManyCodewordsError, ValidationError


# --- packing --------------------------------------------------------------------


def test_pack_round_trip():
    word = np.array([0, 1, 2, 3])
    x = pack_x1_word(word)
    assert x == 0 | (1 << 2) | (2 << 4) | (3 << 6)
    np.testing.assert_array_equal(unpack_x1_word(x, 4), word)
    assert word_to_str(x, 4) == "abAB"
    assert str_to_word("abAB") == x
    rng = np.random.default_rng(2)
    for _ in range(20):
        n1 = int(rng.integers(1, 33))
        w = rng.integers(0, 4, size=n1)
        np.testing.assert_array_equal(unpack_x1_word(pack_x1_word(w), n1), w)


def test_pack_validation():
    with pytest.raises(ValidationError):
        pack_x1_word([4])
    with pytest.raises(ValidationError):
        pack_x1_word(np.zeros(33, dtype=int))
    with pytest.raises(ValidationError):
        str_to_word("abq")


def test_masks():
    assert even_mask(3) == 0b010101
    assert spread_bits(0b101, 3) == 0b010001
    assert spread_bits(0b1, 1) == 1
    # Bits beyond n1 are dropped.
    assert spread_bits(0b1111, 2) == 0b0101
    # Table-driven spreading agrees with the direct definition for wide masks.
    v = 0b1_0000_0001_0001_0011
    want = sum(1 << (2 * i) for i in range(20) if (v >> i) & 1)
    assert spread_bits(v, 20) == want


# --- explicit backend -------------------------------------------------------------


def test_explicit_sample_basics():
    cb = ExplicitCodebook.sample(6, 500, seed=3)
    assert cb.backend == "explicit"
    assert cb.m1 == 500 and cb.n1 == 6
    assert np.unique(cb.words).size == 500
    assert int(cb.words.max()) < 4**6
    # Draw order is preserved as the codeword index.
    for w in (0, 17, 499):
        assert cb.codeword_int(w) == int(cb.words[w])
        assert cb.contains_int(cb.codeword_int(w)) == w
    # Stable under the seed, different across seeds.
    again = ExplicitCodebook.sample(6, 500, seed=3)
    np.testing.assert_array_equal(cb.words, again.words)
    other = ExplicitCodebook.sample(6, 500, seed=4)
    assert not np.array_equal(cb.words, other.words)


def test_explicit_full_space():
    # Requesting the whole word space forces the dedupe loop to work hard.
    cb = ExplicitCodebook.sample(2, 16, seed=0)
    np.testing.assert_array_equal(np.sort(cb.words), np.arange(16, dtype=np.uint64))


def test_explicit_lookup_and_misses():
    cb = ExplicitCodebook.sample(4, 40, seed=1)
    missing = [x for x in range(4**4) if x not in set(cb.words.tolist())]
    assert cb.contains_int(missing[0]) == -1
    xs = np.array([cb.codeword_int(5), missing[0], cb.codeword_int(0)], dtype=np.uint64)
    np.testing.assert_array_equal(cb.lookup_ints(xs), [5, -1, 0])


def test_explicit_validation():
    with pytest.raises(ValidationError):
        ExplicitCodebook(2, np.array([1, 1], dtype=np.uint64))  # duplicate
    with pytest.raises(ValidationError):
        ExplicitCodebook(2, np.array([16], dtype=np.uint64))  # out of space
    with pytest.raises(ValidationError):
        ExplicitCodebook(2, np.array([], dtype=np.uint64))
    with pytest.raises(TooManyCodewordsError):
        ExplicitCodebook.sample(2, 17, seed=0)
    with pytest.raises(TooManyCodewordsError):
        ExplicitCodebook.sample(32, (1 << 22) + 1, seed=0)


def test_explicit_dump_load_round_trip(tmp_path):
    cb = ExplicitCodebook.sample(5, 64, seed=9)
    path = tmp_path / "codebook.txt"
    cb.dump(path)
    lines = path.read_text().splitlines()
    assert len(lines) == 64
    assert all(len(line) == 5 and set(line) <= set("abAB") for line in lines)
    back = ExplicitCodebook.load(path)
    assert back.n1 == 5
    np.testing.assert_array_equal(back.words, cb.words)
    with pytest.raises(ValidationError):
        bad = tmp_path / "bad.txt"
        bad.write_text("ab\nabA\n")
        ExplicitCodebook.load(bad)


# --- keyed backend ----------------------------------------------------------------


def test_keyed_is_a_permutation():
    cb = KeyedCodebook(4, 4**4, seed=11)
    images = cb.codeword_ints(np.arange(4**4, dtype=np.uint64))
    np.testing.assert_array_equal(np.sort(images), np.arange(4**4, dtype=np.uint64))


def test_keyed_scalar_batch_agree():
    cb = KeyedCodebook(9, 5000, seed=7)
    ws = np.array([0, 1, 17, 4999], dtype=np.uint64)
    batch = cb.codeword_ints(ws)
    for w, x in zip(ws, batch):
        assert cb.codeword_int(int(w)) == int(x)
        assert cb.contains_int(int(x)) == int(w)
    # Everything decrypting to >= m1 is a miss.
    misses = 0
    for x in range(200):
        if cb.contains_int(x) == -1:
            misses += 1
    assert misses > 0
    xs = np.arange(200, dtype=np.uint64)
    looked = cb.lookup_ints(xs)
    assert int((looked == -1).sum()) == misses


def test_keyed_seed_sensitivity_and_validation():
    a = KeyedCodebook(8, 100, seed=1)
    b = KeyedCodebook(8, 100, seed=2)
    wa = a.codeword_ints(np.arange(100, dtype=np.uint64))
    wb = b.codeword_ints(np.arange(100, dtype=np.uint64))
    assert not np.array_equal(wa, wb)
    with pytest.raises(TooManyCodewordsError):
        KeyedCodebook(2, 17, seed=0)
    with pytest.raises(ValidationError):
        KeyedCodebook(0, 1, seed=0)
    with pytest.raises(ValidationError):
        a.codeword_int(100)


def test_keyed_supports_huge_spaces():
    cb = KeyedCodebook(32, 1 << 40, seed=5)
    x = cb.codeword_int((1 << 40) - 1)
    assert 0 <= x < 1 << 64
    assert cb.contains_int(x) == (1 << 40) - 1


# --- candidate scans --------------------------------------------------------------


def _brute_hits(cb, base: int, mask: int) -> np.ndarray:
    bits = [1 << i for i in range(64) if (mask >> i) & 1]
    hits = []
    for k in range(1 << len(bits)):
        x = base
        for j, b in enumerate(bits):
            if (k >> j) & 1:
                x ^= b
        w = cb.contains_int(x)
        if w >= 0:
            hits.append(w)
    return np.sort(np.array(hits, dtype=np.int64))


@pytest.mark.parametrize("backend", ["explicit", "keyed"])
def test_scan_hits_matches_brute_force(backend):
    rng = np.random.default_rng(23)
    cb = gen_codebook(7, 3000, seed=2, backend=backend)
    for _ in range(10):
        base = int(rng.integers(0, 4**7))
        k = int(rng.integers(0, 8))
        positions = rng.choice(7, size=k, replace=False)
        mask = sum(1 << (2 * int(i)) for i in positions)
        base &= ~mask  # low bits of scanned coordinates start cleared
        np.testing.assert_array_equal(scan_hits(cb, base, mask), _brute_hits(cb, base, mask))


@pytest.mark.parametrize("backend", ["explicit", "keyed"])
def test_numpy_scan_agrees(backend):
    rng = np.random.default_rng(29)
    cb = gen_codebook(6, 800, seed=4, backend=backend)
    for _ in range(5):
        base = int(rng.integers(0, 4**6))
        mask = spread_bits(int(rng.integers(0, 1 << 6)), 6)
        base &= ~mask
        spread = np.array(
            [1 << i for i in range(64) if (mask >> i) & 1], dtype=np.uint64
        )
        got = np.sort(_scan_numpy(cb, base, spread))
        np.testing.assert_array_equal(got, _brute_hits(cb, base, mask))


def test_scan_hits_grows_its_buffer():
    # A dense codebook makes every candidate hit: 2**16 results exceed the
    # scan's initial buffer, forcing the enlarge-and-retry path.
    cb = KeyedCodebook(16, 4**16, seed=3)  # every word is a codeword
    mask = even_mask(16)
    hits = scan_hits(cb, 0, mask)
    assert hits.size == 1 << 16
    assert np.unique(hits).size == hits.size


def test_gen_codebook_dispatch():
    assert gen_codebook(10, 1 << 10, seed=0).backend == "explicit"
    assert gen_codebook(16, (1 << 20) + 1, seed=0).backend == "keyed"
    assert gen_codebook(12, 100, seed=0, backend="keyed").backend == "keyed"
    with pytest.raises(ValidationError):
        gen_codebook(4, 1, seed=0, backend="bogus")
    with pytest.raises(ValidationError):
        gen_codebook(4, 0, seed=0)
    with pytest.raises(TooManyCodewordsError):
        gen_codebook(3, 4**3 + 1, seed=0)
