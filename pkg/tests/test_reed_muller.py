import itertools

import numpy as np
import pytest

from rkem.codes import ALL_CODES, Labeling, build_codebook, decode, decode_many, random_labeling
from rkem.codes.reed_muller import correction_radius, generator_matrix
from rkem.errors import DecodeFailure, FormatError, ParamError
from rkem.randomness import Stream, make_rng


@pytest.mark.parametrize("v,n,f,t", [(3, 8, 14, 1), (4, 16, 30, 3), (5, 32, 62, 7)])
def test_codebook_shape(v, n, f, t):
    book = build_codebook(v)
    assert (book.n, book.f, book.t) == (n, f, t)
    assert book.words.shape == (f, n)
    assert np.all(book.words.sum(axis=1) == n // 2)
    assert len({w.tobytes() for w in book.words}) == f


@pytest.mark.parametrize("v", [3, 4, 5])
def test_punctured_minimum_distance(v):
    book = build_codebook(v)
    n = book.n
    for cut in range(n):
        coords = [c for c in range(n) if c != cut]
        dist = book.pairwise_distances(coords)
        off = dist[~np.eye(book.f, dtype=bool)]
        assert off.min() == n // 2 - 1
        assert 2 * book.t + 1 <= off.min()


def test_generator_rows():
    gen = generator_matrix(3)
    assert gen.shape == (4, 8)
    assert gen[0].tolist() == [1] * 8
    assert gen[1].tolist() == [0, 1, 0, 1, 0, 1, 0, 1]
    assert correction_radius(4) == 3


def test_out_of_range_v():
    with pytest.raises(ParamError):
        build_codebook(2)
    with pytest.raises(ParamError):
        build_codebook(7)
    assert ALL_CODES["reed_muller"] is build_codebook


def _error_patterns(n: int, t: int) -> np.ndarray:
    rows = [()] + [combo for w in range(1, t + 1) for combo in itertools.combinations(range(n), w)]
    patterns = np.zeros((len(rows), n), dtype=np.uint8)
    for i, combo in enumerate(rows):
        patterns[i, list(combo)] = 1
    return patterns


@pytest.mark.parametrize("v", [3, 4])
def test_decode_corrects_up_to_radius(v):
    """Every codeword, every punctured coordinate, every error pattern of weight <= t."""
    book = build_codebook(v)
    n, t = book.n, book.t
    patterns = _error_patterns(n - 1, t)
    weights = patterns.sum(axis=1)
    for cut in range(n):
        surviving = [c for c in range(n) if c != cut]
        errors = np.zeros((patterns.shape[0], n), dtype=np.uint8)
        errors[:, surviving] = patterns
        for cut_bit in (0, 1):
            received = book.words[:, None, :] ^ errors[None, :, :]
            received[:, :, cut] = cut_bit
            received = received.reshape(-1, n)
            mask = np.ones_like(received, dtype=bool)
            mask[:, cut] = False
            idx, dist = decode_many(received, mask, book)
            assert np.array_equal(idx, np.repeat(np.arange(book.f), patterns.shape[0]))
            assert np.array_equal(dist, np.tile(weights, book.f))


def test_decode_single_word():
    book = build_codebook(4)
    word = book.words[7].copy()
    word[[1, 4, 9]] ^= 1
    word[0] ^= 1
    assert decode(word, range(1, book.n), book) == (7, 3)


def test_decode_tie_fails():
    book = build_codebook(4)
    a = book.words[0]
    dist = book.pairwise_distances()[0]
    b_idx = int(np.flatnonzero(dist == book.n // 2)[0])
    differ = np.flatnonzero(a != book.words[b_idx])
    received = a.copy()
    received[differ[:4]] ^= 1
    with pytest.raises(DecodeFailure):
        decode(received, range(book.n), book)


def test_decode_rejects_bad_coordinates():
    book = build_codebook(3)
    with pytest.raises(ValueError):
        decode(book.words[0], range(2, 8), book)
    with pytest.raises(ValueError):
        decode(book.words[0], range(0, 9), book)


def test_decode_many_flags_failures():
    book = build_codebook(3)
    received = np.vstack([book.words[3], book.words[3] ^ np.array([1, 1, 0, 0, 0, 0, 0, 0], dtype=np.uint8)])
    mask = np.ones_like(received, dtype=bool)
    idx, dist = decode_many(received, mask, book)
    assert idx[0] == 3 and dist[0] == 0
    assert idx[1] == -1


def test_labeling_bijection_and_bytes():
    lab = random_labeling(30, make_rng(1, Stream.KEYGEN))
    assert sorted(lab.forward.tolist()) == list(range(30))
    assert np.array_equal(lab.inverse[lab.forward], np.arange(30))
    assert Labeling.from_bytes(lab.to_bytes()) == lab
    with pytest.raises(FormatError):
        Labeling.from_bytes(np.array([0, 0, 1], dtype="<u2").tobytes())
    with pytest.raises(ValueError):
        Labeling.from_forward([0, 2])
