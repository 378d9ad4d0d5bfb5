import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import char_sums_naive, chi
from resonance.characters import all_char_sums, char_sum, eval_char, index_histogram, orthogonality_sum
from resonance.errors import RangeError
from resonance.ntcore import prime_context

CTXS = {q: prime_context(q) for q in (13, 101, 1009, 10007)}


def test_eval_char_examples(ctx13):
    assert eval_char(ctx13, 0, 5) == 1
    assert eval_char(ctx13, 6, 2) == pytest.approx(-1, abs=1e-15)
    assert eval_char(ctx13, 3, 13) == 0
    assert eval_char(ctx13, 3, 0) == 0
    # n is reduced mod q first
    assert eval_char(ctx13, 5, 2 + 13 * 7) == eval_char(ctx13, 5, 2)


def test_eval_char_matches_oracle(ctx13):
    for j in range(12):
        for n in range(30):
            assert abs(eval_char(ctx13, j, n) - chi(13, 2, j, n)) < 1e-12


def test_quadratic_character_is_legendre_symbol(ctx101):
    for n in range(1, 101):
        legendre = 1 if pow(n, 50, 101) == 1 else -1
        assert abs(eval_char(ctx101, 50, n) - legendre) < 1e-12


def test_conjugate_label(ctx101):
    for j in (1, 7, 50, 99):
        for n in (2, 3, 57):
            assert abs(eval_char(ctx101, (100 - j) % 100, n) - eval_char(ctx101, j, n).conjugate()) < 1e-12


@settings(max_examples=200)
@given(st.sampled_from([13, 101, 1009, 10007]), st.data())
def test_multiplicative_and_unimodular(q, data):
    ctx = CTXS[q]
    j = data.draw(st.integers(0, q - 2))
    m = data.draw(st.integers(1, q - 1))
    n = data.draw(st.integers(1, q - 1))
    assert abs(eval_char(ctx, j, m * n) - eval_char(ctx, j, m) * eval_char(ctx, j, n)) < 1e-12
    assert abs(abs(eval_char(ctx, j, n)) - 1) < 1e-12
    assert eval_char(ctx, j, 1) == 1


def test_only_principal_is_identically_one(ctx13):
    for j in range(12):
        values = [eval_char(ctx13, j, n) for n in range(1, 13)]
        assert all(abs(v - 1) < 1e-12 for v in values) == (j == 0)


def test_char_sum_examples(ctx13):
    assert char_sum(ctx13, 0, np.ones(5)) == pytest.approx(5)
    assert abs(char_sum(ctx13, 6, np.ones(12))) < 1e-12
    e1 = np.zeros(7)
    e1[0] = 1
    for j in range(12):
        assert char_sum(ctx13, j, e1) == 1


def test_char_sum_rejects_wrapping(ctx13):
    with pytest.raises(RangeError):
        char_sum(ctx13, 1, np.ones(13))
    with pytest.raises(RangeError):
        all_char_sums(ctx13, np.ones(13))
    with pytest.raises(RangeError):
        all_char_sums(ctx13, np.array([1.0, np.nan]))


def test_index_histogram(ctx13):
    c = np.arange(1, 13, dtype=float)
    hist = index_histogram(ctx13, c)
    for n in range(1, 13):
        assert hist[ctx13.ind[n]] == n


def test_all_char_sums_examples(ctx13):
    e1 = np.zeros(4)
    e1[0] = 1
    for method in ("fft", "naive"):
        assert np.allclose(all_char_sums(ctx13, e1, method=method), 1, atol=1e-14)
        full = all_char_sums(ctx13, np.ones(12), method=method)
        assert abs(full[0] - 12) < 1e-12
        assert np.max(np.abs(full[1:])) < 1e-12


def test_all_char_sums_matches_oracle(ctx13):
    rng = np.random.default_rng(5)
    c = rng.normal(size=9) + 1j * rng.normal(size=9)
    want = np.array(char_sums_naive(13, 2, c))
    for method in ("fft", "naive"):
        assert np.max(np.abs(all_char_sums(ctx13, c, method=method) - want)) < 1e-12


def test_bulk_matches_char_sum(ctx101):
    rng = np.random.default_rng(11)
    c = rng.normal(size=50) + 1j * rng.normal(size=50)
    bulk = all_char_sums(ctx101, c)
    single = np.array([char_sum(ctx101, j, c) for j in range(100)])
    assert np.max(np.abs(bulk - single)) <= 1e-6 * np.max(np.abs(single))


def test_unknown_method(ctx13):
    with pytest.raises(ValueError):
        all_char_sums(ctx13, np.ones(3), method="dft")


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([13, 101, 1009]), st.integers(1, 10**6), st.data())
def test_bulk_naive_agree_random(q, seed, data):
    ctx = CTXS[q]
    n = data.draw(st.integers(1, q - 1))
    rng = np.random.default_rng(seed)
    c = rng.normal(size=n) + 1j * rng.normal(size=n)
    fast = all_char_sums(ctx, c, method="fft")
    slow = all_char_sums(ctx, c, method="naive")
    assert np.max(np.abs(fast - slow)) <= 1e-6 * np.max(np.abs(slow))


def test_orthogonality_examples(ctx13):
    assert orthogonality_sum(ctx13, 2, 2) == pytest.approx(12)
    assert abs(orthogonality_sum(ctx13, 2, 3)) < 1e-12
    assert orthogonality_sum(ctx13, 2, 15) == pytest.approx(12)
    direct = sum(chi(13, 2, j, 2) * chi(13, 2, j, 3).conjugate() for j in range(12))
    assert abs(direct) < 1e-12


def test_orthogonality_precondition(ctx13):
    with pytest.raises(RangeError):
        orthogonality_sum(ctx13, 13, 2)
    with pytest.raises(RangeError):
        orthogonality_sum(ctx13, 2, 26)


@pytest.mark.parametrize("q", [13, 101, 1009])
def test_orthogonality_random_pairs(q):
    ctx = CTXS[q]
    rng = np.random.default_rng(q)
    for _ in range(100):
        a, b = (int(x) for x in rng.integers(1, 3 * q, size=2))
        if a % q == 0 or b % q == 0:
            continue
        want = q - 1 if (a - b) % q == 0 else 0
        assert abs(orthogonality_sum(ctx, a, b) - want) <= 1e-6 * (q - 1)


def test_root_table_precision():
    from resonance.characters import root_table

    roots = root_table(1008)
    assert abs(roots[504] + 1) < 1e-15
    assert abs(roots[252] - 1j) < 1e-15
    assert np.max(np.abs(np.abs(roots) - 1)) < 1e-15
    assert abs(roots[17] - cmath.exp(2j * cmath.pi * 17 / 1008)) < 1e-15
