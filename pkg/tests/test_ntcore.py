import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import dlog_table, is_squarefree_naive, trial_division_primes
from resonance.errors import RangeError
from resonance.ntcore import (
    build_index_table,
    factorize,
    is_prime,
    is_squarefree,
    next_prime,
    prime_context,
    primitive_root,
    sieve_primes,
    spf_table,
    trial_factorize,
)

SPF = spf_table(10**7)


def test_sieve_small():
    assert sieve_primes(1) == []
    assert sieve_primes(0) == []
    assert sieve_primes(10) == [2, 3, 5, 7]


@pytest.mark.parametrize("limit", [2, 3, 100, 1000, 7919])
def test_sieve_matches_trial_division(limit):
    assert sieve_primes(limit) == trial_division_primes(limit)
    if limit == 100:
        assert len(sieve_primes(limit)) == 25


@pytest.mark.parametrize("n,expected", [(1, []), (12, [(2, 2), (3, 1)]), (97, [(97, 1)]), (1024, [(2, 10)])])
def test_factorize_examples(n, expected):
    assert factorize(n, SPF) == expected


def test_factorize_primorial():
    n = 2 * 3 * 5 * 7 * 11 * 13 * 17 * 19
    assert n == 9699690
    f = factorize(n, SPF)
    assert f == [(p, 1) for p in (2, 3, 5, 7, 11, 13, 17, 19)]
    assert math.prod(p**e for p, e in f) == n


def test_factorize_recomposes_exhaustively():
    spf = spf_table(10**5)
    primes = set(sieve_primes(10**5))
    for n in range(1, 10**5 + 1):
        f = factorize(n, spf)
        assert math.prod(p**e for p, e in f) == n
        assert all(p in primes and e >= 1 for p, e in f)
        assert [p for p, _ in f] == sorted(p for p, _ in f)


def test_factorize_out_of_range():
    with pytest.raises(RangeError):
        factorize(0, SPF)
    with pytest.raises(RangeError):
        factorize(11, spf_table(10))


@given(st.integers(1, 10**12))
def test_trial_factorize_recomposes(n):
    assert math.prod(p**e for p, e in trial_factorize(n)) == n


@pytest.mark.parametrize("n,expected", [(1, True), (12, False), (30, True), (49, False), (2 * 3 * 5 * 7 * 11, True)])
def test_is_squarefree_examples(n, expected):
    assert is_squarefree(n, SPF) is expected


def test_is_squarefree_matches_naive():
    assert all(is_squarefree(n, SPF) == is_squarefree_naive(n) for n in range(1, 3000))


def test_is_prime_agrees_with_sieve():
    limit = 20000
    primes = set(sieve_primes(limit))
    assert all(is_prime(n) == (n in primes) for n in range(limit + 1))


@pytest.mark.parametrize("n", [2**31 - 1, 1_000_000_007, 2**61 - 1])
def test_is_prime_large_primes(n):
    assert is_prime(n)


@pytest.mark.parametrize("n", [3215031751, 2152302898747, 3474749660383, 341550071728321, 561, 2**32 + 1])
def test_is_prime_rejects_strong_pseudoprimes(n):
    # strong pseudoprimes to the first few bases, and classic composites
    assert not is_prime(n)


def test_next_prime():
    assert next_prime(1000) == 1009
    assert next_prime(1009) == 1009
    assert next_prime(0) == 2


def test_primitive_root_examples():
    assert primitive_root(3) == 2
    assert primitive_root(13) == 2
    assert [pow(2, k, 13) for k in range(1, 13)].index(1) == 11  # order of 2 mod 13 is 12
    assert primitive_root(101) == 2
    assert pow(2, 50, 101) == 100 and pow(2, 20, 101) != 1
    assert primitive_root(7) == 3
    assert primitive_root(41) == 6


def test_primitive_root_is_smallest():
    for q in sieve_primes(2000)[1:]:
        g = primitive_root(q)
        order = lambda h: next(k for k in range(1, q) if pow(h, k, q) == 1)
        assert order(g) == q - 1
        assert all(order(h) < q - 1 for h in range(2, g))


def test_primitive_root_rejects_composite():
    with pytest.raises(RangeError):
        primitive_root(15)


def test_index_table_examples():
    ctx = build_index_table(13, 2)
    assert (ctx.ind[2], ctx.ind[4], ctx.ind[3], ctx.ind[12]) == (1, 2, 4, 6)
    assert ctx.ind[1] == 0
    assert all(pow(2, int(ctx.ind[n]), 13) == n for n in (2, 3, 4, 12))
    small = build_index_table(3, 2)
    assert small.ind[1:].tolist() == [0, 1]
    assert ctx.order == 12 and ctx.phi == 12


def test_index_table_rejects_non_primitive():
    with pytest.raises(RangeError):
        build_index_table(13, 3)  # 3 has order 3 mod 13
    with pytest.raises(RangeError):
        build_index_table(15, 2)


def test_index_table_is_immutable():
    ctx = prime_context(13)
    with pytest.raises(ValueError):
        ctx.ind[1] = 5


@pytest.mark.parametrize("q", [q for q in sieve_primes(10**4) if q > 2][::37] + [9973])
def test_index_table_exhaustive(q):
    ctx = prime_context(q)
    ind = ctx.ind[1:]
    assert np.array_equal(np.sort(ind), np.arange(q - 1))
    assert ctx.ind[ctx.g] == 1
    assert dict(zip(range(1, q), ind.tolist())) == dlog_table(q, ctx.g)


@settings(max_examples=50)
@given(st.sampled_from([1009, 10007, 65537, 99991]), st.data())
def test_index_table_inverts_powering(q, data):
    ctx = prime_context(q)
    n = data.draw(st.integers(1, q - 1))
    assert pow(ctx.g, int(ctx.ind[n]), q) == n
    assert ctx.index(n + 5 * q) == ctx.ind[n]
