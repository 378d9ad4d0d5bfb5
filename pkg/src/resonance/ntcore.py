"""Elementary number theory for a prime modulus.

Sieves, smallest-prime-factor tables, factorization, primality, primitive
roots and the discrete-log (index) table that labels the characters mod q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt

import numpy as np

from .errors import RangeError

# (prime, exponent) pairs in increasing prime order
Factorization = list[tuple[int, int]]

# Deterministic for every n < 3.3e24, far beyond any modulus we index.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def sieve_primes(limit: int) -> list[int]:
    """Return the primes <= limit in ascending order."""
    if limit < 2:
        return []
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.flatnonzero(is_p).tolist()


def spf_table(limit: int) -> np.ndarray:
    """Smallest-prime-factor table ``spf[n]`` for 0 <= n <= limit.

    ``spf[0]`` and ``spf[1]`` are 0 and 1 respectively.
    """
    limit = max(int(limit), 1)
    spf = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, isqrt(limit) + 1):
        if spf[p] == p:
            block = spf[p * p :: p]
            # only overwrite entries not already claimed by a smaller prime
            mask = block == np.arange(p * p, limit + 1, p)
            block[mask] = p
    return spf


def factorize(n: int, spf: np.ndarray) -> Factorization:
    """Factor ``n`` using a smallest-prime-factor table."""
    if not 1 <= n < len(spf):
        raise RangeError(f"factorize: n={n} outside table range [1, {len(spf) - 1}]")
    out: Factorization = []
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


def trial_factorize(n: int) -> Factorization:
    """Factor ``n`` by trial division (used for q - 1 when q is large)."""
    if n < 1:
        raise RangeError(f"trial_factorize: n={n} < 1")
    out: Factorization = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def is_squarefree(n: int, spf: np.ndarray) -> bool:
    """True iff no square of a prime divides ``n``."""
    return all(e == 1 for _, e in factorize(n, spf))


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    n = max(n, 2)
    while not is_prime(n):
        n += 1
    return n


def prev_prime(n: int) -> int:
    """Largest prime <= n."""
    if n < 2:
        raise RangeError(f"no prime <= {n}")
    while not is_prime(n):
        n -= 1
    return n


def primitive_root(q: int) -> int:
    """Smallest primitive root of the prime ``q``."""
    if not is_prime(q):
        raise RangeError(f"{q} is not prime")
    if q == 2:
        return 1
    cofactors = [(q - 1) // p for p, _ in trial_factorize(q - 1)]
    g = 2
    while any(pow(g, c, q) == 1 for c in cofactors):
        g += 1
    return g


@dataclass(frozen=True, eq=False)
class PrimeContext:
    """A prime modulus together with a primitive root and its index table.

    ``ind[n]`` is the exponent k in [0, q-2] with g**k = n (mod q), for
    1 <= n <= q-1; ``ind[0]`` is -1.
    """

    q: int
    g: int
    ind: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return self.q - 1

    @property
    def phi(self) -> int:
        return self.q - 1

    def index(self, n: int) -> int:
        n %= self.q
        if n == 0:
            raise RangeError(f"{self.q} divides the argument; index undefined")
        return int(self.ind[n])


def build_index_table(q: int, g: int) -> PrimeContext:
    """Tabulate the discrete logarithm to base ``g`` by walking its powers."""
    if q < 3 or not is_prime(q):
        raise RangeError(f"modulus must be an odd prime, got {q}")
    ind = np.full(q, -1, dtype=np.int64)
    x = 1
    for k in range(q - 1):
        if ind[x] != -1:
            raise RangeError(f"{g} is not a primitive root mod {q} (order {k})")
        ind[x] = k
        x = x * g % q
    ind.setflags(write=False)
    return PrimeContext(q=q, g=g, ind=ind)


def prime_context(q: int) -> PrimeContext:
    """Context for ``q`` using its smallest primitive root."""
    return build_index_table(q, primitive_root(q))
