"""Completely multiplicative, unimodular coefficient functions f.

Four presets are provided:

``ones``
    f(p) = 1.
``random_unimodular``
    f(p) = exp(2*pi*i*theta_p) with theta_p uniform on [0, 1).
``random_sign``
    f(p) = +1 or -1, each with probability 1/2.
``archimedean``
    f(p) = p**(i*t), i.e. exp(i*t*log p); needs the real parameter ``t``.

Random values are drawn from a PCG64 stream keyed by ``(seed, p)`` through
numpy's SeedSequence, so f(p) depends only on the seed and the prime and
never on traversal order or the cap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, RangeError
from .ntcore import sieve_primes, spf_table

KINDS = ("ones", "random_unimodular", "random_sign", "archimedean")

PRNG_NAME = "numpy.PCG64(SeedSequence([seed, p]))"
PRNG_VERSION = 1


def _prime_stream(seed: int, p: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, p])))


def _prime_value(kind: str, seed: int, t: float, p: int) -> complex:
    if kind == "ones":
        return 1 + 0j
    if kind == "random_unimodular":
        theta = _prime_stream(seed, p).random()
        return complex(np.exp(2j * np.pi * theta))
    if kind == "random_sign":
        return 1 + 0j if _prime_stream(seed, p).random() < 0.5 else -1 + 0j
    if kind == "archimedean":
        return complex(np.exp(1j * t * np.log(p)))
    raise ConfigError(f"unknown coefficient kind {kind!r}; expected one of {KINDS}")


def multiplicative_extension(prime_values: dict[int, complex], cap: int) -> np.ndarray:
    """Table ``v[0..cap]`` of the completely multiplicative extension.

    Uses ``v[n] = v[spf(n)] * v[n / spf(n)]``, resolved in rounds by the
    number of prime factors so every round is one vectorized product.
    ``v[0]`` is 0 and unused.
    """
    spf = spf_table(cap)
    v = np.zeros(cap + 1, dtype=np.complex128)
    done = np.zeros(cap + 1, dtype=bool)
    v[1] = 1.0
    done[1] = True
    if cap >= 2:
        primes = np.fromiter(prime_values, dtype=np.int64)
        primes = primes[primes <= cap]
        v[primes] = [prime_values[int(p)] for p in primes]
        done[primes] = True
        todo = np.flatnonzero(~done[2:]) + 2
        while len(todo):
            p = spf[todo]
            rest = todo // p
            ready = done[rest]
            n = todo[ready]
            v[n] = v[p[ready]] * v[rest[ready]]
            done[n] = True
            todo = todo[~ready]
    return v


@dataclass(frozen=True, eq=False)
class CoefficientFunction:
    kind: str
    seed: int
    cap: int
    t: float = 0.0
    prime_values: dict[int, complex] = field(repr=False, default_factory=dict)
    _table: np.ndarray = field(repr=False, default=None)

    @property
    def label(self) -> str:
        return f"archimedean({self.t!r})" if self.kind == "archimedean" else self.kind


def make_coefficients(kind: str, seed: int = 0, cap: int = 1, t: float | None = None) -> CoefficientFunction:
    if kind not in KINDS:
        raise ConfigError(f"unknown coefficient kind {kind!r}; expected one of {KINDS}")
    if cap < 1:
        raise RangeError(f"cap must be >= 1, got {cap}")
    if kind == "archimedean":
        if t is None:
            raise ConfigError("archimedean coefficients need a real parameter t")
        t = float(t)
    else:
        t = 0.0
    seed = int(seed)
    prime_values = {p: _prime_value(kind, seed, t, p) for p in sieve_primes(cap)}
    table = multiplicative_extension(prime_values, cap)
    table.setflags(write=False)
    return CoefficientFunction(kind=kind, seed=seed, cap=cap, t=t, prime_values=prime_values, _table=table)


def eval_f(f: CoefficientFunction, n: int) -> complex:
    if not 1 <= n <= f.cap:
        raise RangeError(f"f is only tabulated on [1, {f.cap}], got n={n}")
    return complex(f._table[n])


def coefficient_vector(f: CoefficientFunction, N: int) -> np.ndarray:
    """``(f(1), ..., f(N))`` as a complex array (index 0 holds f(1))."""
    if N > f.cap:
        raise RangeError(f"N={N} exceeds the coefficient cap {f.cap}")
    if N < 1:
        raise RangeError(f"N must be >= 1, got {N}")
    return f._table[1 : N + 1].copy()
