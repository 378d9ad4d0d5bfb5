"""Resonator weights and the sums built from them.

The resonator weight r is multiplicative, supported on squarefree n whose
prime factors all lie in a band [P_lo, P_hi], with

    r(p) = lam / (sqrt(p) * log p)      normalization "sqrt_p" (default)
    r(p) = lam / (sqrt(q) * log p)      normalization "sqrt_q_literal"

and canonically lam = sqrt(log X * log log X), band = [lam, exp((log lam)**2)].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, RangeError, ResourceError
from .ntcore import sieve_primes

NORMALIZATIONS = ("sqrt_p", "sqrt_q_literal")

DEFAULT_SUPPORT_CAP = 10_000_000


@dataclass(frozen=True)
class ResonatorSpec:
    X: int
    lam: float
    band: tuple[float, float]
    normalization: str = "sqrt_p"
    q: int | None = None
    mode: str = "canonical"

    def __post_init__(self):
        if not self.lam > 0:
            raise RangeError(f"lambda must be positive, got {self.lam}")
        if self.normalization not in NORMALIZATIONS:
            raise ConfigError(f"unknown normalization {self.normalization!r}; expected one of {NORMALIZATIONS}")
        if self.normalization == "sqrt_q_literal" and self.q is None:
            raise ConfigError("sqrt_q_literal normalization needs the modulus q")

    def band_primes(self) -> list[int]:
        lo, hi = self.band
        top = min(math.floor(hi), self.X) if hi >= 2 else 1
        return [p for p in sieve_primes(top) if p >= lo]

    def prime_weight(self, p: int) -> float:
        scale = math.sqrt(p) if self.normalization == "sqrt_p" else math.sqrt(self.q)
        return self.lam / (scale * math.log(p))


def canonical_lambda(X: float) -> float:
    if X < 3:
        raise RangeError(f"X={X} < 3: log log X <= 0 and lambda is undefined")
    return math.sqrt(math.log(X) * math.log(math.log(X)))


def canonical_spec(X: int, normalization: str = "sqrt_p", q: int | None = None) -> ResonatorSpec:
    lam = canonical_lambda(X)
    band = (lam, math.exp(math.log(lam) ** 2))
    return ResonatorSpec(X=X, lam=lam, band=band, normalization=normalization, q=q)


def override_spec(
    X: int,
    band: tuple[float, float],
    normalization: str = "sqrt_p",
    q: int | None = None,
) -> ResonatorSpec:
    """Canonical lambda with a caller-chosen prime band (lo > hi means empty)."""
    lo, hi = band
    return ResonatorSpec(
        X=X, lam=canonical_lambda(X), band=(float(lo), float(hi)),
        normalization=normalization, q=q, mode="override",
    )


@dataclass(frozen=True, eq=False)
class Resonator:
    """Squarefree support of r up to X, ascending, with ``(1, 1.0)`` first."""

    X: int
    prime_weights: dict[int, float]
    n: np.ndarray = field(repr=False)
    r: np.ndarray = field(repr=False)
    spec: ResonatorSpec | None = None

    @property
    def support(self) -> list[tuple[int, float]]:
        return list(zip(self.n.tolist(), self.r.tolist()))

    def __len__(self) -> int:
        return len(self.n)


def _enumerate_support(primes: list[int], weights: list[float], X: int, cap: int):
    # depth-first over increasing primes; each branch extends a squarefree n
    ns: list[int] = [1]
    rs: list[float] = [1.0]
    stack = [(1, 1.0, 0)]
    while stack:
        n, w, start = stack.pop()
        for i in range(start, len(primes)):
            m = n * primes[i]
            if m > X:
                break
            mw = w * weights[i]
            ns.append(m)
            rs.append(mw)
            if len(ns) > cap:
                raise ResourceError(f"resonator support exceeds the cap of {cap} entries; shrink X or the band")
            stack.append((m, mw, i + 1))
    order = np.argsort(np.asarray(ns, dtype=np.int64), kind="stable")
    return np.asarray(ns, dtype=np.int64)[order], np.asarray(rs, dtype=np.float64)[order]


def resonator_from_weights(prime_weights: dict[int, float], X: int, cap: int = DEFAULT_SUPPORT_CAP,
                           spec: ResonatorSpec | None = None) -> Resonator:
    """Resonator with explicit positive weights on a set of primes."""
    primes = sorted(p for p in prime_weights if p <= X)
    weights = [float(prime_weights[p]) for p in primes]
    if any(not w > 0 for w in weights):
        raise RangeError("resonator prime weights must be positive")
    n, r = _enumerate_support(primes, weights, X, cap)
    for a in (n, r):
        a.setflags(write=False)
    return Resonator(X=X, prime_weights=dict(zip(primes, weights)), n=n, r=r, spec=spec)


def build_resonator(spec: ResonatorSpec, X: int | None = None, cap: int = DEFAULT_SUPPORT_CAP) -> Resonator:
    X = spec.X if X is None else X
    weights = {p: spec.prime_weight(p) for p in spec.band_primes() if p <= X}
    return resonator_from_weights(weights, X, cap=cap, spec=spec)


def resonator_l2(R: Resonator) -> float:
    return float(np.sum(R.r * R.r))


def _pair_block(n: np.ndarray, start: int, stop: int, N: int) -> np.ndarray:
    """floor(N * gcd(a, b) / max(a, b)) for a in n[start:stop], b in n."""
    a = n[start:stop, None]
    b = n[None, :]
    g = np.gcd(a, b)
    top = np.maximum(a, b)
    if N * int(n[-1]) < 2**62:
        return (N * g) // top
    # N * g would overflow int64
    wide = np.frompyfunc(lambda gi, ti: N * int(gi) // int(ti), 2, 1)
    return wide(g, top).astype(np.float64)


def quadruple_sum(R: Resonator, N: int) -> float:
    """``sum r(a) r(b)`` over m, n <= N and support a, b with a*n = b*m.

    For fixed a, b with g = gcd(a, b) the solutions are n = (b/g) t,
    m = (a/g) t with t <= N g / max(a, b), which gives the pair formula.
    """
    if N <= 0:
        return 0.0
    rows = max(1, (1 << 22) // len(R))
    parts = []
    for s in range(0, len(R), rows):
        block = _pair_block(R.n, s, s + rows, N)
        parts.append(np.sum(R.r[s : s + rows, None] * R.r[None, :] * block))
    return math.fsum(parts)


@dataclass(frozen=True)
class LemmaCheck:
    ok: bool | None
    lhs: float | None
    rhs: float | None
    reason: str = ""


def lemma_condition(lam: float, N: float) -> LemmaCheck:
    """Check ``log N > 3 lam log log lam``; indeterminate unless lam > e and N > 1."""
    if not lam > math.e:
        return LemmaCheck(None, None, None, f"lambda={lam:.6g} <= e, so log log lambda <= 0")
    if not N > 1:
        return LemmaCheck(None, None, None, f"N={N} <= 1, so log N <= 0")
    lhs = math.log(N)
    rhs = 3 * lam * math.log(math.log(lam))
    return LemmaCheck(lhs > rhs, lhs, rhs)


def check_lemma_condition(R: Resonator, N: float) -> LemmaCheck:
    if R.spec is None:
        return LemmaCheck(None, None, None, "resonator has no lambda (explicit weights)")
    return lemma_condition(R.spec.lam, N)
