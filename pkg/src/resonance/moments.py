"""Resonance moments M1, M2, the lower bound sqrt(M2/M1) and reference curves.

Every moment is computed two ways:

* directly, by evaluating the character sums for all q-1 characters and
  summing over the nonprincipal ones;
* through orthogonality, which (because X < q and N*X <= q) collapses to

      M1 = phi(q) * sum_n |r_f(n)|^2       - |R(chi_0)|^2
      M2 = phi(q) * sum_{an=bm} r(a) r(b)   - |D(chi_0)|^2 |R(chi_0)|^2

  with the principal-character term subtracted exactly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .characters import all_char_sums
from .coefficients import CoefficientFunction, coefficient_vector
from .errors import ConfigError, RangeError
from .ntcore import PrimeContext
from .resonator import Resonator, check_lemma_condition, quadruple_sum, resonator_l2

# relative slack for "brute_max >= lower_bound"
BOUND_RTOL = 1e-9
M1_RTOL = 1e-8
M2_RTOL = 1e-6
# maxima within this relative distance count as ties, smallest j wins
TIE_RTOL = 1e-12


def resonator_coefficients(R: Resonator, f: CoefficientFunction) -> np.ndarray:
    """Vector of r_f(n) = f(n) r(n) for n = 1..X (index 0 is n = 1)."""
    if R.X > f.cap:
        raise RangeError(f"resonator bound X={R.X} exceeds the coefficient cap {f.cap}")
    c = np.zeros(R.X, dtype=np.complex128)
    c[R.n - 1] = f._table[R.n] * R.r
    return c


def _check_x(ctx: PrimeContext, R: Resonator):
    if R.X >= ctx.q:
        raise RangeError(f"X={R.X} must be < q={ctx.q} for the diagonal a = b to be exact")


def _check_nx(ctx: PrimeContext, R: Resonator, N: int):
    if N < 1 or N >= ctx.q:
        raise RangeError(f"N={N} must satisfy 1 <= N < q={ctx.q}")
    if N * R.X > ctx.q:
        raise ConfigError(f"N*X = {N * R.X} > q = {ctx.q}: an = bm (mod q) no longer forces an = bm")


def principal_resonator(R: Resonator, f: CoefficientFunction) -> complex:
    """R(chi_0); every n <= X < q is coprime to q."""
    return complex(np.sum(resonator_coefficients(R, f)))


def principal_sum(f: CoefficientFunction, N: int) -> complex:
    """D_{N,f}(chi_0) for N < q."""
    return complex(np.sum(coefficient_vector(f, N)))


def m1_direct(ctx: PrimeContext, R: Resonator, f: CoefficientFunction, method: str = "fft") -> float:
    _check_x(ctx, R)
    sums = all_char_sums(ctx, resonator_coefficients(R, f), method=method)
    return float(np.sum(np.abs(sums[1:]) ** 2))


def m1_identity(ctx: PrimeContext, R: Resonator, f: CoefficientFunction) -> float:
    _check_x(ctx, R)
    r0 = principal_resonator(R, f)
    return ctx.phi * resonator_l2(R) - abs(r0) ** 2


def m2_direct(ctx: PrimeContext, R: Resonator, f: CoefficientFunction, N: int, method: str = "fft") -> float:
    _check_x(ctx, R)
    _check_nx(ctx, R, N)
    d = all_char_sums(ctx, coefficient_vector(f, N), method=method)
    r = all_char_sums(ctx, resonator_coefficients(R, f), method=method)
    return float(np.sum(np.abs(d[1:]) ** 2 * np.abs(r[1:]) ** 2))


def m2_identity(ctx: PrimeContext, R: Resonator, f: CoefficientFunction, N: int) -> float:
    _check_x(ctx, R)
    _check_nx(ctx, R, N)
    d0 = principal_sum(f, N)
    r0 = principal_resonator(R, f)
    return m2_all_identity(ctx, R, N) - abs(d0) ** 2 * abs(r0) ** 2


def m2_all_identity(ctx: PrimeContext, R: Resonator, N: int) -> float:
    """``phi(q) * quadruple_sum``: the moment over all characters, chi_0 included.

    f never enters: f(n) conj(f(m)) f(a) conj(f(b)) = f(an) conj(f(bm)) = 1.
    """
    _check_nx(ctx, R, N)
    return ctx.phi * quadruple_sum(R, N)


def m2_all_direct(ctx: PrimeContext, R: Resonator, f: CoefficientFunction, N: int, method: str = "fft") -> float:
    _check_x(ctx, R)
    _check_nx(ctx, R, N)
    d = all_char_sums(ctx, coefficient_vector(f, N), method=method)
    r = all_char_sums(ctx, resonator_coefficients(R, f), method=method)
    return float(np.sum(np.abs(d) ** 2 * np.abs(r) ** 2))


def resonance_lower_bound(M1: float, M2: float) -> float:
    if not M1 > 0:
        raise RangeError(f"M1={M1} is not positive; sqrt(M2/M1) is undefined")
    return math.sqrt(max(M2, 0.0) / M1)


def brute_force_max(ctx: PrimeContext, f: CoefficientFunction, N: int, method: str = "fft") -> tuple[float, int]:
    """Largest |D_{N,f}(chi_j)| over j != 0, with the smallest maximizing j."""
    if N >= ctx.q:
        raise RangeError(f"N={N} must be < q={ctx.q}")
    if ctx.order < 2:
        raise RangeError("q = 2 has no nonprincipal character")
    mags = np.abs(all_char_sums(ctx, coefficient_vector(f, N), method=method)[1:])
    top = float(mags.max())
    j = int(np.flatnonzero(mags >= top * (1 - TIE_RTOL))[0]) + 1
    return top, j


def theory_curve(q: float, N: float) -> float | None:
    """sqrt(N) * exp(sqrt(log(q/N) / log log(q/N))), or None when q/N <= e^e."""
    x = q / N
    if not x > math.exp(math.e):
        return None
    return math.sqrt(N) * math.exp(math.sqrt(math.log(x) / math.log(math.log(x))))


def lemma_curve(N: float, X: float) -> float | None:
    """N * exp(2 sqrt(log X / log log X)), or None when X <= e^e."""
    if not X > math.exp(math.e):
        return None
    return N * math.exp(2 * math.sqrt(math.log(X) / math.log(math.log(X))))


@dataclass(frozen=True)
class RangeCheck:
    ok: bool
    lower: float
    N: float
    upper: float


def validate_range(q: int, N: float, delta: float) -> RangeCheck:
    """Is exp((log q)**(1/2 + delta)) <= N <= sqrt(q)?"""
    if not 0 < delta < 0.01:
        raise ConfigError(f"delta must lie in (0, 1/100), got {delta}")
    lower = math.exp(math.log(q) ** (0.5 + delta))
    upper = math.sqrt(q)
    return RangeCheck(lower <= N <= upper, lower, N, upper)


@dataclass
class MomentReport:
    q: int
    N: int
    X: int
    M1_direct: float | None
    M1_identity: float
    M2_direct: float | None
    M2_identity: float
    M2_all_identity: float
    principal_D: complex
    principal_R: complex
    l2: float
    quadruple: float
    ratio_bound: float
    lower_bound: float
    brute_max: float | None
    argmax_j: int | None
    theory_curve: float | None
    lemma_curve: float | None
    condition_ok: bool | None
    range_ok: bool | None
    support_size: int
    timings: dict[str, float] = field(default_factory=dict)

    def violations(self) -> list[str]:
        """Invariants of the finite identities that failed for this report."""
        out = []
        if self.M1_identity < 0 or self.M2_identity < 0:
            out.append(f"negative moment: M1={self.M1_identity!r} M2={self.M2_identity!r}")
        if self.M1_direct is not None and abs(self.M1_direct - self.M1_identity) > M1_RTOL * abs(self.M1_identity):
            out.append(f"M1 mismatch: direct={self.M1_direct!r} identity={self.M1_identity!r}")
        if self.M2_direct is not None:
            if abs(self.M2_direct - self.M2_identity) > M2_RTOL * abs(self.M2_identity):
                out.append(f"M2 mismatch: direct={self.M2_direct!r} identity={self.M2_identity!r}")
        if self.brute_max is not None and self.brute_max < self.lower_bound * (1 - BOUND_RTOL):
            out.append(f"bound violated: brute_max={self.brute_max!r} < lower_bound={self.lower_bound!r}")
        if abs(self.principal_R) ** 2 > self.X * self.l2 * (1 + 1e-12):
            out.append("|R(chi_0)|^2 > X * l2")
        if abs(self.principal_D) > self.N * (1 + 1e-12):
            out.append("|D(chi_0)| > N")
        if self.quadruple < self.N * self.l2 * (1 - 1e-10):
            out.append("quadruple sum below its diagonal N * l2")
        return out


def moment_report(
    ctx: PrimeContext,
    f: CoefficientFunction,
    R: Resonator,
    N: int,
    *,
    method: str = "fft",
    brute_force: bool = True,
    delta: float | None = None,
) -> MomentReport:
    """All moments, bounds and reference values for one (q, N, f, r) cell."""
    _check_x(ctx, R)
    _check_nx(ctx, R, N)
    timings: dict[str, float] = {}

    def timed(name, fn, *args, **kw):
        t0 = time.perf_counter()
        out = fn(*args, **kw)
        timings[name] = time.perf_counter() - t0
        return out

    l2 = timed("l2", resonator_l2, R)
    quad = timed("quadruple_sum", quadruple_sum, R, N)
    d0 = principal_sum(f, N)
    r0 = principal_resonator(R, f)
    m1_id = ctx.phi * l2 - abs(r0) ** 2
    m2_all = ctx.phi * quad
    m2_id = m2_all - abs(d0) ** 2 * abs(r0) ** 2
    m1_d = timed("m1_direct", m1_direct, ctx, R, f, method=method)
    m2_d = bmax = j = None
    if brute_force:
        m2_d = timed("m2_direct", m2_direct, ctx, R, f, N, method=method)
        bmax, j = timed("brute_force_max", brute_force_max, ctx, f, N, method=method)
    return MomentReport(
        q=ctx.q, N=N, X=R.X,
        M1_direct=m1_d, M1_identity=m1_id,
        M2_direct=m2_d, M2_identity=m2_id, M2_all_identity=m2_all,
        principal_D=d0, principal_R=r0,
        l2=l2, quadruple=quad, ratio_bound=quad / l2,
        lower_bound=resonance_lower_bound(m1_id, m2_id),
        brute_max=bmax, argmax_j=j,
        theory_curve=theory_curve(ctx.q, N),
        lemma_curve=lemma_curve(N, R.X),
        condition_ok=check_lemma_condition(R, N).ok,
        range_ok=None if delta is None else validate_range(ctx.q, N, delta).ok,
        support_size=len(R),
        timings=timings,
    )
