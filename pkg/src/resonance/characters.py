"""Dirichlet characters modulo a prime and their weighted sums.

Characters are labelled by j in [0, q-2]:

    chi_j(n) = exp(2*pi*i * j * ind(n) / (q - 1))   for q not dividing n,

and chi_j(n) = 0 otherwise.  j = 0 is the principal character and the
conjugate of chi_j is chi_{(q-1-j) mod (q-1)}.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import RangeError
from .ntcore import PrimeContext

METHODS = ("fft", "naive")

# rows of the (j, n) phase matrix evaluated per block on the naive path
_NAIVE_BLOCK_ELEMENTS = 1 << 22


@lru_cache(maxsize=16)
def root_table(order: int) -> np.ndarray:
    """``exp(2*pi*i*k/order)`` for k in [0, order)."""
    k = np.arange(order, dtype=np.float64)
    roots = np.exp(2j * np.pi * k / order)
    roots.setflags(write=False)
    return roots


def eval_char(ctx: PrimeContext, j: int, n: int) -> complex:
    n %= ctx.q
    if n == 0:
        return 0j
    return complex(root_table(ctx.order)[(j * int(ctx.ind[n])) % ctx.order])


def _check_length(ctx: PrimeContext, coeffs: np.ndarray) -> np.ndarray:
    c = np.asarray(coeffs, dtype=np.complex128)
    if c.ndim != 1 or len(c) < 1:
        raise RangeError("coefficient vector must be one-dimensional and nonempty")
    if len(c) >= ctx.q:
        raise RangeError(f"sum length N={len(c)} must be < q={ctx.q}")
    if not np.all(np.isfinite(c)):
        raise RangeError("coefficient vector has non-finite entries")
    return c


def char_sum(ctx: PrimeContext, j: int, coeffs: np.ndarray) -> complex:
    """``sum_{n<=N} c_n chi_j(n)`` with ``coeffs[n-1] = c_n``."""
    c = _check_length(ctx, coeffs)
    ind = ctx.ind[1 : len(c) + 1]
    phases = root_table(ctx.order)[(j % ctx.order) * ind % ctx.order]
    return complex(np.sum(c * phases))


def index_histogram(ctx: PrimeContext, coeffs: np.ndarray) -> np.ndarray:
    """``A[k] = sum of c_n over n <= N with ind(n) = k``."""
    c = _check_length(ctx, coeffs)
    ind = ctx.ind[1 : len(c) + 1]
    re = np.bincount(ind, weights=c.real, minlength=ctx.order)
    im = np.bincount(ind, weights=c.imag, minlength=ctx.order)
    return re + 1j * im


def _naive_all(ctx: PrimeContext, c: np.ndarray) -> np.ndarray:
    n_terms = len(c)
    ind = ctx.ind[1 : n_terms + 1]
    roots = root_table(ctx.order)
    out = np.empty(ctx.order, dtype=np.complex128)
    block = max(1, _NAIVE_BLOCK_ELEMENTS // n_terms)
    for start in range(0, ctx.order, block):
        js = np.arange(start, min(start + block, ctx.order), dtype=np.int64)
        phases = roots[np.outer(js, ind) % ctx.order]
        out[start : start + len(js)] = phases @ c
    return out


def all_char_sums(ctx: PrimeContext, coeffs: np.ndarray, method: str = "fft") -> np.ndarray:
    """Character sums for every j at once, indexed by j.

    ``method="fft"`` folds the coefficients onto the index circle and applies
    one inverse DFT of length q-1 (pocketfft handles arbitrary lengths in
    O(n log n)); ``method="naive"`` evaluates each of the q-1 sums directly.
    """
    if method == "fft":
        hist = index_histogram(ctx, coeffs)
        # sum_k A[k] e(jk/n) is n * ifft(A)[j]
        return np.fft.ifft(hist) * ctx.order
    if method == "naive":
        return _naive_all(ctx, _check_length(ctx, coeffs))
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def orthogonality_sum(ctx: PrimeContext, a: int, b: int) -> complex:
    """``sum over all chi mod q of chi(a) * conj(chi(b))``, summed term by term."""
    if a % ctx.q == 0 or b % ctx.q == 0:
        raise RangeError(f"orthogonality_sum needs a, b coprime to q={ctx.q}")
    roots = root_table(ctx.order)
    js = np.arange(ctx.order, dtype=np.int64)
    chi_a = roots[js * ctx.index(a) % ctx.order]
    chi_b = roots[js * ctx.index(b) % ctx.order]
    return complex(np.sum(chi_a * np.conj(chi_b)))
