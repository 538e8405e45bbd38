"""An exact integral identity for permanents of entrywise exponentials.

For a complex n x n matrix Y (n >= 2) define, over permutations r,

    c_r   = sum_j y[j, r(j)],
    alpha = (1/n) sum_{j,r} y[j, r],
    beta  = 1/(n-1) sum_{j,r} yt[j, r]^2     (algebraic squares, yt doubly
                                              centered; no conjugation),

so that perm(exp(y)) / n! = (1/n!) sum_r exp(c_r).  The identity states

    (1/n!) sum_r exp(c_r) - exp(alpha + beta/2)
        = (1/n!) * integral_0^1 f(u) exp((1-u) alpha + (1-u^2) beta/2) du,

where f(u) = f1(u)/(4n) + f2(u)/(n^2(n-1)) + f3(u)/(4 n^2 (n-1)) collects
permutation sums over the second differences

    z[j, k, r, s] = y[j, r] - y[k, r] - y[j, s] + y[k, s]:

    f1(u) = sum_{j != k} sum_r  z1 (1 - u z1 - exp(-u z1)) exp(u c_r),
    f2(u) = sum_{(j,k,l) distinct} sum_r  u z1^2 (1 - exp(u z2)) exp(u c_r),
    f3(u) = sum_{(j,k,l,m) distinct} sum_r u z1^2
            (1 - exp(u z2 + u z3)) exp(u c_r),

with z1 = z[j,k,r(j),r(k)], z2 = z[j,l,r(l),r(j)], z3 = z[k,m,r(m),r(k)].
f2 vanishes identically for n = 2 and f3 for n <= 3.  Pointwise in u the
integrand satisfies  sum_r (c_r - alpha - u beta) exp(u c_r) = f(u).

Specialising y = i t a for a real score matrix reproduces the
characteristic-function difference phi(t) - exp(i t mu - sigma2 t^2 / 2)
with alpha = i t mu and beta = -sigma2 t^2.

The permutation sums are evaluated in vectorised form (one gather per
permutation block); a literal nested-loop reference implementation is kept
for small n as the independent oracle, and this whole module is itself a
verification oracle rather than a production path.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import permutations as iter_permutations

import numpy as np

from .errors import CapExceededError, InvalidMatrixError, ParameterError
from .permanents import permanent
from .permtables import perm_blocks
from .quadrature import adaptive_simpson


@dataclass(frozen=True)
class ComplexScoreMatrix:
    """Complex n x n matrix with n >= 2 and finite entries (read-only)."""

    y: np.ndarray

    def __post_init__(self):
        y = np.array(self.y, dtype=complex)
        if y.ndim != 2 or y.shape[0] != y.shape[1]:
            raise InvalidMatrixError(f"matrix must be square, got shape {y.shape}")
        if y.shape[0] < 2:
            raise InvalidMatrixError(f"matrix needs n >= 2, got n = {y.shape[0]}")
        if not np.all(np.isfinite(y)):
            raise InvalidMatrixError("matrix entries must be finite")
        y.setflags(write=False)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.y.shape[0]


@dataclass(frozen=True)
class IdentityTerms:
    """alpha, beta, and (for small n) the map permutation -> c_r."""

    alpha: complex
    beta: complex
    c_values: dict[tuple[int, ...], complex] | None


def _centered(y: np.ndarray) -> np.ndarray:
    return y - y.mean(axis=0)[None, :] - y.mean(axis=1)[:, None] + y.mean()


def identity_terms(Y: ComplexScoreMatrix, enum_cap: int = 10) -> IdentityTerms:
    """Compute alpha, beta (pair-sum form), and optionally all c_r.

    ``c_values`` maps 1-based permutation tuples to c_r and is materialised
    only when n <= enum_cap; alpha and beta are always available.
    """
    y = Y.y
    n = Y.n
    alpha = complex(y.sum() / n)
    yt = _centered(y)
    beta = complex((yt * yt).sum() / (n - 1))
    c_values = None
    if n <= enum_cap:
        c_values = {
            tuple(p + 1 for p in perm): complex(sum(y[j, perm[j]] for j in range(n)))
            for perm in iter_permutations(range(n))
        }
    return IdentityTerms(alpha=alpha, beta=beta, c_values=c_values)


def beta_quadruple(Y: ComplexScoreMatrix) -> complex:
    """beta via the quadruple route sum z^2 / (4 n^2 (n-1)), distinct pairs.

    Agrees with the pair-sum beta of ``identity_terms`` exactly; both are
    kept as independent evaluation paths.
    """
    y = Y.y
    n = Y.n
    row_diff = y[:, None, :] - y[None, :, :]
    z = row_diff[:, :, :, None] - row_diff[:, :, None, :]
    off = ~np.eye(n, dtype=bool)
    rows, cols = np.nonzero(off)
    zd = z[rows, cols][:, rows, cols]
    return complex((zd * zd).sum() / (4.0 * n * n * (n - 1)))


def _pair_diff_tensor(y: np.ndarray, block: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-permutation c_r and the matrix z1[p, j, k] = z[j,k,r(j),r(k)]."""
    n = y.shape[1]
    gathered = y.T[block]  # gathered[p, a, b] = y[b, r(a)]
    diag = gathered[:, np.arange(n), np.arange(n)]
    c = diag.sum(axis=1)
    z1 = diag[:, :, None] + diag[:, None, :] - gathered - np.swapaxes(gathered, 1, 2)
    return c, z1


def _f_parts(u: float, n: int, c: np.ndarray, z1: np.ndarray) -> tuple[complex, complex, complex]:
    """f1, f2, f3 contributions of one permutation block (vectorised sums)."""
    weight = np.exp(u * c)
    expnz = np.exp(-u * z1)  # expnz[p, j, k] = exp(u z[j,k,r(k),r(j)])

    f1 = ((z1 * (1.0 - u * z1 - expnz)).sum(axis=(1, 2)) * weight).sum()
    f2 = 0.0 + 0.0j
    f3 = 0.0 + 0.0j
    if n >= 3:
        z1_sq = z1 * z1
        one_minus = 1.0 - expnz
        row_a = z1_sq.sum(axis=2)
        row_b = one_minus.sum(axis=2)
        collide = (z1_sq * one_minus).sum(axis=2)
        f2 = u * (((row_a * row_b - collide).sum(axis=1)) * weight).sum()
    if n >= 4:
        row_q = expnz.sum(axis=2)
        qq = np.einsum("pjl,pkl->pjk", expnz, expnz)
        s_j = row_q[:, :, None] - 1.0 - expnz
        s_k = row_q[:, None, :] - 1.0 - np.swapaxes(expnz, 1, 2)
        t_jk = qq - np.swapaxes(expnz, 1, 2) - expnz
        pair_sum = s_j * s_k - t_jk
        count = (n - 2.0) * (n - 3.0)
        f3 = u * (((z1_sq * (count - pair_sum)).sum(axis=(1, 2))) * weight).sum()
    return complex(f1), complex(f2), complex(f3)


def _combine_f(n: int, f1: complex, f2: complex, f3: complex) -> complex:
    return f1 / (4.0 * n) + f2 / (n * n * (n - 1)) + f3 / (4.0 * n * n * (n - 1))


def _f_block(u: float, n: int, c: np.ndarray, z1: np.ndarray) -> complex:
    return _combine_f(n, *_f_parts(u, n, c, z1))


@dataclass(frozen=True)
class FTerms:
    """The three permutation sums and their weighted combination f(u)."""

    f1: complex
    f2: complex
    f3: complex
    f: complex


def f_terms(Y: ComplexScoreMatrix, u: float, enum_cap: int = 10) -> FTerms:
    """Evaluate f1(u), f2(u), f3(u), and f(u) by exact permutation sums."""
    n = Y.n
    if n > enum_cap:
        raise CapExceededError(f"f-terms need {n}! permutation terms, above cap {enum_cap}")
    f1 = 0.0 + 0.0j
    f2 = 0.0 + 0.0j
    f3 = 0.0 + 0.0j
    for block in perm_blocks(n):
        c, z1 = _pair_diff_tensor(Y.y, block)
        p1, p2, p3 = _f_parts(u, n, c, z1)
        f1 += p1
        f2 += p2
        f3 += p3
    return FTerms(f1=f1, f2=f2, f3=f3, f=_combine_f(n, f1, f2, f3))


def f_terms_reference(Y: ComplexScoreMatrix, u: float) -> FTerms:
    """Literal nested-loop evaluation of the f sums (small n oracle).

    O(n^4 * n!); intended for n <= 4 cross-checks of the vectorised path.
    """
    y = Y.y
    n = Y.n

    def z(j, k, r, s):
        return y[j, r] - y[k, r] - y[j, s] + y[k, s]

    f1 = 0.0 + 0.0j
    f2 = 0.0 + 0.0j
    f3 = 0.0 + 0.0j
    idx = range(n)
    for perm in iter_permutations(idx):
        c_r = sum(y[j, perm[j]] for j in idx)
        w = cmath.exp(u * c_r)
        for j in idx:
            for k in idx:
                if k == j:
                    continue
                z1 = z(j, k, perm[j], perm[k])
                f1 += z1 * (1.0 - u * z1 - cmath.exp(-u * z1)) * w
                for l in idx:
                    if l in (j, k):
                        continue
                    z2 = z(j, l, perm[l], perm[j])
                    f2 += u * z1 * z1 * (1.0 - cmath.exp(u * z2)) * w
                    for mm in idx:
                        if mm in (j, k, l):
                            continue
                        z3 = z(k, mm, perm[mm], perm[k])
                        f3 += u * z1 * z1 * (1.0 - cmath.exp(u * z2 + u * z3)) * w
    f = f1 / (4.0 * n) + f2 / (n * n * (n - 1)) + f3 / (4.0 * n * n * (n - 1))
    return FTerms(f1=f1, f2=f2, f3=f3, f=f)


def f_residual(Y: ComplexScoreMatrix, u: float, enum_cap: int = 10) -> float:
    """Pointwise defect |sum_r (c_r - alpha - u beta) exp(u c_r) - f(u)|.

    Zero up to roundoff for every u in [0, 1]; this is the derivative-form
    identity underlying the integral identity.
    """
    n = Y.n
    if n > enum_cap:
        raise CapExceededError(f"residual needs {n}! permutation terms, above cap {enum_cap}")
    terms = identity_terms(Y, enum_cap=0)
    direct = 0.0 + 0.0j
    f_val = 0.0 + 0.0j
    for block in perm_blocks(n):
        c, z1 = _pair_diff_tensor(Y.y, block)
        direct += ((c - terms.alpha - u * terms.beta) * np.exp(u * c)).sum()
        f_val += _f_block(u, n, c, z1)
    return abs(complex(direct) - complex(f_val))


@dataclass(frozen=True)
class IdentityCheck:
    """Both sides of the permanent identity and their residual."""

    lhs: complex
    rhs: complex
    residual: float


def identity_check(Y: ComplexScoreMatrix, tol: float = 1e-10, enum_cap: int = 10) -> IdentityCheck:
    """Evaluate both sides of the permanent identity.

    lhs = perm(exp(y))/n! - exp(alpha + beta/2) with the permanent computed by
    Ryser's formula; rhs integrates f(u) exp((1-u) alpha + (1-u^2) beta/2)
    over [0, 1] by adaptive quadrature to absolute tolerance ``tol``.  The
    residual stays within a small multiple of ``tol``.
    """
    if tol <= 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    n = Y.n
    if n > enum_cap:
        raise CapExceededError(f"identity check needs {n}! permutation terms, above cap {enum_cap}")
    terms = identity_terms(Y, enum_cap=0)
    fact = math.factorial(n)
    lhs = permanent(np.exp(Y.y)) / fact - cmath.exp(terms.alpha + terms.beta / 2.0)

    blocks = [_pair_diff_tensor(Y.y, block) for block in perm_blocks(n)]

    def integrand(u: float) -> complex:
        f_val = sum(_f_block(u, n, c, z1) for c, z1 in blocks)
        return f_val * cmath.exp((1.0 - u) * terms.alpha + (1.0 - u * u) * terms.beta / 2.0)

    rhs = adaptive_simpson(integrand, 0.0, 1.0, tol=tol * fact) / fact
    return IdentityCheck(lhs=complex(lhs), rhs=complex(rhs), residual=abs(lhs - rhs))


def swap_identity_check(
    Y: ComplexScoreMatrix,
    j: int,
    k: int,
    enum_cap: int = 10,
) -> float:
    """Residual of the row-exchange identity for a fixed test family.

    For any function g of two indices,

        sum_r g(r(j), r(k)) exp(c_r)
            = sum_r g(r(k), r(j)) exp(z[j,k,r(k),r(j)]) exp(c_r),

    because swapping the images of j and k permutes the summands.  Checked
    here for g(v, w) = v + 2w and g(v, w) = v * w over 1-based index values;
    returns the larger of the two residuals.
    """
    n = Y.n
    if j == k:
        raise ParameterError("j and k must be distinct")
    for name, idx in (("j", j), ("k", k)):
        if not 1 <= idx <= n:
            raise IndexError(f"index {name}={idx} out of range 1..{n}")
    if n > enum_cap:
        raise CapExceededError(f"swap check needs {n}! permutation terms, above cap {enum_cap}")
    jj, kk = j - 1, k - 1
    worst = 0.0
    for g in (lambda v, w: v + 2.0 * w, lambda v, w: v * w):
        lhs = 0.0 + 0.0j
        rhs = 0.0 + 0.0j
        for block in perm_blocks(n):
            c, z1 = _pair_diff_tensor(Y.y, block)
            weight = np.exp(c)
            rj = block[:, jj] + 1.0
            rk = block[:, kk] + 1.0
            lhs += (g(rj, rk) * weight).sum()
            # z[j,k,r(k),r(j)] = -z1[p, j, k]
            rhs += (g(rk, rj) * np.exp(-z1[:, jj, kk]) * weight).sum()
        worst = max(worst, abs(complex(lhs) - complex(rhs)))
    return worst
