"""Permanents, the permutation-statistic characteristic function, and its bounds.

The characteristic function of S = sum_j a[j, pi(j)] under a uniform random
permutation is a permanent with unit-modulus entries:

    phi(t) = perm( exp(i t a[j, r]) ) / n!.

Permanents are evaluated exactly by Ryser's inclusion-exclusion formula

    perm(M) = (-1)^n  sum_{S subset [n], S nonempty}  (-1)^|S|
              prod_j  sum_{r in S} M[j, r]

iterated in Gray-code order with incremental row-sum updates, O(2^n * n).
A naive permutation-sum evaluation is kept alongside as the independent
oracle for small n.

Three explicit inequalities for phi are implemented:

* a modulus bound,
      |phi(t)| <= ( mean over distinct index pairs of cos^2(t b / 2) )^(floor(n/2)/2),
  with the mean normalised by n^2 (n-1)^2;
* an exponential damping bound h_ell(t) for permutation sums restricted by
  fixing ell rows and columns,
      h_ell(t) = min(1, exp(ell - (n-ell-1)/(4(n-1)) * t^2 *
                              (sigma2 - gamma(2 kappa t)/4))) * [n >= ell];
* two bounds on |phi(t) - exp(i t mu - sigma2 t^2 / 2)|: an integral form
  (adaptive quadrature over an auxiliary variable u in [0, 1]) and a
  closed form, plus a simplified closed form available for n >= 6.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .analytic import kappa
from .errors import CapExceededError, ParameterError
from .permtables import full_table
from .quadrature import adaptive_simpson_vec
from .scores import GammaProfile, ScoreMatrix, _as_profile, require_nondegenerate


def permanent(matrix, perm_cap: int = 20) -> complex:
    """Exact permanent of a square complex matrix via Ryser's formula.

    Gray-code subset iteration updates one column per step, so the cost is
    O(2^n * n).  ``perm_cap`` guards against accidental exponential blowups.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ParameterError(f"permanent needs a square matrix, got shape {m.shape}")
    n = m.shape[0]
    if n > perm_cap:
        raise CapExceededError(f"n = {n} exceeds the permanent cap {perm_cap}")
    if n == 0:
        return 1.0 + 0.0j
    cols = np.ascontiguousarray(m.T)
    rowsums = np.zeros(n, dtype=complex)
    total = 0.0 + 0.0j
    gray = 0
    sign = 1.0
    for step in range(1, 1 << n):
        j = (step & -step).bit_length() - 1
        bit = 1 << j
        if gray & bit:
            rowsums -= cols[j]
        else:
            rowsums += cols[j]
        gray ^= bit
        sign = -sign
        total += sign * rowsums.prod()
    return complex(total if n % 2 == 0 else -total)


def permanent_reference(matrix) -> complex:
    """Naive permutation-sum permanent, the independent oracle (n <= 8)."""
    m = np.asarray(matrix, dtype=complex)
    n = m.shape[0]
    table = full_table(n)
    return complex(m[np.arange(n), table].prod(axis=1).sum())


def charfn(m: ScoreMatrix, t: float, perm_cap: int = 20) -> complex:
    """Characteristic function E exp(i t S) = perm(exp(i t a)) / n!."""
    return permanent(np.exp(1j * t * m.a), perm_cap=perm_cap) / math.factorial(m.n)


def charfn_grid(m: ScoreMatrix, ts, perm_cap: int = 20) -> np.ndarray:
    """phi evaluated on an array of t values (Ryser vectorised over t)."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    n = m.n
    if n > perm_cap:
        raise CapExceededError(f"n = {n} exceeds the permanent cap {perm_cap}")
    cols = np.exp(1j * ts[:, None, None] * m.a.T[None, :, :])  # [t, col, row]
    rowsums = np.zeros((ts.size, n), dtype=complex)
    total = np.zeros(ts.size, dtype=complex)
    gray = 0
    sign = 1.0
    for step in range(1, 1 << n):
        j = (step & -step).bit_length() - 1
        bit = 1 << j
        if gray & bit:
            rowsums -= cols[:, j, :]
        else:
            rowsums += cols[:, j, :]
        gray ^= bit
        sign = -sign
        total += sign * rowsums.prod(axis=1)
    if n % 2:
        total = -total
    return total / math.factorial(n)


def gauss_cf(m: ScoreMatrix | GammaProfile, t: float) -> complex:
    """Characteristic function exp(i t mu - sigma2 t^2 / 2) of the matching normal."""
    stats = _as_profile(m).stats
    return cmath.exp(1j * t * stats.mu - stats.sigma2 * t * t / 2.0)


def charfn_bound(m: ScoreMatrix | GammaProfile, t: float) -> float:
    """Modulus bound (mean cos^2(t b / 2))^(floor(n/2)/2) for |phi(t)|.

    The mean runs over all index quadruples with distinct rows and distinct
    columns, normalised by n^2 (n-1)^2; the bound is tight for the 2 x 2
    matrix [[t, -t], [-t, t]].
    """
    profile = _as_profile(m)
    n = profile.n
    mean_cos2 = float((np.cos(0.5 * t * profile.b_abs) ** 2).sum()) / (
        n * n * (n - 1) * (n - 1)
    )
    return mean_cos2 ** ((n // 2) / 2.0)


@dataclass(frozen=True)
class DampingBound:
    """Value of the exponential damping bound h_ell at one (ell, t)."""

    ell: float
    t: float
    value: float


def h_ell(m: ScoreMatrix | GammaProfile, t: float, ell: float) -> DampingBound:
    """Damping bound for permutation sums with ell rows and columns fixed.

    h_ell(t) = min(1, exp(ell - (n-ell-1)/(4(n-1)) t^2 (sigma2 - gamma(2 kappa t)/4)))
    when n >= ell and 0 otherwise.  The variance enters through the same
    quadruple sum as gamma, which keeps sigma2 - gamma(.)/4 >= 0 termwise.
    """
    if ell < 0:
        raise ParameterError(f"ell must be nonnegative, got {ell}")
    profile = _as_profile(m)
    n = profile.n
    if n < ell:
        return DampingBound(ell=ell, t=t, value=0.0)
    kap, _ = kappa()
    damp = profile.sigma2_quad - profile.gamma(2.0 * kap * t) / 4.0
    exponent = ell - (n - ell - 1.0) / (4.0 * (n - 1.0)) * t * t * damp
    value = 1.0 if exponent >= 0.0 else min(1.0, math.exp(exponent))
    return DampingBound(ell=ell, t=t, value=value)


def restricted_sum_check(
    m: ScoreMatrix,
    cols_removed,
    rows_removed,
    t: float,
    enum_cap: int = 10,
) -> tuple[float, float]:
    """Compare a restricted permutation sum against its damping bound.

    ``cols_removed`` and ``rows_removed`` are equal-sized sets of 1-based
    column and row indices (sizes ell).  The left-hand side is

        | sum over bijections r from the remaining rows onto the remaining
          columns of exp(i t sum_j a[j, r(j)]) |  /  (n - ell)!

    and the right-hand side is h_ell(t); lhs <= rhs holds for every t.
    """
    n = m.n
    cols = sorted(set(int(c) for c in cols_removed))
    rows = sorted(set(int(r) for r in rows_removed))
    if len(cols) != len(cols_removed) or len(rows) != len(rows_removed):
        raise ParameterError("removed index sets must not contain duplicates")
    if len(cols) != len(rows):
        raise ParameterError("removed row and column sets must have equal size")
    for idx in cols + rows:
        if not 1 <= idx <= n:
            raise IndexError(f"index {idx} out of range 1..{n}")
    ell = len(cols)
    k = n - ell
    if k > enum_cap:
        raise CapExceededError(f"restricted sum needs {k}! terms, above cap {enum_cap}")
    keep_rows = np.array([r for r in range(n) if r + 1 not in rows], dtype=int)
    keep_cols = np.array([c for c in range(n) if c + 1 not in cols], dtype=int)
    sub = m.a[np.ix_(keep_rows, keep_cols)]
    table = full_table(k)
    if k == 0:
        lhs = 1.0
    else:
        s = sub[np.arange(k), table].sum(axis=1)
        lhs = abs(np.exp(1j * t * s).sum()) / math.factorial(k)
    rhs = h_ell(m, t, ell).value
    return float(lhs), float(rhs)


def _damping_many(profile: GammaProfile, ts: np.ndarray, ell: int, gamma_2kt: np.ndarray) -> np.ndarray:
    """h_ell on an array of t values, given gamma(2 kappa t) precomputed."""
    n = profile.n
    if n < ell:
        return np.zeros(ts.shape)
    damp = profile.sigma2_quad - gamma_2kt / 4.0
    exponent = ell - (n - ell - 1.0) / (4.0 * (n - 1.0)) * ts * ts * damp
    return np.minimum(1.0, np.exp(np.minimum(exponent, 0.0)))


def cf_diff_bound_integral(
    m: ScoreMatrix | GammaProfile,
    t: float,
    tol: float = 1e-10,
) -> float:
    """Integral-form bound on |phi(t) - exp(i t mu - sigma2 t^2/2)|.

    Integrates, over u in [0, 1] by adaptive Simpson quadrature to absolute
    tolerance ``tol``,

        t^2 u [ h_2(tu) gamma(tu/4) / 2
                + 2(n-2)/(n(n-1)) h_3(tu) gamma(tu/2)
                + (n-2)(n-3)/(n(n-1)) h_4(tu) gamma(tu/2) ]
        * exp(-(1-u^2) sigma2 t^2 / 2).

    The h_3 term vanishes for n = 2 and the h_4 term for n <= 3.
    """
    if tol <= 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    profile = _as_profile(m)
    require_nondegenerate(profile.stats)
    if t == 0.0:
        return 0.0
    n = profile.n
    sigma2 = profile.sigma2_quad
    kap, _ = kappa()
    c3 = 2.0 * (n - 2.0) / (n * (n - 1.0))
    c4 = (n - 2.0) * (n - 3.0) / (n * (n - 1.0))

    def integrand(us: np.ndarray) -> np.ndarray:
        tu = t * us
        stacked = profile.gamma_split_many(np.concatenate((tu / 4.0, tu / 2.0, 2.0 * kap * tu)))
        g14, g12, g2k = np.split(stacked, 3)
        inner = 0.5 * _damping_many(profile, tu, 2, g2k) * g14
        if n >= 3:
            inner += c3 * _damping_many(profile, tu, 3, g2k) * g12
        if n >= 4:
            inner += c4 * _damping_many(profile, tu, 4, g2k) * g12
        return t * t * us * inner * np.exp(-(1.0 - us * us) * sigma2 * t * t / 2.0)

    return float(adaptive_simpson_vec(integrand, 0.0, 1.0, tol=tol))


@dataclass(frozen=True)
class ClosedFormBounds:
    """Closed-form CF-difference bounds; ``simplified`` requires n >= 6."""

    general: float
    simplified: float | None


def cf_diff_bound_closed(m: ScoreMatrix | GammaProfile, t: float) -> ClosedFormBounds:
    """Closed-form bounds on |phi(t) - exp(i t mu - sigma2 t^2/2)|.

    The general form is

        t^2/4 gamma(t/6) h_2(t) + (n-2) t^2 / (n(n-1)) gamma(t/3) h_3(t)
        + (n-2)(n-3) t^2 / (2 n(n-1)) gamma(t/3) h_4(t),

    it dominates the integral-form bound.  For n >= 6 the coarser

        32 t^2 gamma(t/3) exp(-t^2/20 (sigma2 - gamma(2 kappa t)/4))

    is evaluated as well.
    """
    profile = _as_profile(m)
    require_nondegenerate(profile.stats)
    n = profile.n
    t2 = t * t
    general = t2 / 4.0 * profile.gamma(t / 6.0) * h_ell(profile, t, 2).value
    if n >= 3:
        general += (n - 2.0) * t2 / (n * (n - 1.0)) * profile.gamma(t / 3.0) * h_ell(profile, t, 3).value
    if n >= 4:
        general += (
            (n - 2.0) * (n - 3.0) * t2 / (2.0 * n * (n - 1.0))
            * profile.gamma(t / 3.0)
            * h_ell(profile, t, 4).value
        )
    simplified = None
    if n >= 6:
        kap, _ = kappa()
        damp = profile.sigma2_quad - profile.gamma(2.0 * kap * t) / 4.0
        simplified = 32.0 * t2 * profile.gamma(t / 3.0) * math.exp(-t2 / 20.0 * damp)
    return ClosedFormBounds(general=float(general), simplified=simplified)


def charfn_bound_grid(m: ScoreMatrix | GammaProfile, ts) -> np.ndarray:
    """Modulus bound evaluated on an array of t values in one pass."""
    profile = _as_profile(m)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    n = profile.n
    out = np.empty(ts.shape)
    step = max(1, (1 << 22) // max(1, profile.b_abs.size))
    for start in range(0, ts.size, step):
        block = np.cos(0.5 * ts[start : start + step, None] * profile.b_abs[None, :])
        out[start : start + step] = (block * block).sum(axis=1)
    out /= n * n * (n - 1.0) * (n - 1.0)
    return out ** ((n // 2) / 2.0)


def cf_diff_bound_closed_grid(
    m: ScoreMatrix | GammaProfile, ts
) -> tuple[np.ndarray, np.ndarray | None]:
    """Closed-form bounds evaluated on an array of t values in one pass."""
    profile = _as_profile(m)
    require_nondegenerate(profile.stats)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    n = profile.n
    kap, _ = kappa()
    stacked = profile.gamma_many(np.concatenate((ts / 6.0, ts / 3.0, 2.0 * kap * ts)))
    g16, g13, g2k = np.split(stacked, 3)
    t2 = ts * ts
    general = t2 / 4.0 * g16 * _damping_many(profile, ts, 2, g2k)
    if n >= 3:
        general = general + (n - 2.0) * t2 / (n * (n - 1.0)) * g13 * _damping_many(profile, ts, 3, g2k)
    if n >= 4:
        general = general + (
            (n - 2.0) * (n - 3.0) * t2 / (2.0 * n * (n - 1.0)) * g13 * _damping_many(profile, ts, 4, g2k)
        )
    simplified = None
    if n >= 6:
        simplified = 32.0 * t2 * g13 * np.exp(-t2 / 20.0 * (profile.sigma2_quad - g2k / 4.0))
    return general, simplified


@dataclass(frozen=True)
class CfEvaluation:
    """Characteristic function value at one t together with its bounds."""

    t: float
    phi: complex
    gauss: complex
    modulus_bound: float
    diff_bound_integral: float
    diff_bound_closed: float
    diff_bound_closed_simplified: float | None

    def as_dict(self) -> dict:
        return {
            "t": float(self.t),
            "phi": {"re": self.phi.real, "im": self.phi.imag},
            "gauss": {"re": self.gauss.real, "im": self.gauss.imag},
            "modulus_bound": float(self.modulus_bound),
            "diff_bound_integral": float(self.diff_bound_integral),
            "diff_bound_closed": float(self.diff_bound_closed),
            "diff_bound_closed_simplified": self.diff_bound_closed_simplified,
        }


def evaluate_cf(
    m: ScoreMatrix,
    t: float,
    tol: float = 1e-10,
    perm_cap: int = 20,
) -> CfEvaluation:
    """Evaluate phi(t), the matching normal CF, and all three bounds at t."""
    profile = _as_profile(m)
    closed = cf_diff_bound_closed(profile, t)
    return CfEvaluation(
        t=t,
        phi=charfn(profile.matrix, t, perm_cap=perm_cap),
        gauss=gauss_cf(profile, t),
        modulus_bound=charfn_bound(profile, t),
        diff_bound_integral=cf_diff_bound_integral(profile, t, tol=tol),
        diff_bound_closed=closed.general,
        diff_bound_closed_simplified=closed.simplified,
    )
