"""Jacobi theta numerics on the torus C/(Z + Z*tau).

Implements the odd theta function

    theta1(u, tau) = -sum_m exp(pi*i*(m+1/2)^2*tau + 2*pi*i*(m+1/2)*(u+1/2)),

its u-derivatives up to third order, the logarithmic derivative
rho = theta1'/theta1, and the elliptic Cauchy kernel

    s(u; lam) = theta1(u-lam) * theta1'(0) / (theta1(u) * theta1(-lam)).

All evaluators accept scalars or numpy arrays of points.  Arguments are
reduced into the fundamental cell with the exact quasi-periodicity factors
before summation, so the series stays well conditioned for large |u|.

Sign convention: this theta1 equals minus the theta_{11} of the classical
tables; any mismatch against external references is a global sign.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .errors import (InvalidOrder, LambdaOnLattice, NonConvergent,
                     PoleAtLatticePoint)
from .report import IdentityReport

TWO_PI_I = 2j * np.pi

#: proximity radius around lattice points treated as "on a pole"
POLE_TOL = 1e-10


@dataclass(frozen=True)
class TorusParam:
    """Modulus of the torus; the lattice is Z + Z*tau."""

    tau: complex

    def __post_init__(self):
        if not (self.tau.imag > 0):
            raise ValueError("tau must have positive imaginary part")


@dataclass(frozen=True)
class SeriesPolicy:
    """Truncation policy for the defining q-series.

    The sum runs over symmetric index pairs (m, -1-m); it stops once the
    last pair's magnitude drops below rel_tol times the largest term seen,
    which is scale free.
    """

    rel_tol: float = 1e-18
    max_terms: int = 64

    def __post_init__(self):
        if not (self.rel_tol > 0):
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 8:
            raise ValueError("max_terms must be at least 8")


DEFAULT_POLICY = SeriesPolicy()


def lattice_distance(u, tau: complex):
    """Distance from u (scalar or array) to the nearest lattice point."""
    u = np.asarray(u, dtype=complex)
    b = u.imag / tau.imag
    a = u.real - b * tau.real
    nearest = np.rint(a) + np.rint(b) * tau
    return np.abs(u - nearest)


def _reduce(u, tau: complex):
    """Split u = u_red + a + b*tau with integer a, b and u_red near the
    centre of the fundamental cell."""
    u = np.asarray(u, dtype=complex)
    b = np.rint(u.imag / tau.imag)
    a = np.rint(u.real - b * tau.real)
    u_red = u - a - b * tau
    return u_red, a, b


#: below this |u|, values come from the Taylor expansion at the lattice zero
SMALL_U = 1e-3


def _theta_derivs_reduced(u_red, tau: complex, kmax: int, policy: SeriesPolicy):
    """theta1 and derivatives 0..kmax at already-reduced points (termwise)."""
    u_red = np.asarray(u_red, dtype=complex)
    sums = [np.zeros_like(u_red) for _ in range(kmax + 1)]
    max_mag = np.zeros(u_red.shape, dtype=float)
    converged = False
    pair_budget = max(4, policy.max_terms // 2)
    for k in range(pair_budget):
        pair_mag = np.zeros(u_red.shape, dtype=float)
        for m in (k, -1 - k):
            half = m + 0.5
            term = np.exp(1j * np.pi * half * half * tau
                          + TWO_PI_I * half * (u_red + 0.5))
            fac = np.ones_like(term)
            dfac = TWO_PI_I * half
            for order in range(kmax + 1):
                sums[order] += fac * term
                fac = fac * dfac
            pair_mag = np.maximum(pair_mag, np.abs(term))
        max_mag = np.maximum(max_mag, pair_mag)
        if k >= 1 and np.all(pair_mag <= policy.rel_tol * max_mag):
            converged = True
            break
    if not converged:
        raise NonConvergent(
            f"theta series did not meet rel_tol={policy.rel_tol} within "
            f"{policy.max_terms} terms (Im tau = {tau.imag})")
    out = [-s for s in sums]

    # near the simple zero the direct sum cancels catastrophically; switch
    # to the Taylor expansion around the zero there
    small = np.abs(u_red) < SMALL_U
    if np.any(small):
        zd = _zero_derivs(tau, kmax + 7, policy)
        w = u_red[small] if u_red.ndim else u_red
        for order in range(kmax + 1):
            acc = np.zeros_like(np.atleast_1d(w))
            fact = 1.0
            for step in range(7):
                m = order + step
                if m < len(zd) and zd[m] != 0:
                    acc += zd[m] / fact * np.atleast_1d(w) ** step
                fact *= step + 1
            if u_red.ndim:
                out[order][small] = acc
            else:
                out[order] = acc[0]
    return out


@lru_cache(maxsize=16)
def _zero_derivs(tau: complex, upto: int, policy: SeriesPolicy):
    """theta1^{(m)}(0) for m = 0..upto; even orders vanish by oddness."""
    sums = [0.0 + 0.0j for _ in range(upto + 1)]
    pair_budget = max(4, policy.max_terms // 2)
    max_mag = 0.0
    for k in range(pair_budget):
        pair_mag = 0.0
        for m in (k, -1 - k):
            half = m + 0.5
            term = cmath.exp(1j * np.pi * half * half * tau
                             + complex(TWO_PI_I) * half * 0.5)
            fac = 1.0 + 0.0j
            dfac = complex(TWO_PI_I) * half
            for order in range(upto + 1):
                sums[order] += fac * term
                fac *= dfac
            pair_mag = max(pair_mag, abs(term))
        max_mag = max(max_mag, pair_mag)
        if k >= 1 and pair_mag <= policy.rel_tol * max_mag:
            break
    vals = [-s for s in sums]
    for m in range(0, upto + 1, 2):
        vals[m] = 0.0 + 0.0j          # exact: the function is odd
    return tuple(vals)


def theta_derivs(u, tp: TorusParam, kmax: int,
                 policy: SeriesPolicy = DEFAULT_POLICY):
    """theta1 and derivatives 0..kmax at arbitrary points (no pole guards;
    accurate arbitrarily close to the lattice).

    Uses theta1(u) = (-1)^(a+b) exp(-pi*i*(b^2*tau + 2*b*u_red)) theta1(u_red)
    and the product rule for the exponential prefactor.
    """
    tau = tp.tau
    u_red, a, b = _reduce(u, tau)
    red = _theta_derivs_reduced(u_red, tau, kmax, policy)
    sign = np.where((a + b) % 2 == 0, 1.0, -1.0)
    prefac = sign * np.exp(-1j * np.pi * (b * b * tau + 2.0 * b * u_red))
    mu = -TWO_PI_I * b          # d/du of the prefactor exponent
    out = []
    for j in range(kmax + 1):
        acc = np.zeros_like(np.asarray(u_red, dtype=complex))
        for i in range(j + 1):
            acc += comb(j, i) * mu ** (j - i) * red[i]
        out.append(prefac * acc)
    return out


def _scalarize(x, scalar_input: bool):
    return complex(x[()]) if scalar_input and x.ndim == 0 else x


def theta1(u, tp: TorusParam, policy: SeriesPolicy = DEFAULT_POLICY):
    """Evaluate theta1(u, tau)."""
    scalar = np.isscalar(u) or isinstance(u, complex)
    vals = theta_derivs(u, tp, 0, policy)[0]
    return _scalarize(vals, scalar)


def theta1_deriv(u, tp: TorusParam, order: int,
                 policy: SeriesPolicy = DEFAULT_POLICY):
    """Evaluate the order-th u-derivative of theta1, order in {1, 2, 3}."""
    if order not in (1, 2, 3):
        raise InvalidOrder(f"derivative order must be 1, 2 or 3, got {order}")
    scalar = np.isscalar(u) or isinstance(u, complex)
    vals = theta_derivs(u, tp, order, policy)[order]
    return _scalarize(vals, scalar)


def _check_off_lattice(u, tau: complex, err, what: str):
    dist = lattice_distance(u, tau)
    if np.any(dist < POLE_TOL):
        raise err(f"{what} within {POLE_TOL} of the period lattice")


def rho(u, tp: TorusParam, policy: SeriesPolicy = DEFAULT_POLICY):
    """rho(u) = theta1'(u) / theta1(u); simple pole on the lattice."""
    _check_off_lattice(u, tp.tau, PoleAtLatticePoint, "rho argument")
    scalar = np.isscalar(u) or isinstance(u, complex)
    t0, t1 = theta_derivs(u, tp, 1, policy)
    return _scalarize(t1 / t0, scalar)


def rho_prime(u, tp: TorusParam, policy: SeriesPolicy = DEFAULT_POLICY):
    """rho'(u) = (theta1'' theta1 - theta1'^2) / theta1^2."""
    _check_off_lattice(u, tp.tau, PoleAtLatticePoint, "rho' argument")
    scalar = np.isscalar(u) or isinstance(u, complex)
    t0, t1, t2 = theta_derivs(u, tp, 2, policy)
    return _scalarize((t2 * t0 - t1 * t1) / (t0 * t0), scalar)


def s_func(u, lam: complex, tp: TorusParam,
           policy: SeriesPolicy = DEFAULT_POLICY):
    """s(u; lam) = theta1(u-lam) theta1'(0) / (theta1(u) theta1(-lam))."""
    _check_off_lattice(lam, tp.tau, LambdaOnLattice, "lambda")
    _check_off_lattice(u, tp.tau, PoleAtLatticePoint, "s argument")
    scalar = np.isscalar(u) or isinstance(u, complex)
    u = np.asarray(u, dtype=complex)
    num = theta1(u - lam, tp, policy) * theta1_deriv(0.0, tp, 1, policy)
    den = theta_derivs(u, tp, 0, policy)[0] * theta1(-lam, tp, policy)
    return _scalarize(np.asarray(num / den), scalar)


def s_func_du(u, lam: complex, tp: TorusParam,
              policy: SeriesPolicy = DEFAULT_POLICY):
    """Exact u-derivative of s(u; lam), assembled from theta1 and theta1'.

    The quotient form stays finite where theta1(u-lam) vanishes, unlike
    s * (rho(u-lam) - rho(u)).
    """
    _check_off_lattice(lam, tp.tau, LambdaOnLattice, "lambda")
    _check_off_lattice(u, tp.tau, PoleAtLatticePoint, "s argument")
    scalar = np.isscalar(u) or isinstance(u, complex)
    u = np.asarray(u, dtype=complex)
    a0, a1 = theta_derivs(u - lam, tp, 1, policy)
    b0, b1 = theta_derivs(u, tp, 1, policy)
    c = theta1_deriv(0.0, tp, 1, policy) / theta1(-lam, tp, policy)
    return _scalarize(np.asarray(c * (a1 * b0 - a0 * b1) / (b0 * b0)), scalar)


def theta_ddd_ratio(tp: TorusParam, policy: SeriesPolicy = DEFAULT_POLICY) -> complex:
    """theta1'''(0) / theta1'(0), the constant in second-order expansions."""
    d = theta_derivs(0.0, tp, 3, policy)
    return complex(d[3] / d[1])


def _draw_point(rng: np.random.Generator, tau: complex) -> complex:
    # interior of the fundamental cell, away from the edges
    return complex((0.05 + 0.9 * rng.random()) + (0.05 + 0.9 * rng.random()) * tau)


def verify_theta_identities(tp: TorusParam, samples: int = 100,
                            rng_seed: int = 0,
                            policy: SeriesPolicy = DEFAULT_POLICY,
                            tolerance: float = 1e-12) -> IdentityReport:
    """Check the two kernel identities at random admissible points.

    Identity A (pole-zero cancellation):
        s(u-tk; lam) * (rho(u-tj) + rho(tj-tk) - rho(u-tk-lam) - rho(lam))
            = s(u-tj; lam) * s(tj-tk; lam)
    Identity B (three-term decomposition of a theta-ratio twist):
        (theta1(u-tk)/theta1(u-tl)) * s(u-tj; lam - tk + tl)
            = (theta1(tj-tk)/theta1(tj-tl)) * s(u-tj; lam)
            + (theta1(tk-tl) theta1(lam-tk+tj)
               / (theta1(tj-tl) theta1(lam-tk+tl))) * s(u-tl; lam)

    Degenerate draws (coinciding points mod the lattice, lattice lambda)
    are resampled, never evaluated.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(rng_seed)
    tau = tp.tau

    def admissible(pts, shifts):
        vals = list(pts) + list(shifts)
        return all(lattice_distance(v, tau) > 1e-6 for v in vals)

    res_a = 0.0
    res_b = 0.0
    drew = 0
    while drew < samples:
        u, tj, tk, tl, lam = (_draw_point(rng, tau) for _ in range(5))
        diffs = [u - tj, u - tk, u - tl, tj - tk, tj - tl, tk - tl,
                 u - tk - lam, lam, lam - tk + tl, lam - tk + tj,
                 u - tj - lam, u - tl - lam]
        if not admissible([], diffs):
            continue
        drew += 1

        lhs = s_func(u - tk, lam, tp, policy) * (
            rho(u - tj, tp, policy) + rho(tj - tk, tp, policy)
            - rho(u - tk - lam, tp, policy) - rho(lam, tp, policy))
        rhs = s_func(u - tj, lam, tp, policy) * s_func(tj - tk, lam, tp, policy)
        res_a = max(res_a, abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs)))

        lam2 = lam - tk + tl
        lhs = (theta1(u - tk, tp, policy) / theta1(u - tl, tp, policy)) \
            * s_func(u - tj, lam2, tp, policy)
        rhs = (theta1(tj - tk, tp, policy) / theta1(tj - tl, tp, policy)) \
            * s_func(u - tj, lam, tp, policy) \
            + (theta1(tk - tl, tp, policy) * theta1(lam - tk + tj, tp, policy)
               / (theta1(tj - tl, tp, policy)
                  * theta1(lam - tk + tl, tp, policy))) \
            * s_func(u - tl, lam, tp, policy)
        res_b = max(res_b, abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs)))

    report = IdentityReport(f"theta identities (tau={tau}, {samples} samples)")
    report.add_numeric("kernel_pole_cancellation", res_a, tolerance)
    report.add_numeric("kernel_three_term", res_b, tolerance)
    return report
