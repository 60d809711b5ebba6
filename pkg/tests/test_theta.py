"""Theta-layer tests against an independent high-precision oracle.

The oracle sums the defining series directly in mpmath at 32 digits with a
fixed, generous term count; it shares no code with the implementation.
"""

import cmath

import mpmath as mp
import numpy as np
import pytest

from rwkit.errors import (InvalidOrder, LambdaOnLattice, NonConvergent,
                          PoleAtLatticePoint)
from rwkit.theta import (SeriesPolicy, TorusParam, rho, rho_prime, s_func,
                         s_func_du, theta1, theta1_deriv, theta_ddd_ratio,
                         verify_theta_identities)

TAU_I = TorusParam(1j)
TAU_GEN = TorusParam(0.3 + 0.8j)


def ref_theta1(u, tau, order=0, terms=40):
    """Independent reference: the defining sum at 32 digits, 2x precision."""
    with mp.workdps(32):
        u, tau = mp.mpc(u), mp.mpc(tau)
        total = mp.mpc(0)
        for m in range(-terms, terms + 1):
            h = m + mp.mpf(1) / 2
            total += (2j * mp.pi * h) ** order * mp.exp(
                1j * mp.pi * h * h * tau + 2j * mp.pi * h * (u + mp.mpf(1) / 2))
        return complex(-total)


# frozen oracle values (ref_theta1 at 32 digits)
THETA_QUARTER_I = 0.6435897640385858840903268 + 0j
THETA_D1_ZERO_I = 2.848694603987787316079985 + 0j
THETA_GEN = 0.9090019609780887386499079 + 0.6599785829593026077329968j
THETA_LARGE_I = 3297282.334211407812467952 - 800313.0449341054549694898j


class TestTheta1:
    def test_zero_at_origin(self):
        assert abs(theta1(0.0, TAU_I)) < 1e-14

    def test_reference_value(self):
        assert abs(theta1(0.25, TAU_I) - THETA_QUARTER_I) < 1e-14

    def test_reference_value_generic_tau(self):
        assert abs(theta1(0.3 + 0.21j, TAU_GEN) - THETA_GEN) < 1e-13

    def test_argument_reduction_large_argument(self):
        v = theta1(3.7 - 2.2j, TAU_I)
        assert abs(v - THETA_LARGE_I) / abs(THETA_LARGE_I) < 1e-13

    def test_matches_oracle_at_random_points(self, rng):
        for _ in range(25):
            u = complex(rng.uniform(-3, 3), rng.uniform(-2, 2))
            v = theta1(u, TAU_GEN)
            r = ref_theta1(u, 0.3 + 0.8j)
            assert abs(v - r) <= 1e-12 * max(1.0, abs(r))

    def test_quasi_periodicity(self, rng):
        for _ in range(40):
            u = complex(rng.uniform(0, 1), rng.uniform(0, 1))
            for tp in (TAU_I, TAU_GEN):
                tau = tp.tau
                a = theta1(u + 1, tp)
                assert abs(a + theta1(u, tp)) <= 1e-12 * max(1.0, abs(a))
                b = theta1(u + tau, tp)
                c = -cmath.exp(-1j * cmath.pi * (tau + 2 * u)) * theta1(u, tp)
                assert abs(b - c) <= 1e-12 * max(1.0, abs(b))

    def test_oddness(self, rng):
        for _ in range(40):
            u = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            v = theta1(-u, TAU_GEN)
            assert abs(v + theta1(u, TAU_GEN)) <= 1e-12 * max(1.0, abs(v))

    def test_vectorized_matches_scalar(self):
        pts = np.array([0.25, 0.1 + 0.9j, -2.3 + 0.4j])
        vec = theta1(pts, TAU_I)
        for i, u in enumerate(pts):
            assert vec[i] == theta1(complex(u), TAU_I)

    def test_nonconvergent_for_tiny_im_tau(self):
        policy = SeriesPolicy(rel_tol=1e-18, max_terms=8)
        with pytest.raises(NonConvergent):
            theta1(0.3, TorusParam(0.5 + 0.005j), policy)


class TestDerivatives:
    def test_even_derivative_vanishes_at_zero(self):
        assert abs(theta1_deriv(0.0, TAU_I, 2)) < 1e-12

    def test_first_derivative_at_zero(self):
        assert abs(theta1_deriv(0.0, TAU_I, 1) - THETA_D1_ZERO_I) < 1e-13

    def test_invalid_order(self):
        with pytest.raises(InvalidOrder):
            theta1_deriv(0.2, TAU_I, 4)

    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_against_reference_series(self, order, rng):
        for _ in range(10):
            u = complex(rng.uniform(-1, 2), rng.uniform(-1, 1))
            v = theta1_deriv(u, TAU_GEN, order)
            r = ref_theta1(u, 0.3 + 0.8j, order=order)
            assert abs(v - r) <= 1e-11 * max(1.0, abs(r))

    def test_by_central_difference(self, rng):
        h = 1e-5
        for _ in range(10):
            u = complex(rng.uniform(0, 1), rng.uniform(0, 1))
            fd = (theta1(u + h, TAU_I) - theta1(u - h, TAU_I)) / (2 * h)
            # truncation is O(h^2) with a third-derivative-sized constant
            assert abs(theta1_deriv(u, TAU_I, 1) - fd) \
                <= 1e-7 * max(1.0, abs(fd))

    def test_third_ratio_at_i(self):
        # at tau = i the ratio theta1'''(0)/theta1'(0) equals -3 pi
        assert abs(theta_ddd_ratio(TAU_I) + 3 * np.pi) < 1e-12


class TestRho:
    def test_odd(self, rng):
        for _ in range(20):
            u = complex(0.05 + 0.9 * rng.random(), 0.05 + 0.8 * rng.random())
            v = rho(-u, TAU_GEN)
            assert abs(v + rho(u, TAU_GEN)) <= 1e-12 * max(1.0, abs(v))

    def test_simple_pole_residue_one(self):
        u = 1e-4
        assert abs(rho(u, TAU_I) - 1 / u) < 1e-3

    def test_pole_guard(self):
        with pytest.raises(PoleAtLatticePoint):
            rho(1 + 1e-12 * 1j, TAU_I)

    def test_rho_prime_by_finite_difference(self, rng):
        h = 1e-5
        for _ in range(10):
            u = complex(0.1 + 0.8 * rng.random(), 0.1 + 0.8 * rng.random())
            fd = (rho(u + h, TAU_I) - rho(u - h, TAU_I)) / (2 * h)
            assert abs(rho_prime(u, TAU_I) - fd) <= 1e-7 * max(1.0, abs(fd))


class TestKernel:
    def test_periodic_in_first_direction(self, rng):
        lam = 0.31 + 0.21j
        for _ in range(15):
            u = complex(0.1 + 0.7 * rng.random(), 0.1 + 0.7 * rng.random())
            v = s_func(u + 1, lam, TAU_GEN)
            assert abs(v - s_func(u, lam, TAU_GEN)) <= 1e-12 * max(1, abs(v))

    def test_twisted_in_lattice_direction(self, rng):
        lam = 0.31 + 0.21j
        for tp in (TAU_I, TAU_GEN):
            for _ in range(15):
                u = complex(0.1 + 0.7 * rng.random(),
                            0.1 + 0.7 * rng.random())
                v = s_func(u + tp.tau, lam, tp)
                w = cmath.exp(2j * cmath.pi * lam) * s_func(u, lam, tp)
                assert abs(v - w) <= 1e-12 * max(1.0, abs(v))

    def test_small_twist_expansion(self):
        # s(u; lam) = -1/lam + rho(u) + O(lam)
        u = 0.37 + 0.29j
        errs = []
        for lam in (1e-3, 1e-4):
            errs.append(abs(s_func(u, lam, TAU_I) + 1 / lam - rho(u, TAU_I)))
        # first-order rate: the defect shrinks linearly with lam
        assert errs[1] < 0.15 * errs[0] and errs[1] < 1e-2

    def test_lambda_guard(self):
        with pytest.raises(LambdaOnLattice):
            s_func(0.3, 1.0 + 1e-12j, TAU_I)

    def test_derivative_against_finite_difference(self, rng):
        lam = 0.23 + 0.37j
        h = 1e-5
        for _ in range(10):
            u = complex(0.1 + 0.8 * rng.random(), 0.1 + 0.8 * rng.random())
            fd = (s_func(u + h, lam, TAU_I) - s_func(u - h, lam, TAU_I)) / (2 * h)
            assert abs(s_func_du(u, lam, TAU_I) - fd) < 1e-7


def test_identity_suite_both_moduli():
    for tp in (TAU_I, TAU_GEN):
        rep = verify_theta_identities(tp, samples=100, rng_seed=11)
        assert rep.all_passed, rep.summary_lines()


def test_identity_suite_rejects_bad_sample_count():
    with pytest.raises(ValueError):
        verify_theta_identities(TAU_I, samples=0)
