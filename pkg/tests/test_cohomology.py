"""Cohomology layer: Laurent machinery, residue engine vs closed forms,
dual families, contiguity matrices, and the single relation check."""

import numpy as np
import pytest

from rwkit.config import ModuliConfig
from rwkit.errors import (EtaUndefined, MixedLambda, PairNotTabulated,
                          RadiusTooLarge, ResonantExponent)
from rwkit.cohomology import (Du, DPsi, Eta, LaurentSeries, Psi, RhoDiff,
                              RhoPrime, alpha_coefficient, build_cmatrix,
                              contiguity_matrix, contiguity_prime,
                              contiguity_qq_closed_form, du_form,
                              dpsi_form, engine_formula_agreement, eta_basis,
                              eta_form, ic_closed_form, ic_pair_numeric,
                              lam0_det_closed_form, lam0_matrix_numeric,
                              laurent_sample, nabla_solve_local,
                              omega_coeffs, psi_form, relation_combination,
                              rho_diff_form, rho_prime_form, theorem48_matrix,
                              verify_fact23_relation)
from rwkit.theta import TorusParam, rho, s_func, s_func_du, theta1

from conftest import make_config, random_config

TWO_PI_I = 2j * np.pi


class TestLaurentSample:
    def test_simple_pole(self):
        c = 0.3 + 0.2j
        ser = laurent_sample(lambda u: 1.0 / (u - c), c, 1, 0.1)
        assert abs(ser.get(-1) - 1.0) < 1e-12
        for k in range(0, 4):
            assert abs(ser.get(k)) < 1e-12

    def test_kernel_residue_is_one(self, cfg3):
        j = 2
        tj = cfg3.t_of(j)
        ser = laurent_sample(
            lambda u: s_func(u - tj, cfg3.lam, cfg3.tp), tj, 1,
            0.25 * cfg3.min_puncture_gap(j))
        assert abs(ser.get(-1) - 1.0) < 1e-11

    def test_two_radii_consistency(self):
        c = 0.1 + 0.4j
        ser1 = laurent_sample(lambda u: np.exp(u) / (u - c) ** 2, c, 2, 0.05)
        ser2 = laurent_sample(lambda u: np.exp(u) / (u - c) ** 2, c, 2, 0.025)
        for k in range(-2, 3):
            assert abs(ser1.get(k) - ser2.get(k)) < 1e-10

    def test_aliasing_detected(self):
        # second pole inside the circle: the two radii disagree
        with pytest.raises(RadiusTooLarge):
            laurent_sample(lambda u: 1.0 / (u * (u - 0.05)), 0.0, 1, 0.2)

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            laurent_sample(lambda u: u, 0.0, 0, 0.1, N=100)


class TestOmegaCoeffs:
    def test_residue_is_exponent(self, cfg3):
        for l in (1, 2, 3):
            ser = omega_coeffs(l, 1, cfg3)
            assert abs(ser.get(-1) - cfg3.c_of(l)) < 1e-14

    def test_constant_term_against_sampling(self, cfg3):
        from rwkit.cohomology import _omega_values
        for l in (1, 2):
            ser = omega_coeffs(l, 1, cfg3)
            tl = cfg3.t_of(l)
            sampled = laurent_sample(
                lambda u: _omega_values(cfg3, u), tl, 1,
                0.25 * cfg3.min_puncture_gap(l))
            assert abs(ser.get(0) - sampled.get(0)) < 1e-10
            assert abs(ser.get(1) - sampled.get(1)) < 1e-9

    def test_constant_term_is_odd_under_dual(self, cfg3):
        a0 = alpha_coefficient(cfg3, 2, 0)
        a0_dual = alpha_coefficient(cfg3.dual(), 2, 0)
        assert abs(a0 + a0_dual) < 1e-13


class TestNablaSolve:
    def test_leading_coefficient(self, cfg3):
        l, cl = 2, cfg3.c_of(2)
        a = LaurentSeries(-2, np.array([1.0 + 0.0j]), center_index=l)
        b = nabla_solve_local(a, cfg3, out_orders=0)
        assert abs(b.get(-1) - 1.0 / (cl - 1.0)) < 1e-14

    def test_zero_in_zero_out(self, cfg3):
        a = LaurentSeries(-2, np.zeros(4, dtype=complex), center_index=1)
        b = nabla_solve_local(a, cfg3, out_orders=2)
        assert np.all(b.coeffs == 0)

    def test_b1_three_term_formula(self, cfg3, rng):
        l, cl = 2, cfg3.c_of(2)
        al0 = alpha_coefficient(cfg3, l, 0)
        al1 = alpha_coefficient(cfg3, l, 1)
        for _ in range(5):
            vals = rng.normal(size=3) + 1j * rng.normal(size=3)
            a = LaurentSeries(-2, np.append(vals, 0.0), center_index=l)
            b = nabla_solve_local(a, cfg3, out_orders=1)
            am2, am1, a0 = a.get(-2), a.get(-1), a.get(0)
            b1 = a0 / (cl + 1) - am1 * al0 / (cl * (cl + 1)) \
                - am2 * (cl * al1 - al0 ** 2) / (cl * (cl - 1) * (cl + 1))
            assert abs(b.get(1) - b1) < 1e-12 * max(1.0, abs(b1))

    def test_recurrence_consistency(self, cfg3, rng):
        """The output satisfies the defining recurrence identically."""
        l, cl = 3, cfg3.c_of(3)
        vals = rng.normal(size=5) + 1j * rng.normal(size=5)
        a = LaurentSeries(-2, vals, center_index=l)
        b = nabla_solve_local(a, cfg3, out_orders=3)
        alpha = omega_coeffs(l, 4, cfg3)
        for m1 in range(b.min_order, b.max_order + 1):
            m = m1 - 1
            acc = (m1 + cl) * b.get(m1) - a.get(m)
            for i in range(b.min_order, m1):
                acc += b.get(i) * alpha.get(m - i)
            assert abs(acc) < 1e-12

    def test_resonant_exponent(self):
        base = make_config(3)
        cfg = ModuliConfig(base.tp, 3, base.t, base.c0,
                           (1.0, 0.42 - 0.11j, -1.42 + 0.11j), base.lam)
        a = LaurentSeries(-2, np.array([1.0 + 0j]), center_index=1)
        with pytest.raises(ResonantExponent):
            nabla_solve_local(a, cfg, out_orders=0)


class TestEngine:
    def test_diagonal_value(self, cfg3):
        v = ic_pair_numeric(psi_form(1, cfg3), psi_form(1, cfg3.dual()), cfg3)
        expect = TWO_PI_I / cfg3.c_of(1)
        assert abs(v - expect) < 1e-10 * abs(expect)

    def test_shortcut_returns_exact_zero(self, cfg3):
        # orders sum to -2 only at a shared puncture; distinct simple poles
        # are skipped without sampling and give the exact integer 0
        v = ic_pair_numeric(psi_form(1, cfg3), psi_form(2, cfg3.dual()), cfg3)
        assert v == 0

    def test_double_pole_cross_value(self, cfg3):
        got = ic_pair_numeric(dpsi_form(1, cfg3), psi_form(2, cfg3.dual()),
                              cfg3)
        expect = -TWO_PI_I * s_func(cfg3.t_of(1) - cfg3.t_of(2), -cfg3.lam,
                                    cfg3.tp) / (cfg3.c_of(1) - 1.0)
        assert abs(got - expect) < 1e-10 * abs(expect)

    def test_dual_family_orthogonality(self, cfg3):
        v = ic_pair_numeric(dpsi_form(1, cfg3),
                            eta_form(1, 2, 1, cfg3.dual()), cfg3)
        assert abs(v) < 1e-9

    def test_engine_agreement_fixed_config(self, cfg3):
        assert engine_formula_agreement(cfg3, 1, 2) < 1e-10

    def test_mixed_families_rejected(self, cfg3):
        with pytest.raises(MixedLambda):
            psi_form(1, cfg3) + du_form(cfg3)

    def test_lambda_zero_needs_zero_family(self, cfg3):
        lam0 = ModuliConfig(cfg3.tp, 3, cfg3.t, cfg3.c0, cfg3.c, 0.0)
        with pytest.raises(MixedLambda):
            psi_form(1, lam0)

    def test_wrong_dual_config_rejected(self, cfg3):
        with pytest.raises(ValueError):
            ic_pair_numeric(psi_form(1, cfg3), psi_form(1, cfg3), cfg3)

    def test_skew_property_random_pairs(self, rng):
        # I_c([a], [b^v]) = -I_c([b], [a^v]) with every parameter negated;
        # the swapped pairing runs on the dual configuration
        cfg = random_config(rng, n=3)
        dual = cfg.dual()
        pairs = [(psi_form(1, cfg), psi_form(1, dual)),
                 (dpsi_form(2, cfg), psi_form(3, dual)),
                 (dpsi_form(2, cfg), psi_form(2, dual))]
        for a, b in pairs:
            lhs = ic_pair_numeric(a, b, cfg)
            rhs = -ic_pair_numeric(b, a, dual)
            assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


class TestClosedForms:
    def test_pair_not_tabulated(self, cfg3):
        with pytest.raises(PairNotTabulated):
            ic_closed_form(Eta(1, 2, 1), Eta(1, 2, 2), cfg3)

    def test_zero_twist_table_needs_lambda_zero(self, cfg3):
        with pytest.raises(PairNotTabulated):
            ic_closed_form(Du(), RhoPrime(1), cfg3)

    def test_lam0_values(self):
        cfg = make_config(3, lam=0.0)
        c1 = cfg.c_of(1)
        v = ic_closed_form(RhoPrime(1), Du(), cfg)
        assert abs(v + TWO_PI_I / (c1 - 1.0)) < 1e-12
        v = ic_closed_form(Du(), RhoPrime(1), cfg)   # skew-filled
        assert abs(v + TWO_PI_I / (c1 + 1.0)) < 1e-12
        v = ic_closed_form(RhoDiff(1, 2), RhoDiff(1, 3), cfg)
        assert abs(v - TWO_PI_I / c1) < 1e-12


class TestEtaBasis:
    def test_member_at_q_is_psi(self, cfg3):
        terms = eta_form(1, 2, 2, cfg3).expanded()
        assert len(terms) == 1
        coeff, gen = terms[0]
        assert gen == Psi(2) and abs(coeff - 1.0) < 1e-15

    def test_generic_member_coefficient(self, cfg3):
        p, q, k = 1, 2, 3
        terms = dict((g.j, c) for c, g in eta_form(p, q, k, cfg3).expanded())
        expect = -s_func(cfg3.t_of(p) - cfg3.t_of(k), cfg3.lam, cfg3.tp) \
            / s_func(cfg3.t_of(p) - cfg3.t_of(q), cfg3.lam, cfg3.tp)
        assert abs(terms[q] - expect) < 1e-13

    def test_degenerate_configuration_rejected(self):
        base = make_config(3)
        lam = base.t_of(1) - base.t_of(2)      # t_p - t_q - lam on lattice
        cfg = ModuliConfig(base.tp, 3, base.t, base.c0, base.c, lam)
        with pytest.raises(EtaUndefined):
            eta_basis(1, 2, cfg)

    def test_gram_is_diagonal_by_engine(self, cfg3):
        p, q = 2, 3
        basis = [dpsi_form(p, cfg3) if j == q else psi_form(j, cfg3)
                 for j in range(1, 4)]
        duals = eta_basis(p, q, cfg3.dual())
        gram = np.array([[ic_pair_numeric(a, d, cfg3) for d in duals]
                         for a in basis])
        off = gram - np.diag(np.diag(gram))
        assert np.max(np.abs(off)) < 1e-9 * max(1.0, np.max(np.abs(gram)))
        closed = build_cmatrix("Cphieta", cfg3, p=p, q=q)
        assert np.max(np.abs(gram - closed)) < 1e-9 * np.max(np.abs(gram))


class TestCMatrices:
    def test_cpsipsi(self, cfg3):
        m = build_cmatrix("Cpsipsi", cfg3)
        expect = np.diag([TWO_PI_I / cfg3.c_of(j) for j in (1, 2, 3)])
        assert np.allclose(m, expect, rtol=1e-14, atol=0)

    def test_cpsieta_row_q_displays(self, cfg3):
        """The three displayed entries of the q-th row."""
        p, q, j = 1, 2, 3
        tp = cfg3.tp
        lam = cfg3.lam
        m = build_cmatrix("Cpsieta", cfg3, p=p, q=q)
        tpq = cfg3.t_of(p) - cfg3.t_of(q)
        assert abs(m[q - 1, q - 1] - TWO_PI_I / cfg3.c_of(q)) < 1e-13
        expect_qj = -(TWO_PI_I / cfg3.c_of(q)) \
            * theta1(cfg3.t_of(p) - cfg3.t_of(j) + lam, tp) * theta1(tpq, tp) \
            / (theta1(cfg3.t_of(p) - cfg3.t_of(j), tp) * theta1(tpq + lam, tp))
        assert abs(m[q - 1, j - 1] - expect_qj) < 1e-12 * abs(expect_qj)
        inner = (TWO_PI_I * cfg3.c0 - cfg3.c_of(p) * rho(lam, tp)
                 + sum(cfg3.c_of(r) * rho(cfg3.t_of(p) - cfg3.t_of(r), tp)
                       for r in (1, 2, 3) if r not in (p, q))) / cfg3.c_of(q) \
            + rho(tpq, tp)
        from rwkit.theta import theta1_deriv
        expect_qp = (TWO_PI_I / cfg3.c_of(p)) \
            * theta1(tpq, tp) / theta1_deriv(0.0, tp, 1) * inner \
            * theta1(lam, tp) / theta1(tpq + lam, tp)
        assert abs(m[q - 1, p - 1] - expect_qp) < 1e-12 * abs(expect_qp)

    def test_cpsieta_against_engine(self, cfg3):
        p, q = 1, 3
        m = build_cmatrix("Cpsieta", cfg3, p=p, q=q)
        duals = eta_basis(p, q, cfg3.dual())
        for j in (1, 2, 3):
            for k in (1, 2, 3):
                v = ic_pair_numeric(psi_form(j, cfg3), duals[k - 1], cfg3)
                assert abs(v - m[j - 1, k - 1]) < 1e-10 * max(1, abs(v))


class TestContiguity:
    def test_prime_matrix_rows(self, cfg3):
        p, q = 1, 2
        tp = cfg3.tp
        lam, lam_s = cfg3.lam, cfg3.lam - cfg3.t_of(p) + cfg3.t_of(q)
        sp = contiguity_prime(p, q, cfg3)
        assert abs(sp[p - 1, q - 1]
                   - theta1(lam, tp) / theta1(lam_s, tp)) < 1e-13
        from rwkit.theta import theta1_deriv
        expect = -theta1_deriv(0.0, tp, 1) \
            / theta1(cfg3.t_of(p) - cfg3.t_of(q), tp)
        assert abs(sp[q - 1, p - 1] - expect) < 1e-12 * abs(expect)

    def test_prime_rows_pointwise(self, cfg3, rng):
        """Each row is a pointwise identity between 1-forms."""
        p, q = 1, 2
        tp = cfg3.tp
        lam_s = cfg3.lam - cfg3.t_of(p) + cfg3.t_of(q)
        sp = contiguity_prime(p, q, cfg3)
        worst = 0.0
        for _ in range(20):
            u = complex(0.05 + 0.9 * rng.random(),
                        0.03 + 0.9 * rng.random())
            ratio = theta1(u - cfg3.t_of(p), tp) / theta1(u - cfg3.t_of(q), tp)
            for row in range(1, 4):
                if row == q:
                    lhs = ratio * s_func_du(u - cfg3.t_of(p), lam_s, tp)
                else:
                    lhs = ratio * s_func(u - cfg3.t_of(row), lam_s, tp)
                rhs = sum(sp[row - 1, k - 1]
                          * s_func(u - cfg3.t_of(k), cfg3.lam, tp)
                          for k in range(1, 4))
                worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
        assert worst < 1e-11

    def test_qq_entry_closed_form(self, cfg3):
        for p, q in ((1, 2), (2, 3), (3, 1)):
            s = contiguity_matrix(p, q, cfg3)
            expect = contiguity_qq_closed_form(p, q, cfg3)
            assert abs(s[q - 1, q - 1] - expect) < 1e-10 * max(1, abs(expect))

    def test_quadratic_relation(self, cfg3):
        p, q = 2, 3
        s = contiguity_matrix(p, q, cfg3)
        cpsi = build_cmatrix("Cpsipsi", cfg3)
        shifted = cfg3.shift_pq(p, q)
        rhs = build_cmatrix("Cpsipsi", shifted) \
            @ contiguity_matrix(p, q, shifted.dual()).T
        lhs = s @ cpsi
        assert np.max(np.abs(lhs - rhs)) < 1e-9 * max(1.0, np.max(np.abs(lhs)))

    def test_intersection_route_agrees(self, cfg3):
        p, q = 1, 3
        s = contiguity_matrix(p, q, cfg3)
        via = theorem48_matrix(p, q, cfg3)
        assert np.max(np.abs(s - via)) < 1e-9 * max(1.0, np.max(np.abs(s)))


class TestSingleRelation:
    def test_corrected_coefficients_annihilate(self, cfg3):
        res = verify_fact23_relation(cfg3)
        assert res.residual < 1e-8 * res.scale

    def test_published_coefficients_fail(self, cfg3):
        res = verify_fact23_relation(cfg3, corrected=False)
        assert res.residual > 1e-4 * res.scale

    def test_relation_combination_structure(self, cfg3):
        combo = relation_combination(cfg3)
        kinds = {type(g) for _, g in combo.terms}
        assert kinds == {Psi, DPsi}


class TestZeroTwist:
    def test_determinant(self):
        cfg = make_config(3, lam=0.0)
        mat = lam0_matrix_numeric(cfg)
        expect = lam0_det_closed_form(cfg)
        assert abs(np.linalg.det(mat) - expect) < 1e-8 * max(1, abs(expect))

    def test_engine_agreement(self):
        cfg = make_config(3, lam=0.0)
        assert engine_formula_agreement(cfg) < 1e-10

    def test_limit_family_consistency(self, rng):
        """Pairings of the zero-twist family computed by the engine agree
        with the closed forms at a random real-exponent configuration."""
        cfg = random_config(rng, n=3, lam_zero=True)
        assert engine_formula_agreement(cfg) < 1e-8
