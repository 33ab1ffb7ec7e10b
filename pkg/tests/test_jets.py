"""Exact-identity tests for the jet algebra (kgzlab.jets)."""

import math

import numpy as np
import pytest

from kgzlab.jets import (
    GAMMA_SET,
    AnalyticFamily,
    ArityError,
    DomainError,
    Jet,
    SpacetimePoint,
    VectorFieldKind,
    apply_vf,
    commutator_residual,
    dalembertian,
    hyperboloidal_density_residuals,
    identity_suite,
    null_form_flat_residual,
    null_form_hyperboloidal,
    radial_family,
    random_family,
    random_point,
    scaling_identity_residual,
)

VF = VectorFieldKind


def coords(p, order=3):
    t = Jet.coordinate(0, p.t, order)
    xs = [Jet.coordinate(a + 1, p.x[a], order) for a in range(3)]
    return t, xs


def jet_t2_minus_r2(p, order=3):
    t, xs = coords(p, order)
    return t * t - (xs[0] * xs[0] + xs[1] * xs[1] + xs[2] * xs[2])


class TestJetBasics:
    def test_mixed_partials_commute(self):
        f = random_family(np.random.default_rng(3))
        j = f.jet(SpacetimePoint(4.0, 1.0, -2.0, 0.5))
        a = j.partial(0).partial(2).value
        b = j.partial(2).partial(0).value
        assert a == pytest.approx(b, rel=1e-14)

    def test_exact_derivatives_of_product_family(self):
        # w = t * x1: all first derivatives explicit
        p = SpacetimePoint(3.0, 1.0, 0.0, 0.0)
        t, xs = coords(p)
        j = t * xs[0]
        assert j.value == 3.0
        assert j.d((1, 0, 0, 0)) == 1.0  # d_t = x1
        assert j.d((0, 1, 0, 0)) == 3.0  # d_1 = t
        assert j.d((1, 1, 0, 0)) == 1.0

    def test_truncation_commutes_with_apply(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            p = random_point(rng, cone=True)
            j = random_family(rng, p).jet(p)
            for kind in (VF.L_1, VF.G_2, VF.OMEGA_13, VF.L_0, VF.UNDER_D_3):
                a = apply_vf(kind, j.truncated(2), p)
                b = apply_vf(kind, j, p).truncated(1)
                assert np.allclose(a.c, b.c, rtol=0, atol=1e-12 * max(1.0, j.scale()))

    def test_exp_sin_jets(self):
        p = SpacetimePoint(0.7, 0.3, 0.0, 0.0)
        t, xs = coords(p)
        j = (t * xs[0]).sin()
        assert j.value == pytest.approx(math.sin(0.21), rel=1e-14)
        assert j.d((1, 0, 0, 0)) == pytest.approx(0.3 * math.cos(0.21), rel=1e-13)


class TestApplyVF:
    def test_rotation_annihilates_radial(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            p = random_point(rng)
            j = radial_family(rng, p).jet(p)
            for kind in (VF.OMEGA_12, VF.OMEGA_13, VF.OMEGA_23):
                out = apply_vf(kind, j, p)
                assert abs(out.value) < 1e-12 * max(1.0, j.scale())

    def test_boost_on_linear_field(self):
        # L_1 (x1) = x1 d_t(x1) + t d_1(x1) = t; at t = 3 the value is 3
        p = SpacetimePoint(3.0, 1.0, 0.0, 0.0)
        _, xs = coords(p)
        out = apply_vf(VF.L_1, xs[0], p)
        assert out.value == 3.0

    def test_scaling_counts_homogeneity(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            p = random_point(rng)
            j = jet_t2_minus_r2(p)
            out = apply_vf(VF.L_0, j, p)
            assert out.value == pytest.approx(2.0 * (p.t**2 - p.r**2), rel=1e-13, abs=1e-10)

    def test_order_reduction_and_arity(self):
        p = SpacetimePoint(2.0, 0.5, 0.0, 0.0)
        j = jet_t2_minus_r2(p, order=2)
        out = apply_vf(VF.L_2, j, p)
        assert out.order == 1
        with pytest.raises(ArityError):
            apply_vf(VF.D_T, apply_vf(VF.D_T, out, p), p)

    def test_singular_points_rejected(self):
        p0 = SpacetimePoint(3.0, 0.0, 0.0, 0.0)
        j = jet_t2_minus_r2(p0)
        with pytest.raises(DomainError):
            apply_vf(VF.G_1, j, p0)
        pt0 = SpacetimePoint(0.0, 1.0, 0.0, 0.0)
        with pytest.raises(DomainError):
            apply_vf(VF.UNDER_D_1, jet_t2_minus_r2(pt0), pt0)


class TestDalembertian:
    def test_harmonic(self):
        p = SpacetimePoint(1.7, 0.4, -0.2, 0.9)
        t, xs = coords(p)
        assert dalembertian(t * xs[0]).value == pytest.approx(0.0, abs=1e-14)

    def test_t_squared(self):
        p = SpacetimePoint(1.7, 0.4, -0.2, 0.9)
        t, _ = coords(p)
        assert dalembertian(t * t).value == pytest.approx(-2.0, rel=1e-14)

    def test_gaussian_times_sin_oracle(self):
        # symbolic oracle, worked before the build:
        # Box(exp(-r^2) sin t) = (4 r^2 - 6) exp(-r^2) sin t + exp(-r^2) sin t
        rng = np.random.default_rng(8)
        fam = AnalyticFamily(
            tag="plane-modulated",
            amplitude=1.0,
            centers=(0.0, 0.0, 0.0, 0.0),
            widths=(1.0, 1.0, 1.0, 1.0),
            freqs=(1.0, 0.0, 0.0, 0.0),
            phase=-math.pi / 2.0,  # cos(t - pi/2) = sin t
        )
        for _ in range(10):
            p = random_point(rng)
            j = fam.jet(p)
            expect = (4.0 * p.r**2 - 5.0) * math.exp(-p.r**2) * math.sin(p.t)
            assert dalembertian(j).value == pytest.approx(expect, rel=1e-11, abs=1e-13)

    def test_arity(self):
        p = SpacetimePoint(1.0, 1.0, 0.0, 0.0)
        with pytest.raises(ArityError):
            dalembertian(jet_t2_minus_r2(p, order=1))


class TestScalingIdentities:
    def test_random_polynomial_jets(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            p = random_point(rng)
            j = random_family(rng, p).jet(p)
            res_t, res_a = scaling_identity_residual(j, p)
            scale = j.scale() * max(1.0, p.t) ** 2
            assert abs(res_t) < 1e-12 * scale
            assert max(abs(v) for v in res_a) < 1e-12 * scale

    def test_exact_for_t2_minus_r2(self):
        p = SpacetimePoint(5.0, 1.0, 2.0, -0.5)
        res_t, res_a = scaling_identity_residual(jet_t2_minus_r2(p), p)
        assert res_t == pytest.approx(0.0, abs=1e-10)
        assert max(abs(v) for v in res_a) == pytest.approx(0.0, abs=1e-10)

    def test_constant_field(self):
        p = SpacetimePoint(5.0, 1.0, 2.0, -0.5)
        res_t, res_a = scaling_identity_residual(Jet.const(3.3), p)
        assert res_t == 0.0 and all(v == 0.0 for v in res_a)


class TestNullForms:
    def test_flat_random_pairs(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            p = random_point(rng)
            ju = random_family(rng, p).jet(p)
            jv = random_family(rng, p).jet(p)
            res = null_form_flat_residual(ju, jv, p)
            scale = ju.scale() * jv.scale()
            assert max(abs(v) for v in res.values()) < 1e-12 * scale

    def test_antisymmetric_forms_vanish_for_equal_fields(self):
        rng = np.random.default_rng(18)
        p = random_point(rng)
        j = random_family(rng, p).jet(p)
        res = null_form_flat_residual(j, j, p)
        # residuals vanish AND the antisymmetric lhs itself is zero
        assert max(abs(v) for v in res.values()) < 1e-12 * j.scale() ** 2

    def test_radial_pair_reduces_to_radial_form(self):
        rng = np.random.default_rng(19)
        for _ in range(20):
            p = random_point(rng)
            ju = radial_family(rng, p).jet(p)
            jv = radial_family(rng, p).jet(p)
            dmu = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
            lhs = -ju.d(dmu[0]) * jv.d(dmu[0]) + sum(ju.d(dmu[a]) * jv.d(dmu[a]) for a in (1, 2, 3))
            ur = sum(p.x[a] / p.r * ju.d(dmu[a + 1]) for a in range(3))
            vr = sum(p.x[a] / p.r * jv.d(dmu[a + 1]) for a in range(3))
            oracle = -ju.d(dmu[0]) * jv.d(dmu[0]) + ur * vr
            assert lhs == pytest.approx(oracle, rel=1e-11, abs=1e-12 * ju.scale() * jv.scale())

    def test_flat_rejects_origin(self):
        p = SpacetimePoint(2.0, 0.0, 0.0, 0.0)
        j = jet_t2_minus_r2(p)
        with pytest.raises(DomainError):
            null_form_flat_residual(j, j, p)

    def test_hyperboloidal_identity_and_unit_constant(self):
        rng = np.random.default_rng(20)
        for _ in range(100):
            p = random_point(rng, cone=True)
            ju = random_family(rng, p).jet(p)
            jv = random_family(rng, p).jet(p)
            lhs, terms = null_form_hyperboloidal(ju, jv, p)
            scale = ju.scale() * jv.scale()
            assert abs(lhs - sum(terms)) < 1e-12 * scale
            # frame inequality with constant 1 (|x^a/t| <= 1 in the cone)
            s2 = p.t**2 - p.r**2
            dt_u, dt_v = ju.d((1, 0, 0, 0)), jv.d((1, 0, 0, 0))
            uu = [apply_vf(k, ju, p).value for k in (VF.UNDER_D_1, VF.UNDER_D_2, VF.UNDER_D_3)]
            uv = [apply_vf(k, jv, p).value for k in (VF.UNDER_D_1, VF.UNDER_D_2, VF.UNDER_D_3)]
            bound = (
                s2 / p.t**2 * abs(dt_u * dt_v)
                + sum(abs(dt_u * uv[a]) + abs(dt_v * uu[a]) for a in range(3))
                + sum(abs(uu[a] * uv[b]) for a in range(3) for b in range(3))
            )
            assert abs(lhs) <= bound + 1e-12 * scale

    def test_t_axis_degeneration(self):
        # at x = 0 the frame is Cartesian: lhs = -dt u dt v + sum da u da v
        p = SpacetimePoint(4.0, 0.0, 0.0, 0.0)
        rng = np.random.default_rng(21)
        ju = random_family(rng, p).jet(p)
        jv = random_family(rng, p).jet(p)
        lhs, terms = null_form_hyperboloidal(ju, jv, p)
        assert abs(lhs - sum(terms)) < 1e-12 * ju.scale() * jv.scale()
        assert terms[2] == 0.0  # cross terms carry x^a/t = 0

    def test_zero_time_derivative_case(self):
        # gaussian centered at t = p.t has d_t = 0 there: lhs = sum (d_a u)^2
        p = SpacetimePoint(6.0, 1.0, 0.5, -0.3)
        fam = AnalyticFamily(
            tag="gaussian-packet",
            amplitude=1.3,
            centers=(p.t, 0.0, 0.0, 0.0),
            widths=(2.0, 3.0, 3.0, 3.0),
        )
        j = fam.jet(p)
        assert abs(j.d((1, 0, 0, 0))) < 1e-14
        lhs, terms = null_form_hyperboloidal(j, j, p)
        grads = sum(j.d(m) ** 2 for m in ((0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)))
        assert lhs == pytest.approx(grads, rel=1e-12)
        assert lhs == pytest.approx(sum(terms), rel=1e-12)


class TestCommutators:
    def test_translation_random(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            p = random_point(rng)
            j = random_family(rng, p).jet(p)
            res = commutator_residual(VF.D_T, j, p)
            assert abs(res) < 1e-12 * j.scale() * max(1.0, p.t)

    def test_boost_on_quadratic(self):
        p = SpacetimePoint(3.0, 1.0, -1.0, 2.0)
        assert commutator_residual(VF.L_1, jet_t2_minus_r2(p), p) == pytest.approx(0.0, abs=1e-11)

    def test_scaling_on_harmonic(self):
        # Box w = 0 => Box(L_0 w) = L_0(Box w) + 2 Box w = 0
        p = SpacetimePoint(2.5, 0.7, 0.1, -0.4)
        t, xs = coords(p)
        j = t * xs[0]
        assert dalembertian(apply_vf(VF.L_0, j, p)).value == pytest.approx(0.0, abs=1e-12)
        assert commutator_residual(VF.L_0, j, p) == pytest.approx(0.0, abs=1e-12)

    def test_all_gamma_kinds(self):
        rng = np.random.default_rng(24)
        p = random_point(rng)
        j = random_family(rng, p).jet(p)
        for kind in GAMMA_SET:
            res = commutator_residual(kind, j, p)
            assert abs(res) < 1e-12 * j.scale() * max(1.0, p.t)

    def test_arity(self):
        p = SpacetimePoint(2.0, 1.0, 0.0, 0.0)
        with pytest.raises(ArityError):
            commutator_residual(VF.D_T, jet_t2_minus_r2(p, order=2), p)


class TestHyperboloidalDensities:
    def test_three_expressions_agree(self):
        rng = np.random.default_rng(30)
        for _ in range(100):
            p = random_point(rng, cone=True)
            j = random_family(rng, p).jet(p)
            d12, d13, scale = hyperboloidal_density_residuals(j, p, m=1.0)
            assert abs(d12) < 1e-12 * max(scale, j.scale() ** 2)
            assert abs(d13) < 1e-12 * max(scale, j.scale() ** 2)


class TestIdentitySuite:
    def test_thousand_samples_all_pass(self):
        rows = identity_suite(seed=1, samples=1000)
        assert len(rows) >= 10
        for row in rows:
            assert row["pass"], f"{row['check_name']}: {row['max_residual']} vs {row['scale']}"

    def test_deterministic(self):
        a = identity_suite(seed=9, samples=50)
        b = identity_suite(seed=9, samples=50)
        assert a == b

    def test_point_membership(self):
        assert SpacetimePoint(3.0, 1.0, 0.0, 0.0).in_cone()
        assert not SpacetimePoint(3.0, 2.5, 0.0, 0.0).in_cone()
        assert not SpacetimePoint(1.5, 0.1, 0.0, 0.0).in_cone()
