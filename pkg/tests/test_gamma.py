"""Radial Gamma-table tests against a full 3-D sphere-quadrature oracle."""

import math

import numpy as np
import pytest

from kgzlab import jets
from kgzlab.gamma import (
    RadialJet,
    UnsupportedTierError,
    gamma_fields,
    gamma_ghost_integrands,
    gamma_l2_norms,
    gamma_l2_table,
    gamma_sup_table,
    multi_indices,
)
from kgzlab.radial import RadialGrid, jbracket, l2_norm

VF = jets.VectorFieldKind
KIND_BY_NAME = {
    "dt": VF.D_T,
    "d1": VF.D_1,
    "d2": VF.D_2,
    "d3": VF.D_3,
    "L1": VF.L_1,
    "L2": VF.L_2,
    "L3": VF.L_3,
    "O12": VF.OMEGA_12,
    "O13": VF.OMEGA_13,
    "O23": VF.OMEGA_23,
    "G1": VF.G_1,
    "G2": VF.G_2,
    "G3": VF.G_3,
}

# 26-point Lebedev set: exact for angular polynomials up to degree 7
_AX = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
_ED = [
    tuple(s / math.sqrt(2.0) for s in v)
    for v in [
        (1, 1, 0), (1, -1, 0), (-1, 1, 0), (-1, -1, 0),
        (1, 0, 1), (1, 0, -1), (-1, 0, 1), (-1, 0, -1),
        (0, 1, 1), (0, 1, -1), (0, -1, 1), (0, -1, -1),
    ]
]
_CO = [
    tuple(s / math.sqrt(3.0) for s in v)
    for v in [
        (1, 1, 1), (1, 1, -1), (1, -1, 1), (1, -1, -1),
        (-1, 1, 1), (-1, 1, -1), (-1, -1, 1), (-1, -1, -1),
    ]
]
LEBEDEV26 = [(p, 1.0 / 21.0) for p in _AX] + [(p, 4.0 / 105.0) for p in _ED] + [
    (p, 27.0 / 840.0) for p in _CO
]

# analytic test field: w(t, x) = A cos(om t) exp(-|x|^2 / s^2)
A, OM, SIG, T0 = 1.3, 0.9, 1.2, 3.7
FAMILY = jets.AnalyticFamily(
    tag="plane-modulated",
    amplitude=A,
    centers=(0.0, 0.0, 0.0, 0.0),
    widths=(1.0, SIG, SIG, SIG),
    freqs=(OM, 0.0, 0.0, 0.0),
)


def analytic_radial_jet(grid: RadialGrid, t: float) -> RadialJet:
    """Closed-form mixed derivatives of the test field (no stencils)."""
    r = grid.r
    g = np.exp(-(r**2) / SIG**2)
    gr = [
        g,
        -2.0 * r / SIG**2 * g,
        (4.0 * r**2 / SIG**4 - 2.0 / SIG**2) * g,
        (12.0 * r / SIG**4 - 8.0 * r**3 / SIG**6) * g,
    ]
    ct = [
        math.cos(OM * t),
        -OM * math.sin(OM * t),
        -OM * OM * math.cos(OM * t),
        OM**3 * math.sin(OM * t),
    ]
    D = {}
    for i in range(4):
        for j in range(4 - i):
            D[(i, j)] = A * ct[i] * gr[j]
    return RadialJet(grid, t, D, 3)


def oracle_l2(idx: tuple[str, ...], n_r: int = 400, r_max: float = 10.0) -> float:
    """26-point Lebedev x radial Simpson of |Gamma^I w|^2, exact jets per point."""
    rs = np.linspace(0.0, r_max, n_r | 1)  # odd count for Simpson
    shell = np.zeros_like(rs)
    for k, r in enumerate(rs):
        if r == 0.0:
            continue  # r^2 weight kills the origin
        acc = 0.0
        for xi, wgt in LEBEDEV26:
            p = jets.SpacetimePoint(T0, r * xi[0], r * xi[1], r * xi[2])
            j = FAMILY.jet(p)
            for name in idx:
                j = jets.apply_vf(KIND_BY_NAME[name], j, p)
            acc += wgt * j.value**2
        shell[k] = r * r * acc
    h = rs[1] - rs[0]
    # composite Simpson; boundary derivatives vanish so it is spectrally sharp here
    simp = h / 3.0 * (shell[0] + shell[-1] + 4.0 * shell[1::2].sum() + 2.0 * shell[2:-1:2].sum())
    return math.sqrt(4.0 * math.pi * simp)


GRID = RadialGrid(nr=2400, dr=0.005)


class TestAgainstSphereQuadrature:
    @pytest.mark.parametrize(
        "idx",
        [
            (),
            ("dt",),
            ("d1",),
            ("L1",),
            ("L3",),
            ("O12",),
            ("L1", "L2"),
            ("L1", "L1"),
            ("d3", "L3"),
            ("O12", "L1"),
            ("dt", "d2"),
        ],
    )
    def test_table_matches_oracle(self, idx):
        jet = analytic_radial_jet(GRID, T0)
        table = gamma_l2_norms(jet, len(idx))
        got = table[idx]
        want = oracle_l2(idx)
        if want < 1e-13:
            assert got < 1e-12
        else:
            assert got == pytest.approx(want, rel=1e-10)


class TestClosedFormReductions:
    def setup_method(self):
        self.jet = analytic_radial_jet(GRID, T0)
        self.table = gamma_l2_table(self.jet, 2)

    def test_rotations_vanish_on_radial(self):
        for name in ("O12", "O13", "O23"):
            assert self.table[(name,)] == 0.0

    def test_boost_sum_closed_form(self):
        # sum_a ||L_a w||^2 = 4 pi int r^2 (r w_t + t w_r)^2 dr
        wt, wr = self.jet.D[(1, 0)], self.jet.D[(0, 1)]
        want = l2_norm(GRID.r * wt + T0 * wr, GRID) ** 2
        got = sum(self.table[(f"L{a}",)] ** 2 for a in (1, 2, 3))
        assert got == pytest.approx(want, rel=1e-12)

    def test_time_slope_field(self):
        # w = t f(r): ||d_t w|| = ||f||
        from kgzlab.radial import w_radial_derivatives

        f = np.exp(-GRID.r**2)
        D = {}
        for j, d in enumerate(w_radial_derivatives(T0 * f, GRID, 2)):
            D[(0, j)] = d
        for j, d in enumerate(w_radial_derivatives(f, GRID, 1)):
            D[(1, j)] = d
        D[(2, 0)] = np.zeros_like(f)
        jet = RadialJet(GRID, T0, D, 2)
        table = gamma_l2_table(jet, 1)
        assert table[("dt",)] == pytest.approx(l2_norm(f, GRID), rel=1e-12)

    def test_translation_matches_radial_derivative(self):
        # ||d_a w||^2 = (1/3) 4 pi int r^2 w_r^2 dr per fixed a
        want = l2_norm(self.jet.D[(0, 1)], GRID) ** 2 / 3.0
        for name in ("d1", "d2", "d3"):
            assert self.table[(name,)] ** 2 == pytest.approx(want, rel=1e-12)

    def test_unsupported_tiers(self):
        with pytest.raises(UnsupportedTierError):
            gamma_l2_table(self.jet, 3)
        with pytest.raises(UnsupportedTierError):
            gamma_sup_table(self.jet, 2)

    def test_multi_index_count(self):
        assert len(multi_indices(2)) == 1 + 10 + 100
        assert len(gamma_fields(self.jet, 2)) == 111


class TestSups:
    def test_sup_table_exact_for_first_tier(self):
        jet = analytic_radial_jet(GRID, T0)
        sups = gamma_sup_table(jet, 1)
        assert sups[()] == pytest.approx(np.max(np.abs(jet.D[(0, 0)])), rel=1e-14)
        assert sups[("dt",)] == pytest.approx(np.max(np.abs(jet.D[(1, 0)])), rel=1e-14)
        # d_1 w = (x_1/r) w_r: sup over directions = max_r |w_r|
        assert sups[("d1",)] == pytest.approx(np.max(np.abs(jet.D[(0, 1)])), rel=1e-14)
        got = sups[("L1",)]
        want = np.max(np.abs(GRID.r * jet.D[(1, 0)] + T0 * jet.D[(0, 1)]))
        assert got == pytest.approx(want, rel=1e-14)

    def test_weighted_sup(self):
        jet = analytic_radial_jet(GRID, T0)
        wgt = jbracket(GRID.r)
        sups = gamma_sup_table(jet, 0, weight=wgt)
        assert sups[()] == pytest.approx(np.max(wgt * np.abs(jet.D[(0, 0)])), rel=1e-14)


class TestGhostIntegrands:
    def test_plain_component_reduction(self):
        jet = analytic_radial_jet(GRID, T0)
        mu = jbracket(GRID.r - T0) ** -1.05
        table = gamma_ghost_integrands(jet, 0, mu)
        sq, good = table[()]
        assert sq == pytest.approx(l2_norm(jet.D[(0, 0)], GRID, mu) ** 2, rel=1e-12)
        # radial reduction: sum_a |G_a w|^2 = (w_t + w_r)^2
        want = l2_norm(jet.D[(1, 0)] + jet.D[(0, 1)], GRID, mu) ** 2
        assert good == pytest.approx(want, rel=1e-12)
