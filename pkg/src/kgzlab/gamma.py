"""Vector-field derivatives of radial fields, reduced to radial integrals.

A radial amplitude w(t, r) is a full field on R^3.  Applying products of the
vector fields (translations, boosts, rotations, plus the good and
semi-hyperboloidal derivatives) produces fields of the form

    sum_m  F_m(t, r) * prod_a (x_a / r)^{p_a},

an angular monomial times a radial profile.  The application rules are exact;
L^2(R^3) norms then follow from the exact sphere averages of monomial
products (AngularMomentTable), with no angular discretization at all.

Radial profiles are carried as mixed-derivative stacks d_t^i d_r^j F so that
repeated applications can differentiate through the coefficient functions
(t, x_a, 1/r, 1/t) by the product rule.  Profile stacks for evolved
components come either from a five-level DerivativeWindow or from a stored
(w, wt) snapshot with the higher time derivatives supplied by the equation
w_tt = Delta w - m^2 w + f.
"""

from __future__ import annotations

import math
from itertools import product as iproduct

import numpy as np

from .radial import (
    AngularMomentTable,
    DerivativeWindow,
    RadialGrid,
    w_radial_derivatives,
)

#: the commuting family Gamma, in table order
GENERATORS = ("dt", "d1", "d2", "d3", "L1", "L2", "L3", "O12", "O13", "O23")
GOOD_DERIVATIVES = ("G1", "G2", "G3")


class UnsupportedTierError(ValueError):
    """Requested derivative tier exceeds what the table supports."""


# ---------------------------------------------------------------------------
# radial jets
# ---------------------------------------------------------------------------


class RadialJet:
    """Mixed derivatives d_t^i d_r^j w for i + j <= order, at one time level."""

    def __init__(self, grid: RadialGrid, t: float, D: dict[tuple[int, int], np.ndarray], order: int):
        self.grid = grid
        self.t = t
        self.D = D
        self.order = order

    @classmethod
    def from_arrays(cls, grid, t, time_stack, order: int = 3) -> "RadialJet":
        """Build from [w, w_t, w_tt, ...]; spatial derivatives by 4th-order stencils."""
        D: dict[tuple[int, int], np.ndarray] = {}
        for i, arr in enumerate(time_stack[: order + 1]):
            for j, d in enumerate(w_radial_derivatives(arr, grid, order - i)):
                D[(i, j)] = d
        return cls(grid, t, D, order)

    @classmethod
    def from_window(cls, window: DerivativeWindow, order: int = 3) -> "RadialJet":
        stack = [window.time_derivative(k) for k in range(order + 1)]
        return cls.from_arrays(window.grid, window.t, stack, order)

    @classmethod
    def from_snapshot(
        cls,
        grid: RadialGrid,
        t: float,
        w: np.ndarray,
        wt: np.ndarray,
        m2: float = 0.0,
        source: np.ndarray | None = None,
        source_t: np.ndarray | None = None,
        order: int = 3,
    ) -> "RadialJet":
        """Equation-derived jet: w_tt = Delta w - m2 w + f, and w_ttt from wt, f_t."""

        def lap(arr):
            d = w_radial_derivatives(arr, grid, 2)
            return d[2] + 2.0 * d[1] / grid.r

        stack = [w, wt]
        if order >= 2:
            wtt = lap(w) - m2 * w
            if source is not None:
                wtt = wtt + source
            stack.append(wtt)
        if order >= 3:
            wttt = lap(wt) - m2 * wt
            if source_t is not None:
                wttt = wttt + source_t
            stack.append(wttt)
        return cls.from_arrays(grid, t, stack, order)


# ---------------------------------------------------------------------------
# radial profiles: mixed-derivative stacks supporting the coefficient calculus
# ---------------------------------------------------------------------------


class _Profile:
    """d_t^i d_r^j of one radial profile, i + j <= order."""

    __slots__ = ("D", "order", "t", "r")

    def __init__(self, D, order, t, r):
        self.D = D
        self.order = order
        self.t = t
        self.r = r

    @classmethod
    def from_jet(cls, jet: RadialJet) -> "_Profile":
        return cls(dict(jet.D), jet.order, jet.t, jet.grid.r)

    def _sub(self, D, order):
        return _Profile(D, order, self.t, self.r)

    def scaled(self, c: float) -> "_Profile":
        return self._sub({k: c * v for k, v in self.D.items()}, self.order)

    def add(self, other: "_Profile") -> "_Profile":
        order = min(self.order, other.order)
        D = {
            (i, j): self.D[(i, j)] + other.D[(i, j)]
            for i in range(order + 1)
            for j in range(order + 1 - i)
        }
        return self._sub(D, order)

    def dt(self) -> "_Profile":
        k = self.order - 1
        return self._sub(
            {(i, j): self.D[(i + 1, j)] for i in range(k + 1) for j in range(k + 1 - i)}, k
        )

    def dr(self) -> "_Profile":
        k = self.order - 1
        return self._sub(
            {(i, j): self.D[(i, j + 1)] for i in range(k + 1) for j in range(k + 1 - i)}, k
        )

    def dropped(self) -> "_Profile":
        """Same profile, order lowered by one (for zero/coefficient-only paths)."""
        k = self.order - 1
        return self._sub({(i, j): self.D[(i, j)] for i in range(k + 1) for j in range(k + 1 - i)}, k)

    def times_power(self, var: str, p: int) -> "_Profile":
        """Multiply by t^p or r^p (p may be negative), Leibniz through the stack."""
        base = self.t if var == "t" else self.r
        D = {}
        for i in range(self.order + 1):
            for j in range(self.order + 1 - i):
                k = i if var == "t" else j
                acc = None
                for m in range(k + 1):
                    fall = 1.0
                    for q in range(m):
                        fall *= p - q
                    if fall == 0.0:
                        continue  # also guards 0^(p-m) at t = 0 for integer p >= 0
                    weight = math.comb(k, m) * fall * base ** (p - m)
                    src = (i - m, j) if var == "t" else (i, j - m)
                    term = weight * self.D[src]
                    acc = term if acc is None else acc + term
                D[(i, j)] = acc if acc is not None else 0.0 * self.D[(i, j)]
        return self._sub(D, self.order)

    @property
    def value(self) -> np.ndarray:
        return self.D[(0, 0)]


class AngularField:
    """Sum of (angular monomial) x (radial profile) terms."""

    def __init__(self, terms: dict[tuple[int, int, int], _Profile]):
        self.terms = terms

    @classmethod
    def radial(cls, jet: RadialJet) -> "AngularField":
        return cls({(0, 0, 0): _Profile.from_jet(jet)})

    def apply(self, gen: str) -> "AngularField":
        """Apply one generator; every resulting profile has order lowered by 1."""
        out: dict[tuple[int, int, int], _Profile] = {}

        def emit(mon: tuple[int, int, int], prof: _Profile):
            out[mon] = out[mon].add(prof) if mon in out else prof

        for mon, F in self.terms.items():
            deg = sum(mon)
            if gen == "dt":
                emit(mon, F.dt())
            elif gen == "L0":
                emit(mon, F.dt().times_power("t", 1).add(F.dr().times_power("r", 1)))
            elif gen[0] in ("d", "G", "L", "U") and gen[1] in "123":
                a = int(gen[1]) - 1
                ea = tuple(e + (1 if i == a else 0) for i, e in enumerate(mon))
                if gen[0] == "d":
                    radial_part = F.dr()
                    coeff = F.times_power("r", -1).dropped()
                elif gen[0] == "G":  # (x_a/r) d_t + d_a
                    radial_part = F.dt().add(F.dr())
                    coeff = F.times_power("r", -1).dropped()
                elif gen[0] == "L":  # x_a d_t + t d_a
                    radial_part = F.dt().times_power("r", 1).add(F.dr().times_power("t", 1))
                    coeff = F.times_power("t", 1).times_power("r", -1).dropped()
                else:  # U: L_a / t
                    radial_part = (
                        F.dt().times_power("r", 1).add(F.dr().times_power("t", 1))
                    ).times_power("t", -1)
                    coeff = F.times_power("r", -1).dropped()
                emit(ea, radial_part)
                # the angular gradient: d_a X^P = [p_a X^{P - e_a} - |P| (x_a/r) X^P] / r
                if mon[a] > 0:
                    em = tuple(e - (1 if i == a else 0) for i, e in enumerate(mon))
                    emit(em, coeff.scaled(float(mon[a])))
                if deg > 0:
                    emit(ea, coeff.scaled(-float(deg)))
            elif gen in ("O12", "O13", "O23"):
                a, b = int(gen[1]) - 1, int(gen[2]) - 1
                # Omega_ab [F X^P] = F [p_b (x_a/r) X^{P-e_b} - p_a (x_b/r) X^{P-e_a}]
                if mon[b] > 0:
                    m2 = list(mon)
                    m2[b] -= 1
                    m2[a] += 1
                    emit(tuple(m2), F.scaled(float(mon[b])).dropped())
                if mon[a] > 0:
                    m2 = list(mon)
                    m2[a] -= 1
                    m2[b] += 1
                    emit(tuple(m2), F.scaled(-float(mon[a])).dropped())
                if mon[a] == 0 and mon[b] == 0:
                    emit(mon, F.scaled(0.0).dropped())  # annihilated, keep shape
            else:
                raise ValueError(f"unknown generator {gen!r}")
        return AngularField(out)

    # -- evaluation --------------------------------------------------------

    def collapsed_values(self) -> dict[tuple[int, int, int], np.ndarray]:
        return {mon: prof.value for mon, prof in self.terms.items()}

    def l2(self, grid: RadialGrid, weight: np.ndarray | None = None) -> float:
        """L^2(R^3) norm via exact sphere averages of monomial products."""
        vals = self.collapsed_values()
        mons = list(vals)
        r2 = grid.r**2 if weight is None else grid.r**2 * weight
        total = 0.0
        for i, ma in enumerate(mons):
            for j in range(i, len(mons)):
                mb = mons[j]
                mom = AngularMomentTable.moment(tuple(x + y for x, y in zip(ma, mb)))
                if mom == 0.0:
                    continue
                dot = float(np.dot(r2 * vals[ma], vals[mb]))
                total += (1.0 if i == j else 2.0) * mom * dot
        return math.sqrt(max(0.0, 4.0 * math.pi * grid.dr * total))

    def sup_abs(self, weight: np.ndarray | None = None) -> float:
        """sup_x of weight(r)|field|: exact for single-monomial fields (the only
        tiers reported), triangle-inequality bound otherwise."""
        total = 0.0
        for v in self.collapsed_values().values():
            av = np.abs(v) if weight is None else np.abs(v) * weight
            total += float(np.max(av))
        return total


# ---------------------------------------------------------------------------
# tables over multi-indices
# ---------------------------------------------------------------------------


def multi_indices(max_order: int) -> list[tuple[str, ...]]:
    """All ordered generator products with length <= max_order, including ()."""
    out: list[tuple[str, ...]] = [()]
    for k in range(1, max_order + 1):
        out.extend(iproduct(GENERATORS, repeat=k))
    return out


def gamma_fields(jet: RadialJet, max_order: int) -> dict[tuple[str, ...], AngularField]:
    """AngularField for every Gamma^I, each built from its parent by one generator."""
    if max_order > jet.order:
        raise UnsupportedTierError(
            f"tier {max_order} needs jet order >= {max_order}, have {jet.order}"
        )
    fields: dict[tuple[str, ...], AngularField] = {(): AngularField.radial(jet)}
    frontier: list[tuple[str, ...]] = [()]
    for _ in range(max_order):
        nxt = []
        for idx in frontier:
            base = fields[idx]
            for gen in GENERATORS:
                key = idx + (gen,)
                fields[key] = base.apply(gen)
                nxt.append(key)
        frontier = nxt
    return fields


def gamma_l2_table(jet_or_window, K: int) -> dict[tuple[str, ...], float]:
    """||Gamma^I w|| for every |I| <= K (radial w); the supported tier is K <= 2."""
    if K > 2:
        raise UnsupportedTierError("gamma_l2_table supports tiers K <= 2")
    jet = (
        RadialJet.from_window(jet_or_window)
        if isinstance(jet_or_window, DerivativeWindow)
        else jet_or_window
    )
    fields = gamma_fields(jet, K)
    return {idx: f.l2(jet.grid) for idx, f in fields.items()}


def gamma_l2_norms(jet: RadialJet, max_order: int) -> dict[tuple[str, ...], float]:
    """Deep-tier variant (up to |I| = 3) for the Sobolev-constant checks."""
    fields = gamma_fields(jet, max_order)
    return {idx: f.l2(jet.grid) for idx, f in fields.items()}


def gamma_sup_table(
    jet: RadialJet, K: int, weight: np.ndarray | None = None
) -> dict[tuple[str, ...], float]:
    """sup_x weight(r)|Gamma^I w| for |I| <= K <= 1 (single-monomial, exact)."""
    if K > 1:
        raise UnsupportedTierError("exact directional sups are limited to |I| <= 1")
    return {idx: f.sup_abs(weight) for idx, f in gamma_fields(jet, K).items()}


def gamma_ghost_integrands(
    jet: RadialJet, K: int, mu: np.ndarray
) -> dict[tuple[str, ...], tuple[float, float]]:
    """Ghost-weight integrands per tier entry.

    For each |I| <= K returns (int |Gamma^I w|^2 mu dx, int sum_a |G_a Gamma^I w|^2 mu dx)
    with mu the radial weight <r - t>^(-1-delta); feeds the accumulated terms of
    the ghost energy for derived components.
    """
    out = {}
    for idx, f in gamma_fields(jet, K).items():
        sq = f.l2(jet.grid, weight=mu) ** 2
        good = sum(f.apply(g).l2(jet.grid, weight=mu) ** 2 for g in GOOD_DERIVATIVES)
        out[idx] = (sq, good)
    return out
