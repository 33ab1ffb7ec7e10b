"""Energy functionals: natural, ghost-weight, conformal, and hyperboloidal.

The ghost weight is q(y) = int_{-inf}^{y} <s>^(-1-delta) ds evaluated at
y = r - t.  Multiplying the equation by e^q d_t v and integrating produces,
besides the natural energy, two nonnegative accumulated spacetime integrals:
the mass term m^2 iint v^2 <r-t>^(-1-delta) and the good-derivative term
sum_a iint |G_a v|^2 <r-t>^(-1-delta).  For radial fields
sum_a |G_a v|^2 = (v_t + v_r)^2.  q has no elementary closed form for
general delta, so it is tabulated once per delta (composite Simpson on
[-400, 400], analytic asymptotic tails beyond) and interpolated cubically;
delta = 1 gives q = pi/2 + arctan(y) exactly, which pins the integrator.

The conformal energy is ||u||^2 + ||L0 u||^2 + sum ||Omega u||^2 +
sum ||L_a u||^2 (rotation terms vanish on radial fields), controlled by the
<t + |x|>-weighted source norm.

Hyperboloidal energies live on slices H_s = {t^2 = r^2 + s^2}, restricted to
the cone r <= t - 1, with the flat-integral measure (integrate over x at
t = sqrt(s^2 + r^2)).  The three equivalent density expressions are computed
independently and compared; the energy inequality in s is verified with the
slice norms of the source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .evolve import Trajectory
from .radial import RadialGrid, RadialState, jbracket, l2_norm, w_radial_derivatives


# ---------------------------------------------------------------------------
# ghost weight
# ---------------------------------------------------------------------------


def _tail_integral(y_abs: float, delta: float) -> float:
    """3-term asymptotic of int_{y}^{inf} <s>^(-1-delta) ds for y >= 400."""
    d = delta
    return (
        y_abs ** (-d) / d
        - 0.5 * (1.0 + d) * y_abs ** (-d - 2.0) / (d + 2.0)
        + 0.125 * (1.0 + d) * (3.0 + d) * y_abs ** (-d - 4.0) / (d + 4.0)
    )


class GhostWeightSpec:
    """Tabulated ghost weight q for one delta; callable on arrays."""

    Y_MAX = 400.0
    PANEL = 0.002

    def __init__(self, delta: float = 0.05):
        if not 0.0 < delta <= 1.0:
            raise ValueError(f"delta must be in (0, 1], got {delta}")
        self.delta = delta
        n = int(2.0 * self.Y_MAX / self.PANEL)
        edges = np.linspace(-self.Y_MAX, self.Y_MAX, n + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])

        def mu(y):
            return (1.0 + y * y) ** (-(1.0 + delta) / 2.0)

        # per-panel Simpson, then cumulative sum
        panels = (self.PANEL / 6.0) * (mu(edges[:-1]) + 4.0 * mu(mids) + mu(edges[1:]))
        self._y = edges
        self._q = np.concatenate([[0.0], np.cumsum(panels)]) + _tail_integral(self.Y_MAX, delta)
        self.q_total = 2.0 * _tail_integral(self.Y_MAX, delta) + float(np.sum(panels))

    def q(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        out = np.empty_like(y)
        lo = y <= -self.Y_MAX
        hi = y >= self.Y_MAX
        mid = ~(lo | hi)
        if np.any(lo):
            out[lo] = _tail_integral(np.abs(y[lo]), self.delta)
        if np.any(hi):
            out[hi] = self.q_total - _tail_integral(y[hi], self.delta)
        if np.any(mid):
            ym = y[mid]
            j = np.clip(((ym - self._y[0]) / self.PANEL).astype(int), 1, len(self._y) - 3)
            # cubic Lagrange on the 4 surrounding knots
            acc = np.zeros_like(ym)
            base = self._y[j - 1]
            for a in range(4):
                la = np.ones_like(ym)
                xa = base + a * self.PANEL
                for b in range(4):
                    if b != a:
                        xb = base + b * self.PANEL
                        la *= (ym - xb) / (xa - xb)
                acc += la * self._q[j - 1 + a]
            out[mid] = acc
        return out

    def mu(self, y) -> np.ndarray:
        """The accumulator weight <y>^(-1-delta)."""
        return jbracket(y) ** (-(1.0 + self.delta))


# ---------------------------------------------------------------------------
# pointwise-in-time functionals
# ---------------------------------------------------------------------------


def natural_energy(state: RadialState, m2: float) -> float:
    """E_m(t, v) = int |v_t|^2 + sum_a |d_a v|^2 + m^2 v^2 dx (radial reduction)."""
    wr = w_radial_derivatives(state.w, state.grid, 1)[1]
    return (
        l2_norm(state.wt, state.grid) ** 2
        + l2_norm(wr, state.grid) ** 2
        + m2 * l2_norm(state.w, state.grid) ** 2
    )


def conformal_energy(state: RadialState) -> float:
    """||u||^2 + ||L0 u||^2 + sum_a ||L_a u||^2 (+ rotations, zero on radial)."""
    g = state.grid
    t = state.t
    wr = w_radial_derivatives(state.w, g, 1)[1]
    l0 = t * state.wt + g.r * wr
    la = g.r * state.wt + t * wr  # sum_a ||L_a u||^2 = 4 pi int r^2 (r u_t + t u_r)^2
    return l2_norm(state.w, g) ** 2 + l2_norm(l0, g) ** 2 + l2_norm(la, g) ** 2


# ---------------------------------------------------------------------------
# ledgers over a trajectory
# ---------------------------------------------------------------------------


@dataclass
class EnergyLedger:
    """Time series of energies and accumulated spacetime integrals."""

    times: np.ndarray
    series: dict[str, np.ndarray] = field(default_factory=dict)

    def __getitem__(self, key: str) -> np.ndarray:
        return self.series[key]


def _component_states(traj: Trajectory, name: str):
    for k, t in enumerate(traj.times):
        w, wt = traj.snaps[name][k]
        yield k, t, w, wt


def ghost_energy(traj: Trajectory, component: str, spec: GhostWeightSpec) -> EnergyLedger:
    """Natural energy plus the two nondecreasing ghost accumulators.

    Accumulators are advanced by the trapezoid rule over stored snapshots
    (the solver's in-run observer advances them every step by the midpoint
    rule; both agree to O(dt^2)).
    """
    g = traj.grid
    m2 = traj.m2[component]
    times = np.asarray(traj.times)
    nat = np.empty(len(times))
    mass_rate = np.empty(len(times))
    good_rate = np.empty(len(times))
    for k, t, w, wt in _component_states(traj, component):
        wr = w_radial_derivatives(w, g, 1)[1]
        mu = spec.mu(g.r - t)
        nat[k] = (
            l2_norm(wt, g) ** 2 + l2_norm(wr, g) ** 2 + m2 * l2_norm(w, g) ** 2
        )
        mass_rate[k] = m2 * l2_norm(w, g, mu) ** 2
        good_rate[k] = l2_norm(wt + wr, g, mu) ** 2
    ledger = EnergyLedger(times=times)
    ledger.series["natural"] = nat
    ledger.series["ghost_direct"] = nat.copy()
    ledger.series["ghost_mass_acc"] = _cumtrapz(mass_rate, times)
    ledger.series["ghost_good_acc"] = _cumtrapz(good_rate, times)
    ledger.series["ghost_total"] = (
        ledger.series["ghost_direct"]
        + ledger.series["ghost_mass_acc"]
        + ledger.series["ghost_good_acc"]
    )
    return ledger


def _cumtrapz(rate: np.ndarray, times: np.ndarray) -> np.ndarray:
    out = np.zeros_like(rate)
    if len(rate) > 1:
        dt = np.diff(times)
        out[1:] = np.cumsum(0.5 * dt * (rate[1:] + rate[:-1]))
    return out


class GhostLedgerObserver:
    """In-run ghost accumulators, advanced each step by the midpoint rule.

    The midpoint fields of the leapfrog transition are exactly the staggered
    velocity (time derivative) and the level average (field value).
    """

    def __init__(self, components: dict[str, float], spec: GhostWeightSpec, stride: int = 4):
        self.m2 = dict(components)
        self.spec = spec
        self.stride = stride
        self.acc_mass = {c: 0.0 for c in components}
        self.acc_good = {c: 0.0 for c in components}
        self.times: list[float] = []
        self.rows: dict[str, list[tuple[float, float, float]]] = {c: [] for c in components}

    def half(self, sim, t_half):
        mu = self.spec.mu(sim.grid.r - t_half)
        dt = sim.config.dt
        for c, m2 in self.m2.items():
            w, wt, wr = sim.half_fields(c)
            if m2 != 0.0:
                self.acc_mass[c] += dt * m2 * l2_norm(w, sim.grid, mu) ** 2
            self.acc_good[c] += dt * l2_norm(wt + wr, sim.grid, mu) ** 2

    def level(self, sim, n, t, get):
        if n % self.stride and n != sim.config.n_steps:
            return
        self.times.append(t)
        for c, m2 in self.m2.items():
            w, wt = get(c)
            wr = w_radial_derivatives(w, sim.grid, 1)[1]
            nat = l2_norm(wt, sim.grid) ** 2 + l2_norm(wr, sim.grid) ** 2
            if m2 != 0.0:
                nat += m2 * l2_norm(w, sim.grid) ** 2
            self.rows[c].append((nat, self.acc_mass[c], self.acc_good[c]))

    def finish(self, sim, traj):
        times = np.asarray(self.times)
        for c in self.m2:
            arr = np.asarray(self.rows[c])
            ledger = EnergyLedger(times=times)
            ledger.series["natural"] = arr[:, 0]
            ledger.series["ghost_direct"] = arr[:, 0]
            ledger.series["ghost_mass_acc"] = arr[:, 1]
            ledger.series["ghost_good_acc"] = arr[:, 2]
            ledger.series["ghost_total"] = arr[:, 0] + arr[:, 1] + arr[:, 2]
            traj.series.setdefault("ghost", {})[c] = ledger


def energy_balance_residual(
    traj: Trajectory,
    component: str,
    spec: GhostWeightSpec,
    source_fn=None,
) -> EnergyLedger:
    """Discrete e^q-weighted energy balance along a trajectory.

    residual(t) = |D(t) - D(t0) + A(t) - S(t)| with
    D = (1/2) int e^q (v_t^2 + v_r^2 + m^2 v^2) dx,
    A = iint (mu e^q / 2)(sum_a (G_a v)^2 + m^2 v^2),
    S = iint e^q f v_t.  Holds to O(dt^2) + O(dr^2).
    """
    g = traj.grid
    m2 = traj.m2[component]
    times = np.asarray(traj.times)
    D = np.empty(len(times))
    a_rate = np.empty(len(times))
    s_rate = np.empty(len(times))
    for k, t, w, wt in _component_states(traj, component):
        wr = w_radial_derivatives(w, g, 1)[1]
        eq = np.exp(spec.q(g.r - t))
        mu = spec.mu(g.r - t)
        D[k] = 0.5 * float(
            4.0 * math.pi * g.dr * np.dot(g.r**2, eq * (wt**2 + wr**2 + m2 * w**2))
        )
        a_rate[k] = 0.5 * float(
            4.0 * math.pi * g.dr * np.dot(g.r**2, mu * eq * ((wt + wr) ** 2 + m2 * w**2))
        )
        if source_fn is not None:
            f = source_fn(t, g.r)
            s_rate[k] = float(4.0 * math.pi * g.dr * np.dot(g.r**2, eq * f * wt))
        else:
            s_rate[k] = 0.0
    A = _cumtrapz(a_rate, times)
    S = _cumtrapz(s_rate, times)
    ledger = EnergyLedger(times=times)
    ledger.series["weighted_direct"] = D
    ledger.series["accumulated"] = A
    ledger.series["source_work"] = S
    ledger.series["residual"] = np.abs(D - D[0] + A - S)
    return ledger


def source_norm_integrals(traj: Trajectory, source_fn) -> EnergyLedger:
    """int ||f|| dt' and int ||<t'+|x|> f|| dt' along the trajectory."""
    g = traj.grid
    times = np.asarray(traj.times)
    plain = np.empty(len(times))
    weighted = np.empty(len(times))
    for k, t in enumerate(times):
        f = source_fn(t, g.r)
        plain[k] = l2_norm(f, g)
        weighted[k] = l2_norm(jbracket(t + g.r) * f, g)
    ledger = EnergyLedger(times=times)
    ledger.series["source_l2_int"] = _cumtrapz(plain, times)
    ledger.series["source_weighted_int"] = _cumtrapz(weighted, times)
    return ledger


def conformal_estimate_check(traj: Trajectory, component: str, source_fn=None):
    """lhs(t) = E_con(t)^(1/2) against rhs(t) = E_con(t0)^(1/2) + weighted source integral.

    Returns (lhs, rhs, C) with C(t) = lhs/rhs, which must stay bounded.
    """
    times = np.asarray(traj.times)
    lhs = np.array(
        [math.sqrt(conformal_energy(traj.state(component, k))) for k in range(len(times))]
    )
    if source_fn is not None:
        ints = source_norm_integrals(traj, source_fn)["source_weighted_int"]
    else:
        ints = np.zeros(len(times))
    rhs = lhs[0] + ints
    with np.errstate(invalid="ignore", divide="ignore"):
        C = np.where(rhs > 0.0, lhs / rhs, 0.0)
    return lhs, rhs, C


# ---------------------------------------------------------------------------
# hyperboloids
# ---------------------------------------------------------------------------


class InterpolationError(RuntimeError):
    pass


@dataclass
class HyperboloidSlice:
    """Field values on H_s = {t = sqrt(s^2 + r^2)}, restricted to r <= t - 1."""

    s: float
    grid: RadialGrid
    r: np.ndarray
    t_of_r: np.ndarray
    w: np.ndarray
    wt: np.ndarray
    wr: np.ndarray


def _wr_of_snapshot(traj: Trajectory, component: str, k: int) -> np.ndarray:
    cache = traj.series.setdefault("_wr_cache", {})
    key = (component, k)
    if key not in cache:
        cache[key] = w_radial_derivatives(traj.snaps[component][k][0], traj.grid, 1)[1]
    return cache[key]


def interpolate_hyperboloid(traj: Trajectory, component: str, s: float) -> HyperboloidSlice:
    """Cubic interpolation in t of (w, wt, w_r) onto the hyperboloid H_s."""
    if s < 2.0:
        raise InterpolationError("hyperbolic time starts at s = 2")
    g = traj.grid
    times = np.asarray(traj.times)
    r_cone = (s * s - 1.0) / 2.0  # r <= t - 1 on H_s
    mask = g.r <= min(r_cone, g.R)
    r = g.r[mask]
    tau = np.sqrt(s * s + r * r)
    if tau.size == 0:
        raise InterpolationError(f"slice s={s} has no cone nodes on this grid")
    if tau.max() > times[-1] + 1e-9 or tau.min() < times[0] - 1e-9:
        raise InterpolationError(
            f"slice s={s} needs times up to {tau.max():.2f}, stored up to {times[-1]:.2f}"
        )
    j = np.searchsorted(times, tau) - 1
    j = np.clip(j, 1, len(times) - 3)
    w = np.zeros_like(r)
    wt = np.zeros_like(r)
    wr = np.zeros_like(r)
    for jj in np.unique(j):
        sel = j == jj
        idx = [jj - 1, jj, jj + 1, jj + 2]
        ts = times[idx]
        for a, ka in enumerate(idx):
            la = np.ones(int(np.sum(sel)))
            for b, kb in enumerate(idx):
                if b != a:
                    la *= (tau[sel] - ts[b]) / (ts[a] - ts[b])
            wa, wta = traj.snaps[component][ka]
            w[sel] += la * wa[mask][sel]
            wt[sel] += la * wta[mask][sel]
            wr[sel] += la * _wr_of_snapshot(traj, component, ka)[mask][sel]
    return HyperboloidSlice(s=s, grid=g, r=r, t_of_r=tau, w=w, wt=wt, wr=wr)


def hyperboloidal_energy(sl: HyperboloidSlice, m2: float, expression: int = 2) -> float:
    """One of the three equivalent energy densities, integrated with the flat measure."""
    t = sl.t_of_r
    s_over_t = sl.s / t
    r_over_t = sl.r / t
    if expression == 1:
        dens = sl.wt**2 + sl.wr**2 + 2.0 * r_over_t * sl.wt * sl.wr + m2 * sl.w**2
    elif expression == 2:
        dens = (s_over_t * sl.wt) ** 2 + (r_over_t * sl.wt + sl.wr) ** 2 + m2 * sl.w**2
    elif expression == 3:
        dens = (sl.wt + r_over_t * sl.wr) ** 2 + (s_over_t * sl.wr) ** 2 + m2 * sl.w**2
    else:
        raise ValueError(f"unknown expression id {expression}")
    return float(4.0 * math.pi * sl.grid.dr * np.dot(sl.r**2, dens))


def slice_l2(sl: HyperboloidSlice, values: np.ndarray) -> float:
    """||.||_{L^2_f(H_s)} of samples given on the slice nodes."""
    return math.sqrt(4.0 * math.pi * sl.grid.dr * float(np.dot(sl.r**2, np.square(values))))


def hyperboloidal_estimate_check(
    traj: Trajectory, component: str, s_values, source_fn=None
) -> dict[str, np.ndarray]:
    """E~_m(s)^(1/2) <= E~_m(s0)^(1/2) + int_{s0}^s ||h||_{L^2_f} ds' with measured slack."""
    m2 = traj.m2[component]
    s_values = np.asarray(sorted(s_values), dtype=float)
    lhs = np.empty(len(s_values))
    rate = np.empty(len(s_values))
    for i, s in enumerate(s_values):
        sl = interpolate_hyperboloid(traj, component, s)
        lhs[i] = math.sqrt(hyperboloidal_energy(sl, m2, expression=2))
        if source_fn is None:
            rate[i] = 0.0
        else:
            rate[i] = slice_l2(sl, source_fn(sl.t_of_r, sl.r))
    rhs = lhs[0] + _cumtrapz(rate, s_values)
    return {"s": s_values, "lhs": lhs, "rhs": rhs, "slack": rhs - lhs}


class SliceCollector:
    """On-line hyperboloid extraction for runs too long to store snapshots.

    For each target s and grid node r <= (s^2 - 1)/2, the crossing time
    tau = sqrt(s^2 + r^2) is interpolated from four consecutive levels of the
    stepping ring (cubic Lagrange in t; wt from the derivative of the same
    cubic, wr by local 4th-order gathers).  All (slice, node) targets of one
    level are processed in a single vectorized pass.  Produces the same
    HyperboloidSlice objects as the stored-snapshot path.
    """

    def __init__(self, components: list[str], s_values):
        self.components = list(components)
        self.s_values = [float(s) for s in s_values]

    def start(self, sim):
        g = sim.grid
        dt, t0 = sim.config.dt, sim.config.t0
        n_total = sim.config.n_steps + 1
        self._dt, self._t0, self._grid = dt, t0, g
        ids_parts, tau_parts, trig_parts = [], [], []
        self._slice_bounds = []
        pos = 0
        for s in self.s_values:
            r_cone = (s * s - 1.0) / 2.0
            idx = np.nonzero(g.r <= r_cone)[0]
            tau = np.sqrt(s * s + g.r[idx] ** 2)
            keep = tau <= t0 + (n_total - 3) * dt  # final levels cannot center a cubic
            idx, tau = idx[keep], tau[keep]
            if idx.size == 0:
                raise InterpolationError(f"slice s={s} has no reachable nodes")
            ids_parts.append(idx)
            tau_parts.append(tau)
            trig_parts.append(np.clip(((tau - t0) / dt).astype(int) + 2, 3, n_total - 1))
            self._slice_bounds.append((pos, pos + idx.size))
            pos += idx.size
        ids_all = np.concatenate(ids_parts)
        tau_all = np.concatenate(tau_parts)
        trig_all = np.concatenate(trig_parts)
        order = np.argsort(trig_all, kind="stable")
        self._ids = ids_all[order]
        self._tau = tau_all[order]
        self._unorder = np.argsort(order, kind="stable")
        trig_sorted = trig_all[order]
        # contiguous global ranges per trigger level
        self._level_range = {}
        lo = 0
        while lo < len(trig_sorted):
            hi = int(np.searchsorted(trig_sorted, trig_sorted[lo], side="right"))
            self._level_range[int(trig_sorted[lo])] = (lo, hi)
            lo = hi
        self._flat = {
            c: {k: np.zeros(pos) for k in ("w", "wt", "wr")} for c in self.components
        }
        self._ring: list[tuple[int, dict[str, np.ndarray]]] = []
        # even-mirror index maps for the local first-derivative gathers
        self._gmaps = []
        for off in (-2, -1, 1, 2):
            j = np.arange(g.nr) + off
            j = np.where(j < 0, -j - 1, j)
            j = np.minimum(j, g.nr - 1)  # outer band is identically zero
            self._gmaps.append((off, j))

    def level(self, sim, n, t, get):
        entry = {c: sim.U_prev[c] / self._grid.r for c in self.components}
        self._ring.append((n, entry))
        if len(self._ring) > 4:
            self._ring.pop(0)
        rng = self._level_range.get(n)
        if rng is None or len(self._ring) < 4:
            return
        lo, hi = rng
        ids = self._ids[lo:hi]
        x = self._tau[lo:hi]
        ts = self._t0 + np.array([lev for lev, _ in self._ring], dtype=float) * self._dt
        inv_12dr = 1.0 / (12.0 * self._grid.dr)
        coef = {-2: 1.0, -1: -8.0, 1: 8.0, 2: -1.0}
        for c in self.components:
            acc_w = np.zeros(len(ids))
            acc_wt = np.zeros(len(ids))
            acc_wr = np.zeros(len(ids))
            for a in range(4):
                la = np.ones(len(ids))
                dla = np.zeros(len(ids))
                for b in range(4):
                    if b == a:
                        continue
                    fac = (x - ts[b]) / (ts[a] - ts[b])
                    dla = dla * fac + la / (ts[a] - ts[b])
                    la = la * fac
                wa = self._ring[a][1][c]
                acc_w += la * wa[ids]
                acc_wt += dla * wa[ids]
                wr_local = np.zeros(len(ids))
                for off, jmap in self._gmaps:
                    wr_local += coef[off] * wa[jmap[ids]]
                acc_wr += la * (wr_local * inv_12dr)
            self._flat[c]["w"][lo:hi] = acc_w
            self._flat[c]["wt"][lo:hi] = acc_wt
            self._flat[c]["wr"][lo:hi] = acc_wr

    def slices(self, component: str) -> list[HyperboloidSlice]:
        out = []
        flat = self._flat[component]
        ids_orig = self._ids[self._unorder]
        tau_orig = self._tau[self._unorder]
        vals = {k: flat[k][self._unorder] for k in flat}
        for i, s in enumerate(self.s_values):
            a, b = self._slice_bounds[i]
            out.append(
                HyperboloidSlice(
                    s=s, grid=self._grid, r=self._grid.r[ids_orig[a:b]], t_of_r=tau_orig[a:b],
                    w=vals["w"][a:b], wt=vals["wt"][a:b], wr=vals["wr"][a:b],
                )
            )
        return out


# ---------------------------------------------------------------------------
# ghost energies of vector-field derivatives (uniform-bound checks)
# ---------------------------------------------------------------------------


def gamma_ghost_energy_series(
    traj: Trajectory, component: str, K: int, spec: GhostWeightSpec
) -> dict[tuple[str, ...], EnergyLedger]:
    """E_gst,m(t, Gamma^I v) for every |I| <= K, from snapshot jets.

    Direct part: int |d_t Gamma^I v|^2 + sum_a |d_a Gamma^I v|^2 + m^2 |Gamma^I v|^2;
    accumulators by the trapezoid rule over snapshots.
    """
    from .gamma import gamma_fields

    g = traj.grid
    m2 = traj.m2[component]
    times = np.asarray(traj.times)
    idx_list = None
    direct: dict = {}
    mass_rate: dict = {}
    good_rate: dict = {}
    for k, t in enumerate(times):
        jet = traj.component_jet(component, k)
        mu = spec.mu(g.r - t)
        fields = gamma_fields(jet, K)
        if idx_list is None:
            idx_list = list(fields)
            for idx in idx_list:
                direct[idx] = np.empty(len(times))
                mass_rate[idx] = np.empty(len(times))
                good_rate[idx] = np.empty(len(times))
        for idx, f in fields.items():
            grad = f.apply("dt").l2(g) ** 2 + sum(f.apply(d).l2(g) ** 2 for d in ("d1", "d2", "d3"))
            direct[idx][k] = grad + m2 * f.l2(g) ** 2
            mass_rate[idx][k] = m2 * f.l2(g, weight=mu) ** 2
            good_rate[idx][k] = sum(f.apply(gg).l2(g, weight=mu) ** 2 for gg in ("G1", "G2", "G3"))
    out = {}
    for idx in idx_list:
        ledger = EnergyLedger(times=times)
        ledger.series["ghost_direct"] = direct[idx]
        ledger.series["ghost_mass_acc"] = _cumtrapz(mass_rate[idx], times)
        ledger.series["ghost_good_acc"] = _cumtrapz(good_rate[idx], times)
        ledger.series["ghost_total"] = (
            direct[idx] + ledger.series["ghost_mass_acc"] + ledger.series["ghost_good_acc"]
        )
        out[idx] = ledger
    return out


def gamma_l2_series(traj: Trajectory, component: str, K: int):
    """||Gamma^I v||(t) for every |I| <= K over the stored snapshots."""
    from .gamma import gamma_fields

    times = np.asarray(traj.times)
    out: dict[tuple[str, ...], np.ndarray] = {}
    for k, t in enumerate(times):
        jet = traj.component_jet(component, k)
        for idx, f in gamma_fields(jet, K).items():
            out.setdefault(idx, np.empty(len(times)))[k] = f.l2(traj.grid)
    return times, out
