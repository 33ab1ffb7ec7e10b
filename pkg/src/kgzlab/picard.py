"""Fixed-point construction: the solution map, the X-norm, and contraction rates.

The solution map T sends a pair (Psi, phi) to the solution of the linear
system  -Box Psi~ + Psi~ = -phi Psi,  -Box phi~ = Delta(Psi^2)  with the
original data.  Iterating T from the free-solution seed realizes the
contraction argument as an experiment: the distances d_k between consecutive
iterates, measured in the truncated X-norm, should shrink by a factor
rho_k <= 1/2 for small data.

All iterates advance in lockstep within a single run (iterate j consumes
iterate j-1's current-step values), so sources come from every solver step
with no interpolation and no per-step storage.  The discrete fixed point of
T is bit-for-bit the discrete nonlinear solution, which the cross-check
against the direct solver exploits.

The X-norm tiers collapse the deep derivative hierarchy to K <= 2:
energy tier |I| <= K of ghost energies and wave L^2 norms, then weighted
sup tiers at |I| <= K-1 and K-2 (floored at 0), preserving the ordering
"more derivatives => weaker weight".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .energies import GhostWeightSpec, gamma_ghost_energy_series
from .evolve import (
    DivergenceError,
    SolverConfig,
    Trajectory,
    _System,
    evolve,
    solve_kgz,
)
from .gamma import RadialJet, gamma_fields, gamma_sup_table
from .radial import (
    InitialDataSpec,
    RadialGrid,
    WEIGHT_KINDS,
    make_initial_state,
    smallness_norm,
    w_radial_derivatives,
)


class TowerSystem(_System):
    """k_max + 1 lockstep iterates: level 0 free, level j sourced by level j-1."""

    name = "picard_tower"

    def __init__(self, k_max: int):
        comps = {}
        for j in range(k_max + 1):
            comps[f"psi{j}"] = 1.0
            comps[f"phi{j}"] = 0.0
        super().__init__(comps)
        self.k_max = k_max

    def sources(self, sim):
        out = {"psi0": None, "phi0": None}
        r = sim.grid.r
        for j in range(1, self.k_max + 1):
            Upsi = sim.U[f"psi{j - 1}"]
            Uphi = sim.U[f"phi{j - 1}"]
            out[f"psi{j}"] = -(Uphi * Upsi) / r
            g = Upsi * Upsi / r
            s = np.empty_like(g)
            _kernels.second_diff_odd(g, sim.inv_dr2, s)
            out[f"phi{j}"] = s
        return out


@dataclass
class PairView:
    """One iterate's (Psi, phi) pair, with equation-derived jets.

    Level j's sources come from level j-1's stored snapshots (level 0 free);
    diff views subtract both snapshots and sources of two adjacent levels.
    """

    grid: RadialGrid
    times: list[float]
    snaps: dict[str, list[tuple[np.ndarray, np.ndarray]]]
    sources: dict[str, list[tuple[np.ndarray, np.ndarray]]]
    m2: dict[str, float] = field(default_factory=lambda: {"psi": 1.0, "phi": 0.0})

    def snapshot_index(self, t: float) -> int:
        return int(np.argmin(np.abs(np.asarray(self.times) - t)))

    def component_jet(self, name: str, k: int, order: int = 3) -> RadialJet:
        w, wt = self.snaps[name][k]
        src, src_t = self.sources[name][k] if self.sources[name] is not None else (None, None)
        return RadialJet.from_snapshot(
            self.grid, self.times[k], w, wt, self.m2[name], src, src_t, order
        )


def _lap(arr, grid):
    d = w_radial_derivatives(arr, grid, 2)
    return d[2] + 2.0 * d[1] / grid.r


def _level_sources(traj: Trajectory, j: int):
    """(f, f_t) per snapshot for both members of tower level j."""
    if j == 0:
        n = len(traj.times)
        return {"psi": [(None, None)] * n, "phi": [(None, None)] * n}
    psi_src, phi_src = [], []
    for k in range(len(traj.times)):
        pw, pwt = traj.snaps[f"psi{j - 1}"][k]
        fw, fwt = traj.snaps[f"phi{j - 1}"][k]
        psi_src.append((-fw * pw, -(fwt * pw + fw * pwt)))
        phi_src.append((_lap(pw * pw, traj.grid), _lap(2.0 * pw * pwt, traj.grid)))
    return {"psi": psi_src, "phi": phi_src}


def tower_pair(traj: Trajectory, j: int) -> PairView:
    src = _level_sources(traj, j)
    return PairView(
        grid=traj.grid,
        times=list(traj.times),
        snaps={"psi": traj.snaps[f"psi{j}"], "phi": traj.snaps[f"phi{j}"]},
        sources={"psi": src["psi"], "phi": src["phi"]},
    )


def tower_diff(traj: Trajectory, j: int) -> PairView:
    """Difference view (iterate j+1) - (iterate j), snapshots and sources."""
    hi, lo = tower_pair(traj, j + 1), tower_pair(traj, j)
    snaps = {}
    sources = {}
    for name in ("psi", "phi"):
        snaps[name] = [
            (wa - wb, wta - wtb)
            for (wa, wta), (wb, wtb) in zip(hi.snaps[name], lo.snaps[name])
        ]
        rows = []
        for (fa, fat), (fb, fbt) in zip(hi.sources[name], lo.sources[name]):
            if fa is None and fb is None:
                rows.append((None, None))
            else:
                za = np.zeros(traj.grid.nr)
                rows.append(
                    ((fa if fa is not None else za) - (fb if fb is not None else za),
                     (fat if fat is not None else za) - (fbt if fbt is not None else za))
                )
        sources[name] = rows
    return PairView(grid=traj.grid, times=list(traj.times), snaps=snaps, sources=sources)


# ---------------------------------------------------------------------------
# the X-norm
# ---------------------------------------------------------------------------


@dataclass
class XNormReport:
    K: int
    delta: float
    tier_energy: float
    tier_sup_psi_weak: float  # <t+r>^(3/2-delta), |I| <= K-1
    tier_sup_psi: float  # <t+r>^(3/2),      |I| <= K-2 (floor 0)
    tier_sup_phi: float  # <t+r><t-r>^(1/2), |I| <= K-2 (floor 0)

    @property
    def total(self) -> float:
        return self.tier_energy + self.tier_sup_psi_weak + self.tier_sup_psi + self.tier_sup_phi


def x_norm(pair: PairView, K: int = 1, delta: float = 0.05,
           spec: GhostWeightSpec | None = None) -> XNormReport:
    """Truncated X-norm of one (Psi, phi) pair over its snapshot times."""
    if K > 2:
        raise ValueError("the truncated X-norm supports K <= 2")
    spec = spec or GhostWeightSpec(delta)
    g = pair.grid
    times = np.asarray(pair.times)

    ghost = gamma_ghost_energy_series(pair, "psi", K, spec)
    energy_tier = 0.0
    # sup over sampled t of sum_{|I|<=K} (E_gst^(1/2) + ||Gamma^I phi||)
    phi_norms: dict[tuple, np.ndarray] = {}
    for k in range(len(times)):
        jet = pair.component_jet("phi", k)
        for idx, f in gamma_fields(jet, K).items():
            phi_norms.setdefault(idx, np.zeros(len(times)))[k] = f.l2(g)
    per_t = np.zeros(len(times))
    for idx, ledger in ghost.items():
        per_t += np.sqrt(ledger["ghost_total"]) + phi_norms[idx]
    energy_tier = float(np.max(per_t))

    def sup_tier(component: str, tier: int, kind: str) -> float:
        best = 0.0
        for k, t in enumerate(times):
            jet = pair.component_jet(component, k, order=max(tier + 1, 2))
            wgt = WEIGHT_KINDS[kind](t, g.r, delta)
            table = gamma_sup_table(jet, tier, weight=wgt)
            best = max(best, max(table.values()))
        return best

    k1 = max(K - 1, 0)
    k2 = max(K - 2, 0)
    return XNormReport(
        K=K,
        delta=delta,
        tier_energy=energy_tier,
        tier_sup_psi_weak=sup_tier("psi", k1, "<t+r>^(1.5-delta)"),
        tier_sup_psi=sup_tier("psi", k2, "<t+r>^1.5"),
        tier_sup_phi=sup_tier("phi", k2, "<t+r><t-r>^0.5"),
    )


# ---------------------------------------------------------------------------
# the solution map as a standalone operation
# ---------------------------------------------------------------------------


class _StoredSourceSystem(_System):
    """Linear (Psi~, phi~) solve with sources read from stride-1 trajectories."""

    name = "solution_map"

    def __init__(self, psi_steps, phi_steps, grid):
        super().__init__({"psi": 1.0, "phi": 0.0})
        self.psi_steps = psi_steps
        self.phi_steps = phi_steps
        self.grid = grid

    def sources(self, sim):
        n = min(sim.n, len(self.psi_steps) - 1)
        Upsi = self.psi_steps[n]
        Uphi = self.phi_steps[n]
        r = self.grid.r
        s_psi = -(Uphi * Upsi) / r
        g = Upsi * Upsi / r
        s_phi = np.empty_like(g)
        _kernels.second_diff_odd(g, sim.inv_dr2, s_phi)
        return {"psi": s_psi, "phi": s_phi}


def solution_map(psi_traj: Trajectory, phi_traj: Trajectory, data, config: SolverConfig):
    """Apply T to a pair given as stride-1 trajectories (every step stored).

    Sources are taken from the stored steps directly; inputs must share the
    grid and step sequence of `config`.
    """
    if psi_traj.grid.nr != config.grid.nr or phi_traj.grid.nr != config.grid.nr:
        raise ValueError("input trajectories do not share the configured grid")
    n_levels = config.n_steps + 1
    for traj, tag in ((psi_traj, "Psi"), (phi_traj, "phi")):
        if len(traj.times) < n_levels:
            raise ValueError(f"{tag} trajectory must store every step (stride 1)")
    name_psi = psi_traj.components[0]
    name_phi = phi_traj.components[0]
    r = config.grid.r
    psi_steps = [r * w for (w, _) in psi_traj.snaps[name_psi]]
    phi_steps = [r * w for (w, _) in phi_traj.snaps[name_phi]]
    system = _StoredSourceSystem(psi_steps, phi_steps, config.grid)
    out = evolve(config, system, {"psi": data["e"], "phi": data["n"]}, meta={"op": "T"})
    return out


# ---------------------------------------------------------------------------
# iteration and contraction measurement
# ---------------------------------------------------------------------------


@dataclass
class PicardRun:
    eps: float
    eps_label: float
    K: int
    delta: float
    k_max: int
    distances: list[float]
    ratios: list[float]
    reports: list[XNormReport]
    contraction: bool
    diverged: bool
    trajectory: Trajectory | None

    @property
    def worst_ratio(self) -> float:
        return max(self.ratios) if self.ratios else math.nan


# Ratios are only meaningful while distances sit above the measurement noise
# floor.  The X-norm's floor is set by stencil rounding in the equation-derived
# third derivatives, amplified by the <t+r>^(3/2) sup weights: ~1e-10 x scale
# at desk resolutions (the nominal 1e-14 is unreachable).
DISTANCE_FLOOR = 1e-10


def picard_iterate(
    spec: InitialDataSpec,
    config: SolverConfig,
    k_max: int = 6,
    K: int = 1,
    delta: float = 0.05,
    keep_trajectory: bool = True,
) -> PicardRun:
    """Iterate T from the free seed; measure X-norm distances and ratios."""
    if k_max < 3:
        raise ValueError("k_max must be >= 3 to measure at least two ratios")
    data = make_initial_state(spec, config.grid)
    eps_label = smallness_norm(spec, config.grid) if spec.eps > 0 else 0.0
    tower_data = {}
    for j in range(k_max + 1):
        tower_data[f"psi{j}"] = data["e"]
        tower_data[f"phi{j}"] = data["n"]
    gw = GhostWeightSpec(delta)
    try:
        traj = evolve(config, TowerSystem(k_max), tower_data, meta={"eps": spec.eps})
    except DivergenceError:
        return PicardRun(
            eps=spec.eps, eps_label=eps_label, K=K, delta=delta, k_max=k_max,
            distances=[], ratios=[], reports=[], contraction=False, diverged=True,
            trajectory=None,
        )
    if spec.eps == 0.0:
        return PicardRun(
            eps=0.0, eps_label=0.0, K=K, delta=delta, k_max=k_max,
            distances=[0.0], ratios=[], reports=[], contraction=True, diverged=False,
            trajectory=traj if keep_trajectory else None,
        )
    distances = []
    reports = []
    scale = x_norm(tower_pair(traj, 1), K, delta, gw).total
    for j in range(k_max):
        rep = x_norm(tower_diff(traj, j), K, delta, gw)
        reports.append(rep)
        distances.append(rep.total)
    ratios = []
    floor = DISTANCE_FLOOR * max(scale, 1.0)
    for j in range(len(distances) - 1):
        # both ends must clear the floor: a noise-level numerator would
        # otherwise report an inflated ratio
        if distances[j] > floor and distances[j + 1] > floor:
            ratios.append(distances[j + 1] / distances[j])
    contraction = bool(ratios) and all(r <= 0.5 for r in ratios)
    return PicardRun(
        eps=spec.eps, eps_label=eps_label, K=K, delta=delta, k_max=k_max,
        distances=distances, ratios=ratios, reports=reports,
        contraction=contraction, diverged=False,
        trajectory=traj if keep_trajectory else None,
    )


def picard_limit_vs_direct(run: PicardRun, spec: InitialDataSpec, config: SolverConfig):
    """Sup-norm gap between the last iterate and the direct nonlinear solve."""
    data = make_initial_state(spec, config.grid)
    direct = solve_kgz(config, data)
    traj = run.trajectory
    k = len(traj.times) - 1
    gap = 0.0
    for a, b in (("e", f"psi{run.k_max}"), ("n", f"phi{run.k_max}")):
        gap = max(gap, float(np.max(np.abs(direct.snaps[a][k][0] - traj.snaps[b][k][0]))))
    return gap


def contraction_scaling(
    eps_list,
    config: SolverConfig,
    spec_template: InitialDataSpec,
    k_max: int = 5,
    K: int = 1,
    delta: float = 0.05,
):
    """Worst contraction ratio per eps, plus the log-log slope of rho(eps)."""
    eps_list = sorted(eps_list)
    if len(eps_list) < 4:
        raise ValueError("need at least 4 eps values")
    rows = []
    for eps in eps_list:
        spec = InitialDataSpec(
            family=spec_template.family, eps=eps, sigma=spec_template.sigma,
            center=spec_template.center, amps=spec_template.amps,
        )
        run = picard_iterate(spec, config, k_max=k_max, K=K, delta=delta, keep_trajectory=False)
        rows.append({"eps": eps, "run": run, "rho": run.worst_ratio})
    xs = [math.log(r["eps"]) for r in rows if np.isfinite(r["rho"]) and r["rho"] > 0]
    ys = [math.log(r["rho"]) for r in rows if np.isfinite(r["rho"]) and r["rho"] > 0]
    slope = math.nan
    if len(xs) >= 2:
        A = np.vstack([np.ones(len(xs)), xs]).T
        coef, *_ = np.linalg.lstsq(A, np.array(ys), rcond=None)
        slope = float(coef[1])
    return rows, slope


def contraction_threshold(
    config: SolverConfig,
    spec_template: InitialDataSpec,
    lo: float = 0.005,
    hi: float = 2.0,
    iters: int = 8,
    k_max: int = 4,
    K: int = 1,
) -> float:
    """Largest eps with all ratios <= 1/2, located by bisection (reported eps0)."""

    def contracts(eps: float) -> bool:
        spec = InitialDataSpec(
            family=spec_template.family, eps=eps, sigma=spec_template.sigma,
            center=spec_template.center, amps=spec_template.amps,
        )
        run = picard_iterate(spec, config, k_max=k_max, K=K, keep_trajectory=False)
        return run.contraction

    if not contracts(lo):
        return math.nan
    if contracts(hi):
        return hi
    for _ in range(iters):
        mid = math.sqrt(lo * hi)
        if contracts(mid):
            lo = mid
        else:
            hi = mid
    return lo