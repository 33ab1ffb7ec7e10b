"""Exact order-3 spacetime jets and the vector-field algebra on them.

A Jet carries the value and all partial derivatives of a smooth scalar field
up to total order 3 with respect to (t, x1, x2, x3), stored as truncated
Taylor coefficients a_alpha = d^alpha f / alpha!.  Analytic test families are
evaluated by truncated-series composition, so every derivative is exact to
machine rounding.  Vector fields (translations, Lorentz boosts, rotations,
scaling, good derivatives, semi-hyperboloidal frame) act by the chain rule
with their coefficient functions (t, x_a, x_a/r, x_a/t) expanded as exact
jets; each application lowers the order by one.

This is the substrate for verifying the algebraic identities used throughout
the estimates: the scaling identities that trade (t^2 - r^2) factors for
boosts and rotations, both null-form decompositions (good-derivative frame
and semi-hyperboloidal frame), the wave-operator commutators, and the three
equivalent hyperboloidal energy densities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import product as iproduct

import numpy as np

# ---------------------------------------------------------------------------
# truncated Taylor arithmetic in (t, x1, x2, x3) up to total order 3
# ---------------------------------------------------------------------------

MAX_ORDER = 3

#: all multi-indices (i0, i1, i2, i3) with |i| <= 3, sorted by total order
IDX: list[tuple[int, int, int, int]] = sorted(
    (i for i in iproduct(range(4), repeat=4) if sum(i) <= MAX_ORDER),
    key=lambda m: (sum(m), m),
)
POS = {m: k for k, m in enumerate(IDX)}
N_COEFF = len(IDX)  # 35
COUNT = [sum(1 for m in IDX if sum(m) <= k) for k in range(MAX_ORDER + 1)]  # [1, 5, 15, 35]

_mi, _mj, _mk = [], [], []
for i, a in enumerate(IDX):
    for j, b in enumerate(IDX):
        s = tuple(x + y for x, y in zip(a, b))
        if sum(s) <= MAX_ORDER:
            _mi.append(i)
            _mj.append(j)
            _mk.append(POS[s])
MUL_I = np.array(_mi)
MUL_J = np.array(_mj)
MUL_K = np.array(_mk)

#: partial-derivative index maps: DER[mu] = (src, dst, factor) arrays
DER = []
for mu in range(4):
    src, dst, fac = [], [], []
    for k, m in enumerate(IDX):
        up = list(m)
        up[mu] += 1
        upt = tuple(up)
        if sum(upt) <= MAX_ORDER:
            src.append(POS[upt])
            dst.append(k)
            fac.append(up[mu])
    DER.append((np.array(src), np.array(dst), np.array(fac, dtype=float)))

FACTORIALS = np.array([math.prod(math.factorial(e) for e in m) for m in IDX])


def _mul(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    out = np.zeros(N_COEFF)
    np.add.at(out, MUL_K, a[MUL_I] * b[MUL_J])
    out[COUNT[order] :] = 0.0
    return out


class Jet:
    """Scalar-field jet: truncated Taylor coefficients plus the valid order."""

    __slots__ = ("c", "order")

    def __init__(self, c: np.ndarray, order: int):
        self.c = c
        self.order = order

    # -- constructors ------------------------------------------------------

    @staticmethod
    def const(v: float, order: int = MAX_ORDER) -> "Jet":
        c = np.zeros(N_COEFF)
        c[0] = v
        return Jet(c, order)

    @staticmethod
    def coordinate(mu: int, value: float, order: int = MAX_ORDER) -> "Jet":
        c = np.zeros(N_COEFF)
        c[0] = value
        e = [0, 0, 0, 0]
        e[mu] = 1
        if order >= 1:
            c[POS[tuple(e)]] = 1.0
        return Jet(c, order)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.c + other.c, min(self.order, other.order))
        return Jet(self.c + Jet.const(float(other)).c, self.order)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Jet(-self.c, self.order)

    def __mul__(self, other):
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            return Jet(_mul(self.c, other.c, order), order)
        return Jet(self.c * float(other), self.order)

    __rmul__ = __mul__

    def compose(self, gderivs: list[float]) -> "Jet":
        """g(f) for outer g with derivatives [g(f0), g'(f0), ...] at f0 = value."""
        p = self.c.copy()
        p[0] = 0.0
        out = np.zeros(N_COEFF)
        out[0] = gderivs[min(len(gderivs) - 1, self.order)] / math.factorial(
            min(len(gderivs) - 1, self.order)
        )
        for k in range(min(len(gderivs) - 1, self.order) - 1, -1, -1):
            out = _mul(out, p, self.order)
            out[0] += gderivs[k] / math.factorial(k)
        return Jet(out, self.order)

    def exp(self) -> "Jet":
        e = math.exp(self.c[0])
        return self.compose([e] * (self.order + 1))

    def sin(self) -> "Jet":
        s, c = math.sin(self.c[0]), math.cos(self.c[0])
        return self.compose([s, c, -s, -c][: self.order + 1])

    def cos(self) -> "Jet":
        s, c = math.sin(self.c[0]), math.cos(self.c[0])
        return self.compose([c, -s, -c, s][: self.order + 1])

    def powf(self, a: float) -> "Jet":
        v = self.c[0]
        g = [v**a]
        fac = a
        for k in range(1, self.order + 1):
            g.append(fac * v ** (a - k))
            fac *= a - k
        return self.compose(g)

    # -- jet calculus ------------------------------------------------------

    def truncated(self, order: int) -> "Jet":
        c = self.c.copy()
        c[COUNT[order] :] = 0.0
        return Jet(c, order)

    def partial(self, mu: int) -> "Jet":
        if self.order < 1:
            raise ArityError("cannot differentiate an order-0 jet")
        src, dst, fac = DER[mu]
        c = np.zeros(N_COEFF)
        c[dst] = self.c[src] * fac
        return Jet(c, self.order - 1)

    @property
    def value(self) -> float:
        return float(self.c[0])

    def d(self, m: tuple[int, int, int, int]) -> float:
        """Partial derivative for a multi-index (it0, ix1, ix2, ix3)."""
        if sum(m) > self.order:
            raise ArityError(f"derivative {m} exceeds jet order {self.order}")
        k = POS[m]
        return float(self.c[k] * FACTORIALS[k])

    def scale(self) -> float:
        """Largest derivative magnitude; the natural residual normalizer."""
        return float(np.max(np.abs(self.c * FACTORIALS)))


class ArityError(ValueError):
    """Jet order too low for the requested operation."""


class DomainError(ValueError):
    """Point outside the operation's domain (r = 0, t = 0, or outside the cone)."""


# ---------------------------------------------------------------------------
# points and coefficient jets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpacetimePoint:
    t: float
    x1: float
    x2: float
    x3: float

    @property
    def r(self) -> float:
        return math.sqrt(self.x1**2 + self.x2**2 + self.x3**2)

    @property
    def x(self) -> tuple[float, float, float]:
        return (self.x1, self.x2, self.x3)

    def in_cone(self) -> bool:
        """Membership in K = {t >= 2, t >= r + 1}."""
        return self.t >= 2.0 and self.t >= self.r + 1.0


def _coord_jets(p: SpacetimePoint, order: int):
    t = Jet.coordinate(0, p.t, order)
    xs = [Jet.coordinate(a + 1, p.x[a], order) for a in range(3)]
    return t, xs


def radius_jet(p: SpacetimePoint, order: int) -> Jet:
    _, xs = _coord_jets(p, order)
    s = xs[0] * xs[0] + xs[1] * xs[1] + xs[2] * xs[2]
    return s.powf(0.5)


# ---------------------------------------------------------------------------
# vector fields
# ---------------------------------------------------------------------------


class VectorFieldKind(Enum):
    """The fields Gamma plus the good and semi-hyperboloidal derivatives."""

    D_T = "d_t"
    D_1 = "d_1"
    D_2 = "d_2"
    D_3 = "d_3"
    L_1 = "L_1"
    L_2 = "L_2"
    L_3 = "L_3"
    OMEGA_12 = "omega_12"
    OMEGA_13 = "omega_13"
    OMEGA_23 = "omega_23"
    L_0 = "L_0"
    G_1 = "G_1"
    G_2 = "G_2"
    G_3 = "G_3"
    UNDER_D_1 = "under_d_1"
    UNDER_D_2 = "under_d_2"
    UNDER_D_3 = "under_d_3"


_TRANSLATIONS = (VectorFieldKind.D_T, VectorFieldKind.D_1, VectorFieldKind.D_2, VectorFieldKind.D_3)
_BOOSTS = (VectorFieldKind.L_1, VectorFieldKind.L_2, VectorFieldKind.L_3)
_ROTATIONS = (VectorFieldKind.OMEGA_12, VectorFieldKind.OMEGA_13, VectorFieldKind.OMEGA_23)
_GOOD = (VectorFieldKind.G_1, VectorFieldKind.G_2, VectorFieldKind.G_3)
_UNDER = (VectorFieldKind.UNDER_D_1, VectorFieldKind.UNDER_D_2, VectorFieldKind.UNDER_D_3)

#: the commuting set V = {d_alpha, L_a, Omega_ab}
GAMMA_SET = _TRANSLATIONS + _BOOSTS + _ROTATIONS


def apply_vf(kind: VectorFieldKind, jet: Jet, p: SpacetimePoint) -> Jet:
    """Apply one vector field to a jet at p; the result has order - 1."""
    if jet.order < 1:
        raise ArityError(f"{kind.value} needs an order >= 1 jet")
    order = jet.order - 1
    if kind in _TRANSLATIONS:
        return jet.partial(_TRANSLATIONS.index(kind))
    t, xs = _coord_jets(p, order)
    if kind in _BOOSTS:
        a = _BOOSTS.index(kind)
        return xs[a] * jet.partial(0) + t * jet.partial(a + 1)
    if kind in _ROTATIONS:
        a, b = {"omega_12": (0, 1), "omega_13": (0, 2), "omega_23": (1, 2)}[kind.value]
        return xs[a] * jet.partial(b + 1) - xs[b] * jet.partial(a + 1)
    if kind is VectorFieldKind.L_0:
        out = t * jet.partial(0)
        for a in range(3):
            out = out + xs[a] * jet.partial(a + 1)
        return out
    if kind in _GOOD:
        if p.r <= 0.0:
            raise DomainError("good derivatives are singular at r = 0")
        a = _GOOD.index(kind)
        inv_r = radius_jet(p, order).powf(-1.0)
        return (xs[a] * inv_r) * jet.partial(0) + jet.partial(a + 1)
    if kind in _UNDER:
        if p.t <= 0.0:
            raise DomainError("semi-hyperboloidal derivatives are singular at t = 0")
        a = _UNDER.index(kind)
        inv_t = t.powf(-1.0)
        return (xs[a] * inv_t) * jet.partial(0) + jet.partial(a + 1)
    raise ValueError(f"unknown vector field {kind}")


def dalembertian(jet: Jet) -> Jet:
    """Box w = -d_t d_t w + Delta w, as an order-(k-2) jet."""
    if jet.order < 2:
        raise ArityError("dalembertian needs an order >= 2 jet")
    out = -jet.partial(0).partial(0)
    for a in range(1, 4):
        out = out + jet.partial(a).partial(a)
    return out


# ---------------------------------------------------------------------------
# analytic families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalyticFamily:
    """Closed-form test fields with exact order-3 jets.

    tags: gaussian-packet    A exp(-sum ((y_mu - c_mu)/s_mu)^2) over spacetime
          poly-gaussian      (A + sum b_mu y_mu + q * t * x1) * gaussian
          plane-modulated    A cos(w t - k.x + phase) * space gaussian
    """

    tag: str
    amplitude: float
    centers: tuple[float, float, float, float]
    widths: tuple[float, float, float, float]
    freqs: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    poly: tuple[float, float, float, float, float] = (0.0, 0.0, 0.0, 0.0, 0.0)
    phase: float = 0.0

    def jet(self, p: SpacetimePoint, order: int = MAX_ORDER) -> Jet:
        t, xs = _coord_jets(p, order)
        ys = [t, *xs]
        if self.tag == "gaussian-packet":
            return self.amplitude * _gauss(ys, self.centers, self.widths)
        if self.tag == "poly-gaussian":
            lin = Jet.const(self.amplitude, order)
            for mu in range(4):
                lin = lin + self.poly[mu] * ys[mu]
            lin = lin + self.poly[4] * (t * xs[0])
            return lin * _gauss(ys, self.centers, self.widths)
        if self.tag == "plane-modulated":
            phase_jet = Jet.const(self.phase, order) + self.freqs[0] * t
            for a in range(3):
                phase_jet = phase_jet - self.freqs[a + 1] * xs[a]
            space = _gauss(ys[1:], self.centers[1:], self.widths[1:])
            return self.amplitude * phase_jet.cos() * space
        raise ValueError(f"unknown family tag {self.tag!r}")


def _gauss(ys, centers, widths) -> Jet:
    arg = Jet.const(0.0, ys[0].order)
    for y, c, s in zip(ys, centers, widths):
        u = (y - c) * (1.0 / s)
        arg = arg - u * u
    return arg.exp()


#: documented sampling ranges: t in [2, 50]; cone samples keep r in [0.1, t - 1.05];
#: packet centers sit within one width of the sample point so derivatives stay O(1)
def random_family(rng: np.random.Generator, p: SpacetimePoint | None = None) -> AnalyticFamily:
    tag = rng.choice(["gaussian-packet", "poly-gaussian", "plane-modulated"])
    widths = rng.uniform(2.0, 6.0, size=4)
    base = np.array([p.t, *p.x]) if p is not None else np.zeros(4)
    centers = base + rng.uniform(-1.0, 1.0, size=4) * widths
    return AnalyticFamily(
        tag=str(tag),
        amplitude=float(rng.uniform(0.5, 2.0)),
        centers=tuple(centers),
        widths=tuple(widths),
        freqs=tuple(rng.uniform(0.3, 1.5, size=4)),
        poly=tuple(rng.uniform(-1.0, 1.0, size=5)),
        phase=float(rng.uniform(0.0, 2.0 * math.pi)),
    )


def random_point(rng: np.random.Generator, cone: bool = False) -> SpacetimePoint:
    t = float(rng.uniform(2.0, 50.0))
    if cone:
        r = float(rng.uniform(0.1, t - 1.05))
    else:
        r = float(rng.uniform(0.1, 20.0))
    u = rng.normal(size=3)
    u /= np.linalg.norm(u)
    return SpacetimePoint(t, *(r * u))


def radial_family(rng: np.random.Generator, p: SpacetimePoint | None = None) -> AnalyticFamily:
    """Spherically symmetric member: origin-centered gaussian, equal space widths."""
    w = float(rng.uniform(2.0, 6.0))
    tw = float(rng.uniform(2.0, 6.0))
    tc = float(rng.uniform(-1.0, 1.0)) * tw + (p.t if p is not None else 0.0)
    # the space width tracks |x| of the sample point so values stay O(1)
    if p is not None:
        w = max(w, p.r / 2.0)
    return AnalyticFamily(
        tag="gaussian-packet",
        amplitude=float(rng.uniform(0.5, 2.0)),
        centers=(tc, 0.0, 0.0, 0.0),
        widths=(tw, w, w, w),
    )


# ---------------------------------------------------------------------------
# identity residuals
# ---------------------------------------------------------------------------


def scaling_identity_residual(jet: Jet, p: SpacetimePoint):
    """Residuals of (t^2 - r^2) d_t w = t L_0 w - x^a L_a w and its spatial twins."""
    if jet.order < 1:
        raise ArityError("scaling identities need an order >= 1 jet")
    t, r2 = p.t, p.r**2
    factor = t * t - r2
    dtw = jet.d((1, 0, 0, 0))
    l0 = apply_vf(VectorFieldKind.L_0, jet, p).value
    boosts = [apply_vf(k, jet, p).value for k in _BOOSTS]
    res_t = factor * dtw - (t * l0 - sum(p.x[a] * boosts[a] for a in range(3)))

    omegas = {
        (0, 1): apply_vf(VectorFieldKind.OMEGA_12, jet, p).value,
        (0, 2): apply_vf(VectorFieldKind.OMEGA_13, jet, p).value,
        (1, 2): apply_vf(VectorFieldKind.OMEGA_23, jet, p).value,
    }

    def omega(a, b):
        if a == b:
            return 0.0
        return omegas[(a, b)] if a < b else -omegas[(b, a)]

    res_a = []
    for a in range(3):
        e = [0, 0, 0, 0]
        e[a + 1] = 1
        daw = jet.d(tuple(e))
        rot = sum(p.x[b] * omega(a, b) for b in range(3))
        res_a.append(factor * daw - (t * boosts[a] - p.x[a] * l0 + rot))
    return res_t, res_a


def null_form_flat_residual(jet_u: Jet, jet_v: Jet, p: SpacetimePoint) -> dict[str, float]:
    """Residuals of the good-derivative expansions of the null forms.

    main:      d_alpha u d^alpha v = G_a u G^a v - G_a u (x^a/r) d_t v
                                     - (x_a/r) d_t u G^a v
    antisym_t: d_t u d_a v - d_t v d_a u = d_t u G_a v - d_t v G_a u
    antisym_s: d_a u d_b v - d_a v d_b u expanded through G_a, G_b
    """
    if p.r <= 0.0:
        raise DomainError("null-form expansion needs r > 0")
    du = [jet_u.d(m) for m in ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))]
    dv = [jet_v.d(m) for m in ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))]
    gu = [apply_vf(k, jet_u, p).value for k in _GOOD]
    gv = [apply_vf(k, jet_v, p).value for k in _GOOD]
    xh = [p.x[a] / p.r for a in range(3)]

    lhs = -du[0] * dv[0] + sum(du[a + 1] * dv[a + 1] for a in range(3))
    rhs = sum(gu[a] * gv[a] - gu[a] * xh[a] * dv[0] - xh[a] * du[0] * gv[a] for a in range(3))
    out = {"main": lhs - rhs}

    for a in range(3):
        lhs_t = du[0] * dv[a + 1] - dv[0] * du[a + 1]
        out[f"antisym_t{a + 1}"] = lhs_t - (du[0] * gv[a] - dv[0] * gu[a])
    for a in range(3):
        for b in range(3):
            if a == b:
                continue
            lhs_s = du[a + 1] * dv[b + 1] - dv[a + 1] * du[b + 1]
            rhs_s = (
                gu[a] * gv[b]
                - gu[a] * xh[b] * dv[0]
                - xh[a] * du[0] * gv[b]
                - gv[a] * gu[b]
                + gv[a] * xh[b] * du[0]
                + xh[a] * dv[0] * gu[b]
            )
            out[f"antisym_s{a + 1}{b + 1}"] = lhs_s - rhs_s
    return out


def null_form_hyperboloidal(jet_u: Jet, jet_v: Jet, p: SpacetimePoint):
    """lhs = d_alpha u d^alpha v and the exact semi-hyperboloidal frame terms.

    The terms sum to lhs; the frame inequality then holds with constant 1
    because |x^a/t| <= 1 inside the cone.
    """
    if not p.t > p.r:
        raise DomainError("hyperboloidal frame needs t > r")
    s2 = p.t**2 - p.r**2
    du0 = jet_u.d((1, 0, 0, 0))
    dv0 = jet_v.d((1, 0, 0, 0))
    uu = [apply_vf(k, jet_u, p).value for k in _UNDER]
    uv = [apply_vf(k, jet_v, p).value for k in _UNDER]
    du = [jet_u.d(m) for m in ((0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))]
    dv = [jet_v.d(m) for m in ((0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))]

    lhs = -du0 * dv0 + sum(du[a] * dv[a] for a in range(3))
    term_tt = -(s2 / p.t**2) * du0 * dv0
    term_under = sum(uu[a] * uv[a] for a in range(3))
    term_cross = -sum((p.x[a] / p.t) * (du0 * uv[a] + uu[a] * dv0) for a in range(3))
    return lhs, (term_tt, term_under, term_cross)


_COMMUTING = set(_TRANSLATIONS) | set(_BOOSTS) | set(_ROTATIONS)


def commutator_residual(kind: VectorFieldKind, jet: Jet, p: SpacetimePoint) -> float:
    """Residual of Box(Gamma w) - Gamma(Box w), or of the scaling relation for L_0."""
    if jet.order != 3:
        raise ArityError("commutator check needs an order-3 jet")
    box = dalembertian(jet)
    if kind in _COMMUTING:
        lhs = dalembertian(apply_vf(kind, jet, p)).value
        rhs = apply_vf(kind, box, p).value
        return lhs - rhs
    if kind is VectorFieldKind.L_0:
        lhs = dalembertian(apply_vf(kind, jet, p)).value
        rhs = apply_vf(kind, box, p).value + 2.0 * box.value
        return lhs - rhs
    raise ValueError(f"commutator check undefined for {kind}")


def hyperboloidal_density_residuals(jet: Jet, p: SpacetimePoint, m: float):
    """Pairwise differences of the three hyperboloidal energy densities at p."""
    if not p.t > p.r:
        raise DomainError("hyperboloidal densities need t > r")
    t = p.t
    s2 = t * t - p.r**2
    dt = jet.d((1, 0, 0, 0))
    dx = [jet.d(m) for m in ((0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))]
    uu = [apply_vf(k, jet, p).value for k in _UNDER]
    perp = dt + sum(p.x[a] / t * dx[a] for a in range(3))
    omegas = [
        apply_vf(VectorFieldKind.OMEGA_12, jet, p).value,
        apply_vf(VectorFieldKind.OMEGA_13, jet, p).value,
        apply_vf(VectorFieldKind.OMEGA_23, jet, p).value,
    ]
    m2v2 = m * m * jet.value**2
    e1 = dt * dt + sum(d * d for d in dx) + 2.0 * sum(p.x[a] / t * dt * dx[a] for a in range(3))
    e2 = (s2 / t**2) * dt * dt + sum(u * u for u in uu)
    e3 = perp * perp + (s2 / t**2) * sum(d * d for d in dx) + sum(o * o for o in omegas) / t**2
    e1, e2, e3 = e1 + m2v2, e2 + m2v2, e3 + m2v2
    return e1 - e2, e1 - e3, max(abs(e1), abs(e2), abs(e3))


# ---------------------------------------------------------------------------
# the seeded identity suite
# ---------------------------------------------------------------------------


def identity_suite(seed: int = 1, samples: int = 1000, tol: float = 1e-10) -> list[dict]:
    """Run every pointwise identity on seeded random jets; one row per check.

    Residuals are normalized by the sampled jets' largest derivative magnitude
    squared (all identities are bilinear) or to first power where linear.
    """
    rng = np.random.default_rng(seed)
    acc: dict[str, float] = {}
    scales: dict[str, float] = {}

    def record(name, residual, scale):
        acc[name] = max(acc.get(name, 0.0), abs(residual))
        scales[name] = max(scales.get(name, 0.0), scale)

    for _ in range(samples):
        p = random_point(rng, cone=False)
        pc = random_point(rng, cone=True)
        ju, jv = random_family(rng, p).jet(p), random_family(rng, p).jet(p)
        juc, jvc = random_family(rng, pc).jet(pc), random_family(rng, pc).jet(pc)
        su, sv = ju.scale(), jv.scale()

        res_t, res_a = scaling_identity_residual(ju, p)
        scale_quad = su * max(1.0, p.t) ** 2
        record("scaling_t", res_t, scale_quad)
        record("scaling_a", max(abs(x) for x in res_a), scale_quad)

        nf = null_form_flat_residual(ju, jv, p)
        record("null_flat_main", nf["main"], su * sv)
        record(
            "null_flat_antisym",
            max(abs(v) for k, v in nf.items() if k.startswith("antisym")),
            su * sv,
        )

        lhs, terms = null_form_hyperboloidal(juc, jvc, pc)
        record("null_hyperboloidal", lhs - sum(terms), juc.scale() * jvc.scale())

        for kind, name in (
            (VectorFieldKind.D_T, "commutator_translation"),
            (VectorFieldKind.L_1, "commutator_boost"),
            (VectorFieldKind.OMEGA_12, "commutator_rotation"),
            (VectorFieldKind.L_0, "commutator_scaling"),
        ):
            record(name, commutator_residual(kind, ju, p), su * max(1.0, p.t))

        d12, d13, scale_e = hyperboloidal_density_residuals(juc, pc, m=1.0)
        record("hyperboloidal_density", max(abs(d12), abs(d13)), scale_e)

        # direction cosines and the radial good-derivative reduction
        fr = radial_family(rng, pc)
        jr = fr.jet(pc)
        g2 = sum(apply_vf(k, jr, pc).value ** 2 for k in _GOOD)
        wt = jr.d((1, 0, 0, 0))
        wr = sum(pc.x[a] / pc.r * jr.d(m) for a, m in enumerate(((0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))))
        record("good_derivative_radial", g2 - (wt + wr) ** 2, jr.scale() ** 2)
        record("rotation_annihilates_radial", apply_vf(VectorFieldKind.OMEGA_12, jr, pc).value, jr.scale())
        record("direction_cosines", sum((x / pc.r) ** 2 for x in pc.x) - 1.0, 1.0)

    rows = []
    for name in sorted(acc):
        scale = max(scales[name], 1e-300)
        rows.append(
            {
                "check_name": name,
                "samples": samples,
                "max_residual": acc[name],
                "scale": scale,
                "pass": acc[name] <= tol * scale,
            }
        )
    return rows
