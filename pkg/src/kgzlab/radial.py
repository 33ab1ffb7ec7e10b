"""Radial grids, norms, and initial data for fields on R^3.

Radial scalar fields w(t, r) stand in for full fields W(t, x) = w(t, |x|);
the fixed-polarization ansatz E = e(t, r) * ehat reduces the vector component
to a scalar as well.  All L^2 quantities over R^3 reduce to weighted radial
integrals, 4*pi * int r^2 (...) dr, evaluated by the composite midpoint rule
on a staggered grid r_i = (i + 1/2) * dr.  The staggering keeps 1/r finite
everywhere; the smooth even/odd structure through r = 0 is exploited by
running all stencils on the radius-scaled variable U = r * w, which is odd.

Sphere averages of angular monomials in x_a/r are exact rational constants
(AngularMomentTable); they turn L^2 norms of vector-field derivatives of
radial fields into radial integrals without any angular quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def jbracket(a):
    """Japanese bracket <a> = sqrt(1 + a^2)."""
    return np.sqrt(1.0 + np.square(a))


# ---------------------------------------------------------------------------
# grid and state
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadialGrid:
    """Staggered radial grid: nr nodes at r_i = (i + 1/2) * dr, outer radius R = nr*dr."""

    nr: int
    dr: float
    r: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.dr <= 0.0:
            raise ValueError(f"dr must be positive, got {self.dr}")
        if self.nr < 16:
            raise ValueError(f"nr must be >= 16, got {self.nr}")
        object.__setattr__(self, "r", (np.arange(self.nr) + 0.5) * self.dr)

    @property
    def R(self) -> float:
        return self.nr * self.dr


@dataclass
class RadialState:
    """One evolved radial component: amplitude and time-derivative samples at time t."""

    grid: RadialGrid
    t: float
    w: np.ndarray
    wt: np.ndarray

    def __post_init__(self):
        for name in ("w", "wt"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (self.grid.nr,):
                raise ValueError(f"{name} must have shape ({self.grid.nr},), got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite samples")
            setattr(self, name, arr)

    def scaled(self, c: float) -> "RadialState":
        return RadialState(self.grid, self.t, c * self.w, c * self.wt)


# ---------------------------------------------------------------------------
# U-space finite-difference stencils (4th order, odd-left / zero-right ghosts)
# ---------------------------------------------------------------------------


def _padded_odd(U: np.ndarray, gh: int) -> np.ndarray:
    """Extend U by gh ghost nodes: odd staggered mirror on the left, zeros on the right."""
    out = np.zeros(U.shape[0] + 2 * gh)
    out[gh:-gh] = U
    out[:gh] = -U[gh - 1 :: -1]
    return out


def u_derivative(U: np.ndarray, dr: float, order: int) -> np.ndarray:
    """4th-order centered derivative of the odd radius-scaled field U on the staggered grid."""
    if order == 0:
        return U.copy()
    if order == 1:
        p = _padded_odd(U, 2)
        return (p[:-4] - 8.0 * p[1:-3] + 8.0 * p[3:-1] - p[4:]) / (12.0 * dr)
    if order == 2:
        p = _padded_odd(U, 2)
        return (-p[:-4] + 16.0 * p[1:-3] - 30.0 * p[2:-2] + 16.0 * p[3:-1] - p[4:]) / (
            12.0 * dr * dr
        )
    if order == 3:
        p = _padded_odd(U, 3)
        return (
            p[:-6] - 8.0 * p[1:-5] + 13.0 * p[2:-4] - 13.0 * p[4:-2] + 8.0 * p[5:-1] - p[6:]
        ) / (8.0 * dr**3)
    raise ValueError(f"unsupported derivative order {order}")


def _padded_even(w: np.ndarray, gh: int) -> np.ndarray:
    """Extend w by gh ghost nodes: even staggered mirror on the left, zeros on the right."""
    out = np.zeros(w.shape[0] + 2 * gh)
    out[gh:-gh] = w
    out[:gh] = w[gh - 1 :: -1]
    return out


def w_radial_derivatives(w: np.ndarray, grid: RadialGrid, max_order: int) -> list[np.ndarray]:
    """[w, w_r, w_rr, ...] up to max_order, 4th-order stencils with even mirror at r = 0.

    Radial amplitudes of smooth fields are even through the axis, so the even
    staggered mirror keeps full accuracy at the first nodes (no 1/r blowup).
    """
    if max_order > 3:
        raise ValueError("radial derivatives supported up to order 3")
    dr = grid.dr
    out = [w.copy()]
    if max_order >= 1:
        p = _padded_even(w, 2)
        out.append((p[:-4] - 8.0 * p[1:-3] + 8.0 * p[3:-1] - p[4:]) / (12.0 * dr))
    if max_order >= 2:
        p = _padded_even(w, 2)
        out.append(
            (-p[:-4] + 16.0 * p[1:-3] - 30.0 * p[2:-2] + 16.0 * p[3:-1] - p[4:]) / (12.0 * dr * dr)
        )
    if max_order >= 3:
        p = _padded_even(w, 3)
        out.append(
            (p[:-6] - 8.0 * p[1:-5] + 13.0 * p[2:-4] - 13.0 * p[4:-2] + 8.0 * p[5:-1] - p[6:])
            / (8.0 * dr**3)
        )
    return out


# ---------------------------------------------------------------------------
# norms and weighted sups
# ---------------------------------------------------------------------------


def l2_norm(values: np.ndarray, grid: RadialGrid, weight: np.ndarray | None = None) -> float:
    """L^2(R^3) norm of a radial sample: sqrt(4 pi sum r^2 [weight] v^2 dr), midpoint rule."""
    v2 = np.square(values)
    if weight is not None:
        v2 = v2 * weight
    return math.sqrt(4.0 * math.pi * grid.dr * float(np.dot(grid.r**2, v2)))


#: weighted-sup weight kinds; each maps (t, r, delta) -> weight array
WEIGHT_KINDS = {
    "1": lambda t, r, d: np.ones_like(r),
    "<t+r>^1.5": lambda t, r, d: jbracket(t + r) ** 1.5,
    "<t+r>^(1.5-delta)": lambda t, r, d: jbracket(t + r) ** (1.5 - d),
    "<t+r><t-r>^0.5": lambda t, r, d: jbracket(t + r) * jbracket(t - r) ** 0.5,
    "<t+r>^0.5<t-r>": lambda t, r, d: jbracket(t + r) ** 0.5 * jbracket(t - r),
    "<r><t-r>^0.5": lambda t, r, d: jbracket(r) * jbracket(t - r) ** 0.5,
    "<r><t-r>": lambda t, r, d: jbracket(r) * jbracket(t - r),
}


def weighted_sup(
    values: np.ndarray, grid: RadialGrid, t: float, weight_kind: str, delta: float = 0.05
) -> float:
    """max_i weight(t, r_i) * |v_i| for one of the registered weight kinds."""
    try:
        wfun = WEIGHT_KINDS[weight_kind]
    except KeyError:
        raise ValueError(f"unknown weight kind {weight_kind!r}") from None
    return float(np.max(wfun(t, grid.r, delta) * np.abs(values)))


# ---------------------------------------------------------------------------
# exact sphere averages of angular monomials
# ---------------------------------------------------------------------------


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


class AngularMomentTable:
    """Unit-sphere surface averages of monomials in the direction cosines x_a/r.

    <prod_a (x_a/r)^{p_a}> = prod_a (p_a - 1)!! / (|p| + 1)!! when all p_a are
    even, 0 otherwise.  The low-order entries used throughout:
    <(x_a/r)^2> = 1/3, cross terms 0, <(x_a/r)^4> = 1/5,
    <(x_a/r)^2 (x_b/r)^2> = 1/15 for a != b.
    """

    SQUARE = 1.0 / 3.0
    CROSS = 0.0
    FOURTH = 1.0 / 5.0
    SQUARE_PAIR = 1.0 / 15.0

    _cache: dict[tuple[int, int, int], float] = {}

    @classmethod
    def moment(cls, p: tuple[int, int, int]) -> float:
        if any(e % 2 for e in p):
            return 0.0
        key = tuple(sorted(p))
        if key not in cls._cache:
            num = 1
            for e in key:
                num *= _double_factorial(e - 1)
            cls._cache[key] = num / _double_factorial(sum(key) + 1)
        return cls._cache[key]


# ---------------------------------------------------------------------------
# initial-data families
# ---------------------------------------------------------------------------


def _gaussian_derivatives(r: np.ndarray, sigma: float, center: float, order: int):
    """d^k/dr^k exp(-u^2), u = (r - center)/sigma, via the Hermite-style recursion."""
    u = (r - center) / sigma
    f = np.exp(-np.square(u))
    # polynomial P_k(u) with f^(k) = P_k(u) f;  P_{k+1} = (P_k' - 2 u P_k)/sigma
    polys = [np.polynomial.Polynomial([1.0])]
    for _ in range(order):
        pk = polys[-1]
        polys.append((pk.deriv() - np.polynomial.Polynomial([0.0, 2.0]) * pk) / sigma)
    return [p(u) * f for p in polys]


class _Series:
    """Truncated univariate Taylor series with array-valued coefficients.

    Used to differentiate the compact-bump profile exactly (its closed-form
    derivatives are unwieldy): build the series of the inner rational function
    node by node, then exponentiate.  coef[k] holds f^(k)/k! at each node.
    """

    def __init__(self, coef):
        self.coef = coef  # list of arrays

    @property
    def order(self):
        return len(self.coef) - 1

    def __mul__(self, other):
        n = self.order
        out = [np.zeros_like(self.coef[0]) for _ in range(n + 1)]
        for i, a in enumerate(self.coef):
            for j in range(n + 1 - i):
                out[i + j] += a * other.coef[j]
        return _Series(out)

    def reciprocal(self):
        n = self.order
        out = [1.0 / self.coef[0]]
        for k in range(1, n + 1):
            acc = np.zeros_like(self.coef[0])
            for j in range(1, k + 1):
                acc += self.coef[j] * out[k - j]
            out.append(-acc / self.coef[0])
        return _Series(out)

    def exp(self):
        n = self.order
        out = [np.exp(self.coef[0])]
        for k in range(1, n + 1):
            acc = np.zeros_like(self.coef[0])
            for j in range(1, k + 1):
                acc += j * self.coef[j] * out[k - j]
            out.append(acc / k)
        return _Series(out)

    def derivatives(self):
        return [c * math.factorial(k) for k, c in enumerate(self.coef)]


def _bump_derivatives(r: np.ndarray, sigma: float, center: float, order: int):
    """Derivatives of the C^inf bump exp(1 - 1/(1 - u^2)), supported on |u| < 1."""
    u = (r - center) / sigma
    inside = np.abs(u) < 1.0
    us = np.where(inside, u, 0.0)
    zero = np.zeros_like(us)
    du = [zero.copy() for _ in range(order + 1)]
    du[0] = us
    if order >= 1:
        du[1] = np.full_like(us, 1.0 / sigma)
    series_u = _Series(du)
    one = _Series([np.ones_like(us)] + [zero.copy() for _ in range(order)])
    inner = _Series([c.copy() for c in one.coef])
    u2 = series_u * series_u
    for k in range(order + 1):
        inner.coef[k] = one.coef[k] - u2.coef[k]  # 1 - u^2
    g = inner.reciprocal()
    for k in range(order + 1):
        g.coef[k] = (one.coef[k] if k == 0 else zero) - g.coef[k]  # 1 - 1/(1-u^2)
    vals = g.exp().derivatives()
    return [np.where(inside, v, 0.0) for v in vals]


_FAMILIES = {"gaussian": _gaussian_derivatives, "bump": _bump_derivatives}


@dataclass(frozen=True)
class InitialDataSpec:
    """Radial data profiles for the four components (E0, E1, n0, n1).

    Each datum is eps * amp * profile(r).  `bump` is identically zero for
    |r - center| >= sigma; the gaussian is trimmed to exact zero beyond
    8 sigma (a <= 2e-28 relative change) so runs have a true compact support
    for the causal outer boundary.
    """

    family: str = "gaussian"
    eps: float = 0.01
    sigma: float = 1.0
    center: float = 0.0
    amps: tuple[float, float, float, float] = (1.0, 0.0, 1.0, 0.0)
    trim_sigmas: float = 8.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown data family {self.family!r}")
        if self.eps < 0.0:
            raise ValueError("eps must be >= 0")
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")

    @property
    def support_radius(self) -> float:
        if self.family == "bump":
            return self.center + self.sigma
        return self.center + self.trim_sigmas * self.sigma

    def profile_derivatives(self, r: np.ndarray, order: int) -> list[np.ndarray]:
        derivs = _FAMILIES[self.family](r, self.sigma, self.center, order)
        if self.family == "gaussian":
            inside = r <= self.support_radius
            derivs = [np.where(inside, d, 0.0) for d in derivs]
        return derivs

    def sample(self, grid: RadialGrid) -> dict[str, np.ndarray]:
        prof = self.profile_derivatives(grid.r, 0)[0]
        names = ("E0", "E1", "n0", "n1")
        return {n: self.eps * a * prof for n, a in zip(names, self.amps)}


def make_initial_state(spec: InitialDataSpec, grid: RadialGrid, t0: float = 0.0):
    """Initial RadialStates for (e, n, n0, nD); the divergence part starts at zero."""
    if spec.sigma < 8.0 * grid.dr:
        raise ValueError(
            f"grid under-resolves the data: sigma={spec.sigma} needs >= 8 nodes, dr={grid.dr}"
        )
    d = spec.sample(grid)
    zero = np.zeros(grid.nr)
    return {
        "e": RadialState(grid, t0, d["E0"], d["E1"]),
        "n": RadialState(grid, t0, d["n0"], d["n1"]),
        "n0": RadialState(grid, t0, d["n0"].copy(), d["n1"].copy()),
        "nD": RadialState(grid, t0, zero.copy(), zero.copy()),
    }


def smallness_norm(spec: InitialDataSpec, grid: RadialGrid, n_trunc: int = 2) -> float:
    """Truncated data-size norm: weighted L^2 sums of radial derivatives of the data.

    sum_{k<=N+2} ||<r>^{k+1} d^k E0|| + sum_{k<=N+1} ||<r>^{k+2} d^k E1||
    + sum_{k<=N+1} ||<r>^k d^k n0|| + sum_{k<=N} ||<r>^{k+1} d^k n1||,
    with N = n_trunc and d^k the radial derivative (time derivatives of data
    are only defined through the equations and are not included).
    """
    if n_trunc > 2:
        raise ValueError("n_trunc is limited to 2")
    br = jbracket(grid.r)
    derivs = spec.profile_derivatives(grid.r, n_trunc + 2)
    amp_e0, amp_e1, amp_n0, amp_n1 = spec.amps
    total = 0.0
    for k in range(n_trunc + 3):
        total += l2_norm(spec.eps * amp_e0 * derivs[k], grid, br ** (2 * (k + 1)))
    for k in range(n_trunc + 2):
        total += l2_norm(spec.eps * amp_e1 * derivs[k], grid, br ** (2 * (k + 2)))
        total += l2_norm(spec.eps * amp_n0 * derivs[k], grid, br ** (2 * k))
    for k in range(n_trunc + 1):
        total += l2_norm(spec.eps * amp_n1 * derivs[k], grid, br ** (2 * (k + 1)))
    return total


# ---------------------------------------------------------------------------
# five-level derivative window
# ---------------------------------------------------------------------------


class DerivativeWindow:
    """Five consecutive time levels of one component's amplitude.

    Provides mixed (t, r) derivatives at the middle level: 2nd order in t
    (centered on the window), 4th order in r (U-space stencils).
    """

    def __init__(self, grid: RadialGrid, t_center: float, dt: float, levels):
        if len(levels) != 5:
            raise ValueError("a derivative window needs exactly 5 levels")
        self.grid = grid
        self.t = t_center
        self.dt = dt
        self.levels = [np.asarray(l, dtype=float) for l in levels]

    def time_derivative(self, k: int) -> np.ndarray:
        l = self.levels
        dt = self.dt
        if k == 0:
            return l[2].copy()
        if k == 1:
            return (l[3] - l[1]) / (2.0 * dt)
        if k == 2:
            return (l[3] - 2.0 * l[2] + l[1]) / dt**2
        if k == 3:
            return (l[4] - 2.0 * l[3] + 2.0 * l[1] - l[0]) / (2.0 * dt**3)
        raise ValueError(f"time derivative order {k} unsupported")

    def derivative(self, kt: int, kr: int) -> np.ndarray:
        """d_t^kt d_r^kr of the amplitude at the window center."""
        base = self.time_derivative(kt)
        if kr == 0:
            return base
        return w_radial_derivatives(base, self.grid, kr)[kr]
