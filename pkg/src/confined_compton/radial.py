"""Bound states of a hydrogen-like atom, free or inside an impenetrable sphere.

The regular solution of

    u'' = (l(l+1)/r^2 - 2Z/r - 2E) u,    u ~ r^(l+1) as r -> 0,

is built from a Frobenius series at the origin followed by Taylor
expansions restarted every step. Both are exact series of the same ODE, so
the same code path works for either sign of E (the Kummer-function form
only covers E < 0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import ContractError, DomainError, EvaluationError, SearchError, WrongRootError
from .specfun import assoc_laguerre, kummer_m, panel_nodes

_SERIES_EPS = 1e-17
_MAX_TERMS = 80
_ORBITAL_LETTERS = "spdfghiklmnoqrtuv"


@dataclass(frozen=True)
class StateSpec:
    """Nuclear charge, confinement radius (``math.inf`` when free) and quantum numbers."""

    Z: float
    rc: float
    n: int
    l: int

    def __post_init__(self):
        if not self.Z > 0:
            raise DomainError(f"Z must be positive, got {self.Z}")
        if not self.rc > 0:
            raise DomainError(f"rc must be positive or inf, got {self.rc}")
        if int(self.n) != self.n or int(self.l) != self.l:
            raise DomainError("n and l must be integers")
        if not (self.n >= 1 and 0 <= self.l < self.n):
            raise DomainError(f"need n >= 1 and 0 <= l < n, got n={self.n}, l={self.l}")

    @property
    def confined(self) -> bool:
        return math.isfinite(self.rc)

    @property
    def label(self) -> str:
        return f"{self.n}{_ORBITAL_LETTERS[self.l]}"

    @classmethod
    def free(cls, n: int, l: int, Z: float = 1.0) -> "StateSpec":
        return cls(Z=Z, rc=math.inf, n=n, l=l)

    def __str__(self):
        rc = "inf" if not self.confined else f"{self.rc:g}"
        return f"{self.label}(Z={self.Z:g}, rc={rc})"


# ---------------------------------------------------------------------------
# series machinery


def _frobenius_coeffs(E, Z, l, r_end):
    """Power-series coefficients (in r) of the regular solution, c_0 = 1."""
    c = [1.0]
    scale = r_end ** (l + 1)
    m = 1
    small = 0
    while True:
        prev2 = c[m - 2] if m >= 2 else 0.0
        cm = -(2.0 * Z * c[m - 1] + 2.0 * E * prev2) / (m * (m + 2 * l + 1))
        c.append(cm)
        if abs(cm) * r_end ** (m + l + 1) <= _SERIES_EPS * scale:
            small += 1
            if small >= 2:
                break
        else:
            small = 0
        m += 1
        if m > _MAX_TERMS:
            raise EvaluationError(f"Frobenius series failed to converge (E={E}, r={r_end})")
    return np.concatenate([np.zeros(l + 1), np.array(c)])


def _taylor_coeffs(E, Z, L, r0, u0, du0, h):
    """Taylor coefficients of u about r0 (r0 > 0), valid for |h| < r0."""
    c0 = L - 2.0 * Z * r0 - 2.0 * E * r0 * r0
    c1 = -2.0 * Z - 4.0 * E * r0
    c2 = -2.0 * E
    r02 = r0 * r0
    a = [u0, du0]
    scale = abs(u0) + abs(du0 * h) + 1e-300
    habs = abs(h)
    hk = habs
    small = 0
    k = 0
    while True:
        rhs = (c0 - k * (k - 1)) * a[k] - 2.0 * r0 * (k + 1) * k * a[k + 1]
        if k >= 1:
            rhs += c1 * a[k - 1]
        if k >= 2:
            rhs += c2 * a[k - 2]
        ak2 = rhs / (r02 * (k + 2) * (k + 1))
        a.append(ak2)
        hk *= habs
        if abs(ak2) * hk * habs <= _SERIES_EPS * scale:
            small += 1
            if small >= 2:
                break
        else:
            small = 0
        k += 1
        if k > _MAX_TERMS:
            raise EvaluationError(f"Taylor restart failed to converge (E={E}, r0={r0}, h={h})")
    return np.array(a)


def local_taylor(E: float, Z: float, l: int, r0: float, u0: float, du0: float, n_terms: int) -> np.ndarray:
    """First ``n_terms`` Taylor coefficients of u about r0 > 0 given u(r0), u'(r0)."""
    L = l * (l + 1)
    c0 = L - 2.0 * Z * r0 - 2.0 * E * r0 * r0
    c1 = -2.0 * Z - 4.0 * E * r0
    c2 = -2.0 * E
    a = [u0, du0]
    for k in range(n_terms - 2):
        rhs = (c0 - k * (k - 1)) * a[k] - 2.0 * r0 * (k + 1) * k * a[k + 1]
        if k >= 1:
            rhs += c1 * a[k - 1]
        if k >= 2:
            rhs += c2 * a[k - 2]
        a.append(rhs / (r0 * r0 * (k + 2) * (k + 1)))
    return np.array(a[:n_terms])


def frobenius_coefficients(E: float, Z: float, l: int, n_terms: int, c0: float = 1.0) -> np.ndarray:
    """c_m of u = r^(l+1) sum_m c_m r^m for m < n_terms."""
    c = [c0]
    for m in range(1, n_terms):
        prev2 = c[m - 2] if m >= 2 else 0.0
        c.append(-(2.0 * Z * c[m - 1] + 2.0 * E * prev2) / (m * (m + 2 * l + 1)))
    return np.array(c)


def _horner(coef, h):
    v = 0.0
    d = 0.0
    for c in coef[::-1]:
        d = d * h + v
        v = v * h + c
    return v, d


def _step_cap(E, Z):
    cap = min(0.5, 1.0 / Z)
    if E != 0.0:
        cap = min(cap, 0.1 / math.sqrt(2.0 * abs(E)))
    return cap


@dataclass
class _Piece:
    r0: float
    lo: float
    hi: float
    coef: np.ndarray


@dataclass
class _March:
    pieces: list
    ends: list          # u at every step boundary, in marching order
    u: float
    du: float


def _march_forward(E, Z, l, r_end):
    cap = _step_cap(E, Z)
    r1 = min(cap, r_end)
    coef = _frobenius_coeffs(E, Z, l, r1)
    u, du = _horner(coef, r1)
    pieces = [_Piece(0.0, 0.0, r1, coef)]
    ends = [u]
    r = r1
    L = l * (l + 1)
    while r < r_end * (1 - 1e-15):
        h = min(cap, 0.5 * r, r_end - r)
        coef = _taylor_coeffs(E, Z, L, r, u, du, h)
        u, du = _horner(coef, h)
        pieces.append(_Piece(r, r, r + h, coef))
        r = r + h
        ends.append(u)
    return _March(pieces, ends, u, du)


def _march_backward(E, Z, l, r_start, r_stop):
    """March from the wall (u=0, u'=-1) inward to r_stop."""
    cap = _step_cap(E, Z)
    L = l * (l + 1)
    r = r_start
    u, du = 0.0, -1.0
    pieces = []
    ends = []
    while r > r_stop * (1 + 1e-15):
        h = -min(cap, 0.5 * r, r - r_stop)
        coef = _taylor_coeffs(E, Z, L, r, u, du, h)
        u, du = _horner(coef, h)
        pieces.append(_Piece(r, r + h, r, coef))
        r = r + h
        ends.append(u)
    return _March(pieces, ends, u, du)


def _count_sign_changes(values) -> int:
    v = np.asarray(values, dtype=float)
    v = v[v != 0.0]
    if v.size < 2:
        return 0
    return int(np.count_nonzero(np.signbit(v[1:]) != np.signbit(v[:-1])))


def radial_series_eval(E: float, Z: float, l: int, r_target: float):
    """Regular solution u and u' at ``r_target``, normalized so u ~ r^(l+1) at the origin."""
    if not r_target > 0:
        raise DomainError("r_target must be positive")
    m = _march_forward(E, Z, l, r_target)
    return m.u, m.du


def _wall_residual(E, Z, l, rc):
    m = _march_forward(E, Z, l, rc)
    # zeros in (0, rc): steps are far shorter than a half-wave, so a sign
    # change between step ends (the wall value included) is exactly one node
    return m.u, _count_sign_changes(m.ends)


def solve_energy(spec: StateSpec, tol: float = 1e-11, e_ceiling: float | None = None) -> float:
    """Energy of the confined state: the (n-l)-th zero of E -> u_E(rc).

    Sturm oscillation theory gives the number of eigenvalues below a trial
    energy as the number of interior nodes of u_E. An upward scan (doubling
    step) followed by bisection on that count isolates a bracket holding
    exactly the wanted root, which is then polished with Brent's method.
    """
    if not spec.confined:
        raise ContractError("solve_energy needs a finite confinement radius; use free_energy")
    Z, rc, l = spec.Z, spec.rc, spec.l
    k = spec.n - spec.l
    if e_ceiling is None:
        e_ceiling = 1e4 * (spec.n + l + 1) ** 2 / rc**2 * max(1.0, Z * Z)

    def nodes(E):
        return _wall_residual(E, Z, l, rc)[1]

    lo = -Z * Z / (2.0 * spec.n**2)
    step = max(0.1, 0.5 / rc**2)
    hi = lo + step
    n_hi = nodes(hi)
    while n_hi < k:
        lo = hi
        step *= 2.0
        hi = lo + step
        if hi > e_ceiling:
            raise SearchError(f"{spec}: no bracket for root {k} in [{-Z * Z / (2 * spec.n ** 2)}, {e_ceiling}]")
        n_hi = nodes(hi)
    n_lo = nodes(lo)
    if n_lo >= k:
        # already k nodes at the free energy: the wall sits so far out that the
        # shift E - E_free ~ |u u'|/2 at rc is below rounding of the march
        u, du = hydrogenic_u(StateSpec.free(spec.n, l, Z), np.array([rc]))
        shift = 0.5 * abs(float(u[0] * du[0]))
        if shift > tol * max(1.0, abs(lo)):
            raise SearchError(f"{spec}: node count at the free energy is {n_lo}, expected {k - 1}")
        return lo + shift
    for _ in range(300):
        if n_lo == k - 1 and n_hi == k:
            break
        mid = 0.5 * (lo + hi)
        n_mid = nodes(mid)
        if n_mid <= k - 1:
            lo, n_lo = mid, n_mid
        else:
            hi, n_hi = mid, n_mid
    else:
        raise SearchError(f"{spec}: could not isolate root {k} (bracket [{lo}, {hi}])")

    def g(E):
        return _wall_residual(E, Z, l, rc)[0]

    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if g_lo * g_hi > 0:
        # the root sits on a bisection point up to rounding: widen by a hair
        d = 1e-9 * max(1.0, abs(lo), abs(hi))
        if nodes(lo - d) == k - 1 and g(lo - d) * g_hi < 0:
            lo, g_lo = lo - d, g(lo - d)
        elif nodes(hi + d) == k and g_lo * g(hi + d) < 0:
            hi, g_hi = hi + d, g(hi + d)
    if g_lo * g_hi > 0:
        raise SearchError(f"{spec}: bracket [{lo}, {hi}] shows no sign change of u(rc)")
    return brentq(g, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)


def free_energy(spec: StateSpec) -> float:
    """Coulomb energy -Z^2/(2 n^2) of the unconfined state."""
    if spec.confined:
        raise ContractError("free_energy applies to unbounded states only")
    return -spec.Z**2 / (2.0 * spec.n**2)


# ---------------------------------------------------------------------------
# wavefunctions


@dataclass(frozen=True)
class GridPolicy:
    """Panel layout of the stored radial grid.

    Panels follow r = R (a s^2 + (1-a) s) for uniform s, denser near the
    origin; ``min_points`` is a floor on the number of Gauss nodes.
    """

    min_points: int = 2000
    order: int = 16
    clustering: float = 0.5
    panels_per_halfwave: float = 1.0


class _PiecewiseSeries:
    """Evaluates u and u' from stored local power series."""

    def __init__(self, pieces, scale=1.0):
        pieces = sorted(pieces, key=lambda p: p.lo)
        self.lo = np.array([p.lo for p in pieces])
        self.hi = np.array([p.hi for p in pieces])
        self.r0 = np.array([p.r0 for p in pieces])
        self.coefs = [p.coef * s for p, s in zip(pieces, np.broadcast_to(scale, len(pieces)))]

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        flat = r.ravel()
        u = np.zeros_like(flat)
        du = np.zeros_like(flat)
        idx = np.clip(np.searchsorted(self.hi, flat, side="left"), 0, len(self.hi) - 1)
        for i in np.unique(idx):
            sel = idx == i
            h = flat[sel] - self.r0[i]
            coef = self.coefs[i]
            v = np.zeros_like(h)
            d = np.zeros_like(h)
            for c in coef[::-1]:
                d = d * h + v
                v = v * h + c
            u[sel] = v
            du[sel] = d
        return u.reshape(r.shape), du.reshape(r.shape)


@dataclass(frozen=True, eq=False)
class RadialSolution:
    """Normalized reduced radial function u = r R(r) on a Gauss-panel grid.

    ``grid`` holds 0, the interior Gauss nodes and the outer radius; the two
    endpoints carry zero quadrature weight so that ``weights @ f(grid)``
    integrates over the whole interval.
    """

    spec: StateSpec
    energy: float
    grid: np.ndarray
    u: np.ndarray
    du: np.ndarray
    weights: np.ndarray
    panel_edges: np.ndarray
    node_count: int
    norm_residual: float
    r_max: float
    wall_slope: float
    origin_coefficient: float
    evaluate: Callable = field(repr=False)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def _turning_point(E, Z, L):
    """Outermost classical turning point, or None when the outer region is allowed."""
    if E >= 0:
        return None
    disc = Z * Z + 2.0 * E * L
    if disc < 0:
        return None
    return (Z + math.sqrt(disc)) / (-2.0 * E)


def _panel_edges(R, n_panels, clustering):
    s = np.linspace(0.0, 1.0, n_panels + 1)
    return R * (clustering * s * s + (1.0 - clustering) * s)


def _n_panels(R, E, Z, policy: GridPolicy):
    k = math.sqrt(2.0 * abs(E) + Z * Z)
    stretch = 1.0 + policy.clustering
    need = math.ceil(policy.panels_per_halfwave * R * k * stretch / math.pi)
    return max(math.ceil(policy.min_points / policy.order), need)


def _assemble(spec, E, evaluator, R, policy, wall_slope_raw, origin_raw):
    order = policy.order
    edges = _panel_edges(R, _n_panels(R, E, spec.Z, policy), policy.clustering)
    nodes, weights = panel_nodes(edges, order)
    u, du = evaluator(nodes)
    norm = float(np.dot(weights, u * u))
    scale = 1.0 / math.sqrt(norm)
    # orient so that u > 0 next to the origin
    if origin_raw < 0:
        scale = -scale
    u, du = u * scale, du * scale
    fine_edges = np.sort(np.concatenate([edges, 0.5 * (edges[1:] + edges[:-1])]))
    fn, fw = panel_nodes(fine_edges, order)
    fu, _ = evaluator(fn)
    residual = abs(float(np.dot(fw, (fu * scale) ** 2)) - 1.0)

    def evaluate(r, _ev=evaluator, _s=scale):
        a, b = _ev(r)
        return a * _s, b * _s

    grid = np.concatenate([[0.0], nodes, [R]])
    u_full = np.concatenate([[0.0], u, [0.0 if spec.confined else float(evaluate(R)[0])]])
    du_wall = wall_slope_raw * scale if spec.confined else 0.0
    du_full = np.concatenate([[0.0 if spec.l > 0 else origin_raw * scale], du, [du_wall]])
    w_full = np.concatenate([[0.0], weights, [0.0]])
    nodes_count = _count_sign_changes(u[np.abs(u) > 1e-12 * np.max(np.abs(u))])
    expected = spec.n - spec.l - 1
    if nodes_count != expected:
        raise WrongRootError(f"{spec}: eigenfunction has {nodes_count} nodes, expected {expected} (E={E})")
    return RadialSolution(
        spec=spec,
        energy=E,
        grid=grid,
        u=u_full,
        du=du_full,
        weights=w_full,
        panel_edges=edges,
        node_count=nodes_count,
        norm_residual=residual,
        r_max=R,
        wall_slope=du_wall,
        origin_coefficient=origin_raw * scale,
        evaluate=evaluate,
    )


def _confined_wavefunction(spec: StateSpec, E: float, policy: GridPolicy) -> RadialSolution:
    Z, l, rc = spec.Z, spec.l, spec.rc
    L = l * (l + 1)
    rt = _turning_point(E, Z, L)
    if rt is not None and rt < 0.8 * rc:
        left = _march_forward(E, Z, l, rt)
        right = _march_backward(E, Z, l, rc, rt)
        if abs(right.u) > 1e-8 * abs(right.du) * rt:
            s = left.u / right.u
        else:
            s = left.du / right.du
        pieces = left.pieces + right.pieces
        scales = [1.0] * len(left.pieces) + [s] * len(right.pieces)
        evaluator = _PiecewiseSeries(pieces, np.array(scales))
        wall_raw = -1.0 * s
    else:
        fwd = _march_forward(E, Z, l, rc)
        evaluator = _PiecewiseSeries(fwd.pieces)
        wall_raw = fwd.du
    return _assemble(spec, E, evaluator, rc, policy, wall_raw, 1.0)


def hydrogenic_u(spec: StateSpec, r):
    """Closed-form free reduced radial function u = r R_nl(r) and its derivative."""
    n, l, Z = spec.n, spec.l, spec.Z
    r = np.asarray(r, dtype=float)
    rho = 2.0 * Z * r / n
    k = n - l - 1
    norm = (2.0 * Z / n) ** 1.5 * math.sqrt(math.factorial(k) / (2.0 * n * math.factorial(n + l)))
    lag = assoc_laguerre(k, 2 * l + 1, rho)
    dlag = -assoc_laguerre(k - 1, 2 * l + 2, rho) if k > 0 else np.zeros_like(rho)
    ex = np.exp(-0.5 * rho)
    R = norm * rho**l * ex * lag
    # dR/drho
    drho = norm * ex * ((l * rho ** (l - 1) if l > 0 else 0.0) * lag - 0.5 * rho**l * lag + rho**l * dlag)
    dR = drho * 2.0 * Z / n
    return r * R, R + r * dR


def free_origin_coefficient(spec: StateSpec) -> float:
    """lim u(r) / r^(l+1) as r -> 0 for the normalized free state."""
    n, l, Z = spec.n, spec.l, spec.Z
    k = n - l - 1
    norm = (2.0 * Z / n) ** 1.5 * math.sqrt(math.factorial(k) / (2.0 * n * math.factorial(n + l)))
    return norm * (2.0 * Z / n) ** l * math.comb(k + 2 * l + 1, k)


def _free_cutoff(spec: StateSpec) -> float:
    scale = spec.n / spec.Z
    r = np.linspace(0.0, 400.0 * scale, 40001)
    u = np.abs(hydrogenic_u(spec, r)[0])
    tiny = 1e-16 * u.max()
    above = np.nonzero(u >= tiny)[0]
    return float(r[min(above[-1] + 1, r.size - 1)])


def _free_wavefunction(spec: StateSpec, E: float, policy: GridPolicy) -> RadialSolution:
    R = _free_cutoff(spec)
    c0 = free_origin_coefficient(spec)

    def evaluator(r):
        return hydrogenic_u(spec, r)

    return _assemble(spec, E, evaluator, R, policy, 0.0, c0)


def build_wavefunction(spec: StateSpec, E: float, policy: GridPolicy = GridPolicy()) -> RadialSolution:
    """Normalized radial eigenfunction at the eigenvalue ``E``.

    Confined states are integrated outward from the origin and, when a
    classically forbidden zone precedes the wall, inward from the wall as
    well, the two halves joined at the outer turning point. Free states use
    the associated-Laguerre closed form.
    """
    if spec.confined:
        return _confined_wavefunction(spec, E, policy)
    return _free_wavefunction(spec, E, policy)


def solve_state(spec: StateSpec, tol: float = 1e-11, policy: GridPolicy = GridPolicy()) -> RadialSolution:
    E = solve_energy(spec, tol) if spec.confined else free_energy(spec)
    return build_wavefunction(spec, E, policy)


# ---------------------------------------------------------------------------
# position-space expectation values


def expect_inverse_r(sol: RadialSolution) -> float:
    r = sol.grid[1:-1]
    return float(np.dot(sol.weights[1:-1], sol.u[1:-1] ** 2 / r))


def p2_virial(sol: RadialSolution) -> float:
    """<p^2> = 2E + 2Z<1/r>."""
    return 2.0 * sol.energy + 2.0 * sol.spec.Z * expect_inverse_r(sol)


def p2_gradient(sol: RadialSolution) -> float:
    """<p^2> = integral of u'^2 + l(l+1) u^2 / r^2."""
    r = sol.grid[1:-1]
    L = sol.spec.l * (sol.spec.l + 1)
    integrand = sol.du[1:-1] ** 2 + L * sol.u[1:-1] ** 2 / r**2
    return float(np.dot(sol.weights[1:-1], integrand))


def p4_position(sol: RadialSolution) -> float:
    """<p^4> as the squared norm of (-u'' + l(l+1)u/r^2) = 2(E + Z/r) u."""
    r = sol.grid[1:-1]
    f = 2.0 * (sol.energy + sol.spec.Z / r) * sol.u[1:-1]
    return float(np.dot(sol.weights[1:-1], f * f))


def kummer_u(spec: StateSpec, E: float, r):
    """Unnormalized u = r psi(r) from the confluent-hypergeometric form, E < 0 only."""
    if E >= 0:
        raise DomainError("the Kummer form needs E < 0")
    kappa = math.sqrt(-2.0 * E)
    x = 2.0 * kappa * np.asarray(r, dtype=float)
    a = spec.l + 1 - spec.Z / kappa
    return np.asarray(r) * x**spec.l * kummer_m(a, 2 * spec.l + 2, x) * np.exp(-0.5 * x)
