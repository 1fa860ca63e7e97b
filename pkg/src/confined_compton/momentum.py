"""Momentum-space wavefunctions and the spherically averaged momentum density.

    phi(p) = sqrt(2/pi) * integral_0^R u(r) r j_l(p r) dr,     I(p) = p^2 phi(p)^2

The (-i)^l phase is dropped. I(p) is tabulated on Gauss-Legendre panels up
to p_max; beyond p_max an asymptotic model of phi is integrated
analytically. The model has two parts:

* origin terms from the odd Frobenius coefficients, phi ~ sum g_m p^-(l+3+m);
* wall terms (confined states only) from the endpoint expansion at rc,
  whose leading piece u'(rc) sin(p rc - l pi/2) / p^3 makes I ~ p^-4.

The wall tail is why <p^3> and <p^4> diverge for hard-wall states.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import AccuracyError, ContractError, ConvergenceError, DivergenceError, DomainError
from .radial import (
    RadialSolution,
    StateSpec,
    free_energy,
    free_origin_coefficient,
    frobenius_coefficients,
    local_taylor,
    p2_virial,
)
from .specfun import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    gauss_legendre,
    gegenbauer,
    integrate_oscillatory,
    panel_nodes,
    spherical_bessel_j,
)

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
_N_ORIGIN_TERMS = 4      # odd Frobenius orders 1, 3, 5, 7
_N_WALL_MAX = 7          # wall expansion kept through p^-(N+1), N <= 7
_MAX_MATRIX = 2_000_000  # elements per Bessel-kernel chunk


# ---------------------------------------------------------------------------
# asymptotic tail


def _origin_terms(E, Z, l, c0):
    c = frobenius_coefficients(E, Z, l, 2 * _N_ORIGIN_TERMS, c0)
    terms = []
    for m in range(1, 2 * _N_ORIGIN_TERMS, 2):
        # integral_0^inf r^(mu-1) j_l(p r) dr with mu = l+3+m, analytically continued
        g = c[m] * math.sqrt(math.pi) * 2.0 ** (l + 1 + m) * math.gamma(l + 0.5 * (3 + m)) / math.gamma(-0.5 * m)
        terms.append((g, l + 3 + m))
    return tuple(terms)


def _wall_terms(E, Z, l, rc, slope):
    """Complex c_N of phi_wall = (1/p) Re[exp(i(p rc - (l+1) pi/2)) sum_N c_N p^-N] (no sqrt(2/pi))."""
    t = local_taylor(E, Z, l, rc, 0.0, slope, _N_WALL_MAX + 1)
    c = np.zeros(_N_WALL_MAX + 1, dtype=complex)
    for k in range(l + 1):
        a_k = math.factorial(l + k) / (math.factorial(k) * math.factorial(l - k))
        # Taylor coefficients of r^-k about rc
        b = np.array([rc ** (-k - i) * (-1) ** i * math.comb(k + i - 1, i) if k > 0 else float(i == 0)
                      for i in range(_N_WALL_MAX + 1)])
        f = np.convolve(t, b)[: _N_WALL_MAX + 1]
        for j in range(1, _N_WALL_MAX - k):
            N = k + j + 1
            c[N] += a_k * (0.5j) ** k * (-1) ** j * math.factorial(j) * f[j] / (1j) ** (j + 1)
    return tuple(complex(x) for x in c[2:])  # c_2 .. c_Nmax


def _oscillatory_tail(n, a, phase, X):
    """integral_X^inf p^-n exp(i(a p - phase)) dp by its asymptotic series (a X large)."""
    z = 1j * a * X
    term = 1.0 + 0j
    total = 0j
    for j in range(80):
        total += term
        nxt = term * (n + j) / z
        if abs(nxt) <= 1e-18 * abs(total):
            break
        if abs(nxt) > abs(term):
            raise ConvergenceError(f"tail series diverges (n={n}, aX={a * X})")
        term = nxt
    return -np.exp(1j * (a * X - phase)) / (1j * a) * X ** (-n) * total


@dataclass(frozen=True)
class TailModel:
    """Large-p model of I(p) used beyond the tabulated range.

    ``amplitude`` carries the renormalization and ``scale`` a momentum
    rescaling, I(p) = amplitude * I0(p / scale) / scale, so that scaled and
    renormalized densities share one description.
    """

    l: int
    rc: float
    origin: tuple
    wall: tuple
    p_start: float
    amplitude: float = 1.0
    scale: float = 1.0

    @property
    def has_wall(self) -> bool:
        return math.isfinite(self.rc) and any(abs(c) > 0 for c in self.wall)

    @property
    def start(self) -> float:
        return self.p_start * self.scale

    @property
    def decay_exponent(self) -> int:
        """Power law of the oscillation-averaged density, I ~ p^-k."""
        return 4 if self.has_wall else 2 * self.l + 6

    def scaled(self, factor: float) -> "TailModel":
        return replace(self, scale=self.scale * factor)

    def renormalized(self, norm: float) -> "TailModel":
        return replace(self, amplitude=self.amplitude / norm)

    def _phi_reduced(self, p):
        p = np.asarray(p, dtype=float)
        out = np.zeros_like(p)
        for g, e in self.origin:
            out += g * p ** (-e)
        if self.has_wall:
            ph = np.exp(1j * (p * self.rc - 0.5 * (self.l + 1) * math.pi))
            s = np.zeros_like(p, dtype=complex)
            for N, c in enumerate(self.wall, start=2):
                s += c * p ** (-N)
            out += np.real(ph * s) / p
        return out

    def phi(self, p):
        """Model momentum wavefunction in unscaled, unnormalized units."""
        return SQRT_2_OVER_PI * self._phi_reduced(p)

    def density(self, p):
        pb = np.asarray(p, dtype=float) / self.scale
        return self.amplitude * pb * pb * self.phi(pb) ** 2 / self.scale

    def _terms(self, m):
        """(freq, trig, n, coef) with integrand = coef p^-n trig(freq * theta)."""
        plain = {}
        wave = {}
        for g, e in self.origin:
            plain[e] = plain.get(e, 0.0) + g
        if self.has_wall:
            for N, c in enumerate(self.wall, start=2):
                # Re[e^{i th} c] = Re(c) cos th - Im(c) sin th
                wave[N + 1] = (wave.get(N + 1, (0.0, 0.0))[0] + c.real, wave.get(N + 1, (0.0, 0.0))[1] - c.imag)
        acc = {}

        def add(key, v):
            acc[key] = acc.get(key, 0.0) + v

        shift = m + 2
        for e1, g1 in plain.items():
            for e2, g2 in plain.items():
                add((0, "c", e1 + e2 - shift), g1 * g2)
            for e2, (kc, ks) in wave.items():
                add((1, "c", e1 + e2 - shift), 2 * g1 * kc)
                add((1, "s", e1 + e2 - shift), 2 * g1 * ks)
        for e1, (c1, s1) in wave.items():
            for e2, (c2, s2) in wave.items():
                n = e1 + e2 - shift
                add((0, "c", n), 0.5 * (c1 * c2 + s1 * s2))
                add((2, "c", n), 0.5 * (c1 * c2 - s1 * s2))
                add((2, "s", n), c1 * s2)
        return [(k, trig, n, 2.0 / math.pi * v) for (k, trig, n), v in acc.items() if v != 0.0]

    def _base_moment(self, m, P):
        terms = self._terms(m)
        for k, trig, n, v in terms:
            if k == 0 and n <= 1:
                raise DivergenceError(
                    f"<p^{m}> diverges: density tail decays like p^-{self.decay_exponent}")
        total = 0.0
        X = P
        if self.has_wall:
            X = max(P, 400.0 / self.rc)
            if X > P:
                width = 0.25 * math.pi / self.rc
                edges = np.linspace(P, X, max(2, math.ceil((X - P) / width)) + 1)
                nodes, weights = panel_nodes(edges, 16)
                total += float(np.dot(weights, nodes**m * nodes * nodes * self.phi(nodes) ** 2))
        for k, trig, n, v in terms:
            if k == 0:
                total += v * X ** (1 - n) / (n - 1)
            else:
                val = _oscillatory_tail(n, k * self.rc, k * 0.5 * (self.l + 1) * math.pi, X)
                total += v * (val.real if trig == "c" else val.imag)
        return total

    def moment(self, m: int, start: float | None = None) -> float:
        """integral_start^inf p^m I(p) dp (start defaults to the tabulation end)."""
        P = self.p_start if start is None else start / self.scale
        return self.amplitude * self.scale**m * self._base_moment(m, P)


def tail_model(sol: RadialSolution, p_start: float = math.inf) -> TailModel:
    spec = sol.spec
    origin = _origin_terms(sol.energy, spec.Z, spec.l, sol.origin_coefficient)
    wall = ()
    if spec.confined:
        wall = _wall_terms(sol.energy, spec.Z, spec.l, spec.rc, sol.wall_slope)
    return TailModel(spec.l, spec.rc, origin, wall, p_start)


# ---------------------------------------------------------------------------
# grids


def choose_p_max(tail: TailModel, p_rms: float, target: float = 1e-8) -> float:
    """Smallest convenient p_max whose tail holds less than ``target`` of the norm."""
    rc = tail.rc
    P = 12.0 * p_rms
    if math.isfinite(rc):
        P = max(P, 20.0 / rc)
    # leading-order estimates for a starting point
    g1 = tail.origin[0][0]
    C = 2.0 / math.pi * g1 * g1
    k = 2 * tail.l + 5
    P = max(P, (C / (k * target)) ** (1.0 / k))
    if tail.has_wall:
        A = 2.0 / math.pi * abs(tail.wall[0]) ** 2 / 2.0
        P = max(P, (A / (3.0 * target)) ** (1.0 / 3.0))
    for _ in range(200):
        if tail._base_moment(0, P) <= target:
            return P
        P *= 1.15
    raise ConvergenceError("could not place p_max")


def momentum_panel_edges(p_max: float, p_rms: float, rc: float, n_linear: int = 64,
                         ratio: float = 1.08) -> np.ndarray:
    """Linear panels up to about 4 p_rms, then geometrically growing ones.

    For confined states no panel is wider than 2 pi/rc, two periods of the
    wall-induced ripple of I(p).
    """
    cap = 2.0 * math.pi / rc if math.isfinite(rc) else math.inf
    p_lin = min(4.0 * p_rms, p_max)
    n_lin = max(n_linear, math.ceil(p_lin / min(cap, math.inf)) if math.isfinite(cap) else n_linear)
    edges = list(np.linspace(0.0, p_lin, n_lin + 1))
    w = p_lin / n_lin
    p = p_lin
    while p < p_max * (1 - 1e-14):
        w = min(w * ratio, cap)
        prev = p
        p = min(p + w, p_max)
        # fold a sliver into this panel unless that breaks the width cap
        if p_max - p < 0.25 * w and p_max - prev <= cap:
            p = p_max
        edges.append(p)
    return np.array(edges)


# ---------------------------------------------------------------------------
# transforms


def transform_to_momentum(sol: RadialSolution, p: float, qspec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """phi(p) by adaptive oscillatory quadrature (reference path, one p at a time)."""
    if p < 0:
        raise DomainError("p must be >= 0")
    l = sol.spec.l

    def f(r):
        return sol.evaluate(r)[0] * r * spherical_bessel_j(l, p * r)

    try:
        val, _ = integrate_oscillatory(f, p, 0.0, sol.r_max, qspec)
    except ConvergenceError as exc:
        raise ConvergenceError(f"momentum transform of {sol.spec} at p={p}: {exc}",
                               exc.best_estimate, exc.error_estimate) from exc
    return SQRT_2_OVER_PI * val


def transform_on_grid(sol: RadialSolution, p, order: int = 16) -> np.ndarray:
    """phi at many momenta with shared radial quadratures.

    Radial panels are the solution's own panels split into 2^k pieces, k
    chosen per momentum so that no piece spans more than two periods of
    j_l(p r); a 16-point rule still integrates that to near round-off.
    """
    p = np.asarray(p, dtype=float)
    out = np.empty_like(p)
    base = sol.panel_edges
    widths = np.diff(base)
    wmax = float(widths.max())
    levels = np.zeros(p.shape, dtype=int)
    pos = p > 0
    levels[pos] = np.maximum(0, np.ceil(np.log2(wmax * p[pos] / (4.0 * math.pi)))).astype(int)
    l = sol.spec.l
    for k in np.unique(levels):
        split = 2**k
        frac = np.arange(split) / split
        edges = np.append((base[:-1, None] + widths[:, None] * frac[None, :]).ravel(), base[-1])
        r, w = panel_nodes(edges, order)
        f = w * sol.evaluate(r)[0] * r
        idx = np.nonzero(levels == k)[0]
        rows = max(1, _MAX_MATRIX // r.size)
        for s in range(0, idx.size, rows):
            chunk = idx[s:s + rows]
            out[chunk] = spherical_bessel_j(l, np.outer(p[chunk], r)) @ f
    return SQRT_2_OVER_PI * out


def free_phi_closed_form(spec: StateSpec, p):
    """Exact momentum wavefunction of the free state (Gegenbauer form)."""
    if spec.confined:
        raise ContractError("closed form applies to free states only")
    n, l, Z = spec.n, spec.l, spec.Z
    p = np.asarray(p, dtype=float)
    x = n * p / Z
    x2 = x * x
    pref = n * n / Z**1.5 * math.sqrt(2.0 / math.pi * math.factorial(n - l - 1) / math.factorial(n + l))
    pref *= 2.0 ** (2 * l + 2) * math.factorial(l)
    t = (x2 - 1.0) / (x2 + 1.0)
    return pref * x**l / (x2 + 1.0) ** (l + 2) * gegenbauer(n - l - 1, l + 1, t)


def emd_free_closed_form(spec: StateSpec, p):
    """I(p) = p^2 phi(p)^2 of the free state."""
    p = np.asarray(p, dtype=float)
    return p * p * free_phi_closed_form(spec, p) ** 2


# ---------------------------------------------------------------------------
# density objects


@dataclass(frozen=True, eq=False)
class MomentumDensity:
    """Unit-normalized I(p) on Gauss panels over [0, p_max] plus a tail model.

    ``p``/``I``/``weights`` are the panel nodes; ``panel_edges`` and
    ``I_edges`` hold the panel end points (I(0) = 0).
    """

    spec: StateSpec
    energy: float
    p: np.ndarray
    I: np.ndarray
    weights: np.ndarray
    phi: np.ndarray
    panel_edges: np.ndarray
    I_edges: np.ndarray
    order: int
    p_max: float
    raw_norm: float
    tail: TailModel
    tolerance: float

    @property
    def tail_exponent(self) -> int:
        return self.tail.decay_exponent

    @property
    def grid(self):
        """Merged (edges + nodes) momenta and densities, strictly increasing."""
        q = np.concatenate([self.panel_edges, self.p])
        v = np.concatenate([self.I_edges, self.I])
        o = np.argsort(q, kind="stable")
        return q[o], v[o]


def _assemble(spec, energy, edges, order, phi_fn, tail, qspec):
    nodes, weights = panel_nodes(edges, order)
    everything = np.concatenate([nodes, edges])
    phi_all = phi_fn(everything)
    phi = phi_all[: nodes.size]
    phi_e = phi_all[nodes.size:]
    I = nodes * nodes * phi * phi
    I_e = edges * edges * phi_e * phi_e
    raw = float(np.dot(weights, I)) + tail.moment(0)
    if abs(raw - 1.0) > 1e-4:
        raise AccuracyError(f"{spec}: momentum density norm {raw:.8f} deviates from 1 by more than 1e-4")
    s = 1.0 / raw
    return MomentumDensity(
        spec=spec,
        energy=energy,
        p=nodes,
        I=I * s,
        weights=weights,
        phi=phi * math.sqrt(s),
        panel_edges=edges,
        I_edges=I_e * s,
        order=order,
        p_max=float(edges[-1]),
        raw_norm=raw,
        tail=tail.renormalized(raw),
        tolerance=qspec.relative_tolerance,
    )


def build_emd(sol: RadialSolution, qspec: QuadratureSpec = DEFAULT_QUADRATURE,
              p_max: float | None = None) -> MomentumDensity:
    """Momentum density of a solved state by numerical transform."""
    spec = sol.spec
    p_rms = math.sqrt(max(p2_virial(sol), 1e-300))
    tail = tail_model(sol)
    P = p_max if p_max is not None else choose_p_max(tail, p_rms, 10.0 * qspec.relative_tolerance)
    tail = replace(tail, p_start=P)
    edges = momentum_panel_edges(P, p_rms, spec.rc)
    return _assemble(spec, sol.energy, edges, qspec.panel_order,
                     lambda p: transform_on_grid(sol, p, qspec.panel_order), tail, qspec)


def closed_form_emd(spec: StateSpec, qspec: QuadratureSpec = DEFAULT_QUADRATURE,
                    p_max: float | None = None) -> MomentumDensity:
    """Momentum density of a free state from the exact wavefunction, on the standard grid."""
    if spec.confined:
        raise ContractError("closed_form_emd applies to free states only")
    E = free_energy(spec)
    p_rms = spec.Z / spec.n
    tail = TailModel(spec.l, math.inf, _origin_terms(E, spec.Z, spec.l, free_origin_coefficient(spec)), (), math.inf)
    P = p_max if p_max is not None else choose_p_max(tail, p_rms, 10.0 * qspec.relative_tolerance)
    tail = replace(tail, p_start=P)
    edges = momentum_panel_edges(P, p_rms, spec.rc)
    return _assemble(spec, E, edges, qspec.panel_order, lambda p: free_phi_closed_form(spec, p), tail, qspec)


def moment_from_emd(emd: MomentumDensity, m: int, regularize: bool = False) -> float:
    """<p^m> = integral p^m I(p) dp for integer m in [-1, 4].

    Confined states have I ~ p^-4, so m >= 3 diverges; with ``regularize``
    the integral truncated at p_max is returned instead of raising.
    """
    if int(m) != m or not -1 <= m <= 4:
        raise DomainError(f"moment order must be an integer in [-1, 4], got {m}")
    body = float(np.dot(emd.weights, emd.p**m * emd.I))
    try:
        return body + emd.tail.moment(m)
    except DivergenceError:
        if regularize:
            return body
        raise DivergenceError(
            f"<p^{m}> of {emd.spec} diverges in momentum space (tail ~ p^-{emd.tail_exponent}); "
            f"use the position-space route or regularize=True for the value truncated at p_max={emd.p_max:.6g}"
        ) from None


def overlap(emd_a: MomentumDensity, sol_b: RadialSolution) -> float:
    """integral phi_a phi_b p^2 dp on the grid of ``emd_a`` (tail neglected)."""
    phi_b = transform_on_grid(sol_b, emd_a.p, emd_a.order)
    return float(np.dot(emd_a.weights, emd_a.phi * phi_b * emd_a.p**2))
