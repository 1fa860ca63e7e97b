"""Compton profiles J(q) = (1/2) integral_q^inf I(p)/p dp and momentum moments.

The factor 1/2 makes integral_0^inf J dq = 1/2 for a unit-normalized I,
the half-line convention used throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import AccuracyError, DivergenceError, DomainError
from .momentum import MomentumDensity, TailModel
from .radial import StateSpec
from .specfun import panel_interpolate, panel_tail_matrix, gauss_legendre


@dataclass(frozen=True, eq=False)
class ComptonProfile:
    """J on the Gauss panels of the momentum grid (q-grid = p-grid).

    ``q``/``J`` merge panel edges and nodes; ``nodes``/``J_nodes``/``weights``
    are the quadrature view used for integrals. Beyond ``q_max`` the profile
    follows the tail model of the momentum density.
    """

    spec: StateSpec
    q: np.ndarray
    J: np.ndarray
    J0: float
    q_max: float
    half_norm_residual: float
    clamp_count: int
    nodes: np.ndarray
    weights: np.ndarray
    J_nodes: np.ndarray
    panel_edges: np.ndarray
    J_edges: np.ndarray
    order: int
    tail: TailModel
    tolerance: float

    def __call__(self, q):
        """J at arbitrary q >= 0 (panel interpolant clipped to its edge values)."""
        q = np.atleast_1d(np.asarray(q, dtype=float))
        if np.any(q < 0):
            raise DomainError("q must be >= 0")
        out = np.empty_like(q)
        inside = q <= self.q_max
        if np.any(inside):
            qi = q[inside]
            k = np.clip(np.searchsorted(self.panel_edges, qi, side="right") - 1, 0, self.panel_edges.size - 2)
            vals = np.empty_like(qi)
            Jn = self.J_nodes.reshape(-1, self.order)
            for panel in np.unique(k):
                sel = k == panel
                a, b = self.panel_edges[panel], self.panel_edges[panel + 1]
                t = (2.0 * qi[sel] - a - b) / (b - a)
                v = panel_interpolate(Jn[panel], t)
                vals[sel] = np.clip(v, self.J_edges[panel + 1], self.J_edges[panel])
            out[inside] = vals
        for i in np.nonzero(~inside)[0]:
            out[i] = 0.5 * self.tail.moment(-1, start=q[i])
        return out if out.size > 1 else out[0]

    def integral(self, values_at_nodes) -> float:
        return float(np.dot(self.weights, values_at_nodes))

    @property
    def tail_half_norm(self) -> float:
        """integral_{q_max}^inf J dq."""
        P = self.q_max
        return 0.5 * (self.tail.moment(0) - P * self.tail.moment(-1))


def build_profile(emd: MomentumDensity, max_clamp_fraction: float = 1e-3) -> ComptonProfile:
    """Backward cumulative quadrature of I/p from q_max down to 0."""
    order = emd.order
    edges = emd.panel_edges
    n_pan = edges.size - 1
    f = (emd.I / emd.p).reshape(n_pan, order)
    half = 0.5 * np.diff(edges)
    _, w = gauss_legendre(order)
    panel_int = 0.5 * half * (f @ w)             # (1/2) integral over each panel
    J_end = 0.5 * emd.tail.moment(-1)
    J_edges = np.empty(n_pan + 1)
    J_edges[-1] = J_end
    J_edges[:-1] = J_end + np.cumsum(panel_int[::-1])[::-1]
    Q = panel_tail_matrix(order)
    J_nodes = J_edges[1:, None] + 0.5 * half[:, None] * (f @ Q.T)

    # merged sequence: edge_0, nodes of panel 0, edge_1, ...
    merged = np.empty((n_pan, order + 1))
    merged[:, 0] = J_edges[:-1]
    merged[:, 1:] = J_nodes
    seq = np.append(merged.ravel(), J_edges[-1])
    fixed = np.maximum.accumulate(seq[::-1])[::-1]
    clamps = int(np.count_nonzero(fixed > seq))
    if clamps > max(1, max_clamp_fraction * n_pan):
        raise AccuracyError(f"{emd.spec}: {clamps} negative profile increments over {n_pan} panels")
    fixed = np.maximum(fixed, 0.0)
    merged = fixed[:-1].reshape(n_pan, order + 1)
    J_edges = np.append(merged[:, 0], fixed[-1])
    J_nodes = merged[:, 1:].ravel()

    qm = np.empty((n_pan, order + 1))
    qm[:, 0] = edges[:-1]
    qm[:, 1:] = emd.p.reshape(n_pan, order)
    q = np.append(qm.ravel(), edges[-1])

    half_norm = float(np.dot(emd.weights, J_nodes))
    return ComptonProfile(
        spec=emd.spec,
        q=q,
        J=fixed,
        J0=float(J_edges[0]),
        q_max=emd.p_max,
        half_norm_residual=abs(half_norm - 0.5),
        clamp_count=clamps,
        nodes=emd.p,
        weights=emd.weights,
        J_nodes=J_nodes,
        panel_edges=edges,
        J_edges=J_edges,
        order=order,
        tail=emd.tail,
        tolerance=emd.tolerance,
    )


def moment_from_profile(cp: ComptonProfile, m: int) -> float:
    """<p^m> from the profile: 2 J(0) for m = -1, else 2(m+1) integral q^m J dq.

    The part beyond q_max uses integration by parts on the tail model:
    2(m+1) integral_P^inf q^m J dq = integral_P^inf p^m I dp - 2 P^(m+1) J(P).
    """
    if int(m) != m or not -1 <= m <= 4:
        raise DomainError(f"moment order must be an integer in [-1, 4], got {m}")
    if m == -1:
        return 2.0 * cp.J0
    body = 2.0 * (m + 1) * float(np.dot(cp.weights, cp.nodes**m * cp.J_nodes))
    P = cp.q_max
    try:
        tail = cp.tail.moment(m) - 2.0 * P ** (m + 1) * cp.J_edges[-1]
    except DivergenceError:
        raise DivergenceError(
            f"<p^{m}> of {cp.spec} diverges for a hard-wall profile; use the position-space route") from None
    return body + tail


def scale_profile_grid(cp: ComptonProfile, Z: float) -> ComptonProfile:
    """J_Z(q) = J(q / Z) / Z on the grid stretched by Z."""
    return replace(
        cp,
        spec=StateSpec(cp.spec.Z * Z, cp.spec.rc / Z, cp.spec.n, cp.spec.l),
        q=cp.q * Z,
        J=cp.J / Z,
        J0=cp.J0 / Z,
        q_max=cp.q_max * Z,
        nodes=cp.nodes * Z,
        weights=cp.weights * Z,
        J_nodes=cp.J_nodes / Z,
        panel_edges=cp.panel_edges * Z,
        J_edges=cp.J_edges / Z,
        tail=cp.tail.scaled(Z),
    )


# ---------------------------------------------------------------------------
# free circular states


def circular_profile_closed_form(n: int, Z: float, q):
    """J of the free circular state (l = n-1) from the binomial-expanded integral.

    J = n^2/(4Z) * 2/(pi (n+l)!) * 2^(4l+4) (l!)^2 * integral_{y0}^inf y^l/(y+1)^(2l+4) dy,
    y0 = (n q / Z)^2, with y^l expanded in powers of (y+1).
    """
    if n < 1 or int(n) != n:
        raise DomainError("n must be a positive integer")
    if not Z > 0:
        raise DomainError("Z must be positive")
    l = n - 1
    q = np.asarray(q, dtype=float)
    y1 = 1.0 + (n * q / Z) ** 2
    pref = n * n / (4.0 * Z) * 2.0 / (math.pi * math.factorial(n + l)) * 2.0 ** (4 * l + 4) * math.factorial(l) ** 2
    total = np.zeros_like(y1)
    for k in range(l + 1):
        # y^l = sum_k C(l,k) (-1)^k (y+1)^(l-k);  integral of (y+1)^(-(l+k+4)) from y0
        total += math.comb(l, k) * (-1) ** k * y1 ** (-(l + k + 3)) / (l + k + 3)
    out = pref * total
    return out[()] if out.ndim == 0 else out


_CIRCULAR_EXPLICIT = {
    1: (8.0, 3.0, (1,)),
    2: (64.0, 15.0, (5, 1)),
    3: (3072.0, 525.0, (21, 7, 1)),
    4: (16384.0, 2205.0, (84, 36, 9, 1)),
    5: (131072.0, 14553.0, (330, 165, 55, 11, 1)),
}


def circular_profile_explicit(n: int, Z: float, q):
    """Expanded rational forms for the first five circular states."""
    if n not in _CIRCULAR_EXPLICIT:
        raise DomainError("explicit forms exist for n = 1..5")
    num, den, poly = _CIRCULAR_EXPLICIT[n]
    x2 = (n * np.asarray(q, dtype=float) / Z) ** 2
    return num / (den * math.pi * Z) * np.polyval(poly, x2) / (x2 + 1.0) ** (2 * n + 1)


def circular_J0(n: int, Z: float = 1.0) -> float:
    return float(circular_profile_closed_form(n, Z, 0.0))
