"""Special functions and quadrature kernels shared by the physics modules.

All routines are pure functions of their arguments. Array arguments are
broadcast with numpy; scalars in give scalars out.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as npleg

from .errors import ConvergenceError, DomainError

MAX_BESSEL_L = 8


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and panel layout for composite Gauss-Legendre quadrature."""

    relative_tolerance: float = 1e-9
    absolute_floor: float = 1e-15
    panel_order: int = 16
    max_panels: int = 4096

    def __post_init__(self):
        if not (0.0 < self.relative_tolerance <= 1e-4):
            raise DomainError(f"relative_tolerance must lie in (0, 1e-4], got {self.relative_tolerance}")
        if self.absolute_floor < 0:
            raise DomainError("absolute_floor must be non-negative")
        if self.panel_order < 8:
            raise DomainError(f"panel_order must be >= 8, got {self.panel_order}")
        if self.max_panels < 16:
            raise DomainError(f"max_panels must be >= 16, got {self.max_panels}")

    def with_overrides(self, **kw) -> "QuadratureSpec":
        fields = dict(
            relative_tolerance=self.relative_tolerance,
            absolute_floor=self.absolute_floor,
            panel_order=self.panel_order,
            max_panels=self.max_panels,
        )
        fields.update({k: v for k, v in kw.items() if v is not None})
        return QuadratureSpec(**fields)


DEFAULT_QUADRATURE = QuadratureSpec()


# ---------------------------------------------------------------------------
# Gamma family


def ln_gamma(x: float) -> float:
    """Natural log of the Gamma function for x > 0."""
    if not x > 0:
        raise DomainError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def beta(a: float, b: float) -> float:
    """Euler Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)."""
    return math.exp(ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b))


# ---------------------------------------------------------------------------
# Orthogonal polynomials


def assoc_laguerre(k: int, alpha: float, x):
    """Generalized Laguerre polynomial L_k^(alpha)(x) by forward recurrence."""
    if k < 0 or int(k) != k:
        raise DomainError(f"degree must be a non-negative integer, got {k}")
    if not alpha > -1:
        raise DomainError(f"alpha must exceed -1, got {alpha}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        return prev[()] if prev.ndim == 0 else prev
    cur = 1.0 + alpha - x
    for j in range(1, k):
        prev, cur = cur, ((2 * j + 1 + alpha - x) * cur - (j + alpha) * prev) / (j + 1)
    return cur[()] if cur.ndim == 0 else cur


def gegenbauer(k: int, eta: float, t):
    """Gegenbauer polynomial C_k^(eta)(t) by three-term recurrence."""
    if k < 0 or int(k) != k:
        raise DomainError(f"degree must be a non-negative integer, got {k}")
    if not eta > 0:
        raise DomainError(f"eta must be positive, got {eta}")
    t = np.asarray(t, dtype=float)
    prev = np.ones_like(t)
    if k == 0:
        return prev[()] if prev.ndim == 0 else prev
    cur = 2.0 * eta * t
    for j in range(1, k):
        prev, cur = cur, (2.0 * t * (j + eta) * cur - (j + 2 * eta - 1) * prev) / (j + 1)
    return cur[()] if cur.ndim == 0 else cur


def kummer_m(a: float, b: float, x, max_terms: int = 2000):
    """Kummer's confluent hypergeometric M(a, b, x) by direct series summation.

    Suitable for moderate |x| (cancellation grows like e^|x| for x < 0).
    """
    if b <= 0 and float(b).is_integer():
        raise DomainError("b must not be a non-positive integer")
    x = np.asarray(x, dtype=float)
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(max_terms):
        term = term * (a + k) / (b + k) * x / (k + 1)
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            return total[()] if total.ndim == 0 else total
    raise ConvergenceError(f"Kummer series did not converge in {max_terms} terms", total)


# ---------------------------------------------------------------------------
# Spherical Bessel functions


def _jl_series(l: int, x: np.ndarray) -> np.ndarray:
    # j_l(x) = x^l/(2l+1)!! * sum_k (-x^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))
    dfact = 1.0
    for m in range(1, 2 * l + 2, 2):
        dfact *= m
    h = -0.5 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 80):
        term = term * h / (k * (2 * l + 2 * k + 1))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return x**l / dfact * total


def spherical_bessel_j(l: int, x):
    """Spherical Bessel function j_l(x) for 0 <= l <= 8 and x >= 0.

    Upward recurrence from the closed forms of j_0, j_1 where x > l;
    power series below that, where upward recurrence loses accuracy.
    """
    if l < 0 or l > MAX_BESSEL_L or int(l) != l:
        raise DomainError(f"spherical_bessel_j supports 0 <= l <= {MAX_BESSEL_L}, got {l}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("spherical_bessel_j requires x >= 0")
    small = x < max(l, 0.5) if l > 0 else x < 1e-3
    if not np.any(small):
        out = _jl_recurrence(l, x)
    else:
        out = np.empty_like(x)
        out[small] = _jl_series(l, x[small])
        big = ~small
        if np.any(big):
            out[big] = _jl_recurrence(l, x[big])
    return out[()] if out.ndim == 0 else out


def _jl_recurrence(l, x):
    inv = 1.0 / x
    j0 = np.sin(x)
    j0 *= inv
    if l == 0:
        return j0
    j1 = j0 - np.cos(x)
    j1 *= inv
    for k in range(1, l):
        # j_{k+1} = (2k+1)/x j_k - j_{k-1}, written into the j_{k-1} buffer
        j0 *= -1.0
        j0 += (2 * k + 1) * inv * j1
        j0, j1 = j1, j0
    return j1


# ---------------------------------------------------------------------------
# Gauss-Legendre panels


@lru_cache(maxsize=None)
def gauss_legendre(order: int):
    """Nodes and weights on [-1, 1] (read-only arrays)."""
    x, w = npleg.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def _legendre_inverse_vandermonde(order: int):
    x, _ = gauss_legendre(order)
    return np.linalg.inv(npleg.legvander(x, order - 1))


@lru_cache(maxsize=None)
def panel_tail_matrix(order: int) -> np.ndarray:
    """Q[i, j] = integral from x_i to 1 of the j-th Lagrange basis polynomial.

    Multiplying by samples of f at the Gauss nodes gives the integral of the
    interpolant from each node to the right end of the reference panel.
    """
    x, _ = gauss_legendre(order)
    cinv = _legendre_inverse_vandermonde(order)
    # antiderivative of each Legendre basis function P_k, evaluated at 1 and x_i
    anti = np.zeros((order, order + 1))
    for k in range(order):
        e = np.zeros(order)
        e[k] = 1.0
        anti[k] = npleg.legint(e)
    f_one = npleg.legval(1.0, anti.T)
    f_x = npleg.legval(x, anti.T).T  # (order nodes, order basis)
    q = (f_one[None, :] - f_x) @ cinv
    q.setflags(write=False)
    return q


def panel_interpolate(values: np.ndarray, t) -> np.ndarray:
    """Evaluate the Gauss-node interpolant of ``values`` at reference points t in [-1, 1]."""
    order = values.shape[-1]
    coef = _legendre_inverse_vandermonde(order) @ values
    return npleg.legval(t, coef)


def panel_nodes(edges, order: int):
    """Gauss-Legendre nodes and weights on consecutive panels [edges[i], edges[i+1]]."""
    edges = np.asarray(edges, dtype=float)
    x, w = gauss_legendre(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _composite(f, a, b, spec: QuadratureSpec, n0: int):
    x, w = gauss_legendre(spec.panel_order)

    def rule(n):
        edges = np.linspace(a, b, n + 1)
        nodes, weights = panel_nodes(edges, spec.panel_order)
        return float(np.sum(weights * np.asarray(f(nodes), dtype=float)))

    n = n0
    if n > spec.max_panels:
        raise ConvergenceError(f"initial panel count {n} exceeds max_panels={spec.max_panels}")
    coarse = rule(n)
    err = None
    while 2 * n <= spec.max_panels:
        fine = rule(2 * n)
        err = abs(fine - coarse)
        if err <= max(spec.relative_tolerance * abs(fine), spec.absolute_floor):
            return fine, err
        n *= 2
        coarse = fine
    raise ConvergenceError(
        f"quadrature on [{a}, {b}] did not converge within {spec.max_panels} panels",
        best_estimate=coarse,
        error_estimate=err,
    )


def integrate_panel(f, a: float, b: float, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Composite Gauss-Legendre integral of a vectorized ``f`` over [a, b].

    Panels are doubled until successive estimates agree to the tolerances in
    ``spec``. ``b = inf`` is handled with the map x = a + t/(1-t).
    Returns (value, error_estimate).
    """
    if b < a:
        raise DomainError("integrate_panel requires a <= b")
    if a == b:
        return 0.0, 0.0
    if math.isinf(b):
        def g(t):
            s = 1.0 - t
            return f(a + t / s) / (s * s)

        return _composite(g, 0.0, 1.0, spec, 1)
    return _composite(f, a, b, spec, 1)


def integrate_oscillatory(f, wavenumber: float, a: float, b: float,
                          spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Integral of an integrand oscillating at ``wavenumber`` over finite [a, b].

    The starting panelization keeps every panel no wider than a quarter of
    the period 2*pi/wavenumber; refinement then proceeds as in
    :func:`integrate_panel`. ``wavenumber = 0`` reproduces integrate_panel.
    """
    if wavenumber < 0:
        raise DomainError("wavenumber must be >= 0")
    if b < a:
        raise DomainError("integrate_oscillatory requires a <= b")
    if math.isinf(a) or math.isinf(b):
        raise DomainError("integrate_oscillatory needs a finite interval; bound the tail separately")
    if a == b:
        return 0.0, 0.0
    n0 = 1
    if wavenumber > 0:
        n0 = max(1, math.ceil((b - a) / (0.5 * math.pi / wavenumber)))
    return _composite(f, a, b, spec, n0)
