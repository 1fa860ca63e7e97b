"""Shannon entropy, Onicescu energy and entropic moments of Compton profiles.

All integrals run over the half line q >= 0, where integral J dq = 1/2.
The convention x ln x = 0 at x = 0 is used at zeros of J.

Beyond q_max, free-state profiles follow the asymptotic tail of the
momentum density, J ~ K q^-(2l+6) at leading order; that part is integrated
with Gauss nodes after the map q = q_max t^(-1/nu), which flattens the
power law. Confined profiles decay like q^-4 with a ripple; their tail is
estimated from the leading power and reported as a bound, not added.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import xlogy

from .compton import ComptonProfile
from .errors import AccuracyError, DomainError
from .radial import StateSpec
from .specfun import beta, gauss_legendre

_TAIL_LIMIT = 1e-4


@dataclass(frozen=True)
class InfoMeasures:
    spec: StateSpec
    shannon: float
    onicescu: float
    entropic_moments: tuple = ()
    route: str = "numeric"
    tail_bound: float = 0.0


@dataclass(frozen=True, eq=False)
class EntropyDensity:
    q: np.ndarray
    density: np.ndarray
    integral: float


def _power_tail(cp: ComptonProfile):
    """(K, k) with J ~ K q^-k beyond q_max."""
    k = cp.tail.decay_exponent
    P = cp.q_max
    return cp.J_edges[-1] * P**k, k


def _tail_check(name, tail, total):
    if abs(tail) > _TAIL_LIMIT * max(abs(total), 1e-300):
        raise AccuracyError(f"{name}: tail correction {tail:.3e} exceeds {_TAIL_LIMIT:g} of the total {total:.6g}")


def _free_tail(cp: ComptonProfile, g, nu: float) -> float:
    """integral_{q_max}^inf g(J) dq for a free-state profile, nu ~ decay power of g minus 1."""
    x, w = gauss_legendre(32)
    # two panels on t in (0, 1], the lower one graded towards t = 0
    t = np.concatenate([0.05 * (x + 1) / 2, 0.05 + 0.95 * (x + 1) / 2])
    wt = np.concatenate([0.05 * w / 2, 0.95 * w / 2])
    P = cp.q_max
    q = P * t ** (-1.0 / nu)
    J = np.asarray(cp(q), dtype=float)
    return float(np.dot(wt, g(J) * P / nu * t ** (-1.0 / nu - 1.0)))


def _shannon_tail(K, k, P):
    # -integral_P^inf K q^-k (ln K - k ln q) dq
    a = P ** (1 - k) / (k - 1)
    return -K * math.log(K) * a + k * K * (a * math.log(P) + a / (k - 1)) if K > 0 else 0.0


def shannon_of_profile(cp: ComptonProfile) -> float:
    """S = -integral_0^inf J ln J dq."""
    body = -float(np.dot(cp.weights, xlogy(cp.J_nodes, cp.J_nodes)))
    K, k = _power_tail(cp)
    tail = _shannon_tail(K, k, cp.q_max)
    _tail_check(f"Shannon entropy of {cp.spec}", tail, body)
    if cp.tail.has_wall:
        return body
    return body + _free_tail(cp, lambda J: -xlogy(J, J), k - 1.0)


def entropic_moment(cp: ComptonProfile, alpha: float) -> float:
    """omega^alpha = integral_0^inf J^alpha dq."""
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    K, k = _power_tail(cp)
    if alpha * k <= 1:
        raise DomainError(f"omega^{alpha} diverges for {cp.spec}: need alpha > 1/{k}")
    body = float(np.dot(cp.weights, cp.J_nodes**alpha))
    if alpha == 1:
        return body + cp.tail_half_norm
    tail = K**alpha * cp.q_max ** (1 - alpha * k) / (alpha * k - 1) if K > 0 else 0.0
    if alpha == 2:
        _tail_check(f"Onicescu energy of {cp.spec}", tail, body)
    if cp.tail.has_wall:
        return body
    return body + _free_tail(cp, lambda J: J**alpha, alpha * k - 1.0)


def onicescu_of_profile(cp: ComptonProfile) -> float:
    """E = integral_0^inf J^2 dq."""
    return entropic_moment(cp, 2.0)


def tail_bound(cp: ComptonProfile) -> float:
    """Size of the neglected entropy tail for hard-wall profiles (0 for free ones)."""
    if not cp.tail.has_wall:
        return 0.0
    K, k = _power_tail(cp)
    return 2.0 * abs(_shannon_tail(K, k, cp.q_max))


def entropic_tail_bound(cp: ComptonProfile, alpha: float) -> float:
    """Size of the neglected omega^alpha tail for hard-wall profiles (0 for free ones)."""
    if not cp.tail.has_wall or alpha == 1:
        return 0.0
    K, k = _power_tail(cp)
    if alpha * k <= 1:
        raise DomainError(f"omega^{alpha} diverges for {cp.spec}: need alpha > 1/{k}")
    return 2.0 * K**alpha * cp.q_max ** (1 - alpha * k) / (alpha * k - 1) if K > 0 else 0.0


def info_measures(cp: ComptonProfile, alphas=()) -> InfoMeasures:
    moments = tuple((float(a), entropic_moment(cp, a)) for a in alphas)
    return InfoMeasures(cp.spec, shannon_of_profile(cp), onicescu_of_profile(cp), moments, "numeric", tail_bound(cp))


def entropy_density_curve(cp: ComptonProfile) -> EntropyDensity:
    """-J ln J on the merged q-grid; ``integral`` is the Shannon entropy."""
    return EntropyDensity(cp.q, -xlogy(cp.J, cp.J), shannon_of_profile(cp))


# ---------------------------------------------------------------------------
# free 1s closed forms, J = 8/(3 pi Z) (1 + (q/Z)^2)^-3


def closed_1s_entropic_moment(alpha: float, Z: float = 1.0) -> float:
    """(8/(3 pi))^alpha Z^(1-alpha) 2^(6 alpha - 3) B((6 alpha - 1)/2, (6 alpha - 1)/2)."""
    if not alpha > 1.0 / 6.0:
        raise DomainError(f"the 1s entropic moment diverges for alpha <= 1/6, got {alpha}")
    if not Z > 0:
        raise DomainError("Z must be positive")
    a = 0.5 * (6.0 * alpha - 1.0)
    return (8.0 / (3.0 * math.pi)) ** alpha * Z ** (1.0 - alpha) * 2.0 ** (6.0 * alpha - 3.0) * beta(a, a)


def closed_1s_onicescu(Z: float = 1.0) -> float:
    if not Z > 0:
        raise DomainError("Z must be positive")
    return 7.0 / (8.0 * math.pi * Z)


def closed_1s_shannon(Z: float = 1.0) -> float:
    if not Z > 0:
        raise DomainError("Z must be positive")
    return 0.5 * math.log(24.0 * math.pi) + 0.5 * math.log(Z) - 1.75


def closed_1s_measures(Z: float = 1.0, alphas=()) -> InfoMeasures:
    moments = tuple((float(a), closed_1s_entropic_moment(a, Z)) for a in alphas)
    return InfoMeasures(StateSpec.free(1, 0, Z), closed_1s_shannon(Z), closed_1s_onicescu(Z), moments, "closed-form")


def rescaled_measures(info: InfoMeasures, Z: float) -> InfoMeasures:
    """Measures of J_Z(q) = J(q/Z)/Z from those of J."""
    spec = info.spec
    return replace(
        info,
        spec=StateSpec(spec.Z * Z, spec.rc / Z, spec.n, spec.l),
        shannon=info.shannon + 0.5 * math.log(Z),
        onicescu=info.onicescu / Z,
        entropic_moments=tuple((a, Z ** (1.0 - a) * w) for a, w in info.entropic_moments),
        tail_bound=info.tail_bound,
    )
