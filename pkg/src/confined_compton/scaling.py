"""Isoelectronic scaling: charge Z at radius rc <-> charge 1 at radius Z rc.

With lambda = 1/Z (atomic units) the radial equation maps r -> Z r, so

    E(Z, rc)      = Z^2 E(1, Z rc)
    J(Z, rc; q)   = J(1, Z rc; q/Z) / Z
    <p^m>(Z, rc)  = Z^m <p^m>(1, Z rc)          (m = -1 included)
    S(Z, rc)      = S(1, Z rc) + (1/2) ln Z
    E^c(Z, rc)    = E^c(1, Z rc) / Z
    w^a(Z, rc)    = Z^(1-a) w^a(1, Z rc)

Scaling acts on grids and values only; no wavefunction is recomputed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .compton import ComptonProfile, scale_profile_grid
from .errors import DomainError
from .infotheory import InfoMeasures, rescaled_measures
from .radial import StateSpec


@dataclass(frozen=True)
class ScaleMap:
    Z: float

    def __post_init__(self):
        if not self.Z > 0:
            raise DomainError(f"Z must be positive, got {self.Z}")

    @property
    def lam(self) -> float:
        return 1.0 / self.Z


def reference_spec(spec: StateSpec) -> StateSpec:
    """The Z = 1 problem equivalent to ``spec``."""
    rc = spec.rc * spec.Z if spec.confined else math.inf
    return StateSpec(1.0, rc, spec.n, spec.l)


def scale_energy(E_ref: float, Z: float) -> float:
    return ScaleMap(Z).Z ** 2 * E_ref


def scale_profile(cp_ref: ComptonProfile, Z: float) -> ComptonProfile:
    ScaleMap(Z)
    if Z == 1:
        return cp_ref
    return scale_profile_grid(cp_ref, Z)


def scale_moments(moments_ref: dict, Z: float) -> dict:
    """{m: <p^m>} at charge Z from the reference values."""
    ScaleMap(Z)
    return {m: Z**m * v for m, v in moments_ref.items()}


def scale_entropies(info_ref: InfoMeasures, Z: float) -> InfoMeasures:
    ScaleMap(Z)
    if Z == 1:
        return info_ref
    return rescaled_measures(info_ref, Z)
