"""State -> energy, momentum density, Compton profile and information measures.

``compute`` is the single entry point used by the CLI, the scripts and the
acceptance tests. Results are cached per (state, quadrature, route) so that
tables sharing states do not repeat the transform.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

from .compton import ComptonProfile, build_profile, moment_from_profile
from .errors import DivergenceError, DomainError
from .infotheory import InfoMeasures, entropic_tail_bound, info_measures
from .momentum import MomentumDensity, build_emd, closed_form_emd
from .radial import RadialSolution, StateSpec, p2_virial, p4_position, solve_state
from .specfun import DEFAULT_QUADRATURE, QuadratureSpec

ENERGY_TOL = 1e-11
ROUTES = ("numeric", "closed")


@dataclass(frozen=True)
class Diagnostics:
    raw_norm: float
    half_norm_residual: float
    p_max: float
    tail_exponent: int
    clamp_count: int
    norm_residual: float
    node_count: int
    tail_bound: float


@dataclass(frozen=True)
class ResultRecord:
    """Scalar results for one state; ``tolerances`` maps field name -> tolerance."""

    spec: StateSpec
    energy: float
    J0: float
    moments: dict
    p2_virial: float
    p4_position: float
    shannon: float
    onicescu: float
    entropic_moments: tuple
    diagnostics: Diagnostics
    tolerances: dict = field(default_factory=dict)
    route: str = "numeric"

    def as_dict(self) -> dict:
        s = self.spec
        t = self.tolerances

        def v(name, x):
            return {"value": x, "tol": t[name]}

        return {
            "state": s.label,
            "n": s.n,
            "l": s.l,
            "Z": s.Z,
            "rc": s.rc if s.confined else "inf",
            "route": self.route,
            "energy_au": v("energy", self.energy),
            "J0_au": v("J0", self.J0),
            "moments_au": {str(m): v("moments", x) for m, x in self.moments.items()},
            "p2_virial_au": v("p2_virial", self.p2_virial),
            "p4_position_au": v("p4_position", self.p4_position),
            "shannon": v("shannon", self.shannon),
            "onicescu_au": v("onicescu", self.onicescu),
            "entropic_moments": {f"{a:g}": {"value": w, "tol": t["entropic_moments"][a]}
                                 for a, w in self.entropic_moments},
            "diagnostics": asdict(self.diagnostics),
        }


@dataclass(frozen=True, eq=False)
class StateResult:
    sol: RadialSolution | None
    emd: MomentumDensity
    cp: ComptonProfile
    info: InfoMeasures
    record: ResultRecord


def _moments(cp, sol, ms):
    out = {}
    for m in ms:
        try:
            out[m] = moment_from_profile(cp, m)
        except DivergenceError:
            # hard-wall profiles: only <p^4> has a finite position-space value
            out[m] = p4_position(sol) if m == 4 and sol is not None else math.inf
    return out


@lru_cache(maxsize=512)
def _profile(spec: StateSpec, qspec: QuadratureSpec, route: str, p_max: float | None):
    """The expensive part, cached on normalized arguments."""
    sol = solve_state(spec, tol=ENERGY_TOL)
    if route == "closed":
        emd = closed_form_emd(spec, qspec, p_max)
    else:
        emd = build_emd(sol, qspec, p_max)
    return sol, emd, build_profile(emd)


def compute(spec: StateSpec, qspec: QuadratureSpec = DEFAULT_QUADRATURE, route: str = "numeric",
            p_max: float | None = None, moments: tuple = (-1, 1, 2), alphas: tuple = ()) -> StateResult:
    """Full pipeline for one state.

    route="closed" uses the exact free momentum wavefunction (free states only);
    "numeric" transforms the solved radial function.
    """
    if route not in ROUTES:
        raise DomainError(f"route must be one of {ROUTES}, got {route!r}")
    if route == "closed" and spec.confined:
        raise DomainError("the closed route exists for free states only")
    sol, emd, cp = _profile(spec, qspec, route, None if p_max is None else float(p_max))
    info = info_measures(cp, tuple(alphas))
    rtol = qspec.relative_tolerance
    diag = Diagnostics(
        raw_norm=emd.raw_norm,
        half_norm_residual=cp.half_norm_residual,
        p_max=emd.p_max,
        tail_exponent=emd.tail_exponent,
        clamp_count=cp.clamp_count,
        norm_residual=sol.norm_residual,
        node_count=sol.node_count,
        tail_bound=info.tail_bound,
    )
    tols = {
        "energy": ENERGY_TOL,
        "J0": rtol,
        "moments": rtol,
        "p2_virial": ENERGY_TOL,
        "p4_position": rtol,
        "shannon": max(rtol, info.tail_bound),
        "onicescu": rtol,
        "entropic_moments": {a: max(rtol, entropic_tail_bound(cp, a)) for a, _ in info.entropic_moments},
    }
    rec = ResultRecord(
        spec=spec,
        energy=sol.energy,
        J0=cp.J0,
        moments=_moments(cp, sol, tuple(moments)),
        p2_virial=p2_virial(sol),
        p4_position=p4_position(sol),
        shannon=info.shannon,
        onicescu=info.onicescu,
        entropic_moments=info.entropic_moments,
        diagnostics=diag,
        tolerances=tols,
        route=route,
    )
    return StateResult(sol, emd, cp, info, rec)


def record(spec: StateSpec, qspec: QuadratureSpec = DEFAULT_QUADRATURE, **kw) -> ResultRecord:
    return compute(spec, qspec, **kw).record
