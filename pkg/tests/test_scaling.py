import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from confined_compton.errors import DomainError
from confined_compton.infotheory import closed_1s_measures
from confined_compton.pipeline import compute
from confined_compton.radial import StateSpec, solve_energy
from confined_compton.scaling import (
    ScaleMap, reference_spec, scale_energy, scale_entropies, scale_moments, scale_profile,
)

ROUND_TRIP = list(itertools.product([2.0, 3.0, 4.0, 5.0], [0.5, 1.0, 2.0]))
STATES = [(1, 0), (2, 1), (3, 0)]


def test_reference_spec():
    assert reference_spec(StateSpec(2.0, 5.0, 1, 0)) == StateSpec(1.0, 10.0, 1, 0)
    assert reference_spec(StateSpec(1.0, 3.0, 2, 1)) == StateSpec(1.0, 3.0, 2, 1)
    assert reference_spec(StateSpec.free(1, 0, 5.0)) == StateSpec.free(1, 0)


def test_scale_map():
    assert ScaleMap(4.0).lam * 4.0 == 1.0
    with pytest.raises(DomainError):
        ScaleMap(0.0)
    with pytest.raises(DomainError):
        scale_energy(-0.5, -1.0)


def test_simple_values():
    assert scale_energy(-0.5, 2.0) == -2.0
    assert scale_energy(-0.3, 1.0) == -0.3
    assert scale_energy(solve_energy(StateSpec(1.0, 10.0, 1, 0)), 2.0) == pytest.approx(
        solve_energy(StateSpec(2.0, 5.0, 1, 0)), rel=1e-8)
    assert scale_moments({2: 1.0, 0: 1.0}, 3.0) == {2: 9.0, 0: 1.0}
    m = scale_moments({-1: 2 * 1.35812218}, 5.0)
    assert m[-1] / 2 == pytest.approx(1.35812218 / 5)


def test_free_profile_and_entropies():
    ref = compute(StateSpec.free(1, 0))
    cp = scale_profile(ref.cp, 3.0)
    assert cp.J0 == pytest.approx(8 / (3 * math.pi) / 3, rel=1e-10)
    assert scale_profile(ref.cp, 1.0) is ref.cp
    s4 = scale_entropies(ref.info, 4.0)
    assert s4.shannon == pytest.approx(0.411391858 + 0.5 * math.log(4), abs=1e-8)
    assert scale_entropies(ref.info, 3.0).onicescu == pytest.approx(0.27852115 / 3, abs=1e-8)
    assert scale_entropies(ref.info, 1.0) is ref.info


def test_normalization_is_scale_invariant():
    ref = compute(StateSpec(1.0, 4.0, 2, 0)).cp
    for Z in (0.5, 2.0, 7.0):
        cp = scale_profile(ref, Z)
        assert cp.integral(cp.J_nodes) + cp.tail_half_norm == pytest.approx(
            ref.integral(ref.J_nodes) + ref.tail_half_norm, rel=1e-13)


@pytest.mark.parametrize("Z, rc", ROUND_TRIP)
def test_round_trip_against_direct_solve(Z, rc):
    for n, l in STATES:
        spec = StateSpec(Z, rc, n, l)
        direct = compute(spec)
        ref = compute(reference_spec(spec))
        assert scale_energy(ref.record.energy, Z) == pytest.approx(direct.record.energy, rel=1e-6)
        cp = scale_profile(ref.cp, Z)
        q = np.linspace(0, 6 * Z, 121)
        assert np.allclose(cp(q), direct.cp(q), rtol=1e-6, atol=1e-12)
        for m, v in scale_moments(ref.record.moments, Z).items():
            assert v == pytest.approx(direct.record.moments[m], rel=1e-6)
        info = scale_entropies(ref.info, Z)
        assert info.shannon == pytest.approx(direct.info.shannon, rel=1e-6)
        assert info.onicescu == pytest.approx(direct.info.onicescu, rel=1e-6)


@given(st.floats(0.2, 20.0))
def test_entropies_monotone_in_Z(Z):
    ref = closed_1s_measures(1.0)
    lo, hi = scale_entropies(ref, Z), scale_entropies(ref, Z * 1.1)
    assert hi.shannon > lo.shannon
    assert hi.onicescu < lo.onicescu
