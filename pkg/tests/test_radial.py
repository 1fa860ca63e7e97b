import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from confined_compton.errors import ContractError, DomainError
from confined_compton.radial import (
    GridPolicy, StateSpec, expect_inverse_r, free_energy, hydrogenic_u, kummer_u, p2_gradient, p2_virial,
    p4_position, solve_energy, solve_state,
)

# [DERIVED] energies and <p^4> from tests/oracles.py (scipy DOP853 shooting + brentq + quad)
ORACLE = [
    # (Z, rc, n, l, E, p4)
    (1.0, 1.0, 1, 0, 2.3739908661045948, None),
    (1.0, 0.5, 1, 0, 14.747970030353915, 1636.1569172792738),
    (1.0, 5.0, 1, 0, -0.49641700659142557, 5.171034216837427),
    (1.0, 0.1, 2, 1, 991.0075894410351, 4077013.91328128),
    (2.0, 1.0, 2, 1, 6.304075142426574, 425.43407387110955),
    (1.0, 0.2, 3, 2, 407.04289854518873, 689670.182606397),
]


@pytest.mark.parametrize("Z, rc, n, l, E, p4", ORACLE)
def test_energy_against_shooting_oracle(Z, rc, n, l, E, p4):
    sol = solve_state(StateSpec(Z, rc, n, l))
    assert sol.energy == pytest.approx(E, rel=1e-10, abs=1e-11)
    if p4 is not None:
        assert p4_position(sol) == pytest.approx(p4, rel=1e-7)


@pytest.mark.parametrize("rc, n, l, E", [
    (2.0, 1, 0, -1 / 8),    # node of the free 2s
    (6.0, 2, 1, -1 / 18),   # node of the free 3p
    (12.0, 3, 2, -1 / 32),  # node of the free 4d
])
def test_exact_confined_energies_at_free_nodes(rc, n, l, E):
    assert solve_energy(StateSpec(1.0, rc, n, l)) == pytest.approx(E, abs=1e-11)


def test_root_on_bisection_point():
    # E(1s; Z=2, rc=1) = 4 E(1s; Z=1, rc=2) = -1/2 exactly
    assert solve_energy(StateSpec(2.0, 1.0, 1, 0)) == pytest.approx(-0.5, abs=1e-11)


@pytest.mark.parametrize("Z, rc, n, l", [(3.0, 10.0, 1, 0), (5.0, 10.0, 1, 0), (1.0, 60.0, 2, 1)])
def test_wall_beyond_resolution_gives_free_energy(Z, rc, n, l):
    # the confinement shift is far below rounding; the node count at E_free is unreliable there
    sol = solve_state(StateSpec(Z, rc, n, l))
    assert sol.energy == pytest.approx(-Z * Z / (2 * n * n), rel=1e-12)
    assert sol.node_count == n - l - 1
    assert sol.integrate(sol.u**2) == pytest.approx(1.0, abs=1e-10)


def test_free_energy_and_state():
    assert free_energy(StateSpec.free(3, 1, 2.0)) == pytest.approx(-4 / 18)
    sol = solve_state(StateSpec.free(2, 0))
    assert sol.energy == -0.125
    assert p2_virial(sol) == pytest.approx(0.25, rel=1e-12)
    assert p4_position(sol) == pytest.approx(13 / 16, rel=1e-10)


@pytest.mark.parametrize("n, l, p4", [(1, 0, 5.0), (2, 1, 7 / 48), (3, 2, 1 / 45)])
def test_free_p4(n, l, p4):
    # <p^4> = (8n - 3(2l+1)) / (n^4 (2l+1))
    assert (8 * n - 3 * (2 * l + 1)) / (n**4 * (2 * l + 1)) == pytest.approx(p4)
    assert p4_position(solve_state(StateSpec.free(n, l))) == pytest.approx(p4, rel=1e-10)


def test_spec_validation():
    with pytest.raises(DomainError):
        StateSpec(1.0, 1.0, 2, 2)
    with pytest.raises(DomainError):
        StateSpec(0.0, 1.0, 1, 0)
    with pytest.raises(DomainError):
        StateSpec(1.0, -1.0, 1, 0)
    with pytest.raises(ContractError):
        solve_energy(StateSpec.free(1, 0))
    assert str(StateSpec(1.0, 0.5, 3, 2)) == "3d(Z=1, rc=0.5)"


def test_kummer_form_matches_solution():
    sol = solve_state(StateSpec(1.0, 10.0, 2, 0))
    assert sol.energy < 0
    r = np.linspace(0.3, 9.5, 9)
    ratio = sol.evaluate(r)[0] / kummer_u(sol.spec, sol.energy, r)
    assert np.allclose(ratio, ratio[0], rtol=1e-9)
    with pytest.raises(DomainError):
        kummer_u(sol.spec, 1.0, r)


def test_hydrogenic_u_normalized_and_derivative():
    spec = StateSpec.free(3, 1)
    r = np.linspace(1e-3, 80, 200001)
    u, du = hydrogenic_u(spec, r)
    assert np.trapezoid(u * u, r) == pytest.approx(1.0, abs=1e-8)
    assert np.allclose(np.gradient(u, r)[5:-5], du[5:-5], atol=1e-6)


states = st.tuples(st.integers(1, 5), st.integers(0, 4)).filter(lambda t: t[1] < t[0])


@settings(max_examples=15)
@given(states, st.floats(0.1, 12.0), st.floats(1.0, 4.0))
def test_solution_invariants(nl, rc, Z):
    n, l = nl
    sol = solve_state(StateSpec(Z, rc, n, l))
    assert sol.node_count == n - l - 1
    assert sol.integrate(sol.u**2) == pytest.approx(1.0, abs=1e-10)
    assert sol.norm_residual < 1e-9
    assert sol.u[-1] == pytest.approx(0.0, abs=1e-8 * np.max(np.abs(sol.u)))
    assert p2_virial(sol) == pytest.approx(p2_gradient(sol), rel=1e-8)


@settings(max_examples=12)
@given(states, st.floats(0.2, 8.0), st.floats(1.05, 3.0))
def test_energy_decreases_with_radius(nl, rc, factor):
    n, l = nl
    assert solve_energy(StateSpec(1.0, rc * factor, n, l)) < solve_energy(StateSpec(1.0, rc, n, l))


@settings(max_examples=12)
@given(st.integers(0, 4), st.floats(0.1, 10.0))
def test_energy_increases_with_n(l, rc):
    e = [solve_energy(StateSpec(1.0, rc, n, l)) for n in range(l + 1, l + 4)]
    assert e[0] < e[1] < e[2]


def test_large_radius_approaches_free():
    sol = solve_state(StateSpec(1.0, 30.0, 1, 0))
    assert sol.energy == pytest.approx(-0.5, abs=1e-10)
    assert expect_inverse_r(sol) == pytest.approx(1.0, abs=1e-9)


def test_grid_policy_changes_grid_not_answer():
    spec = StateSpec(1.0, 2.0, 2, 1)
    a = solve_state(spec)
    b = solve_state(spec, policy=GridPolicy(min_points=4000))
    assert b.grid.size > a.grid.size
    assert p2_virial(a) == pytest.approx(p2_virial(b), rel=1e-11)
    assert p4_position(a) == pytest.approx(p4_position(b), rel=1e-10)


def test_wall_slope_and_origin_coefficient():
    sol = solve_state(StateSpec(1.0, 1.0, 1, 0))
    # derivative at the wall from the oracle solution (scipy DOP853)
    assert sol.wall_slope == pytest.approx(-3.859307537371675, rel=1e-9)
    r = 1e-5
    assert sol.evaluate(np.array([r]))[0][0] / r == pytest.approx(sol.origin_coefficient, rel=1e-4)
    assert math.isfinite(sol.r_max) and sol.r_max == 1.0
