import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import spherical_jn

from confined_compton.errors import ConvergenceError, DomainError
from confined_compton.specfun import (
    DEFAULT_QUADRATURE, QuadratureSpec, assoc_laguerre, beta, gauss_legendre, gegenbauer,
    integrate_oscillatory, integrate_panel, kummer_m, ln_gamma, panel_interpolate, panel_nodes,
    panel_tail_matrix, spherical_bessel_j,
)

# frozen with mpmath (dps=30): loggamma, beta, laguerre, gegenbauer, hyp1f1


def test_ln_gamma_values():
    assert ln_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-15)
    assert ln_gamma(10.3) == pytest.approx(13.4820367861383585926530059808, rel=1e-14)
    assert ln_gamma(0.37) == pytest.approx(0.876946819484879302338545171314, rel=1e-14)


def test_ln_gamma_domain():
    with pytest.raises(DomainError):
        ln_gamma(0.0)
    with pytest.raises(DomainError):
        ln_gamma(-1.5)


def test_beta_values():
    assert beta(5.5, 5.5) == pytest.approx(0.000755006169037464042751871235453, rel=1e-13)
    assert beta(8.5, 8.5) == pytest.approx(0.00000941387784008417254756535877073, rel=1e-13)
    assert beta(0.7, 2.2) == pytest.approx(0.782661571347350970294287242582, rel=1e-13)


@given(st.floats(0.1, 30), st.floats(0.1, 30))
def test_beta_symmetry_and_recurrence(a, b):
    assert beta(a, b) == pytest.approx(beta(b, a), rel=1e-13)
    # B(a+1, b) = B(a, b) a / (a + b)
    assert beta(a + 1, b) == pytest.approx(beta(a, b) * a / (a + b), rel=1e-11)


def test_laguerre_values():
    assert assoc_laguerre(5, 2.5, 1.7) == pytest.approx(-3.16735266666666650087410180466, rel=1e-13)
    assert assoc_laguerre(7, 0.5, 9.3) == pytest.approx(-7.9714161514285846605126246394, rel=1e-12)
    assert assoc_laguerre(0, 3.0, 2.0) == 1.0
    assert assoc_laguerre(1, 3.0, 2.0) == pytest.approx(2.0)


def test_laguerre_domain():
    with pytest.raises(DomainError):
        assoc_laguerre(-1, 0.0, 1.0)
    with pytest.raises(DomainError):
        assoc_laguerre(2, -1.0, 1.0)


def test_gegenbauer_values():
    assert gegenbauer(4, 1.5, 0.3) == pytest.approx(-0.168562499999999872352107743723, rel=1e-13)
    assert gegenbauer(6, 3.0, -0.7) == pytest.approx(-26.1409920000000002721662895055, rel=1e-13)


@given(st.integers(0, 12), st.floats(0.5, 6), st.floats(-1, 1))
def test_gegenbauer_parity(k, eta, t):
    assert gegenbauer(k, eta, -t) == pytest.approx((-1) ** k * gegenbauer(k, eta, t), abs=1e-10, rel=1e-12)


def test_kummer_values():
    assert kummer_m(-2.5, 3.0, 1.2) == pytest.approx(0.215762653656381106467563495209, rel=1e-13)
    assert kummer_m(0.5, 1.5, -4.0) == pytest.approx(0.441040695381210839983740517957, rel=1e-12)
    assert kummer_m(1.0, 2.0, 10.0) == pytest.approx(2202.54657948067165169579006453, rel=1e-13)


def test_kummer_terminates_for_negative_integer_a():
    # M(-2, b, x) = 1 - 2x/b + x^2/(b(b+1))
    x = np.linspace(-3, 3, 7)
    assert np.allclose(kummer_m(-2, 1.5, x), 1 - 2 * x / 1.5 + x * x / (1.5 * 2.5), rtol=1e-14)


def test_kummer_rejects_pole():
    with pytest.raises(DomainError):
        kummer_m(1.0, -2.0, 0.5)


def test_kummer_nonconvergence_is_reported():
    with pytest.raises(ConvergenceError):
        kummer_m(1.0, 2.0, 200.0, max_terms=20)


# subnormal arguments excluded: scipy returns nan there
@given(st.integers(0, 8), st.floats(0.0, 500.0, allow_subnormal=False))
def test_spherical_bessel_matches_scipy(l, x):
    # envelope-relative: |j_l| <= 1
    assert abs(spherical_bessel_j(l, x) - spherical_jn(l, x)) <= 2e-14 * max(1.0, x)


def test_spherical_bessel_small_argument_limit():
    x = 1e-6
    for l in range(9):
        df = np.prod(np.arange(1, 2 * l + 2, 2, dtype=float))
        assert spherical_bessel_j(l, x) == pytest.approx(x**l / df, rel=1e-10)


def test_spherical_bessel_domain():
    with pytest.raises(DomainError):
        spherical_bessel_j(9, 1.0)
    with pytest.raises(DomainError):
        spherical_bessel_j(0, -1.0)


@pytest.mark.parametrize("order", [8, 16, 24])
def test_gauss_legendre_exact_for_polynomials(order):
    x, w = gauss_legendre(order)
    for k in range(2 * order):
        exact = 2.0 / (k + 1) if k % 2 == 0 else 0.0
        assert np.dot(w, x**k) == pytest.approx(exact, abs=1e-14)


def test_panel_tail_matrix_integrates_monomials():
    order = 16
    x, _ = gauss_legendre(order)
    Q = panel_tail_matrix(order)
    for k in range(order):
        exact = (1.0 - x ** (k + 1)) / (k + 1)
        assert np.allclose(Q @ x**k, exact, atol=1e-13)


@given(st.floats(-1, 1))
def test_panel_interpolate_reproduces_polynomials(t):
    x, _ = gauss_legendre(12)
    vals = 3 * x**5 - x**2 + 0.5
    assert panel_interpolate(vals, t) == pytest.approx(3 * t**5 - t**2 + 0.5, abs=1e-13)


def test_panel_nodes_cover_edges():
    nodes, w = panel_nodes([0.0, 1.0, 3.0], 8)
    assert nodes.size == 16 and np.all(np.diff(nodes) > 0)
    assert w.sum() == pytest.approx(3.0, rel=1e-15)


def test_integrate_panel_finite_and_infinite():
    v, err = integrate_panel(np.exp, 0.0, 1.0)
    assert v == pytest.approx(math.e - 1, rel=1e-13)
    v, _ = integrate_panel(lambda x: np.exp(-x), 0.0, math.inf)
    assert v == pytest.approx(1.0, rel=1e-10)
    assert integrate_panel(np.exp, 2.0, 2.0) == (0.0, 0.0)


def test_integrate_panel_reports_nonconvergence():
    spec = QuadratureSpec(relative_tolerance=1e-12, panel_order=8, max_panels=16)
    with pytest.raises(ConvergenceError) as info:
        integrate_panel(lambda x: np.sqrt(np.abs(x - 0.123456)), 0.0, 1.0, spec)
    assert info.value.best_estimate is not None


@given(st.floats(1.0, 300.0))
def test_integrate_oscillatory_sine(k):
    v, _ = integrate_oscillatory(lambda x: np.sin(k * x), k, 0.0, 1.0)
    assert v == pytest.approx((1 - math.cos(k)) / k, abs=1e-12)


def test_integrate_oscillatory_domain():
    with pytest.raises(DomainError):
        integrate_oscillatory(np.sin, 1.0, 0.0, math.inf)
    with pytest.raises(DomainError):
        integrate_oscillatory(np.sin, -1.0, 0.0, 1.0)


def test_quadrature_spec_validation_and_overrides():
    with pytest.raises(DomainError):
        QuadratureSpec(relative_tolerance=0.1)
    with pytest.raises(DomainError):
        QuadratureSpec(panel_order=4)
    q = DEFAULT_QUADRATURE.with_overrides(relative_tolerance=1e-7, panel_order=None)
    assert q.relative_tolerance == 1e-7 and q.panel_order == DEFAULT_QUADRATURE.panel_order
