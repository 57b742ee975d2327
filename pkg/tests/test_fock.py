import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tomokit.fock import (
    FockState1,
    FockState2,
    StateSpec,
    fidelity,
    hermite_functions,
    hermite_polynomial,
    laguerre,
    make_cs,
    make_fock,
    make_pacs,
    make_tcs,
    product_state,
    truncation_for,
)
from tomokit.tomography import simpson_weights

complex_alpha = st.builds(
    lambda r, ph: r * complex(math.cos(ph), math.sin(ph)),
    st.floats(0, math.sqrt(10)), st.floats(0, 2 * math.pi))


def test_cs_vacuum():
    s = make_cs(0)
    assert s.n_max == 0
    np.testing.assert_array_equal(s.coeffs, [1.0])


def test_cs_ground_population():
    s = make_cs(1, 1e-12)
    assert s.populations[0] == pytest.approx(math.exp(-1), abs=1e-12)


def test_cs_mean_number():
    s = make_cs(math.sqrt(10) * np.exp(1j * math.pi / 4))
    assert abs(s.mean_number() - 10) < 1e-9


def test_cs_tail_below_eps():
    s = make_cs(3.0, 1e-12)
    nu = 9.0
    n = np.arange(s.n_max + 1)
    from scipy.special import gammaln
    kept = np.exp(n * math.log(nu) - nu - gammaln(n + 1)).sum()
    assert 1 - kept < 1e-12


def test_eps_range_enforced():
    with pytest.raises(ValueError):
        make_cs(1.0, 1e-3)
    with pytest.raises(ValueError):
        truncation_for(1.0, 0.0)


def test_pacs_m0_is_cs():
    a = 1.3 - 0.4j
    np.testing.assert_allclose(make_pacs(a, 0).coeffs, make_cs(a).coeffs)


def test_pacs_vacuum_one_photon():
    s = make_pacs(0, 1)
    np.testing.assert_allclose(s.coeffs, [0, 1])


def test_pacs_alpha1_m1():
    # norm before division sqrt(1! L_1(-1)) = sqrt(2)
    assert math.sqrt(math.factorial(1) * laguerre(1, -1)) == pytest.approx(math.sqrt(2))
    s = make_pacs(1, 1)
    # brute force over the coefficients; equals (|a|^4 + 3|a|^2 + 1)/(1 + |a|^2) = 5/2
    brute = float(np.sum(np.arange(s.n_max + 1) * np.abs(s.coeffs) ** 2))
    assert s.mean_number() == pytest.approx(brute, abs=1e-12)
    assert brute == pytest.approx(2.5, abs=1e-12)


@given(complex_alpha, st.integers(0, 3))
@settings(max_examples=30, deadline=None)
def test_pacs_low_coefficients_vanish(alpha, m):
    s = make_pacs(alpha, m)
    assert np.all(s.coeffs[:m] == 0)
    assert abs(np.sum(s.populations) - 1) < 1e-12


def test_tcs_examples():
    np.testing.assert_allclose(make_tcs(0.7, 0).coeffs, [1])
    np.testing.assert_allclose(make_tcs(1, 1).coeffs, [1 / math.sqrt(2)] * 2)
    assert fidelity(make_tcs(math.sqrt(10), 60), make_cs(math.sqrt(10), 1e-12)) > 1 - 1e-10


def test_tcs_normalization_uses_square_root():
    a, N = 1.5, 4
    c = make_tcs(a, N).coeffs
    norm = math.sqrt(sum(a ** (2 * n) / math.factorial(n) for n in range(N + 1)))
    np.testing.assert_allclose(c, [a**n / math.sqrt(math.factorial(n)) / norm for n in range(N + 1)])


def test_state_spec_build():
    assert StateSpec("fock", n=3).build().coeffs[3] == 1
    assert StateSpec("TCS", alpha=1, n_max=1).build().n_max == 1
    with pytest.raises(ValueError):
        StateSpec("SQUEEZED")
    with pytest.raises(ValueError):
        StateSpec("PACS", m=-1)


def test_state_validation():
    with pytest.raises(ValueError):
        FockState1([1.0, 1.0])
    with pytest.raises(ValueError):
        FockState2(np.ones((2, 2)))
    s = make_cs(1)
    with pytest.raises(ValueError):
        s.coeffs[0] = 0


def test_hermite_values():
    h = hermite_functions(0.0, 3)
    assert h[0] == pytest.approx(math.pi ** -0.25, abs=1e-12)
    assert h[0] == pytest.approx(0.7511255, abs=1e-7)
    assert h[1] == 0


def test_hermite_orthonormality():
    x = np.arange(-2000, 2001) * 0.01
    h = hermite_functions(x, 50)
    w = simpson_weights(x.size, 0.01)
    gram = (h * w) @ h.T
    assert np.max(np.abs(gram - np.eye(51))) < 1e-10


def test_hermite_no_overflow():
    x = np.linspace(-60, 60, 241)
    h = hermite_functions(x, 2000)
    assert np.all(np.isfinite(h))
    assert np.max(np.abs(h)) < 1.0


def test_hermite_polynomial_matches_numpy():
    x = np.linspace(-6, 6, 25)
    for n in (0, 1, 5, 12, 20):
        coef = np.zeros(n + 1)
        coef[n] = 1
        ref = np.polynomial.hermite.hermval(x, coef)
        np.testing.assert_allclose(hermite_polynomial(n, x), ref, rtol=1e-12, atol=1e-12)


def test_hermite_matches_closed_form_low_orders():
    x = np.linspace(-5, 5, 11)
    h = hermite_functions(x, 2)
    g = np.exp(-x**2 / 2) * math.pi ** -0.25
    np.testing.assert_allclose(h[2], (4 * x**2 - 2) * g / math.sqrt(8), atol=1e-14)


def test_laguerre():
    assert laguerre(0, 3.7) == 1
    assert laguerre(1, -1) == 2
    assert laguerre(2, -10) == pytest.approx(71)
    from scipy.special import eval_laguerre
    for m in range(8):
        assert laguerre(m, -2.5) == pytest.approx(eval_laguerre(m, -2.5), rel=1e-12)


def test_product_state():
    v = product_state(make_cs(0), make_cs(0))
    assert v.coeffs[0, 0] == 1
    p = product_state(make_cs(1), make_cs(1))
    assert abs(np.vdot(p.coeffs, p.coeffs).real - 1) < 1e-12
    assert p.mean_total_number() == pytest.approx(2, abs=1e-9)


def test_fidelity_examples():
    s = make_cs(0.3 + 0.2j)
    assert fidelity(s, s) == pytest.approx(1, abs=1e-14)
    assert fidelity(make_cs(0), make_fock(1)) == 0
    assert fidelity(make_cs(1), make_cs(-1)) == pytest.approx(math.exp(-4), abs=1e-12)
    with pytest.raises(TypeError):
        fidelity(s, product_state(s, s))


@given(complex_alpha, complex_alpha, st.floats(0, 2 * math.pi))
@settings(max_examples=30, deadline=None)
def test_fidelity_symmetric_and_phase_invariant(a, b, phi):
    s1, s2 = make_cs(a), make_pacs(b, 1)
    f = fidelity(s1, s2)
    assert f == pytest.approx(fidelity(s2, s1), abs=1e-12)
    rotated = FockState1(np.asarray(s2.coeffs) * np.exp(1j * phi))
    assert fidelity(s1, rotated) == pytest.approx(f, abs=1e-12)
    assert 0 <= f <= 1


@given(complex_alpha)
@settings(max_examples=30, deadline=None)
def test_cs_overlap_formula(a):
    b = 0.5 - 0.25j
    assert fidelity(make_cs(a), make_cs(b)) == pytest.approx(math.exp(-abs(a - b) ** 2), abs=1e-12)
