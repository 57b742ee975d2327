import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tomokit.dynamics_bec import (
    STANDARD_PARAMS,
    BecInitialSpec,
    BecParams,
    apply_M,
    bec_revival_check,
    evolve_bec,
    evolve_psi00,
    evolve_psi10,
    evolve_psi11,
    fractional_revival_components,
    mode_amplitudes,
)
from tomokit.fock import FockState2, fidelity, make_cs, make_pacs, product_state

from oracles import evolve_dense, pacs_product_dense, sector_mask

SQ10 = math.sqrt(10)
T_GRID = np.linspace(0, math.pi, 20)


def test_params_derived():
    p = STANDARD_PARAMS
    assert p.lambda1 == pytest.approx(5)
    assert p.gamma == pytest.approx(math.acos(3 / 5))
    assert 0 <= BecParams(1, -3, 4, 1).gamma <= math.pi
    with pytest.raises(ValueError):
        BecParams(1, 0, 0, 1)


def test_psi00_at_zero_is_product():
    spec = BecInitialSpec(0.7 + 0.2j, -0.4j)
    psi = evolve_psi00(spec, STANDARD_PARAMS, 0.0)
    ref = product_state(make_cs(spec.alpha_a), make_cs(spec.alpha_b))
    assert fidelity(psi, ref) == pytest.approx(1, abs=1e-12)


def test_half_revival_amplitudes():
    spec = BecInitialSpec(SQ10, SQ10)
    a, b = mode_amplitudes(spec, STANDARD_PARAMS, math.pi / 2)
    assert a == pytest.approx(2j / SQ10, abs=1e-12)
    assert b == pytest.approx(14j / SQ10, abs=1e-12)


def test_eps_range():
    with pytest.raises(ValueError):
        evolve_psi00(BecInitialSpec(1, 1), STANDARD_PARAMS, 0.1, eps=1e-3)


@given(st.complex_numbers(max_magnitude=3), st.complex_numbers(max_magnitude=3), st.floats(0, 10))
@settings(max_examples=50, deadline=None)
def test_mode_rotation_conserves_number(aa, ab, t):
    spec = BecInitialSpec(aa, ab)
    a, b = mode_amplitudes(spec, STANDARD_PARAMS, t)
    assert abs(a) ** 2 + abs(b) ** 2 == pytest.approx(spec.total_mean, abs=1e-12 * max(1, spec.total_mean))


def _sector_populations(c):
    c = np.asarray(c)
    K = np.add.outer(np.arange(c.shape[0]), np.arange(c.shape[1]))
    return np.bincount(K.ravel(), weights=(np.abs(c) ** 2).ravel())


@pytest.mark.parametrize("m1,m2", [(0, 0), (1, 0), (1, 1), (2, 1)])
def test_total_number_distribution_conserved(m1, m2):
    spec = BecInitialSpec(1.0, 0.5j, m1, m2)
    ref = _sector_populations(evolve_bec(spec, STANDARD_PARAMS, 0.0).coeffs)
    for t in (0.3, 1.1, 2.9):
        pops = _sector_populations(evolve_bec(spec, STANDARD_PARAMS, t).coeffs)
        np.testing.assert_allclose(pops[: ref.size], ref, atol=1e-10)


def test_apply_M_identity():
    spec = BecInitialSpec(1, 1)
    psi = evolve_psi00(spec, STANDARD_PARAMS, 0.4)
    assert apply_M(0, 0, STANDARD_PARAMS, 0.4, psi) is psi


def test_apply_M_rejects_mismatched_provenance():
    spec = BecInitialSpec(1, 1)
    psi = evolve_psi00(spec, STANDARD_PARAMS, 0.4)
    with pytest.raises(ValueError):
        apply_M(1, 0, STANDARD_PARAMS, 0.5, psi)
    with pytest.raises(ValueError):
        apply_M(1, 0, BecParams(10, 3, 4, 2), 0.4, psi)
    bare = FockState2(psi.coeffs)
    with pytest.raises(ValueError):
        apply_M(1, 0, STANDARD_PARAMS, 0.4, bare)


@pytest.mark.parametrize("alpha", [(1.0, 1.0), (SQ10, SQ10), (0.6 + 0.3j, -0.8j)])
def test_apply_M_matches_psi10_closed_form(alpha):
    spec = BecInitialSpec(*alpha, 1, 0)
    for t in T_GRID:
        psi = apply_M(1, 0, STANDARD_PARAMS, t, evolve_psi00(spec, STANDARD_PARAMS, t))
        assert fidelity(psi, evolve_psi10(spec, STANDARD_PARAMS, t)) == pytest.approx(1, abs=1e-10)


@pytest.mark.parametrize("alpha", [(1.0, 1.0), (SQ10, SQ10), (0.6 + 0.3j, -0.8j)])
def test_apply_M_matches_psi11_closed_form(alpha):
    spec = BecInitialSpec(*alpha, 1, 1)
    for t in T_GRID:
        psi = apply_M(1, 1, STANDARD_PARAMS, t, evolve_psi00(spec, STANDARD_PARAMS, t))
        assert fidelity(psi, evolve_psi11(spec, STANDARD_PARAMS, t)) == pytest.approx(1, abs=1e-10)


def test_closed_forms_at_zero():
    spec = BecInitialSpec(0.8, 0.3 - 0.5j, 1, 1)
    ref10 = product_state(make_pacs(spec.alpha_a, 1), make_cs(spec.alpha_b))
    ref11 = product_state(make_pacs(spec.alpha_a, 1), make_pacs(spec.alpha_b, 1))
    assert fidelity(evolve_psi10(spec, STANDARD_PARAMS, 0.0), ref10) == pytest.approx(1, abs=1e-10)
    assert fidelity(evolve_psi11(spec, STANDARD_PARAMS, 0.0), ref11) == pytest.approx(1, abs=1e-10)


def test_closed_forms_normalized():
    spec = BecInitialSpec(1, 1, 1, 1)
    for t in T_GRID:
        for f in (evolve_psi10, evolve_psi11):
            c = f(spec, STANDARD_PARAMS, t).coeffs
            assert np.vdot(c, c).real == pytest.approx(1, abs=1e-10)


@pytest.mark.parametrize("m1,m2", [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (2, 1)])
@pytest.mark.parametrize("params", [STANDARD_PARAMS, BecParams(0.3, -0.7, 1.1, 0.45)])
def test_apply_M_against_dense_exponential(m1, m2, params):
    # H conserves N_tot, so sectors K <= L evolve exactly inside a box of side L
    L = 6
    aa, ab = 0.45 + 0.1j, -0.3j
    spec = BecInitialSpec(aa, ab, m1, m2)
    c0 = pacs_product_dense(aa, ab, m1, m2, L)
    mask = sector_mask(L, L)
    c0 = np.where(mask, c0, 0)
    kappa = spec.kappa
    for t in (0.0, 0.37, 1.9):
        dense = evolve_dense(c0, params, t) / kappa
        got = evolve_bec(spec, params, t).padded(L + 20, L + 20)[: L + 1, : L + 1]
        np.testing.assert_allclose(np.where(mask, got, 0), np.where(mask, dense, 0), atol=1e-8)


def test_revival_check_examples():
    r = bec_revival_check(STANDARD_PARAMS)
    assert r.is_revival_system and (r.m, r.m_prime) == (10, 5)
    assert r.T_rev == pytest.approx(math.pi)
    r2 = bec_revival_check(BecParams(10, 0, 4, 1))
    assert not r2.is_revival_system and r2.m_prime == 4 and r2.T_rev is None
    assert not bec_revival_check(BecParams(10.5, 3, 4, 1)).is_revival_system
    assert bec_revival_check(BecParams(10 + 1e-10, 3, 4, 1)).is_revival_system
    with pytest.raises(ValueError):
        bec_revival_check(BecParams(10, 3, 4, 0))


def test_full_revival():
    spec = BecInitialSpec(1.2, 0.4j)
    psi0 = evolve_psi00(spec, STANDARD_PARAMS, 0.0)
    assert fidelity(psi0, evolve_psi00(spec, STANDARD_PARAMS, math.pi)) == pytest.approx(1, abs=1e-10)


def test_fractional_s1():
    d = fractional_revival_components(STANDARD_PARAMS, 1, 1, 1)
    assert len(d.terms) == 1 and abs(d.terms[0][0]) == pytest.approx(1, abs=1e-12)


def test_fractional_s2_closed_form():
    d = fractional_revival_components(STANDARD_PARAMS, 2, SQ10, SQ10)
    coeffs = sorted((complex(c) for c, _, _ in d.terms), key=lambda z: z.imag)
    assert coeffs[0] == pytest.approx((1 - 1j) / 2, abs=1e-12)
    assert coeffs[1] == pytest.approx((1 + 1j) / 2, abs=1e-12)
    amps = sorted(((a, b) for _, a, b in d.terms), key=lambda ab: ab[0].imag)
    assert amps[0][0] == pytest.approx(-2j / SQ10, abs=1e-12)
    assert amps[0][1] == pytest.approx(-14j / SQ10, abs=1e-12)
    assert amps[1][0] == pytest.approx(2j / SQ10, abs=1e-12)
    assert amps[1][1] == pytest.approx(14j / SQ10, abs=1e-12)


@pytest.mark.parametrize("s", range(1, 9))
def test_fractional_reconstruction(s):
    spec = BecInitialSpec(SQ10, SQ10)
    d = fractional_revival_components(STANDARD_PARAMS, s, spec.alpha_a, spec.alpha_b)
    assert sum(abs(c) ** 2 for c, _, _ in d.terms) == pytest.approx(1, abs=1e-12)
    psi = evolve_psi00(spec, STANDARD_PARAMS, math.pi / s)
    assert fidelity(psi, d.assemble(psi.n_max_a)) == pytest.approx(1, abs=1e-10)


def test_fractional_rejects_non_revival():
    with pytest.raises(ValueError):
        fractional_revival_components(BecParams(10, 0, 4, 1), 2, 1, 1)
    with pytest.raises(ValueError):
        fractional_revival_components(STANDARD_PARAMS, 0, 1, 1)
