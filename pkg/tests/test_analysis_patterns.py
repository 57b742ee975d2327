import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tomokit.analysis_patterns import (
    BLOB_DEFAULTS,
    STRAND_DEFAULTS,
    PatternConfig,
    blob_count,
    revival_scan,
    strand_count,
    tomogram_distance,
)
from tomokit.dynamics_bec import STANDARD_PARAMS, BecInitialSpec, evolve_psi00
from tomokit.dynamics_single import PiMultiple, cubic, evolve_single, kerr, subpacket_decomposition
from tomokit.fock import FockState1, make_cs, product_state
from tomokit.tomography import ThetaGrid, XGrid, tomogram_single, tomogram_two_section

SQ10 = math.sqrt(10)
ALPHA = SQ10 * np.exp(1j * math.pi / 4)
TH = ThetaGrid.uniform(181)
XG = XGrid.for_amplitude(SQ10, 1001)


def kerr_tomogram(frac):
    s = evolve_single(make_cs(ALPHA), kerr(1), PiMultiple(Fraction(frac)))
    return tomogram_single(s, TH, XG)


def test_config_validation():
    with pytest.raises(ValueError):
        PatternConfig(0, 0.3)
    with pytest.raises(ValueError):
        PatternConfig(1.0, 0.3)
    with pytest.raises(ValueError):
        PatternConfig(0.1, -1)


def test_cs_single_strand():
    assert strand_count(tomogram_single(make_cs(ALPHA), TH, XG)).count == 1


@pytest.mark.parametrize("p", [2, 3, 4])
def test_kerr_strands(p):
    c = strand_count(kerr_tomogram(Fraction(1, p)))
    assert c.count == p
    d = c.as_dict("1/%d T_rev" % p)
    assert set(d) == {"instant", "count", "threshold", "sigma", "argmax_theta"}
    assert d["threshold"] == STRAND_DEFAULTS.relative_threshold


def test_kerr_quarter_matches_subpacket_superposition():
    p = 4
    d = subpacket_decomposition(p)
    s = make_cs(ALPHA)
    c = np.zeros(s.n_max + 1, dtype=complex)
    for fm, ang in zip(d.f, d.rotation_angles()):
        c += fm * make_cs(ALPHA * np.exp(-1j * ang)).padded(s.n_max)
    built = tomogram_single(FockState1(c / np.linalg.norm(c)), TH, XG)
    assert strand_count(built).count == strand_count(kerr_tomogram(Fraction(1, 4))).count == 4


@pytest.mark.xfail(strict=True, reason="interference fringes survive sigma=0.3 and add maxima (6 counted)")
def test_kerr_quarter_narrow_smoothing():
    assert strand_count(kerr_tomogram(Fraction(1, 4)), PatternConfig(0.05, 0.3)).count == 4


def test_strand_invariances():
    s = evolve_single(make_cs(ALPHA), kerr(1), PiMultiple(Fraction(1, 3)))
    tom = tomogram_single(s, TH, XG)
    ref = strand_count(tom).count
    assert strand_count(tomogram_single(FockState1(s.coeffs * 1j), TH, XG)).count == ref
    # theta translation by whole grid steps
    shifted = ThetaGrid(TH.values + 17 * TH.spacing)
    assert strand_count(tomogram_single(s, shifted, XG)).count == ref


def bec_section(t, alpha=SQ10, g=XGrid(9, 301)):
    psi = evolve_psi00(BecInitialSpec(alpha, alpha), STANDARD_PARAMS, t)
    return tomogram_two_section(psi, 0.0, 0.0, g)


@pytest.mark.parametrize("s,count", [(4, 4), (3, 3), (1, 1)])
def test_blob_counts(s, count):
    assert blob_count(bec_section(math.pi / s)).count == count


def test_half_revival_fringes_only():
    sec = bec_section(math.pi / 2)
    assert blob_count(sec, PatternConfig(BLOB_DEFAULTS.relative_threshold, 0.5)).count != 2
    X1, X2 = np.meshgrid(sec.x1_grid.values, sec.x2_grid.values, indexing="ij")
    ref = np.exp(-(X1**2 + X2**2)) / math.pi * (1 - np.sin(4 * (X1 + 7 * X2) / math.sqrt(5)))
    np.testing.assert_allclose(sec.values, ref, atol=1e-8)


@pytest.mark.parametrize("tau", [0.05, 0.1, 0.2, 0.3])
@pytest.mark.parametrize("sigma", [0.0, 0.3, 0.5])
def test_product_single_blob(tau, sigma):
    g = XGrid(9, 201)
    for a, b in [(0.5, 1j), (-1.2 + 0.4j, 0.0), (SQ10 / 2, -SQ10 / 2)]:
        sec = tomogram_two_section(product_state(make_cs(a), make_cs(b)), 0.3, 0.9, g)
        assert blob_count(sec, PatternConfig(tau, sigma)).count == 1


def test_tomogram_distance_examples():
    s = make_cs(ALPHA)
    H = cubic(1)
    t0 = tomogram_single(s, TH, XG)
    assert tomogram_distance(t0, t0) == 0
    t3 = tomogram_single(evolve_single(s, H, PiMultiple(Fraction(1, 3))), TH, XG)
    assert tomogram_distance(t0, t3) < 1e-9
    t2 = tomogram_single(evolve_single(s, H, PiMultiple(Fraction(1, 2))), TH, XG)
    t6 = tomogram_single(evolve_single(s, H, PiMultiple(Fraction(1, 6))), TH, XG)
    assert tomogram_distance(t2, t6) < 1e-9
    assert tomogram_distance(t0, t2) > 0.1
    with pytest.raises(ValueError):
        tomogram_distance(t0, tomogram_single(s, ThetaGrid.uniform(10), XG))


@given(st.integers(0, 10_000))
@settings(max_examples=20, deadline=None)
def test_distance_is_metric(seed):
    rng = np.random.default_rng(seed)
    th, g = ThetaGrid.uniform(12), XGrid(8, 161)
    toms = []
    for _ in range(3):
        c = rng.normal(size=8) + 1j * rng.normal(size=8)
        toms.append(tomogram_single(FockState1(c / np.linalg.norm(c)), th, g))
    a, b, c = toms
    assert tomogram_distance(a, b) == pytest.approx(tomogram_distance(b, a), abs=1e-15)
    assert tomogram_distance(a, c) <= tomogram_distance(a, b) + tomogram_distance(b, c) + 1e-15
    assert tomogram_distance(a, b) >= 0


def test_revival_scan():
    s = make_cs(ALPHA)
    f = revival_scan(s, kerr(1), [0.0, PiMultiple(1), PiMultiple(Fraction(1, 2))])
    assert f[0] == pytest.approx(1, abs=1e-15)
    assert f[1] == pytest.approx(1, abs=1e-12)
    assert f[2] < 0.5
    g = revival_scan(BecInitialSpec(SQ10, SQ10), STANDARD_PARAMS, [0.0, math.pi])
    assert g[0] == pytest.approx(1, abs=1e-15)
    assert g[1] == pytest.approx(1, abs=1e-9)
    with pytest.raises(TypeError):
        revival_scan(s, STANDARD_PARAMS, [0.0])
    with pytest.raises(TypeError):
        revival_scan(s, object(), [0.0])
