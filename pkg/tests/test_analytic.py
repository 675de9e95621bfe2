import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mirrorent import analytic as an
from mirrorent import entanglement as en
from mirrorent.exceptions import PerturbativeRegimeWarning

# frozen from 40-digit evaluations
PEAK_KN_001 = 7.993602559317469844824e-4
RHO00_KN_001_PI = 0.9992003199146837306030
RHO11_KN_001_PI = 3.996801279658734922412e-4
PREFACTOR_KN_001_PI = 0.9996000799893343999147


def test_eta_values():
    assert an.eta(0.0) == 0
    assert abs(an.eta(math.pi) - 2) < 1e-15
    t = np.linspace(-10, 30, 1000)
    assert np.max(np.abs(np.abs(an.eta(t)) ** 2 - 2 * (1 - np.cos(t)))) < 1e-14


def test_approx_state_at_zero():
    s = an.approx_state(0.01, 0.0)
    assert np.array_equal(s.amplitudes(), [1, 0, 0, 0])
    assert s.prefactor == 1.0


def test_approx_state_at_pi():
    s = an.approx_state(0.01, math.pi)
    assert s.prefactor == pytest.approx(PREFACTOR_KN_001_PI, rel=1e-15)
    raw = np.array([s.amp_00, s.amp_01, s.amp_10, s.amp_11])
    assert np.allclose(raw, [1, 0.02, 0.02, 0], atol=1e-16)
    assert s.amp_01 == s.amp_10 == 0.01 * an.eta(math.pi)
    assert abs(abs(s.global_phase) - 1) < 1e-15


def test_approx_state_fidelity_with_coherent_product():
    s = an.approx_state(0.01, math.pi)
    v = s.mirror_vector(8)
    v = v / np.linalg.norm(v)
    assert abs(np.vdot(an.coherent_product(0.01, math.pi, 8), v)) ** 2 > 1 - 1e-6


def test_approx_state_warns_outside_perturbative_regime():
    with pytest.warns(PerturbativeRegimeWarning):
        an.approx_state(0.2, 1.0)


def test_reduced_density_at_zero():
    rho = an.reduced_density_paper(0.05, 0.0)
    assert np.array_equal(rho.matrix, np.diag([0, 0, 0, 1]).astype(complex))
    assert rho.basis_order == en.DESCENDING


def test_reduced_density_at_pi():
    m = an.reduced_density_paper(0.01, math.pi).matrix
    assert m[3, 3].real == pytest.approx(RHO00_KN_001_PI, rel=1e-15)
    assert m[1, 1].real == pytest.approx(RHO11_KN_001_PI, rel=1e-14)
    assert m[2, 2] == m[1, 1]
    assert np.all(m[0, :] == 0) and np.all(m[:, 0] == 0)
    assert np.max(np.abs(m - m.conj().T)) == 0


@pytest.mark.parametrize("kn, t", [(0.01, 1.0), (0.05, math.pi), (0.003, 5.0)])
def test_reduced_density_is_partial_trace_of_approx_state(kn, t):
    s = an.approx_state(kn, t)
    amps = s.amplitudes()  # ascending |00>,|01>,|10>,|11>
    expected = np.outer(amps, amps.conj())
    assert np.allclose(an.reduced_density_paper(kn, t).ascending(), expected, atol=1e-16)


def test_reduced_density_trace_and_normalize():
    kn, t = 0.05, 2.0
    x = abs(kn * an.eta(t)) ** 2
    rho = an.reduced_density_paper(kn, t)
    assert rho.trace == pytest.approx(math.exp(-2 * x) * (1 + 2 * x), rel=1e-14)
    assert an.reduced_density_paper(kn, t, normalize=True).trace == pytest.approx(1, abs=1e-15)


def test_closed_form_values():
    assert an.concurrence_closed_form(0.3, 0.0) == 0
    assert an.concurrence_closed_form(0.01, math.pi) == pytest.approx(PEAK_KN_001, rel=1e-14)
    t = np.linspace(0, 4 * math.pi, 500)
    for kn in (1e-3, 1e-2, 5e-2, 0.4):
        c = an.concurrence_closed_form(kn, t)
        assert np.max(np.abs(c - an.concurrence_from_eta(kn, t))) < 1e-15
        assert np.all(c >= 0) and np.all(c <= 2 / math.e)


def test_small_kn_limit_bound():
    t = np.linspace(0, 4 * math.pi, 1000)
    for kn in (1e-3, 1e-2, 5e-2):
        lead = 4 * kn ** 2 * (1 - np.cos(t))
        c = an.concurrence_closed_form(kn, t)
        assert np.all(np.abs(c - lead) <= 16 * kn ** 4 * (1 - np.cos(t)) ** 2 + 1e-18)


def test_pipeline_consistency():
    t = np.linspace(0, 4 * math.pi, 200)
    for kn in (1e-3, 1e-2, 5e-2):
        for ti in t:
            c = en.wootters_concurrence(an.reduced_density_paper(kn, ti))
            assert abs(c - an.concurrence_closed_form(kn, ti)) < 1e-10


@given(st.floats(0, 0.1), st.floats(-50, 50))
def test_periodicity(kn, t):
    assert an.concurrence_closed_form(kn, t) == pytest.approx(
        an.concurrence_closed_form(kn, t + 2 * math.pi), abs=1e-15)


def test_maximum_at_pi():
    t = np.linspace(0, 2 * math.pi, 2001)
    for kn in (1e-3, 1e-2, 5e-2):
        c = an.concurrence_closed_form(kn, t)
        assert t[np.argmax(c)] == pytest.approx(math.pi, abs=1e-12)
        x = 4 * kn ** 2
        assert c.max() == pytest.approx(2 * x * math.exp(-2 * x), rel=1e-14)
        assert an.peak_concurrence(kn) == pytest.approx(c.max(), rel=1e-14)


@pytest.mark.parametrize("kn", [1e-3, 1e-2, 5e-2])
def test_second_order_term_cancels_concurrence(kn):
    for t in np.linspace(0, 4 * math.pi, 50):
        amps = an.approx_state(kn, t, include_11=True).amplitudes()
        assert en.pure_concurrence(amps, normalized=False) < 1e-15
        paper = an.approx_state(kn, t).amplitudes()
        assert en.pure_concurrence(paper, normalized=False) == pytest.approx(
            float(an.concurrence_closed_form(kn, t)), rel=1e-12, abs=1e-18)
