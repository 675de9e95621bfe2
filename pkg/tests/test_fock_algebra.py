import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mirrorent import fock_algebra as fa
from mirrorent.exceptions import NumericalIntegrityError, TruncationWarning

from conftest import random_pure


def test_fock_state_basis_vectors():
    assert np.array_equal(fa.fock_state(4, 0), [1, 0, 0, 0])
    assert np.array_equal(fa.fock_state(4, 2), [0, 0, 1, 0])
    with pytest.raises(IndexError):
        fa.fock_state(2, 2)


def test_coherent_state_vacuum_and_small_alpha():
    assert np.allclose(fa.coherent_state(8, 0), fa.fock_state(8, 0), atol=0)
    amps = np.array([0.02 ** j / math.sqrt(math.factorial(j)) for j in range(8)])
    assert np.allclose(fa.coherent_state(8, 0.02), amps / np.linalg.norm(amps), rtol=1e-14, atol=0)


def test_coherent_state_poisson_weights():
    probs = np.abs(fa.coherent_state(16, 1.0)) ** 2
    poisson = np.array([math.exp(-1) / math.factorial(j) for j in range(16)])
    assert np.max(np.abs(probs - poisson)) < 1e-6


def test_coherent_state_truncation_warning():
    with pytest.warns(TruncationWarning):
        psi = fa.coherent_state(4, 2.0)
    assert abs(np.linalg.norm(psi) - 1) < 1e-12


@pytest.mark.parametrize("alpha", [0.3, 1.0 + 0.5j, 1.7j])
def test_coherent_state_truncation_consistency(alpha):
    dim = 10
    small = fa.coherent_amplitudes(dim, alpha)
    big = fa.coherent_amplitudes(2 * dim, alpha)
    # renormalised states rescaled back to unit vacuum amplitude
    s = fa.coherent_state(dim, alpha)
    b = fa.coherent_state(2 * dim, alpha)
    assert np.max(np.abs(s / s[0] - b[:dim] / b[0])) < 1e-12
    assert np.max(np.abs(small - big[:dim])) < 1e-12


def test_ladder_action():
    a = fa.annihilation(4)
    assert np.allclose(a @ fa.fock_state(4, 3), math.sqrt(3) * fa.fock_state(4, 2), atol=1e-15)
    assert np.array_equal(a @ fa.fock_state(4, 0), np.zeros(4))
    assert np.allclose(fa.creation(4), a.conj().T)


def test_number_operator_and_top_level_truncation():
    a = fa.annihilation(4)
    ad = fa.creation(4)
    assert np.allclose(ad @ a, np.diag([0, 1, 2, 3]), atol=1e-14)
    # a a^dag would be N + 1 = diag(1,2,3,4); the truncated top level loses the 4
    assert np.allclose(a @ ad, np.diag([1, 2, 3, 0]), atol=1e-14)
    assert np.allclose(fa.number(4), ad @ a, atol=1e-14)


def test_index_bijection_345():
    space = fa.HilbertSpace((3, 4, 5))
    assert space.total_dim == 60
    seen = set()
    for i in range(space.total_dim):
        multi = space.multi_index(i)
        assert space.index(multi) == i
        seen.add(multi)
    assert seen == set(itertools.product(range(3), range(4), range(5)))
    # row-major: last mode varies fastest
    assert space.index((0, 0, 1)) == 1 and space.index((1, 0, 0)) == 20


@given(st.lists(st.integers(1, 5), min_size=1, max_size=4), st.data())
def test_index_bijection_property(dims, data):
    space = fa.HilbertSpace(dims)
    i = data.draw(st.integers(0, space.total_dim - 1))
    assert space.index(space.multi_index(i)) == i


def test_hilbert_space_rejects_bad_dims():
    with pytest.raises(ValueError):
        fa.HilbertSpace((2, 0))


def test_embed_identity_and_number():
    space = fa.HilbertSpace((3, 2, 2))
    assert np.array_equal(fa.embed(np.eye(2), 1, space), np.eye(12))
    psi = space.basis_state(2, 0, 0)
    assert np.allclose(fa.embed(fa.number(3), 0, space) @ psi, 2 * psi)
    with pytest.raises(ValueError):
        fa.embed(np.eye(3), 1, space)


def test_embedded_modes_commute():
    space = fa.HilbertSpace((3, 5, 5))
    a1 = fa.embed(fa.annihilation(5), 1, space)
    a2 = fa.embed(fa.annihilation(5), 2, space)
    comm = a1 @ a2 - a2 @ a1
    assert np.max(np.abs(comm)) < 1e-13
    comm = a1 @ a2.conj().T - a2.conj().T @ a1
    assert np.max(np.abs(comm)) < 1e-13
    x = fa.embed(fa.annihilation(5) + fa.creation(5), 2, space)
    assert fa.hermiticity_defect(x) < 1e-15


def test_partial_trace_product_state(rng):
    space = fa.HilbertSpace((3, 2))
    psi = random_pure(rng, 3)
    phi = random_pure(rng, 2)
    state = np.kron(psi, phi)
    rho = np.outer(state, state.conj())
    assert np.allclose(fa.partial_trace(rho, space, [0]), np.outer(psi, psi.conj()), atol=1e-14)
    assert np.allclose(fa.partial_trace(rho, space, [1]), np.outer(phi, phi.conj()), atol=1e-14)


def test_partial_trace_cavity_factors_out(rng):
    space = fa.HilbertSpace((4, 2, 2))
    cav = fa.fock_state(4, 3)
    sigma = np.eye(4) / 4 + 0.1 * np.diag([1, -1, 1, -1])
    rho = np.kron(np.outer(cav, cav), sigma)
    assert np.allclose(fa.partial_trace(rho, space, (1, 2)), sigma, atol=1e-15)


def _brute_force_trace_keep0(rho, dims):
    d0, d1, d2 = dims
    out = np.zeros((d0, d0), dtype=complex)
    for i in range(d0):
        for j in range(d0):
            for k in range(d1):
                for m in range(d2):
                    out[i, j] += rho[(i * d1 + k) * d2 + m, (j * d1 + k) * d2 + m]
    return out


def test_partial_trace_matches_index_summation(rng):
    dims = (2, 2, 2)
    space = fa.HilbertSpace(dims)
    psi = random_pure(rng, 8)
    rho = np.outer(psi, psi.conj())
    expected = _brute_force_trace_keep0(rho, dims)
    got = fa.partial_trace(rho, space, [0])
    assert np.allclose(np.sort(np.linalg.eigvalsh(got)), np.sort(np.linalg.eigvalsh(expected)), atol=1e-14)
    assert np.allclose(got, expected, atol=1e-15)
    assert np.allclose(fa.reduced_density(psi, space, [0]), expected, atol=1e-15)


def test_partial_trace_keeps_nonadjacent_modes(rng):
    space = fa.HilbertSpace((2, 3, 2))
    psi = random_pure(rng, 12)
    rho = np.outer(psi, psi.conj())
    t = psi.reshape(2, 3, 2)
    expected = np.einsum("abc,dbf->acdf", t, t.conj()).reshape(4, 4)
    assert np.allclose(fa.partial_trace(rho, space, (0, 2)), expected, atol=1e-15)
    assert np.allclose(fa.reduced_density(psi, space, (2, 0)), expected, atol=1e-15)


def test_partial_trace_rejects_empty_keep():
    with pytest.raises(ValueError):
        fa.partial_trace(np.eye(4), fa.HilbertSpace((2, 2)), [])


def test_partial_trace_preserves_trace_and_positivity(rng):
    space = fa.HilbertSpace((3, 2, 3))
    for _ in range(200):
        psi = random_pure(rng, space.total_dim)
        rho = np.outer(psi, psi.conj())
        for keep in ((0,), (1, 2), (0, 2)):
            red = fa.partial_trace(rho, space, keep)
            assert abs(np.trace(red) - 1) < 1e-10
            assert fa.hermiticity_defect(red) < 1e-10
            assert fa.density_eigenvalues(red)[0] >= 0.0


def test_density_eigenvalues_clamp_and_reject():
    w = fa.density_eigenvalues(np.diag([-5e-10, 0.5, 0.5 + 5e-10]))
    assert w[0] == 0.0
    with pytest.raises(NumericalIntegrityError):
        fa.density_eigenvalues(np.diag([-1e-6, 1.0]))


def test_expm_hermitian_basics(rng):
    assert np.allclose(fa.expm_hermitian(np.zeros((5, 5)), 3.7), np.eye(5), atol=0)
    u = fa.expm_hermitian(np.diag([0.0, 1.0, 2.0]), 2 * np.pi)
    assert np.max(np.abs(u - np.eye(3))) < 1e-10
    g = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    h = g + g.conj().T
    u = fa.expm_hermitian(h, 0.8)
    assert fa.unitarity_defect(u) < 1e-9
    assert np.max(np.abs(u @ fa.expm_hermitian(h, -0.8) - np.eye(6))) < 1e-10
    with pytest.raises(ValueError):
        fa.expm_hermitian(g, 1.0)


def test_expm_hermitian_matches_scipy(rng):
    import scipy.linalg

    g = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    h = g + g.conj().T
    assert np.allclose(fa.expm_hermitian(h, 0.3), scipy.linalg.expm(-0.3j * h), atol=1e-12)


@settings(max_examples=25)
@given(st.floats(-20, 20), st.floats(-20, 20))
def test_expm_hermitian_group_property(s1, s2):
    h = np.diag([0.0, 1.0, 2.5]) + np.array([[0, 1, 0], [1, 0, 1j], [0, -1j, 0]])
    u = fa.HermitianPropagator(h)
    assert np.max(np.abs(u(s1) @ u(s2) - u(s1 + s2))) < 1e-10
