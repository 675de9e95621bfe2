"""Two-qubit entanglement measures.

Qubit basis labels are (mirror 1, mirror 2).  A :class:`TwoQubitDensity`
records whether its rows run ascending |00>,|01>,|10>,|11> or descending
|11>,|10>,|01>,|00>; sigma_y (x) sigma_y has the same matrix in both
orders, so the concurrence is computed directly in whatever order is given.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalIntegrityError, ProjectionError
from .fock_algebra import EIGEN_CLAMP, HERMITIAN_TOL, hermiticity_defect

ASCENDING = "ascending"
DESCENDING = "descending"

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)
_REVERSE = np.arange(4)[::-1]


@dataclass(frozen=True)
class TwoQubitDensity:
    matrix: np.ndarray
    basis_order: str = ASCENDING
    normalized: bool = True

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"two-qubit density must be 4x4, got {m.shape}")
        if self.basis_order not in (ASCENDING, DESCENDING):
            raise ValueError(f"unknown basis order {self.basis_order!r}")
        if hermiticity_defect(m) > HERMITIAN_TOL:
            raise NumericalIntegrityError("two-qubit density is not Hermitian")
        if self.normalized and abs(np.trace(m) - 1) > 1e-10:
            raise ValueError(f"density flagged normalized has trace {np.trace(m).real:.12g}")
        object.__setattr__(self, "matrix", m)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def ascending(self) -> np.ndarray:
        if self.basis_order == ASCENDING:
            return self.matrix
        return self.matrix[np.ix_(_REVERSE, _REVERSE)]

    def descending(self) -> np.ndarray:
        if self.basis_order == DESCENDING:
            return self.matrix
        return self.matrix[np.ix_(_REVERSE, _REVERSE)]

    def normalize(self) -> "TwoQubitDensity":
        return TwoQubitDensity(self.matrix / self.trace, self.basis_order, True)


def _as_density(rho) -> TwoQubitDensity:
    if isinstance(rho, TwoQubitDensity):
        return rho
    m = np.asarray(rho, dtype=complex)
    return TwoQubitDensity(m, ASCENDING, normalized=abs(np.trace(m) - 1) <= 1e-10)


def spin_flip_operator(basis_order: str = ASCENDING) -> np.ndarray:
    if basis_order == ASCENDING:
        return SIGMA_YY
    return SIGMA_YY[np.ix_(_REVERSE, _REVERSE)]


def zeta_matrix(rho) -> np.ndarray:
    """rho (sy x sy) rho* (sy x sy), conjugating entrywise in rho's own basis."""
    rho = _as_density(rho)
    s = spin_flip_operator(rho.basis_order)
    m = rho.matrix
    return m @ s @ m.conj() @ s


def zeta_eigenvalues(rho) -> np.ndarray:
    """Eigenvalues of the zeta matrix, validated real and nonnegative, sorted descending."""
    lam = np.linalg.eigvals(zeta_matrix(rho))
    if np.max(np.abs(lam.imag)) >= EIGEN_CLAMP:
        raise NumericalIntegrityError(f"zeta eigenvalue with imaginary part {np.max(np.abs(lam.imag)):.3e}")
    lam = lam.real
    if lam.min() < -EIGEN_CLAMP:
        raise NumericalIntegrityError(f"negative zeta eigenvalue {lam.min():.3e}")
    lam = np.where(lam < 0, 0.0, lam)
    return np.sort(lam)[::-1]


def spin_flip_singular_values(rho) -> np.ndarray:
    """Square roots of the zeta eigenvalues, descending, as singular values.

    With rho = W W^dag, the nonzero eigenvalues of zeta equal the squared
    singular values of W^T (sy x sy) W.  The SVD resolves zero eigenvalues
    to ~1e-16 where sqrt(eig(zeta)) would leave ~1e-8 of noise.
    """
    rho = _as_density(rho)
    w, v = np.linalg.eigh(rho.matrix)
    if w.min() < -EIGEN_CLAMP:
        raise NumericalIntegrityError(f"density has eigenvalue {w.min():.3e}")
    factor = v * np.sqrt(np.where(w < 0, 0.0, w))
    tau = factor.T @ spin_flip_operator(rho.basis_order) @ factor
    return np.linalg.svd(tau, compute_uv=False)


def wootters_concurrence(rho) -> float:
    """Wootters concurrence max(0, s1 - s2 - s3 - s4), s_i = sqrt of zeta eigenvalues.

    Unnormalised input is accepted and not rescaled; the result is then
    linear in the overall scale of ``rho``.
    """
    rho = _as_density(rho)
    lam = zeta_eigenvalues(rho)
    s = spin_flip_singular_values(rho)
    if np.max(np.abs(lam - s ** 2)) > EIGEN_CLAMP * max(1.0, rho.trace ** 2):
        raise NumericalIntegrityError("zeta spectrum disagrees with spin-flip singular values")
    return float(max(0.0, s[0] - s[1] - s[2] - s[3]))


def pure_concurrence(amplitudes, normalized: bool = True) -> float:
    """2 |alpha delta - beta gamma| for amplitudes on |00>,|01>,|10>,|11>."""
    al, be, ga, de = np.asarray(amplitudes, dtype=complex)
    if normalized:
        norm = abs(al) ** 2 + abs(be) ** 2 + abs(ga) ** 2 + abs(de) ** 2
        if abs(norm - 1) > 1e-10:
            raise ValueError(f"amplitudes have squared norm {norm:.12g}; pass normalized=False")
    return float(2 * abs(al * de - be * ga))


def project_to_qubits(rho_mirrors: np.ndarray) -> tuple[TwoQubitDensity, float]:
    """Restrict an oscillator-pair state to levels {0, 1} of each mode.

    Returns the renormalised ascending-order block and the leakage, i.e. the
    weight lost by the restriction.
    """
    rho_mirrors = np.asarray(rho_mirrors)
    dim = rho_mirrors.shape[0]
    n_mirror = int(round(np.sqrt(dim)))
    if n_mirror ** 2 != dim or rho_mirrors.shape != (dim, dim):
        raise ValueError(f"expected a square matrix on an n x n mode pair, got {rho_mirrors.shape}")
    idx = [0, 1, n_mirror, n_mirror + 1]
    block = rho_mirrors[np.ix_(idx, idx)]
    kept = float(np.trace(block).real)
    leakage = 1.0 - kept
    if leakage > 0.5:
        raise ProjectionError(f"leakage {leakage:.3g} out of the qubit subspace exceeds 0.5")
    leakage = min(max(leakage, 0.0), 1.0)
    block = block / kept
    # symmetrise away roundoff so the normalized flag check is exact
    block = 0.5 * (block + block.conj().T)
    return TwoQubitDensity(block, ASCENDING, normalized=True), leakage


def partial_transpose(rho) -> np.ndarray:
    """Partial transpose over the second qubit, ascending order."""
    m = _as_density(rho).ascending().reshape(2, 2, 2, 2)
    return m.transpose(0, 3, 2, 1).reshape(4, 4)


def log_negativity(rho) -> float:
    rho = _as_density(rho)
    trace_norm = np.sum(np.abs(np.linalg.eigvalsh(partial_transpose(rho))))
    return float(max(0.0, np.log2(trace_norm)))
