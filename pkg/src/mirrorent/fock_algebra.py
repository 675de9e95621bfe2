"""Dense linear algebra on truncated multimode Fock spaces.

States are 1-D complex arrays, operators and density matrices are 2-D
complex arrays.  Multimode structure is carried by :class:`HilbertSpace`,
whose modes are ordered (cavity, mirror 1, mirror 2) throughout the package
and indexed row-major, so the cavity index varies slowest.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .exceptions import NumericalIntegrityError, TruncationWarning

HERMITIAN_TOL = 1e-10
EIGEN_CLAMP = 1e-9


@dataclass(frozen=True)
class HilbertSpace:
    mode_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.mode_dims)
        if not dims:
            raise ValueError("a Hilbert space needs at least one mode")
        if any(d < 1 for d in dims):
            raise ValueError(f"mode dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "mode_dims", dims)

    @property
    def n_modes(self) -> int:
        return len(self.mode_dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.mode_dims)

    def index(self, multi_index) -> int:
        return int(np.ravel_multi_index(tuple(multi_index), self.mode_dims))

    def multi_index(self, index: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(index, self.mode_dims))

    def basis_state(self, *levels) -> np.ndarray:
        psi = np.zeros(self.total_dim, dtype=complex)
        psi[self.index(levels)] = 1.0
        return psi


def fock_state(dim: int, n: int) -> np.ndarray:
    if not 0 <= n < dim:
        raise IndexError(f"Fock level {n} outside truncation of dimension {dim}")
    psi = np.zeros(dim, dtype=complex)
    psi[n] = 1.0
    return psi


def coherent_amplitudes(dim: int, alpha: complex) -> np.ndarray:
    """Unnormalised amplitudes alpha**j / sqrt(j!) for j < dim."""
    amps = np.empty(dim, dtype=complex)
    amps[0] = 1.0
    # recurrence keeps large-j terms finite
    for j in range(1, dim):
        amps[j] = amps[j - 1] * alpha / math.sqrt(j)
    return amps


def coherent_state(dim: int, alpha: complex) -> np.ndarray:
    """Coherent state truncated to ``dim`` levels and renormalised."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if abs(alpha) ** 2 > dim / 2:
        warnings.warn(
            f"|alpha|^2 = {abs(alpha) ** 2:.3g} exceeds dim/2 = {dim / 2}; "
            "the truncated coherent state is inaccurate",
            TruncationWarning,
            stacklevel=2,
        )
    amps = coherent_amplitudes(dim, alpha)
    return amps / np.linalg.norm(amps)


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def creation(dim: int) -> np.ndarray:
    return annihilation(dim).conj().T


def number(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def tensor(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product in the given order (works for states and operators)."""
    return reduce(np.kron, factors)


def embed(op: np.ndarray, mode: int, space: HilbertSpace) -> np.ndarray:
    """Lift a single-mode operator into ``space`` acting on ``mode``."""
    op = np.asarray(op)
    if not 0 <= mode < space.n_modes:
        raise IndexError(f"mode {mode} not in space with {space.n_modes} modes")
    d = space.mode_dims[mode]
    if op.shape != (d, d):
        raise ValueError(f"operator shape {op.shape} does not match mode dimension {d}")
    left = math.prod(space.mode_dims[:mode])
    right = math.prod(space.mode_dims[mode + 1:])
    return np.kron(np.kron(np.eye(left), op), np.eye(right))


def _keep_modes(keep, space: HilbertSpace) -> tuple[int, ...]:
    keep = tuple(sorted(set(int(m) for m in keep)))
    if not keep:
        raise ValueError("partial trace needs at least one mode to keep")
    if keep[0] < 0 or keep[-1] >= space.n_modes:
        raise IndexError(f"keep={keep} out of range for {space.n_modes} modes")
    return keep


def partial_trace(rho: np.ndarray, space: HilbertSpace, keep) -> np.ndarray:
    """Trace out every mode of ``space`` not listed in ``keep``."""
    keep = _keep_modes(keep, space)
    dims = space.mode_dims
    n = space.n_modes
    rho = np.asarray(rho).reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = [letters[i] for i in range(n)]
    col = [letters[i] if i not in keep else letters[n + i].upper() for i in range(n)]
    out_row = "".join(row[i] for i in keep)
    out_col = "".join(col[i] for i in keep)
    sub = f"{''.join(row)}{''.join(col)}->{out_row}{out_col}"
    d_keep = math.prod(dims[i] for i in keep)
    return np.einsum(sub, rho).reshape(d_keep, d_keep)


def reduced_density(psi: np.ndarray, space: HilbertSpace, keep) -> np.ndarray:
    """Reduced density matrix of a pure state without forming |psi><psi|."""
    keep = _keep_modes(keep, space)
    traced = [i for i in range(space.n_modes) if i not in keep]
    t = np.asarray(psi).reshape(space.mode_dims)
    t = np.transpose(t, keep + tuple(traced))
    d_keep = math.prod(space.mode_dims[i] for i in keep)
    m = t.reshape(d_keep, -1)
    return m @ m.conj().T


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def unitarity_defect(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def density_eigenvalues(rho: np.ndarray, tol: float = EIGEN_CLAMP) -> np.ndarray:
    """Ascending eigenvalues of a density matrix with roundoff negatives set to 0.

    Raises NumericalIntegrityError if ``rho`` is not Hermitian or has an
    eigenvalue below ``-tol``.
    """
    if hermiticity_defect(rho) > HERMITIAN_TOL:
        raise NumericalIntegrityError("density matrix is not Hermitian")
    w = np.linalg.eigvalsh(rho)
    if w[0] < -tol:
        raise NumericalIntegrityError(f"density matrix has eigenvalue {w[0]:.3e} < -{tol}")
    return np.where(w < 0, 0.0, w)


def expm_hermitian(h: np.ndarray, scale: float) -> np.ndarray:
    """exp(-i * scale * h) by full eigendecomposition of Hermitian ``h``."""
    return HermitianPropagator(h)(scale)


class HermitianPropagator:
    """exp(-i * scale * h) for many scales from one eigendecomposition."""

    def __init__(self, h: np.ndarray):
        h = np.asarray(h)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {h.shape}")
        if hermiticity_defect(h) > HERMITIAN_TOL:
            raise ValueError("exponentiation requires a Hermitian matrix")
        self.eigenvalues, self.eigenvectors = np.linalg.eigh(h)
        self.eigenvalues.flags.writeable = False
        self.eigenvectors.flags.writeable = False

    def __call__(self, scale: float) -> np.ndarray:
        v = self.eigenvectors
        return (v * np.exp(-1j * scale * self.eigenvalues)) @ v.conj().T
