"""Two mirrors coupled to one cavity mode by radiation pressure.

Everything is in scaled units: energies in units of hbar*omega (mirror
frequency) and time t = omega * t_actual.  The scaled Hamiltonian is

    h = r a^dag a + b1^dag b1 + b2^dag b2
        - k a^dag a (b1^dag + b1) - k a^dag a (b2^dag + b2)

with r = omega0/omega and k = g/omega.  Since h commutes with a^dag a, it is
block diagonal over photon-number sectors; the mirror-pair block of sector
n is what :func:`block_hamiltonian` returns.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from . import fock_algebra as fa
from .analytic import eta
from .exceptions import PerturbativeRegimeWarning, TruncationError

HBAR = 1.054571817e-34  # J s
DEFAULT_R = 13.0
PERTURBATIVE_KN = 0.1
METHODS = ("block", "factorized", "brute_force")


def coupling_from_physical(omega0: float, omega: float, L: float, m: float) -> float:
    """Dimensionless coupling k = g/omega with g = (omega0/L) sqrt(hbar / (2 m omega))."""
    for name, val in (("omega0", omega0), ("omega", omega), ("L", L), ("m", m)):
        if not val > 0:
            raise ValueError(f"{name} must be strictly positive, got {val}")
    g = omega0 / L * math.sqrt(HBAR / (2 * m * omega))
    return g / omega


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless model parameters plus the physical ones they came from, if any.

    ``r`` only enters through the cavity phase exp(-i t r n), which cancels in
    every mirror-only quantity, so a small value is used unless physical
    frequencies are given.
    """

    k: float
    n: int = 1
    r: float = DEFAULT_R
    omega0: float | None = None
    omega: float | None = None
    g: float | None = None
    L: float | None = None
    m: float | None = None

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if self.n < 0 or int(self.n) != self.n:
            raise ValueError("photon number n must be a nonnegative integer")
        object.__setattr__(self, "n", int(self.n))
        if self.kn > PERTURBATIVE_KN:
            warnings.warn(
                f"kn = {self.kn:.3g} > {PERTURBATIVE_KN}: outside the perturbative regime kn << 1",
                PerturbativeRegimeWarning,
                stacklevel=3,
            )

    @property
    def kn(self) -> float:
        return self.k * self.n

    @classmethod
    def from_kn(cls, kn: float, n: int = 1, r: float = DEFAULT_R) -> "ModelParams":
        if n == 0:
            if kn != 0:
                raise ValueError("kn must be 0 when n = 0")
            return cls(k=0.0, n=0, r=r)
        return cls(k=kn / n, n=n, r=r)

    @classmethod
    def from_physical(cls, omega0: float, omega: float, L: float, m: float, n: int) -> "ModelParams":
        k = coupling_from_physical(omega0, omega, L, m)
        return cls(k=k, n=n, r=omega0 / omega, omega0=omega0, omega=omega,
                   g=k * omega, L=L, m=m)


@dataclass(frozen=True)
class Truncation:
    n_cav: int
    n_mirror: int = 8

    def __post_init__(self):
        if self.n_cav < 1:
            raise ValueError("n_cav must be >= 1")
        if self.n_mirror < 2:
            raise ValueError("n_mirror must be >= 2")

    def check(self, params: ModelParams) -> None:
        if self.n_cav <= params.n:
            raise TruncationError(
                f"n_cav = {self.n_cav} does not retain the initial Fock level n = {params.n}")

    @property
    def space(self) -> fa.HilbertSpace:
        return fa.HilbertSpace((self.n_cav, self.n_mirror, self.n_mirror))

    @property
    def mirror_dim(self) -> int:
        return self.n_mirror ** 2


def build_hamiltonian(params: ModelParams, trunc: Truncation) -> np.ndarray:
    space = trunc.space
    a = fa.annihilation(trunc.n_cav)
    b = fa.annihilation(trunc.n_mirror)
    n_cav = fa.embed(a.conj().T @ a, 0, space)
    b1 = fa.embed(b, 1, space)
    b2 = fa.embed(b, 2, space)
    x1 = b1 + b1.conj().T
    x2 = b2 + b2.conj().T
    h = (params.r * n_cav + b1.conj().T @ b1 + b2.conj().T @ b2
         - params.k * n_cav @ x1 - params.k * n_cav @ x2)
    return h


def _mirror_operators(n_mirror: int):
    b = fa.annihilation(n_mirror)
    eye = np.eye(n_mirror)
    b1 = np.kron(b, eye)
    b2 = np.kron(eye, b)
    return b1, b2


def block_hamiltonian(params: ModelParams, n: int, trunc: Truncation) -> np.ndarray:
    """Mirror-pair Hamiltonian of the n-photon sector."""
    if not 0 <= n < trunc.n_cav:
        raise TruncationError(f"photon sector {n} outside n_cav = {trunc.n_cav}")
    return _sector_hamiltonian(params.k * n, trunc.n_mirror) + params.r * n * np.eye(trunc.mirror_dim)


def _sector_hamiltonian(kn: float, n_mirror: int) -> np.ndarray:
    b1, b2 = _mirror_operators(n_mirror)
    return (b1.conj().T @ b1 + b2.conj().T @ b2
            - kn * (b1 + b1.conj().T + b2 + b2.conj().T))


@lru_cache(maxsize=256)
def _sector_eigensystem(kn: float, n_mirror: int):
    w, v = np.linalg.eigh(_sector_hamiltonian(kn, n_mirror))
    w.flags.writeable = False
    v.flags.writeable = False
    return w, v


def _cavity_phase(r: float, n: int, t: float) -> complex:
    # reduce before exponentiating; r*t*n can be ~1e13 for physical r
    return complex(np.exp(-1j * math.fmod(r * n * t, 2 * math.pi)))


def sector_propagator(params: ModelParams, n: int, t: float, trunc: Truncation) -> np.ndarray:
    """exp(-i t h_n) on the mirror pair, from the cached eigendecomposition."""
    if not 0 <= n < trunc.n_cav:
        raise TruncationError(f"photon sector {n} outside n_cav = {trunc.n_cav}")
    w, v = _sector_eigensystem(params.k * n, trunc.n_mirror)
    return _cavity_phase(params.r, n, t) * ((v * np.exp(-1j * t * w)) @ v.conj().T)


def displacement_factor(alpha: complex, n_mirror: int) -> np.ndarray:
    """exp(alpha b^dag - alpha* b) on one truncated mode."""
    b = fa.annihilation(n_mirror)
    gen = alpha * b.conj().T - np.conj(alpha) * b
    # gen is anti-Hermitian: exp(gen) = exp(-i * 1 * (i gen))
    return fa.expm_hermitian(1j * gen, 1.0)


def _factorized_sector(params: ModelParams, n: int, t: float, n_mirror: int,
                       include_cavity_phase: bool, kerr_sign: float) -> np.ndarray:
    kn = params.k * n
    d = displacement_factor(kn * eta(t), n_mirror)
    # mirror modes commute even when truncated, so the two-mirror factor is a kron
    disp = np.kron(d, d)
    levels = np.arange(n_mirror)
    free = np.exp(-1j * t * (levels[:, None] + levels[None, :]).ravel())
    phase = np.exp(kerr_sign * 2j * kn ** 2 * (t - math.sin(t)))
    if include_cavity_phase:
        phase *= _cavity_phase(params.r, n, t)
    return phase * disp * free[None, :]


def factorized_propagator(params: ModelParams, t: float, trunc: Truncation,
                          kerr_sign: float = 1.0) -> np.ndarray:
    """Full-space product-form propagator

        exp(-i t r a^dag a) exp(2i (k a^dag a)^2 (t - sin t))
        exp(k a^dag a (eta b1^dag - eta* b1 + eta b2^dag - eta* b2))
        exp(-i t (b1^dag b1 + b2^dag b2)),   eta = 1 - exp(-i t).

    ``kerr_sign`` flips the sign of the Kerr phase; only used to probe that
    validation is sensitive to it.
    """
    blocks = [_factorized_sector(params, n, t, trunc.n_mirror, True, kerr_sign)
              for n in range(trunc.n_cav)]
    return scipy.linalg.block_diag(*blocks)


def interaction_propagator(params: ModelParams, t: float, trunc: Truncation) -> np.ndarray:
    """Product-form propagator without the free cavity rotation."""
    blocks = [_factorized_sector(params, n, t, trunc.n_mirror, False, 1.0)
              for n in range(trunc.n_cav)]
    return scipy.linalg.block_diag(*blocks)


@lru_cache(maxsize=16)
def _full_propagator(params: ModelParams, trunc: Truncation) -> fa.HermitianPropagator:
    return fa.HermitianPropagator(build_hamiltonian(params, trunc))


def brute_force_propagator(params: ModelParams, t: float, trunc: Truncation) -> np.ndarray:
    """exp(-i t h) of the full truncated Hamiltonian by dense diagonalisation."""
    return _full_propagator(params, trunc)(t)


def evolve(initial: np.ndarray, params: ModelParams, t: float, trunc: Truncation,
           method: str = "block") -> np.ndarray:
    psi = np.asarray(initial, dtype=complex)
    if psi.shape != (trunc.space.total_dim,):
        raise ValueError(f"state of shape {psi.shape} does not match truncation {trunc}")
    if method == "block":
        sectors = psi.reshape(trunc.n_cav, trunc.mirror_dim)
        out = np.empty_like(sectors)
        for n in range(trunc.n_cav):
            if np.any(sectors[n]):
                out[n] = sector_propagator(params, n, t, trunc) @ sectors[n]
            else:
                out[n] = 0
        return out.ravel()
    if method == "factorized":
        return factorized_propagator(params, t, trunc) @ psi
    if method == "brute_force":
        return brute_force_propagator(params, t, trunc) @ psi
    raise ValueError(f"unknown evolution method {method!r}; expected one of {METHODS}")


def initial_state(params: ModelParams, trunc: Truncation) -> np.ndarray:
    """|n>_cavity (x) |0>_m1 (x) |0>_m2."""
    trunc.check(params)
    return trunc.space.basis_state(params.n, 0, 0)


def mirror_density(psi: np.ndarray, trunc: Truncation) -> np.ndarray:
    """Reduced state of the two mirrors (cavity traced out)."""
    return fa.reduced_density(psi, trunc.space, keep=(1, 2))


def compressed_distance(u_a: np.ndarray, u_b: np.ndarray, big: Truncation, n_keep: int) -> float:
    """Operator-norm distance between two full-space operators restricted to
    mirror levels below ``n_keep`` (all cavity levels kept)."""
    levels = np.arange(big.n_mirror)
    mirror_mask = (levels[:, None] < n_keep) & (levels[None, :] < n_keep)
    mask = np.tile(mirror_mask.ravel(), big.n_cav)
    idx = np.flatnonzero(mask)
    diff = (u_a - u_b)[np.ix_(idx, idx)]
    return float(np.linalg.norm(diff, 2))


def propagator_distance(params: ModelParams, t: float, trunc: Truncation,
                        padding: int = 0, kerr_sign: float = 1.0) -> float:
    """Operator-norm distance between the factorised propagator and the
    dense expm of the Hamiltonian.

    With ``padding = 0`` both live on ``trunc`` itself, where the top mirror
    level breaks [b, b^dag] = 1 and the two constructions differ at O(kn).
    With ``padding > 0`` both are built on ``n_mirror + padding`` levels and
    compared on the retained ``n_mirror`` levels, which measures their matrix
    elements in the retained basis.
    """
    big = Truncation(trunc.n_cav, trunc.n_mirror + padding)
    u_fact = factorized_propagator(params, t, big, kerr_sign=kerr_sign)
    u_exact = _full_propagator(params, big)(t)
    if padding == 0:
        return float(np.linalg.norm(u_fact - u_exact, 2))
    return compressed_distance(u_fact, u_exact, big, trunc.n_mirror)
