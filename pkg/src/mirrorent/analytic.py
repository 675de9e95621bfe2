"""Closed-form first-order solution for the mirror pair.

Starting from |n>|0>|0> and keeping terms to first order in kn, the mirrors
end up in

    exp(2i (kn)^2 (t - sin t) - |kn eta|^2) (|00> + kn eta |01> + kn eta |10>)

with eta = 1 - exp(-i t).  Tracing out the cavity gives a rank-one 4x4
density matrix whose Wootters concurrence is

    C = 2 |kn eta|^2 exp(-2 |kn eta|^2) = 4 (kn)^2 (1 - cos t) exp(-4 (kn)^2 (1 - cos t)).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .entanglement import DESCENDING, TwoQubitDensity
from .exceptions import PerturbativeRegimeWarning
from .fock_algebra import coherent_state

PERTURBATIVE_KN = 0.1


def eta(t):
    """Mirror displacement per unit kn, 1 - exp(-i t)."""
    return 1 - np.exp(-1j * np.asarray(t))


def _check_kn(kn: float) -> None:
    if kn < 0:
        raise ValueError("kn must be nonnegative")
    if kn > PERTURBATIVE_KN:
        warnings.warn(f"kn = {kn:.3g} is not << 1; the first-order state is unreliable",
                      PerturbativeRegimeWarning, stacklevel=3)


@dataclass(frozen=True)
class ApproxState:
    kn: float
    t: float
    amp_00: complex
    amp_01: complex
    amp_10: complex
    amp_11: complex
    global_phase: complex
    prefactor: float

    def amplitudes(self) -> np.ndarray:
        """Mirror amplitudes on |00>,|01>,|10>,|11>, prefactor and phase included."""
        raw = np.array([self.amp_00, self.amp_01, self.amp_10, self.amp_11])
        return self.global_phase * self.prefactor * raw

    def mirror_vector(self, n_mirror: int) -> np.ndarray:
        """The same state embedded in an n_mirror x n_mirror oscillator pair."""
        psi = np.zeros((n_mirror, n_mirror), dtype=complex)
        amps = self.amplitudes()
        psi[0, 0], psi[0, 1], psi[1, 0], psi[1, 1] = amps
        return psi.ravel()


def approx_state(kn: float, t: float, include_11: bool = False) -> ApproxState:
    """First-order mirror state.  ``include_11`` adds the dropped (kn eta)^2 |11> term."""
    _check_kn(kn)
    y = kn * eta(t)
    return ApproxState(
        kn=kn,
        t=t,
        amp_00=1.0 + 0j,
        amp_01=complex(y),
        amp_10=complex(y),
        amp_11=complex(y * y) if include_11 else 0j,
        global_phase=complex(np.exp(2j * kn ** 2 * (t - np.sin(t)))),
        prefactor=float(np.exp(-abs(y) ** 2)),
    )


def reduced_density_paper(kn: float, t: float, normalize: bool = False) -> TwoQubitDensity:
    """Reduced mirror density of the first-order state, rows |11>,|10>,|01>,|00>.

    Not renormalised by default: its trace is exp(-2x)(1 + 2x), x = |kn eta|^2.
    """
    _check_kn(kn)
    y = complex(kn * eta(t))
    x = abs(y) ** 2
    m = np.array([
        [0, 0, 0, 0],
        [0, x, x, y],
        [0, x, x, y],
        [0, y.conjugate(), y.conjugate(), 1],
    ], dtype=complex) * np.exp(-2 * x)
    rho = TwoQubitDensity(m, DESCENDING, normalized=False)
    return rho.normalize() if normalize else rho


def concurrence_closed_form(kn, t):
    """4 (kn)^2 (1 - cos t) exp(-4 (kn)^2 (1 - cos t)); vectorised over t."""
    x = 4 * np.square(kn) * (1 - np.cos(t))
    return x * np.exp(-x)


def concurrence_from_eta(kn, t):
    """2 |kn eta|^2 exp(-2 |kn eta|^2), the same curve written through eta."""
    x = np.abs(kn * eta(t)) ** 2
    return 2 * x * np.exp(-2 * x)


def peak_concurrence(kn: float) -> float:
    """Maximum of the closed form, reached at t = pi mod 2 pi."""
    x = 4 * kn ** 2
    return 2 * x * np.exp(-2 * x)


def coherent_product(kn: float, t: float, n_mirror: int) -> np.ndarray:
    """|kn eta> (x) |kn eta> on an n_mirror x n_mirror pair."""
    alpha = complex(kn * eta(t))
    c = coherent_state(n_mirror, alpha)
    return np.kron(c, c)
