"""Entanglement of two mirrors coupled to one cavity mode by radiation pressure.

Closed-form first-order concurrence and its numerically exact counterpart on
a truncated Fock space.
"""
__version__ = "0.1.0"

from .analytic import (ApproxState, approx_state, concurrence_closed_form, eta,
                       reduced_density_paper)
from .entanglement import (TwoQubitDensity, log_negativity, project_to_qubits,
                           pure_concurrence, wootters_concurrence, zeta_matrix)
from .exceptions import (ConvergenceError, NumericalIntegrityError, ProjectionError,
                         TruncationError)
from .fock_algebra import HilbertSpace, coherent_state, expm_hermitian, fock_state, partial_trace
from .optomech_model import (ModelParams, Truncation, build_hamiltonian, coupling_from_physical,
                             evolve, factorized_propagator, interaction_propagator)
