"""Dense density-matrix toolkit for thermal-state preparation algorithms.

Simulates two routes to the Gibbs state e^{-beta H}/Z on small qubit
registers: repeated weak coupling to thermally reset ancillas (ergodic
cycling) and post-selected random-angle monitored circuits (universal
algorithm), together with the classical Metropolis-chain reduction of the
former, exact reference thermodynamics, depolarizing-noise models, and
free-energy error mitigation. Everything is dense linear algebra, capped
at 12 total qubits.
"""

__version__ = "0.1.0"

from .operator_core import (
    MAX_QUBITS,
    DensityMatrix,
    PauliString,
    Spectrum,
    herm_eig,
    kron_embed,
    partial_trace,
    relative_entropy,
    trace_distance,
    unitary_of,
    von_neumann_entropy,
)
from .hamiltonian import (
    PauliSumHamiltonian,
    PauliTerm,
    PositiveTerm,
    bose_hubbard_graph,
    hardcore_bose_hubbard_1d,
    heisenberg_like_1d,
    positive_decomposition,
)
from .gibbs import GibbsState, binomial_quasi_gibbs, exact_gibbs, thermal_energy
