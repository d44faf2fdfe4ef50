"""Exact thermal-state references: Gibbs states, partition functions,
thermal energies, and the finite-depth binomial quasi-Gibbs closed form.

All Boltzmann weights are computed after shifting by the ground energy so
large beta (temperature sweeps go up to beta ~ 50) cannot overflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operator_core import DensityMatrix, herm_eig


@dataclass(frozen=True)
class GibbsState:
    """e^{-beta H}/Z together with its eigen-resolved data.

    energies ascend and eigen_probs follows that order, so the probability
    vector is nonincreasing.
    """

    beta: float
    rho: DensityMatrix
    partition_function: float
    log_partition_function: float
    energies: np.ndarray
    eigen_probs: np.ndarray
    vectors: np.ndarray


def _check_beta(beta):
    if not np.isfinite(beta) or beta < 0:
        raise ValueError(f"beta must be finite and >= 0, got {beta}")


def exact_gibbs(h, beta):
    """Diagonalize H and form the normalized Boltzmann mixture."""
    _check_beta(beta)
    spec = herm_eig(h.to_matrix())
    e0 = spec.values[0]
    w = np.exp(-beta * (spec.values - e0))
    total = float(np.sum(w))
    p = w / total
    log_z = float(np.log(total) - beta * e0)
    rho = (spec.vectors * p) @ spec.vectors.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    with np.errstate(over="ignore"):
        z = float(np.exp(log_z))  # may round to inf at very large beta
    return GibbsState(
        beta=float(beta),
        rho=DensityMatrix.from_matrix(rho, qubits=h.qubits, check=False),
        partition_function=z,
        log_partition_function=log_z,
        energies=spec.values,
        eigen_probs=p,
        vectors=spec.vectors,
    )


def thermal_energy(h, beta):
    """Tr(rho_beta H); nonincreasing in beta."""
    g = exact_gibbs(h, beta)
    return float(np.dot(g.eigen_probs, g.energies))


def binomial_quasi_gibbs(h, beta, d):
    """Normalized e^{-beta H} cosh^d(beta H / d).

    Expanding the cosh power binomially gives a C(d, k)-weighted mixture of
    Boltzmann factors at the discrete inverse temperatures 2 beta k / d;
    this is the depth-d fixed form the single-term monitored circuit
    averages to. Converges to the Gibbs state as d grows.
    """
    _check_beta(beta)
    if d < 1:
        raise ValueError(f"depth d must be >= 1, got {d}")
    spec = herm_eig(h.to_matrix())
    x = beta * spec.values / d
    # log cosh, overflow-safe
    logcosh = np.logaddexp(x, -x) - np.log(2.0)
    logw = -beta * spec.values + d * logcosh
    logw -= np.max(logw)
    w = np.exp(logw)
    p = w / np.sum(w)
    rho = (spec.vectors * p) @ spec.vectors.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix.from_matrix(rho, qubits=h.qubits, check=False)


def eigen_table(g):
    """Rows (mu, E_mu, p_mu) for CSV emission."""
    return [
        (mu, float(g.energies[mu]), float(g.eigen_probs[mu]))
        for mu in range(len(g.energies))
    ]
