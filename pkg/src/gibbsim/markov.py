"""Classical reduction of the ergodic sampler: an energy-basis Markov chain.

The cycle dynamics average to a column-stochastic transition matrix whose
off-diagonal rates combine coupling matrix elements, an arctan energy
window, and a Fermi acceptance factor. The chain satisfies detailed
balance with respect to the Boltzmann weights, so its Perron vector is
the Gibbs diagonal; the spectral gap of the symmetrized matrix controls
mixing. A residual integral bounds the accuracy of that reduction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import expit

from .operator_core import PAULI, herm_eig, kron_embed


def window_f(x, omega, gamma):
    """Smoothed indicator of |x| <= 1 with edge sharpness omega/gamma.

    Even in x, valued in (0, 1), and equal to (2/pi)arctan(omega/gamma)
    at x = 0.
    """
    if omega <= 0 or gamma <= 0:
        raise ValueError(f"omega and gamma must be > 0, got {omega}, {gamma}")
    r = omega / gamma
    x = np.asarray(x, dtype=float)
    out = (np.arctan(r * (1.0 - x)) + np.arctan(r * (1.0 + x))) / math.pi
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TransitionMatrix:
    """Column-stochastic T acting as p' = T @ p (columns index the source).

    tau holds the per-column off-diagonal mass C * sum_mu r_{mu,nu}; the
    normalization C makes the largest tau equal 1.
    """

    T: np.ndarray
    energies: np.ndarray
    beta: float
    omega: float
    gamma: float
    C: float
    tau: np.ndarray

    @property
    def dim(self):
        return self.T.shape[0]

    def boltzmann_weights(self):
        """exp(-beta(E - E_min)), the unnormalized stationary weights."""
        return np.exp(-self.beta * (self.energies - np.min(self.energies)))

    def gibbs_diagonal(self):
        w = self.boltzmann_weights()
        return w / np.sum(w)

    def detailed_balance_residual(self):
        w = self.boltzmann_weights()
        flow = self.T * w[None, :]  # flow[mu, nu] = T_{mu,nu} w_nu
        return float(np.max(np.abs(flow - flow.T)))

    def validate(self):
        if np.min(self.T) < 0:
            raise ValueError("negative transition probability")
        col = np.abs(self.T.sum(axis=0) - 1.0)
        if np.max(col) > 1e-12:
            raise ValueError(f"columns deviate from stochasticity by {np.max(col):.3g}")
        res = self.detailed_balance_residual()
        if res > 1e-10:
            raise ValueError(f"detailed balance violated, residual {res:.3g}")
        return self


def density_couplings(qubits):
    """Site occupation operators n_i = (I - Z_i)/2 on the full register."""
    n1 = (np.eye(2) - PAULI["Z"]) / 2.0
    return [kron_embed(n1, [i], qubits) for i in range(qubits)]


def _dense(op):
    if hasattr(op, "to_matrix"):
        return np.asarray(op.to_matrix(), dtype=complex)
    return np.asarray(op, dtype=complex)


def sector_basis(symmetry, value, tol=1e-8):
    """Orthonormal columns spanning the eigenspace of `symmetry` at `value`."""
    s = _dense(symmetry)
    w, v = np.linalg.eigh(s)
    cols = v[:, np.abs(w - value) < tol]
    if cols.shape[1] == 0:
        raise ValueError(f"no eigenstates at symmetry value {value}")
    return cols


def build_transition_matrix(h, couplings, beta, omega, gamma, sector=None):
    """Energy-basis chain with rates C sigma^2 f(dE/omega) / (1 + e^{beta dE}).

    sigma^2_{mu,nu} averages |<mu|A|nu>|^2 over the coupling operators A.
    With `sector` = (symmetry operator, eigenvalue), the Hamiltonian and
    couplings are first compressed to that symmetry block, which keeps
    degenerate eigenvectors from straddling sectors.
    """
    if beta < 0 or not np.isfinite(beta):
        raise ValueError(f"beta must be finite and >= 0, got {beta}")
    if omega <= 0 or gamma <= 0:
        raise ValueError(f"omega and gamma must be > 0, got {omega}, {gamma}")
    if not couplings:
        raise ValueError("need at least one coupling operator")

    hm = _dense(h)
    ops = [_dense(c) for c in couplings]
    if sector is not None:
        basis = sector_basis(*sector)
        hm = basis.conj().T @ hm @ basis
        ops = [basis.conj().T @ c @ basis for c in ops]

    spec = herm_eig(hm)
    energies, vectors = spec.values, spec.vectors

    sigma2 = np.zeros((len(energies), len(energies)))
    for c in ops:
        m = vectors.conj().T @ c @ vectors
        sigma2 += np.abs(m) ** 2
    sigma2 /= len(ops)
    np.fill_diagonal(sigma2, 0.0)

    de = energies[:, None] - energies[None, :]  # dE_{mu,nu} = E_mu - E_nu
    rates = sigma2 * window_f(de / omega, omega, gamma) * expit(-beta * de)
    np.fill_diagonal(rates, 0.0)

    mass = rates.sum(axis=0)
    peak = float(np.max(mass))
    if peak <= 0.0:
        raise ValueError("couplings generate no transitions; chain is degenerate")
    C = 1.0 / peak
    T = C * rates
    tau = C * mass
    T[np.diag_indices_from(T)] = 1.0 - tau
    return TransitionMatrix(
        T=T,
        energies=energies,
        beta=float(beta),
        omega=float(omega),
        gamma=float(gamma),
        C=C,
        tau=tau,
    ).validate()


def _symmetrized(tm):
    """Similarity transform D^{-1/2} T D^{1/2}; symmetric under detailed balance."""
    d = np.sqrt(tm.boltzmann_weights())
    s = tm.T * (d[None, :] / d[:, None])
    return 0.5 * (s + s.T)


def _connected_components(tm):
    adj = tm.T > 0.0
    np.fill_diagonal(adj, False)
    n = tm.dim
    seen = np.zeros(n, dtype=bool)
    blocks = []
    for start in range(n):
        if seen[start]:
            continue
        stack, block = [start], []
        seen[start] = True
        while stack:
            i = stack.pop()
            block.append(i)
            for j in np.nonzero(adj[i] | adj[:, i])[0]:
                if not seen[j]:
                    seen[j] = True
                    stack.append(j)
        blocks.append(sorted(block))
    return blocks


def perron_vector(tm):
    """Stationary distribution, from the top eigenvector of the symmetrized T."""
    _, v = np.linalg.eigh(_symmetrized(tm))
    # undo the D^{-1/2} twist: pi_mu = sqrt(w_mu) * u_mu up to sign
    pi = v[:, -1] * np.sqrt(tm.boltzmann_weights())
    if np.sum(pi) < 0:
        pi = -pi
    pi = np.clip(pi, 0.0, None)
    return pi / np.sum(pi)


@dataclass(frozen=True)
class SpectralGap:
    gap: float
    second_eigenvalue: float


def spectral_gap(tm):
    """1 minus the second-largest eigenvalue magnitude of the symmetrized chain.

    Raises for a reducible chain, naming the disconnected blocks.
    """
    blocks = _connected_components(tm)
    if len(blocks) > 1:
        desc = " | ".join("{" + ",".join(map(str, b)) + "}" for b in blocks[:6])
        more = "" if len(blocks) <= 6 else f" (+{len(blocks) - 6} more)"
        raise ValueError(f"chain is reducible; disconnected blocks {desc}{more}")
    w = np.linalg.eigvalsh(_symmetrized(tm))
    order = np.argsort(np.abs(w))[::-1]
    top, second = w[order[0]], abs(w[order[1]])
    if abs(top - 1.0) > 1e-8:
        raise ValueError(f"leading eigenvalue {top} is not 1; not a stochastic chain")
    return SpectralGap(gap=float(1.0 - second), second_eigenvalue=float(second))


@dataclass(frozen=True)
class ChainTrajectory:
    """Row t is the distribution after t applications; tv tracks distance to Gibbs."""

    distributions: np.ndarray
    tv_to_gibbs: np.ndarray


def iterate_chain(tm, p0, steps, alpha=None):
    """Apply T (or the lumped map (1-alpha)I + alpha T) `steps` times."""
    p = np.asarray(p0, dtype=float)
    if p.shape != (tm.dim,):
        raise ValueError(f"p0 must have shape ({tm.dim},)")
    if np.min(p) < -1e-12 or abs(np.sum(p) - 1.0) > 1e-9:
        raise ValueError("p0 must be a probability vector")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    m = tm.T
    if alpha is not None:
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
        m = (1.0 - alpha) * np.eye(tm.dim) + alpha * tm.T
    gibbs = tm.gibbs_diagonal()
    rows = np.empty((steps + 1, tm.dim))
    tv = np.empty(steps + 1)
    rows[0] = np.clip(p, 0.0, None)
    tv[0] = 0.5 * np.sum(np.abs(rows[0] - gibbs))
    for t in range(1, steps + 1):
        rows[t] = m @ rows[t - 1]
        tv[t] = 0.5 * np.sum(np.abs(rows[t] - gibbs))
    return ChainTrajectory(distributions=rows, tv_to_gibbs=tv)


def fermi_window_residual(z0, g, w):
    """Adaptive quadrature of the windowed Fermi-difference kernel.

    Integrates [n(z + z0) - n(z0)] / (z^2 + g^2) over [-w, w] with n the
    Fermi function, absolute tolerance 1e-10.  The substitution z = g tan(u)
    absorbs the sharp kernel scale, so the quadrature stays stable even for
    g orders of magnitude below the window width.
    """
    if g <= 0 or w <= 0:
        raise ValueError(f"g and w must be > 0, got {g}, {w}")
    n0 = expit(-z0)
    u_max = math.atan(w / g)
    # subdivision hints: the kernel peak and the Fermi step at z = -z0
    breakpoints = [0.0]
    if abs(z0) < w:
        breakpoints.append(math.atan(-z0 / g))

    def integrand(u):
        return (expit(-(g * math.tan(u) + z0)) - n0) / g

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, abserr = integrate.quad(
                integrand, -u_max, u_max, points=breakpoints, limit=400,
                epsabs=1e-10, epsrel=1e-11,
            )
        except integrate.IntegrationWarning as exc:
            raise RuntimeError(f"quadrature did not converge: {exc}") from exc
    if abserr > 1e-8:
        raise RuntimeError(f"quadrature error estimate {abserr:.3g} too large")
    return float(val)
