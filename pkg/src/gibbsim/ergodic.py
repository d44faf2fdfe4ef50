"""Monte-Carlo simulation of the ergodic sampling algorithm.

Each cycle couples the system to freshly thermalized ancilla qubits
through random single-site operators, evolves the joint register for an
exponentially distributed time, and discards the ancillas. Averaged over
cycles and samples the system diagonal relaxes toward the Gibbs
distribution; optional depolarizing noise models hardware error.

Register layout: system qubits are the low indices, ancillas sit above
them (ancilla m is qubit n + m).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from ._rng import sample_generator
from .gibbs import exact_gibbs
from .operator_core import (
    MAX_QUBITS,
    PAULI,
    DensityMatrix,
    check_register_size,
    kron_embed,
    partial_trace,
    trace_distance,
)

LAMBDA_SCHEDULES = ("constant", "linear-decay")


@dataclass(frozen=True)
class ErgodicConfig:
    """Run parameters for the cycle-channel simulation.

    lam is the system-ancilla coupling strength; gamma the inverse mean
    cycle time; omega the half-width of the uniform ancilla frequency
    range; noise_rate the depolarizing rate Gamma (p = Gamma * t per
    cycle and qubit). ancilla_map[m] names the system qubit ancilla m
    couples to; default is m -> m.
    """

    system_hamiltonian: object
    n_ancilla: int
    beta: float
    lam: float
    gamma: float
    omega: float
    cycles: int
    samples: int = 1000
    seed: int = 0
    noise_rate: float = 0.0
    ancilla_map: tuple = None
    lambda_schedule: str = "constant"

    def __post_init__(self):
        if self.ancilla_map is None:
            object.__setattr__(self, "ancilla_map", tuple(range(self.n_ancilla)))
        else:
            object.__setattr__(self, "ancilla_map", tuple(self.ancilla_map))

    @property
    def n_system(self):
        return self.system_hamiltonian.qubits

    @property
    def total_qubits(self):
        return self.n_system + self.n_ancilla

    def validate(self):
        if self.n_ancilla < 1:
            raise ValueError("need at least one ancilla")
        check_register_size(self.total_qubits)
        if not np.isfinite(self.beta) or self.beta < 0:
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        if self.lam < 0:
            raise ValueError(f"coupling lam must be >= 0, got {self.lam}")
        if self.gamma <= 0 or self.omega <= 0:
            raise ValueError("gamma and omega must be > 0")
        if self.cycles < 1:
            raise ValueError(f"cycles must be >= 1, got {self.cycles}")
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if self.noise_rate < 0:
            raise ValueError(f"noise_rate must be >= 0, got {self.noise_rate}")
        if len(self.ancilla_map) != self.n_ancilla:
            raise ValueError("ancilla_map must name one system qubit per ancilla")
        for s in self.ancilla_map:
            if not 0 <= s < self.n_system:
                raise ValueError(f"ancilla_map entry {s} is not a system qubit")
        if self.lambda_schedule not in LAMBDA_SCHEDULES:
            raise ValueError(f"unknown lambda_schedule {self.lambda_schedule!r}")
        return self

    def lambda_at(self, k):
        """Coupling strength for cycle k (1-based)."""
        if self.lambda_schedule == "linear-decay":
            return self.lam * (1.0 - (k - 1) / self.cycles)
        return self.lam


@dataclass(frozen=True)
class CycleDraw:
    """One cycle's random data: duration, ancilla frequencies, couplings."""

    t: float
    omegas: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def validate(self, omega_range):
        if self.t < 0:
            raise ValueError("cycle time must be >= 0")
        if np.max(np.abs(self.omegas)) > omega_range * (1 + 1e-12):
            raise ValueError("ancilla frequency outside [-omega, omega]")
        return self


def draw_cycle(config, rng):
    return CycleDraw(
        t=float(rng.exponential(scale=1.0 / config.gamma)),
        omegas=rng.uniform(-config.omega, config.omega, size=config.n_ancilla),
        a=rng.standard_normal(config.n_ancilla),
        b=rng.standard_normal(config.n_ancilla),
    )


def ancilla_thermal_state(beta, omegas):
    """Product thermal state of ancillas with splittings omega_m.

    Each factor is n(beta w)|0><0| + n(-beta w)|1><1| with the Fermi
    function n(x) = 1/(1 + e^x), i.e. the Gibbs state of (w/2) Z.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    diag = np.array([1.0])
    for w in omegas:
        p0 = expit(-beta * w)  # n(beta w)
        diag = np.kron(np.array([p0, 1.0 - p0]), diag)
    return DensityMatrix.from_matrix(np.diag(diag.astype(complex)), check=False)


def build_cycle_hamiltonian(config, draw, lam=None):
    """Dense joint Hamiltonian H + H_anc + lam * sum_m V_m (x) X_m."""
    n, na = config.n_system, config.n_ancilla
    total = n + na
    lam = config.lam if lam is None else lam
    hm = kron_embed(config.system_hamiltonian.to_matrix(), list(range(n)), total)
    for m in range(na):
        hm += 0.5 * draw.omegas[m] * kron_embed(PAULI["Z"], [n + m], total)
        v = draw.a[m] * PAULI["X"] + draw.b[m] * PAULI["Z"]
        hm += lam * kron_embed(np.kron(PAULI["X"], v), [config.ancilla_map[m], n + m], total)
    return hm


def _evolve(rho, hm, t):
    """e^{-iHt} rho e^{iHt} through the eigenbasis of H."""
    if t == 0.0:
        return rho
    if np.max(np.abs(hm.imag)) < 1e-14:
        w, v = np.linalg.eigh(hm.real)
    else:
        w, v = np.linalg.eigh(hm)
    rt = v.conj().T @ rho @ v
    phase = np.exp(-1j * t * (w[:, None] - w[None, :]))
    return v @ (rt * phase) @ v.conj().T


def cycle_channel(rho, config, draw, lam=None):
    """One thermalization cycle: reset ancillas, evolve for draw.t, discard.

    lam overrides the config coupling (used by decaying schedules).
    """
    rho_m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    n = config.n_system
    check_register_size(config.total_qubits)
    draw.validate(config.omega)
    sigma = ancilla_thermal_state(config.beta, draw.omegas)
    joint = np.kron(sigma.matrix, rho_m)
    joint = _evolve(joint, build_cycle_hamiltonian(config, draw, lam), draw.t)
    out = partial_trace(DensityMatrix.from_matrix(joint, check=False), list(range(n)))
    return DensityMatrix.from_matrix(0.5 * (out.matrix + out.matrix.conj().T), check=False)


def _pauli_triple(qubit, qubits):
    return [kron_embed(PAULI[c], [qubit], qubits) for c in "XYZ"]


def depolarize(rho, qubit, p):
    """Single-qubit depolarizing channel (1-3p) rho + p sum_P P rho P."""
    if not 0.0 <= p <= 0.25:
        raise ValueError(f"depolarizing probability must lie in [0, 1/4], got {p}")
    rho_m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    qubits = int(np.log2(rho_m.shape[0]).round())
    out = (1.0 - 3.0 * p) * rho_m
    for pm in _pauli_triple(qubit, qubits):
        out += p * (pm @ rho_m @ pm)
    return DensityMatrix.from_matrix(out, check=False)


@dataclass(frozen=True)
class RunRecord:
    """Per-sample summary: final diagonal in the energy eigenbasis."""

    sample_index: int
    eigen_probs: np.ndarray
    energy: float


@dataclass(frozen=True)
class ErgodicResult:
    mean_state: DensityMatrix
    eigen_probs: np.ndarray
    energy: float
    per_cycle_trace_distance: np.ndarray
    per_cycle_energy: np.ndarray
    records: list = field(repr=False, default_factory=list)


def run_ergodic(config):
    """Average the cycle channel over samples and cycles.

    Every sample starts from a random computational-basis state, runs
    `cycles` cycles with fresh draws, and (with noise_rate > 0) suffers
    per-qubit depolarizing with p = noise_rate * t after each cycle,
    clamped to the channel's p <= 1/4 domain. Samples are accumulated in
    index order so results are bit-stable for a given seed.
    """
    config.validate()
    n = config.n_system
    dim = 2**n
    hm = config.system_hamiltonian.to_matrix()
    gibbs = exact_gibbs(config.system_hamiltonian, config.beta)

    cycle_sums = np.zeros((config.cycles, dim, dim), dtype=complex)
    records = []
    for s in range(config.samples):
        rng = sample_generator(config.seed, s)
        rho = np.zeros((dim, dim), dtype=complex)
        start = int(rng.integers(dim))
        rho[start, start] = 1.0
        for k in range(1, config.cycles + 1):
            draw = draw_cycle(config, rng)
            rho = cycle_channel(rho, config, draw, lam=config.lambda_at(k)).matrix
            if config.noise_rate > 0:
                p = min(config.noise_rate * draw.t, 0.25)
                for q in range(n):
                    rho = depolarize(rho, q, p).matrix
            cycle_sums[k - 1] += rho
        probs = np.real(np.einsum("im,ij,jm->m", gibbs.vectors.conj(), rho, gibbs.vectors))
        records.append(
            RunRecord(
                sample_index=s,
                eigen_probs=probs,
                energy=float(np.real(np.trace(rho @ hm))),
            )
        )

    means = cycle_sums / config.samples
    tds = np.array(
        [
            trace_distance(
                DensityMatrix.from_matrix(m, check=False), gibbs.rho
            )
            for m in means
        ]
    )
    cycle_energy = np.array([float(np.real(np.trace(m @ hm))) for m in means])
    mean_state = DensityMatrix.from_matrix(
        0.5 * (means[-1] + means[-1].conj().T), check=False
    )
    eigen_probs = np.real(
        np.einsum("im,ij,jm->m", gibbs.vectors.conj(), mean_state.matrix, gibbs.vectors)
    )
    return ErgodicResult(
        mean_state=mean_state,
        eigen_probs=eigen_probs,
        energy=float(np.real(np.trace(mean_state.matrix @ hm))),
        per_cycle_trace_distance=tds,
        per_cycle_energy=cycle_energy,
        records=records,
    )
