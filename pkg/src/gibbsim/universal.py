"""Monitored random-circuit sampler for arbitrary Hamiltonians.

Each cycle applies, for every positive term c_m Pi_m of the shifted
Hamiltonian, the gate exp(i theta sqrt(beta h_m / d) (x) X) on a fresh
ancilla postselected to |0>. The accepted (unnormalized) state evolves
by K rho K with K = cos(theta sqrt(beta h_m / d)), and its trace is the
acceptance probability. Three modes differ in what gets averaged:

  1  rerandomize-always: acceptance-weighted circuit average
  2  rerandomize-on-accept: plain average of normalized outputs
  3  fixed-angles: a single angle realization

Mode 1 averages are computed in closed form (Gaussian cosine moments),
so they carry no Monte-Carlo error; sampled records are still produced
for statistics. Includes the native-gate compiler emitting H/S/CNOT/RX
sequences with a postselected ancilla.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._rng import sample_generator
from .ergodic import depolarize
from .gibbs import exact_gibbs
from .hamiltonian import positive_decomposition
from .operator_core import (
    PAULI,
    DensityMatrix,
    check_register_size,
    herm_eig,
    kron_embed,
    relative_entropy,
)

MODES = (1, 2, 3)

# sub-cycle gate order: XX block, then YY, then ZZ and Z
_PATTERN_RANK = {"XX": 0, "YY": 1, "ZZ": 2, "Z": 3}


def _term_sort_key(position_and_term):
    pos, term = position_and_term
    letters = term.string.ops.replace("I", "")
    rank = _PATTERN_RANK.get("".join(sorted(letters)), len(_PATTERN_RANK))
    sites = term.support or (0,)
    return (rank, min(sites), pos)


def ordered_terms(decomposition):
    """Deterministic execution order: XX, YY, ZZ, then single-site Z terms."""
    return [t for _, t in sorted(enumerate(decomposition), key=_term_sort_key)]


@dataclass(frozen=True)
class UniversalConfig:
    """Run parameters for the monitored-circuit sampler.

    undivided=True applies the whole shifted Hamiltonian as one gate per
    cycle (M = 1) instead of its projector decomposition; it exists for
    closed-form comparisons and does not support noise.
    """

    hamiltonian: object
    beta: float
    cycles: int
    mode: int = 1
    samples: int = 1000
    seed: int = 0
    p2: float = 0.0
    p3: float = 0.0
    undivided: bool = False

    @property
    def n_system(self):
        return self.hamiltonian.qubits

    def decomposition(self):
        terms, shift = positive_decomposition(self.hamiltonian)
        return ordered_terms(terms), shift

    @property
    def n_terms(self):
        if self.undivided:
            return 1
        return len(self.decomposition()[0])

    @property
    def xi(self):
        """beta^2 M / d, the small parameter of the depth analysis."""
        return self.beta**2 * self.n_terms / self.cycles

    def validate(self):
        check_register_size(self.n_system)
        if not np.isfinite(self.beta) or self.beta < 0:
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        if self.cycles < 1:
            raise ValueError(f"cycles must be >= 1, got {self.cycles}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode}")
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        for p in (self.p2, self.p3):
            if not 0.0 <= p <= 0.25:
                raise ValueError(f"depolarizing probability must lie in [0, 1/4], got {p}")
        if self.undivided and (self.p2 > 0 or self.p3 > 0):
            raise ValueError("noise is not supported for undivided runs")
        if self.xi >= 1.0:
            warnings.warn(
                f"xi = beta^2 M / d = {self.xi:.3g} >= 1; depth too small for "
                "the perturbative regime",
                stacklevel=2,
            )
        return self


def monitored_gate_channel(rho, term, theta, beta, d):
    """Accepted-branch update K rho K for one projector gate.

    K = I + (cos(theta v) - 1) Pi with v = sqrt(beta c / d); the output
    trace is the acceptance probability of this gate's postselection.
    """
    rho_m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    qubits = int(round(math.log2(rho_m.shape[0])))
    pi = term.projector_matrix(qubits)
    v = math.sqrt(beta * term.scale / d)
    a = math.cos(theta * v) - 1.0
    pr = pi @ rho_m
    rp = rho_m @ pi
    out = rho_m + a * (pr + rp) + a * a * (pi @ rp)
    return DensityMatrix.from_matrix(out, check=False)


def _gaussian_cos_moment(v):
    """E[cos(theta v)] = e^{-v^2/2} for standard normal theta."""
    return math.exp(-0.5 * v * v)


class _ProjectorGate:
    """Precomputed data for one term's gate at fixed (beta, d)."""

    def __init__(self, term, beta, d, qubits):
        self.term = term
        self.pi = term.projector_matrix(qubits)
        self.v = math.sqrt(beta * term.scale / d)
        c1 = _gaussian_cos_moment(self.v)
        c2 = 0.5 * (1.0 + _gaussian_cos_moment(2.0 * self.v))
        self.avg_cross = c1 - 1.0
        self.avg_diag = 1.0 - 2.0 * c1 + c2
        self.support = term.support

    def apply(self, rho, theta):
        a = math.cos(theta * self.v) - 1.0
        pr = self.pi @ rho
        rp = rho @ self.pi
        return rho + a * (pr + rp) + a * a * (self.pi @ rp)

    def apply_averaged(self, rho):
        pr = self.pi @ rho
        rp = rho @ self.pi
        return rho + self.avg_cross * (pr + rp) + self.avg_diag * (self.pi @ rp)


class _UndividedGate:
    """Single-gate variant using the full shifted Hamiltonian.

    Works in the eigenbasis of the shifted operator, where the accepted
    update is entrywise: rho_{ij} *= cos(theta a_i) cos(theta a_j).
    """

    def __init__(self, h, shift, beta, d):
        spec = herm_eig(h.to_matrix() + shift * np.eye(h.dim))
        if spec.values[0] < -1e-9:
            raise ValueError("shifted Hamiltonian must be positive semidefinite")
        self.vectors = spec.vectors
        self.amps = np.sqrt(beta * np.clip(spec.values, 0.0, None) / d)
        s = self.amps[:, None] - self.amps[None, :]
        t = self.amps[:, None] + self.amps[None, :]
        self.avg_factor = 0.5 * (np.exp(-0.5 * s * s) + np.exp(-0.5 * t * t))

    def to_eigen(self, rho):
        return self.vectors.conj().T @ rho @ self.vectors

    def from_eigen(self, rho):
        return self.vectors @ rho @ self.vectors.conj().T

    def apply(self, rho, theta):
        c = np.cos(theta * self.amps)
        return rho * (c[:, None] * c[None, :])

    def apply_averaged(self, rho):
        return rho * self.avg_factor


@dataclass(frozen=True)
class UniversalRecord:
    """One angle realization: acceptance, diagnostics, output diagnostics."""

    sample_index: int
    success_probability: float
    relative_entropy: float
    eigen_probs: np.ndarray


@dataclass(frozen=True)
class UniversalResult:
    accepted_mean_state: DensityMatrix
    mode_state: DensityMatrix
    success_probability: float
    success_probability_exact: float
    eigen_probs: np.ndarray
    energy: float
    relative_entropy_to_gibbs: float
    xi: float
    degenerate_count: int
    records: list = field(repr=False, default_factory=list)


def _noise_probability(term, p2, p3):
    # one system site -> 2-qubit gate, two sites -> 3-qubit gate
    return p2 if len(term.support) == 1 else p3


def simulate_angle_set(config, thetas, gates=None):
    """Unnormalized accepted state and acceptance probability for one draw.

    thetas has shape (cycles, M) in the gate execution order. For an
    undivided config the returned matrix lives in the shifted operator's
    eigenbasis (use the gate's from_eigen to rotate back).
    """
    n = config.n_system
    dim = 2**n
    if gates is None:
        gates = _build_gates(config)
    thetas = np.asarray(thetas, dtype=float)
    if thetas.shape != (config.cycles, len(gates)):
        raise ValueError(f"thetas must have shape ({config.cycles}, {len(gates)})")
    rho = np.eye(dim, dtype=complex) / dim
    noisy = config.p2 > 0 or config.p3 > 0
    for k in range(config.cycles):
        for m, gate in enumerate(gates):
            rho = gate.apply(rho, thetas[k, m])
            if noisy:
                p = _noise_probability(gate.term, config.p2, config.p3)
                if p > 0:
                    for q in gate.support:
                        rho = depolarize(rho, q, p).matrix
    prob = float(np.real(np.trace(rho)))
    return rho, prob


def _build_gates(config):
    if config.undivided:
        terms, shift = positive_decomposition(config.hamiltonian)
        return [_UndividedGate(config.hamiltonian, shift, config.beta, config.cycles)]
    terms, _ = config.decomposition()
    return [_ProjectorGate(t, config.beta, config.cycles, config.n_system) for t in terms]


def _averaged_state(config, gates):
    """Exact E[P rho_out] and E[P] by composing theta-averaged channels."""
    dim = 2**config.n_system
    rho = np.eye(dim, dtype=complex) / dim
    if config.undivided:
        rho = gates[0].to_eigen(rho)
    noisy = config.p2 > 0 or config.p3 > 0
    for _ in range(config.cycles):
        for gate in gates:
            rho = gate.apply_averaged(rho)
            if noisy:
                p = _noise_probability(gate.term, config.p2, config.p3)
                if p > 0:
                    for q in gate.support:
                        rho = depolarize(rho, q, p).matrix
    if config.undivided:
        rho = gates[0].from_eigen(rho)
    prob = float(np.real(np.trace(rho)))
    return rho, prob


def run_universal(config):
    """Simulate the monitored circuit in the configured mode.

    Returns exact mode-1 averages plus per-sample records; realizations
    with vanishing acceptance are dropped and counted.
    """
    config.validate()
    n = config.n_system
    dim = 2**n
    hm = config.hamiltonian.to_matrix()
    gibbs = exact_gibbs(config.hamiltonian, config.beta)
    gates = _build_gates(config)
    m_gates = len(gates)

    avg_unnorm, p_exact = _averaged_state(config, gates)
    if p_exact <= 0:
        raise ValueError("averaged acceptance probability vanished")
    accepted_mean = avg_unnorm / p_exact
    accepted_mean = 0.5 * (accepted_mean + accepted_mean.conj().T)

    n_samples = 1 if config.mode == 3 else config.samples
    records = []
    degenerate = 0
    norm_sum = np.zeros((dim, dim), dtype=complex)
    kept = 0
    for s in range(n_samples):
        rng = sample_generator(config.seed, s)
        thetas = rng.standard_normal((config.cycles, m_gates))
        rho, prob = simulate_angle_set(config, thetas, gates)
        if config.undivided:
            rho = gates[0].from_eigen(rho)
        if prob < 1e-300:
            degenerate += 1
            continue
        out = rho / prob
        out = 0.5 * (out + out.conj().T)
        norm_sum += out
        kept += 1
        out_dm = DensityMatrix.from_matrix(out, check=False)
        probs = np.real(
            np.einsum("im,ij,jm->m", gibbs.vectors.conj(), out, gibbs.vectors)
        )
        records.append(
            UniversalRecord(
                sample_index=s,
                success_probability=prob,
                relative_entropy=relative_entropy(gibbs.rho, out_dm),
                eigen_probs=probs,
            )
        )
    if kept == 0:
        raise ValueError("all realizations had vanishing acceptance")

    if config.mode == 1:
        mode_state = accepted_mean
    elif config.mode == 2:
        mode_state = norm_sum / kept
    else:
        mode_state = norm_sum  # single kept realization
    mode_dm = DensityMatrix.from_matrix(mode_state, check=False)

    eigen_probs = np.real(
        np.einsum("im,ij,jm->m", gibbs.vectors.conj(), mode_state, gibbs.vectors)
    )
    return UniversalResult(
        accepted_mean_state=DensityMatrix.from_matrix(accepted_mean, check=False),
        mode_state=mode_dm,
        success_probability=float(np.mean([r.success_probability for r in records])),
        success_probability_exact=p_exact,
        eigen_probs=eigen_probs,
        energy=float(np.real(np.trace(mode_state @ hm))),
        relative_entropy_to_gibbs=relative_entropy(gibbs.rho, mode_dm),
        xi=config.xi,
        degenerate_count=degenerate,
        records=records,
    )


def noisy_run_universal(config):
    """run_universal with the per-gate depolarizing noise model active."""
    if not (config.p2 > 0 or config.p3 > 0):
        return run_universal(config)
    for p in (config.p2, config.p3):
        if not 0.0 <= p <= 0.25:
            raise ValueError(f"depolarizing probability must lie in [0, 1/4], got {p}")
    return run_universal(config)


def success_probability_estimate(h, beta, n=None):
    """Asymptotic acceptance probability 2^{-n} Z_beta of the shifted operator."""
    n = h.qubits if n is None else n
    _, shift = positive_decomposition(h)
    g = exact_gibbs(h, beta)
    log_p = g.log_partition_function - beta * shift - n * math.log(2.0)
    return float(math.exp(log_p))


def scaling_constants(h, beta, d):
    """(xi, C): depth parameter and the mean thermal variance of the terms."""
    terms, _ = positive_decomposition(h)
    g = exact_gibbs(h, beta)
    n = h.qubits
    var_sum = 0.0
    for t in terms:
        tm = t.to_matrix(n)
        mean = float(np.real(np.sum(g.rho.matrix * tm.T)))
        second = float(np.real(np.sum(g.rho.matrix * (tm @ tm).T)))
        var_sum += second - mean * mean
    m = len(terms)
    return beta * beta * m / d, var_sum / m


# ----------------------------------------------------------- native gates


@dataclass(frozen=True)
class NativeGate:
    name: str
    qubits: tuple
    angle: float = None

    def line(self):
        qs = " ".join("A" if q == "A" else str(q) for q in self.qubits)
        if self.angle is None:
            return f"{self.name} {qs}"
        return f"{self.name} {qs} {self.angle!r}"


@dataclass(frozen=True)
class NativeCircuit:
    """Gate block for one monitored term; ancilla is the symbolic qubit A."""

    gates: tuple
    term_pattern: str
    sites: tuple

    def to_lines(self):
        lines = [g.line() for g in self.gates]
        lines.append("MEASURE_POSTSELECT A 0")
        return lines


def compile_native(term, theta, v_m):
    """Hardware-style decomposition of one monitored gate.

    Emits RX/H/S/CNOT sequences for the supported patterns Z_i, X_iX_j,
    Y_iY_j, Z_iZ_j; a negative term sign flips the first RX angle.
    """
    letters = [(q, c) for q, c in enumerate(term.string.ops) if c != "I"]
    pattern = "".join(c for _, c in letters)
    sites = tuple(q for q, _ in letters)
    first = term.sign * theta * v_m
    last = theta * v_m
    rx_open = NativeGate("RX", ("A",), first)
    rx_close = NativeGate("RX", ("A",), last)

    if pattern == "Z" and len(sites) == 1:
        i = sites[0]
        seq = [rx_open, NativeGate("H", (i,)), NativeGate("CNOT", ("A", i)),
               NativeGate("H", (i,)), rx_close]
    elif pattern == "XX":
        i, j = sites
        seq = [rx_open, NativeGate("CNOT", ("A", i)), NativeGate("CNOT", ("A", j)), rx_close]
    elif pattern == "YY":
        i, j = sites
        seq = [rx_open,
               NativeGate("SDG", (i,)), NativeGate("SDG", (j,)),
               NativeGate("CNOT", ("A", i)), NativeGate("CNOT", ("A", j)),
               NativeGate("S", (i,)), NativeGate("S", (j,)),
               rx_close]
    elif pattern == "ZZ":
        i, j = sites
        seq = [rx_open,
               NativeGate("H", (i,)), NativeGate("H", (j,)),
               NativeGate("CNOT", ("A", i)), NativeGate("CNOT", ("A", j)),
               NativeGate("H", (i,)), NativeGate("H", (j,)),
               rx_close]
    else:
        raise ValueError(
            f"unsupported term pattern {term.string.ops!r}; "
            "supported: Z_i, X_iX_j, Y_iY_j, Z_iZ_j"
        )
    return NativeCircuit(gates=tuple(seq), term_pattern=pattern, sites=sites)


_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
_S = np.diag([1.0, 1.0j]).astype(complex)
_CNOT_HIGH_CTRL = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def _rx(angle):
    # exp(i angle X / 2)
    return math.cos(angle / 2) * np.eye(2) + 1j * math.sin(angle / 2) * PAULI["X"]


def circuit_unitary(circuit, n_system):
    """Dense unitary of a gate block on system qubits 0..n-1 plus ancilla n."""
    total = n_system + 1
    anc = n_system
    u = np.eye(2**total, dtype=complex)
    for g in circuit.gates:
        qubits = tuple(anc if q == "A" else q for q in g.qubits)
        if g.name == "RX":
            m = kron_embed(_rx(g.angle), [qubits[0]], total)
        elif g.name == "H":
            m = kron_embed(_H, [qubits[0]], total)
        elif g.name == "S":
            m = kron_embed(_S, [qubits[0]], total)
        elif g.name == "SDG":
            m = kron_embed(_S.conj().T, [qubits[0]], total)
        elif g.name == "CNOT":
            control, target = qubits
            m = kron_embed(_CNOT_HIGH_CTRL, [target, control], total)
        else:
            raise ValueError(f"unknown gate {g.name!r}")
        u = m @ u
    return u


def reference_gate_unitary(term, theta, v_m, n_system):
    """exp(i theta v Pi (x) X_A) on system qubits plus one ancilla (highest)."""
    total = n_system + 1
    pi = term.projector_matrix(n_system)
    phi = theta * v_m
    exp_x = math.cos(phi) * np.eye(2) + 1j * math.sin(phi) * PAULI["X"]
    comp = np.eye(2**n_system) - pi
    return np.kron(np.eye(2, dtype=complex), comp) + np.kron(exp_x, pi)
