"""Model Hamiltonians as weighted Pauli sums, plus the positive-term split.

The bundled models are one-dimensional hardcore-boson chains in qubit
form and a Heisenberg-style variant with a uniform field; arbitrary
interaction graphs are reachable through an explicit edge list. The
positive decomposition rewrites every Pauli term alpha*P as a scaled
projector c*(I + s*P)/2 so downstream gate constructions get closed-form
square roots and cosines.

Serialization is a plain line format: a `qubits N` header followed by one
`coefficient pauli-string` line per term, coefficients printed with 17
significant digits so round-trips are bit-exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operator_core import PauliString, check_register_size, kron_embed


@dataclass(frozen=True)
class PauliTerm:
    """coefficient * PauliString; identity strings only carry constant shifts."""

    coefficient: float
    string: PauliString

    def __post_init__(self):
        if not np.isfinite(self.coefficient):
            raise ValueError(f"non-finite coefficient {self.coefficient}")


@dataclass(frozen=True)
class PauliSumHamiltonian:
    """Deduplicated sum of Pauli terms over a fixed register."""

    terms: tuple
    qubits: int

    @property
    def dim(self):
        return 2**self.qubits

    def to_matrix(self):
        m = np.zeros((self.dim, self.dim), dtype=complex)
        for t in self.terms:
            m += t.coefficient * kron_embed(
                _string_matrix_on_support(t.string),
                t.string.support or (0,),
                self.qubits,
            )
        return m

    def identity_coefficient(self):
        return sum(t.coefficient for t in self.terms if t.string.is_identity())


def _string_matrix_on_support(string):
    """Dense matrix of the non-identity factors only, ordered by qubit."""
    sup = string.support
    if not sup:
        return np.eye(2, dtype=complex)
    m = np.array([[1.0 + 0.0j]])
    for q in reversed(sup):
        m = np.kron(m, np.array(_PAULI_1Q[string.ops[q]]))
    return m


_PAULI_1Q = {
    "I": [[1, 0], [0, 1]],
    "X": [[0, 1], [1, 0]],
    "Y": [[0, -1j], [1j, 0]],
    "Z": [[1, 0], [0, -1]],
}


def pauli_sum(term_pairs, qubits):
    """Build a PauliSumHamiltonian from (coefficient, string) pairs,
    merging duplicate strings and dropping exact zeros."""
    check_register_size(qubits)
    acc = {}
    order = []
    for coeff, ops in term_pairs:
        if len(ops) != qubits:
            raise ValueError(f"string {ops!r} does not match register of {qubits} qubits")
        if ops not in acc:
            acc[ops] = 0.0
            order.append(ops)
        acc[ops] += float(coeff)
    terms = tuple(
        PauliTerm(coefficient=acc[ops], string=PauliString(ops))
        for ops in order
        if acc[ops] != 0.0
    )
    return PauliSumHamiltonian(terms=terms, qubits=qubits)


def _chain_string(n, q_ops):
    """Pauli string with the given {qubit: letter} placements."""
    chars = ["I"] * n
    for q, c in q_ops.items():
        chars[q] = c
    return "".join(chars)


def bose_hubbard_graph(n_sites, edges, J, U):
    """Hardcore-boson model on an arbitrary interaction graph, qubit form.

    Per edge (i, j): -(J/2)(X_i X_j + Y_i Y_j) + (U/4) Z_i Z_j; each site
    carries a field -(U/4) * degree(i) Z_i, the expansion of the
    density-density coupling.
    """
    check_register_size(n_sites)
    degree = [0] * n_sites
    pairs = []
    for i, j in edges:
        if i == j or not (0 <= i < n_sites and 0 <= j < n_sites):
            raise ValueError(f"bad edge ({i}, {j}) for {n_sites} sites")
        degree[i] += 1
        degree[j] += 1
        pairs.append((-J / 2.0, _chain_string(n_sites, {i: "X", j: "X"})))
        pairs.append((-J / 2.0, _chain_string(n_sites, {i: "Y", j: "Y"})))
        pairs.append((U / 4.0, _chain_string(n_sites, {i: "Z", j: "Z"})))
    for i in range(n_sites):
        pairs.append((-(U / 4.0) * degree[i], _chain_string(n_sites, {i: "Z"})))
    return pauli_sum(pairs, n_sites)


def hardcore_bose_hubbard_1d(n_sites, J, U):
    """Open chain of hardcore bosons in qubit form.

    H = -(J/2) sum_i (X_i X_{i+1} + Y_i Y_{i+1}) + (U/4) sum_i Z_i Z_{i+1}
        + sum_i h_i Z_i,  h_i = -U/2 in the bulk and -U/4 at the ends.
    """
    if n_sites < 2:
        raise ValueError(f"chain needs at least 2 sites, got {n_sites}")
    return bose_hubbard_graph(n_sites, [(i, i + 1) for i in range(n_sites - 1)], J, U)


def heisenberg_like_1d(n_sites, t, U, h):
    """Chain with hopping t, coupling U, and a uniform field h on every site.

    Same exchange structure as the hardcore-boson chain (J := t) but with
    h_i = h everywhere instead of the boundary-dependent rule.
    """
    if n_sites < 2:
        raise ValueError(f"chain needs at least 2 sites, got {n_sites}")
    pairs = []
    for i in range(n_sites - 1):
        pairs.append((-t / 2.0, _chain_string(n_sites, {i: "X", i + 1: "X"})))
        pairs.append((-t / 2.0, _chain_string(n_sites, {i: "Y", i + 1: "Y"})))
        pairs.append((U / 4.0, _chain_string(n_sites, {i: "Z", i + 1: "Z"})))
    for i in range(n_sites):
        pairs.append((h, _chain_string(n_sites, {i: "Z"})))
    return pauli_sum(pairs, n_sites)


@dataclass(frozen=True)
class PositiveTerm:
    """PSD Hamiltonian piece c * (I + s*P)/2 with c >= 0 and s in {+1, -1}."""

    scale: float
    sign: int
    string: PauliString

    def __post_init__(self):
        if self.scale < 0:
            raise ValueError(f"scale must be >= 0, got {self.scale}")
        if self.sign not in (+1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")

    @property
    def support(self):
        return self.string.support

    def projector_matrix(self, total_qubits=None):
        n = total_qubits if total_qubits is not None else self.string.qubits
        p = kron_embed(
            _string_matrix_on_support(self.string),
            self.string.support or (0,),
            n,
        )
        return (np.eye(2**n) + self.sign * p) / 2.0

    def to_matrix(self, total_qubits=None):
        return self.scale * self.projector_matrix(total_qubits)


def positive_decomposition(h):
    """Split H into PSD projector terms plus a recorded identity shift.

    Every non-identity term alpha*P becomes 2|alpha| * (I + sign(alpha)P)/2;
    the identity coefficient is absorbed into the shift. The pieces satisfy
    sum_m c_m Pi_m = H + shift * I exactly, and the Gibbs state of the
    shifted operator equals that of H (the shift cancels in normalization).

    Returns (terms, shift).
    """
    terms = []
    shift = 0.0
    for t in h.terms:
        if t.string.is_identity():
            shift -= t.coefficient
            continue
        if t.coefficient == 0.0:
            continue
        terms.append(
            PositiveTerm(
                scale=2.0 * abs(t.coefficient),
                sign=+1 if t.coefficient > 0 else -1,
                string=t.string,
            )
        )
        shift += abs(t.coefficient)
    return terms, shift


def to_text(h):
    """Serialize to the line format; 17 significant digits round-trip floats."""
    lines = [f"qubits {h.qubits}"]
    for t in h.terms:
        lines.append(f"{t.coefficient:.17g} {t.string.ops}")
    return "\n".join(lines) + "\n"


def from_text(text):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("qubits "):
        raise ValueError("expected a 'qubits N' header line")
    qubits = int(lines[0].split()[1])
    pairs = []
    for ln in lines[1:]:
        fields = ln.split()
        if len(fields) != 2:
            raise ValueError(f"malformed term line {ln!r}")
        pairs.append((float(fields[0]), fields[1]))
    return pauli_sum(pairs, qubits)


def total_z_matrix(n):
    """sum_i Z_i, the conserved magnetization of the hopping models."""
    m = np.zeros((2**n, 2**n))
    for q in range(n):
        m += kron_embed(np.diag([1.0, -1.0]), [q], n)
    return m
