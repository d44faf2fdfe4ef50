"""Dense operator and density-matrix primitives for small qubit registers.

Basis convention, fixed globally: qubit 0 is the least significant bit of
the computational-basis index, so |b_{n-1} ... b_1 b_0> has index
sum_q b_q 2^q and an operator embedded on high qubits sits in the left
factor of a Kronecker product. All operators are dense numpy arrays and
registers are hard-capped at MAX_QUBITS qubits.

Matrix functions (exp, log, entropy) go through Hermitian
eigendecomposition rather than series; every generator in scope is
Hermitian and dimensions stay at or below 4096.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 12

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def check_register_size(qubits):
    if qubits < 1:
        raise ValueError(f"register needs at least one qubit, got {qubits}")
    if qubits > MAX_QUBITS:
        raise ValueError(
            f"register of {qubits} qubits exceeds the dense-simulation cap "
            f"of {MAX_QUBITS}"
        )


def _as_array(state):
    """Accept a DensityMatrix or a raw square array."""
    return state.matrix if isinstance(state, DensityMatrix) else np.asarray(state)


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis; ops[q] acts on qubit q."""

    ops: str

    def __post_init__(self):
        if not self.ops or any(c not in "IXYZ" for c in self.ops):
            raise ValueError(f"Pauli string must be nonempty over IXYZ, got {self.ops!r}")
        check_register_size(len(self.ops))

    @property
    def qubits(self):
        return len(self.ops)

    @property
    def support(self):
        return tuple(q for q, c in enumerate(self.ops) if c != "I")

    def is_identity(self):
        return all(c == "I" for c in self.ops)

    def to_matrix(self):
        # qubit 0 is least significant, so it is the rightmost kron factor
        m = np.array([[1.0 + 0.0j]])
        for c in reversed(self.ops):
            m = np.kron(m, PAULI[c])
        return m


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, PSD matrix over a qubit register."""

    matrix: np.ndarray
    qubits: int

    @classmethod
    def from_matrix(cls, matrix, qubits=None, check=True, check_psd=False):
        matrix = np.asarray(matrix, dtype=complex)
        dim = matrix.shape[0]
        if matrix.ndim != 2 or matrix.shape[1] != dim:
            raise ValueError(f"density matrix must be square, got shape {matrix.shape}")
        if qubits is None:
            qubits = dim.bit_length() - 1
        if 2**qubits != dim:
            raise ValueError(f"dimension {dim} is not 2^{qubits}")
        check_register_size(qubits)
        if check:
            herm = np.max(np.abs(matrix - matrix.conj().T))
            if herm > 1e-12:
                raise ValueError(f"not Hermitian: max |A - A^dag| = {herm:.3e} > 1e-12")
            tr = matrix.trace()
            if abs(tr - 1.0) > 1e-10:
                raise ValueError(f"trace {tr} deviates from 1 by more than 1e-10")
        if check_psd:
            lo = np.linalg.eigvalsh(matrix)[0]
            if lo < -1e-10:
                raise ValueError(f"negative eigenvalue {lo:.3e} below -1e-10")
        return cls(matrix=matrix, qubits=qubits)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def validate(self):
        """Re-run all invariants including the eigenvalue check."""
        return DensityMatrix.from_matrix(self.matrix, self.qubits, check=True, check_psd=True)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (ascending) and orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self):
        return self.values.shape[0]


def basis_state(index, qubits):
    """|index><index| as a DensityMatrix."""
    check_register_size(qubits)
    m = np.zeros((2**qubits, 2**qubits), dtype=complex)
    m[index, index] = 1.0
    return DensityMatrix(matrix=m, qubits=qubits)


def maximally_mixed(qubits):
    check_register_size(qubits)
    dim = 2**qubits
    return DensityMatrix(matrix=np.eye(dim, dtype=complex) / dim, qubits=qubits)


def _permute_qubits(mat, perm):
    """Relabel register qubits: destination perm[q] receives old qubit q."""
    n = len(perm)
    t = mat.reshape((2,) * (2 * n))
    # tensor axis a holds the row bit of qubit n-1-a; columns are offset by n
    order = [0] * (2 * n)
    for q_old, q_new in enumerate(perm):
        order[n - 1 - q_new] = n - 1 - q_old
        order[2 * n - 1 - q_new] = 2 * n - 1 - q_old
    return t.transpose(order).reshape(mat.shape)


def kron_embed(op, targets, total_qubits):
    """Embed op (acting on the listed qubits) into a total_qubits register.

    op is a 2^k x 2^k matrix whose own qubit j lands on register qubit
    targets[j]; all other register qubits get the identity.
    """
    check_register_size(total_qubits)
    op = np.asarray(op)
    targets = list(targets)
    k = len(targets)
    if len(set(targets)) != k:
        raise ValueError(f"duplicate target qubits in {targets}")
    if any(t < 0 or t >= total_qubits for t in targets):
        raise ValueError(f"target out of range for {total_qubits} qubits: {targets}")
    if op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {op.shape} does not match {k} target qubits")
    full = np.kron(op, np.eye(2 ** (total_qubits - k), dtype=op.dtype))
    # op's qubit j currently sits at register position total-k+j; identity
    # factors occupy 0..total-k-1 and fill the non-target slots in order
    rest = [q for q in range(total_qubits) if q not in targets]
    perm = [0] * total_qubits
    for j, t in enumerate(targets):
        perm[total_qubits - k + j] = t
    for i, r in enumerate(rest):
        perm[i] = r
    return _permute_qubits(full, perm)


def partial_trace(rho, keep):
    """Trace out all qubits not in keep; kept qubits are relabeled in
    ascending order (lowest kept index becomes qubit 0)."""
    arr = _as_array(rho)
    dim = arr.shape[0]
    n = dim.bit_length() - 1
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep set must be nonempty")
    if any(q < 0 or q >= n for q in keep):
        raise ValueError(f"keep indices {keep} out of range for {n} qubits")
    t = arr.reshape((2,) * (2 * n))
    row = lambda q: n - 1 - q
    col = lambda q: 2 * n - 1 - q
    labels = list(range(2 * n))
    for q in range(n):
        if q not in keep:
            labels[col(q)] = labels[row(q)]
    out = [labels[row(q)] for q in reversed(keep)] + [labels[col(q)] for q in reversed(keep)]
    k = len(keep)
    reduced = np.einsum(t, labels, out).reshape(2**k, 2**k)
    if isinstance(rho, DensityMatrix):
        return DensityMatrix.from_matrix(reduced, qubits=k, check=False)
    return reduced


def herm_eig(op, atol=1e-10):
    """Eigendecompose a Hermitian operator.

    Eigenvalues ascend; each eigenvector's largest-magnitude component is
    made real positive, and near-degenerate groups are ordered by the
    lexicographic order of the rounded components so reporting is stable
    across runs even when the spectrum has ties.
    """
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError(f"operator must be square, got {op.shape}")
    dev = np.max(np.abs(op - op.conj().T)) if op.size else 0.0
    if dev > atol:
        raise ValueError(f"not Hermitian: max |A - A^dag| = {dev:.3e} > {atol:g}")
    w, v = np.linalg.eigh(op)
    v = np.array(v, dtype=complex if np.iscomplexobj(op) else float)
    for j in range(v.shape[1]):
        i = int(np.argmax(np.abs(v[:, j])))
        ph = v[i, j]
        if ph != 0:
            v[:, j] = v[:, j] * (ph.conjugate() / abs(ph))
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
    tol = 1e-12 * scale
    i = 0
    while i < len(w):
        j = i + 1
        while j < len(w) and w[j] - w[j - 1] <= tol:
            j += 1
        if j - i > 1:
            def key(c):
                col = v[:, c]
                return tuple(zip(np.round(col.real, 10), np.round(col.imag, 10)))
            order = sorted(range(i, j), key=key)
            v[:, i:j] = v[:, order]
            w[i:j] = w[order]
        i = j
    return Spectrum(values=w, vectors=v)


def unitary_of(h, t):
    """exp(-i h t) through the eigendecomposition of Hermitian h."""
    spec = herm_eig(h)
    phases = np.exp(-1j * spec.values * t)
    return (spec.vectors * phases) @ spec.vectors.conj().T


def trace_distance(a, b):
    """(1/2) * sum |eigenvalues(a - b)|, in [0, 1] for states."""
    am, bm = _as_array(a), _as_array(b)
    if am.shape != bm.shape:
        raise ValueError(f"dimension mismatch: {am.shape} vs {bm.shape}")
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(am - bm))))


def _clamped_probs(w, tol=1e-10):
    lo = float(np.min(w)) if w.size else 0.0
    if lo < -tol:
        raise ValueError(f"negative eigenvalue {lo:.3e} below -{tol:g}")
    return np.clip(w, 0.0, None)


def von_neumann_entropy(rho):
    """-sum p log p over the eigenvalues, natural log, 0 log 0 := 0."""
    p = _clamped_probs(np.linalg.eigvalsh(_as_array(rho)))
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


def relative_entropy(a, b, support_tol=1e-14):
    """S(a||b) = Tr a (log a - log b), natural log.

    Returns +inf when a has weight outside b's numerical support
    (eigenvalues of b at or below support_tol).
    """
    am, bm = _as_array(a), _as_array(b)
    if am.shape != bm.shape:
        raise ValueError(f"dimension mismatch: {am.shape} vs {bm.shape}")
    pa = _clamped_probs(np.linalg.eigvalsh(am))
    nz = pa[pa > 0]
    tr_a_log_a = float(np.sum(nz * np.log(nz)))
    wb, vb = np.linalg.eigh(bm)
    weights = np.real(np.einsum("ij,ji->i", vb.conj().T @ am, vb))
    null = wb <= support_tol
    if np.any(weights[null] > 1e-12):
        return math.inf
    ok = ~null
    tr_a_log_b = float(np.sum(weights[ok] * np.log(wb[ok])))
    return tr_a_log_a - tr_a_log_b
