"""Cycle-channel simulator: thermal resets, joint evolution, noise."""

import math

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.special import expit

from gibbsim._rng import sample_generator
from gibbsim.ergodic import (
    CycleDraw,
    ErgodicConfig,
    ancilla_thermal_state,
    build_cycle_hamiltonian,
    cycle_channel,
    depolarize,
    draw_cycle,
    run_ergodic,
)
from gibbsim.gibbs import exact_gibbs
from gibbsim.hamiltonian import hardcore_bose_hubbard_1d, pauli_sum
from gibbsim.operator_core import (
    DensityMatrix,
    herm_eig,
    trace_distance,
    unitary_of,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)

Z1 = pauli_sum([(1.0, "Z")], 1)


def config(h, **kw):
    base = dict(
        system_hamiltonian=h,
        n_ancilla=1,
        beta=1.0,
        lam=0.2,
        gamma=0.1,
        omega=2.0,
        cycles=5,
        samples=10,
        seed=0,
    )
    base.update(kw)
    return ErgodicConfig(**base)


# ------------------------------------------------------------ thermal reset


def test_thermal_state_infinite_temperature():
    rho = ancilla_thermal_state(0.0, [1.0, 2.0])
    assert np.allclose(rho.matrix, np.eye(4) / 4, atol=1e-15)


def test_thermal_state_saturation():
    rho = ancilla_thermal_state(1.0, [50.0])
    assert rho.matrix[0, 0].real < 1e-20
    assert rho.matrix[1, 1].real == pytest.approx(1.0, abs=1e-20)


def test_thermal_state_unit_splitting():
    rho = ancilla_thermal_state(1.0, [1.0])
    assert rho.matrix[0, 0].real == pytest.approx(0.2689414213699951, abs=1e-15)
    assert rho.matrix[1, 1].real == pytest.approx(0.7310585786300049, abs=1e-15)
    assert rho.matrix[0, 0].real == pytest.approx(0.26894, abs=1e-5)


def test_thermal_state_product_structure():
    beta, omegas = 0.8, [1.0, -0.5, 2.0]
    rho = ancilla_thermal_state(beta, omegas)
    diag = np.diag(rho.matrix).real
    factors = [(expit(-beta * w), expit(beta * w)) for w in omegas]
    for j in range(8):
        expect = 1.0
        for m in range(3):
            expect *= factors[m][(j >> m) & 1]
        assert diag[j] == pytest.approx(expect, abs=1e-14)
    assert np.sum(diag) == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(rho.matrix - np.diag(diag))) < 1e-15


# ------------------------------------------------------------ cycle channel


def test_cycle_matches_four_by_four_brute_force():
    cfg = config(Z1, lam=0.3, omega=1.0)
    draw = CycleDraw(t=1.0, omegas=np.array([0.5]), a=np.array([1.0]), b=np.array([0.0]))
    rho = np.array([[0.6, 0.2 - 0.1j], [0.2 + 0.1j, 0.4]], dtype=complex)

    # brute force: explicit 4x4 joint Hamiltonian, expm, manual trace-out
    hfull = np.kron(I2, Z) + 0.25 * np.kron(Z, I2) + 0.3 * np.kron(X, X)
    p0 = expit(-1.0 * 0.5)
    sigma = np.diag([p0, 1 - p0]).astype(complex)
    u = expm(-1j * hfull * 1.0)
    full = u @ np.kron(sigma, rho) @ u.conj().T
    expected = full[:2, :2] + full[2:, 2:]

    out = cycle_channel(DensityMatrix.from_matrix(rho), cfg, draw)
    assert np.max(np.abs(out.matrix - expected)) < 1e-12


def test_cycle_hamiltonian_layout():
    cfg = config(Z1, lam=0.7, omega=1.0)
    draw = CycleDraw(t=1.0, omegas=np.array([0.4]), a=np.array([0.2]), b=np.array([-1.1]))
    hm = build_cycle_hamiltonian(cfg, draw)
    v = 0.2 * X + (-1.1) * Z
    expected = np.kron(I2, Z) + 0.2 * np.kron(Z, I2) + 0.7 * np.kron(X, v)
    assert np.max(np.abs(hm - expected)) < 1e-14


def test_zero_time_is_identity():
    cfg = config(Z1)
    draw = CycleDraw(t=0.0, omegas=np.array([0.5]), a=np.array([1.0]), b=np.array([1.0]))
    rho = DensityMatrix.from_matrix(np.array([[0.7, 0.1], [0.1, 0.3]], dtype=complex))
    out = cycle_channel(rho, cfg, draw)
    assert np.max(np.abs(out.matrix - rho.matrix)) < 1e-12


def test_decoupled_cycle_is_free_evolution():
    h = hardcore_bose_hubbard_1d(2, 1.0, 0.5)
    cfg = config(h, lam=0.0, n_ancilla=1)
    draw = CycleDraw(t=0.9, omegas=np.array([1.3]), a=np.array([0.4]), b=np.array([2.0]))
    rng = np.random.default_rng(2)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    m = m @ m.conj().T
    rho = DensityMatrix.from_matrix(m / np.trace(m))
    out = cycle_channel(rho, cfg, draw)
    u = unitary_of(h.to_matrix(), 0.9)
    assert np.max(np.abs(out.matrix - u @ rho.matrix @ u.conj().T)) < 1e-11
    # eigenbasis diagonal untouched
    spec = herm_eig(h.to_matrix())
    before = np.diag(spec.vectors.conj().T @ rho.matrix @ spec.vectors)
    after = np.diag(spec.vectors.conj().T @ out.matrix @ spec.vectors)
    assert np.max(np.abs(before - after)) < 1e-12


def test_cycle_preserves_trace_and_positivity():
    h = hardcore_bose_hubbard_1d(2, 1.0, 1.0)
    cfg = config(h, n_ancilla=2, lam=0.5, samples=1)
    rng = np.random.default_rng(17)
    rho = np.eye(4, dtype=complex) / 4
    state = DensityMatrix.from_matrix(rho)
    for _ in range(500):
        draw = draw_cycle(cfg, rng)
        state = cycle_channel(state, cfg, draw)
        assert abs(np.trace(state.matrix).real - 1.0) < 1e-10
        assert np.linalg.eigvalsh(state.matrix)[0] >= -1e-10


def test_monte_carlo_self_consistency():
    # finite draw set: MC average over uniform picks vs the exact mean
    cfg = config(Z1, lam=0.4, omega=1.0)
    draws = [
        CycleDraw(t=t, omegas=np.array([w]), a=np.array([a]), b=np.array([b]))
        for t, w, a, b in [(0.5, 0.3, 1.0, 0.0), (1.5, -0.8, 0.0, 1.0), (3.0, 0.9, 0.7, -0.7)]
    ]
    rho0 = DensityMatrix.from_matrix(np.array([[1.0, 0], [0, 0]], dtype=complex))
    outs = [cycle_channel(rho0, cfg, d).matrix for d in draws]
    exact = np.mean([np.real(o[0, 0]) for o in outs])

    rng = np.random.default_rng(23)
    picks = rng.integers(3, size=1500)
    vals = np.array([np.real(outs[i][0, 0]) for i in picks])
    sigma = vals.std(ddof=1) / math.sqrt(len(vals))
    assert abs(vals.mean() - exact) <= 3.0 * max(sigma, 1e-15)


# ---------------------------------------------------------------- depolarize


def test_depolarize_identity_at_zero():
    rho = DensityMatrix.from_matrix(np.array([[0.7, 0.2], [0.2, 0.3]], dtype=complex))
    assert np.allclose(depolarize(rho, 0, 0.0).matrix, rho.matrix, atol=1e-15)


def test_depolarize_examples():
    ket0 = DensityMatrix.from_matrix(np.diag([1.0, 0.0]).astype(complex))
    assert np.allclose(depolarize(ket0, 0, 0.25).matrix, np.eye(2) / 2, atol=1e-15)
    assert np.allclose(depolarize(ket0, 0, 0.1).matrix, np.diag([0.8, 0.2]), atol=1e-15)


def test_depolarize_range_check():
    rho = DensityMatrix.from_matrix(np.eye(2, dtype=complex) / 2)
    for p in (-0.01, 0.26, 1.0):
        with pytest.raises(ValueError):
            depolarize(rho, 0, p)


def test_depolarize_leaves_other_qubit_marginal():
    from gibbsim.operator_core import partial_trace

    bell = np.zeros((4, 4), dtype=complex)
    for i in (0, 3):
        for j in (0, 3):
            bell[i, j] = 0.5
    rho = DensityMatrix.from_matrix(bell)
    out = depolarize(rho, 0, 0.2)
    assert abs(np.trace(out.matrix) - 1.0) < 1e-12
    marg = partial_trace(out, [1])
    assert np.allclose(marg.matrix, np.eye(2) / 2, atol=1e-12)


# -------------------------------------------------------------------- runs


def test_run_validation():
    with pytest.raises(ValueError):
        config(Z1, cycles=0).validate()
    with pytest.raises(ValueError):
        config(Z1, samples=0).validate()
    with pytest.raises(ValueError):
        config(Z1, gamma=0.0).validate()
    with pytest.raises(ValueError):
        config(Z1, lambda_schedule="exp").validate()
    with pytest.raises(ValueError):
        config(Z1, ancilla_map=(5,)).validate()
    with pytest.raises(ValueError):
        config(hardcore_bose_hubbard_1d(8, 1, 1), n_ancilla=5).validate()
    with pytest.raises(ValueError):
        config(Z1, noise_rate=-0.1).validate()


def test_lambda_schedule_values():
    cfg = config(Z1, lam=0.5, cycles=10, lambda_schedule="linear-decay")
    assert cfg.lambda_at(1) == pytest.approx(0.5)
    assert cfg.lambda_at(6) == pytest.approx(0.25)
    assert cfg.lambda_at(10) == pytest.approx(0.05)
    assert config(Z1, lam=0.5).lambda_at(7) == pytest.approx(0.5)


def test_run_is_deterministic_per_seed():
    cfg = config(Z1, cycles=3, samples=5, seed=9)
    a = run_ergodic(cfg)
    b = run_ergodic(cfg)
    assert np.array_equal(a.mean_state.matrix, b.mean_state.matrix)
    assert np.array_equal(a.per_cycle_trace_distance, b.per_cycle_trace_distance)
    c = run_ergodic(config(Z1, cycles=3, samples=5, seed=10))
    assert not np.allclose(a.mean_state.matrix, c.mean_state.matrix, atol=1e-12)


def test_run_record_shapes():
    cfg = config(Z1, cycles=4, samples=6)
    res = run_ergodic(cfg)
    assert len(res.records) == 6
    assert res.per_cycle_trace_distance.shape == (4,)
    assert res.per_cycle_energy.shape == (4,)
    assert res.eigen_probs.shape == (2,)
    assert np.sum(res.eigen_probs) == pytest.approx(1.0, abs=1e-10)
    for r in res.records:
        assert np.all(r.eigen_probs > -1e-12)
        assert np.sum(r.eigen_probs) == pytest.approx(1.0, abs=1e-10)


def test_decoupled_run_keeps_initial_diagonal():
    cfg = config(Z1, lam=0.0, cycles=3, samples=4, seed=11)
    res = run_ergodic(cfg)
    spec = herm_eig(Z1.to_matrix())
    for r in res.records:
        rng = sample_generator(cfg.seed, r.sample_index)
        start = int(rng.integers(2))
        basis = np.zeros(2)
        basis[start] = 1.0
        expected = np.abs(spec.vectors.conj().T @ basis) ** 2
        assert np.allclose(r.eigen_probs, expected, atol=1e-10)


def test_infinite_temperature_run():
    cfg = config(Z1, beta=0.0, lam=0.3, cycles=5, samples=64, seed=5)
    res = run_ergodic(cfg)
    assert trace_distance(res.mean_state, exact_gibbs(Z1, 0.0).rho) < 0.1


def test_single_qubit_thermalization_trend():
    cfg = config(Z1, lam=0.2, gamma=0.05, omega=2.2, cycles=25, samples=150, seed=3)
    res = run_ergodic(cfg)
    td = res.per_cycle_trace_distance
    assert td[-1] < td[0]
    assert td[-1] < 0.12
    # energy relaxes toward the thermal value
    assert abs(res.per_cycle_energy[-1] - (-math.tanh(1.0))) < abs(
        res.per_cycle_energy[0] - (-math.tanh(1.0))
    )


def test_noisy_run_stays_valid():
    cfg = config(Z1, noise_rate=0.05, cycles=4, samples=8, seed=2)
    res = run_ergodic(cfg)
    assert abs(np.trace(res.mean_state.matrix).real - 1.0) < 1e-10
    assert np.linalg.eigvalsh(res.mean_state.matrix)[0] >= -1e-10
    # noise pushes the state toward the maximally mixed point
    clean = run_ergodic(config(Z1, noise_rate=0.0, cycles=4, samples=8, seed=2))
    noisy_purity = np.real(np.trace(res.mean_state.matrix @ res.mean_state.matrix))
    clean_purity = np.real(np.trace(clean.mean_state.matrix @ clean.mean_state.matrix))
    assert noisy_purity <= clean_purity + 1e-12
