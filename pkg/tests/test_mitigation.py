"""Free-energy objective and the parameter-descent mitigation loop."""

import itertools
import math

import numpy as np
import pytest

from gibbsim._rng import sample_generator
from gibbsim.ergodic import ErgodicConfig
from gibbsim.gibbs import exact_gibbs
from gibbsim.hamiltonian import pauli_sum
from gibbsim.mitigation import MitigationProblem, free_energy, optimize
from gibbsim.operator_core import DensityMatrix, relative_entropy
from gibbsim.universal import UniversalConfig, simulate_angle_set

Z1 = pauli_sum([(1.0, "Z")], 1)
XXZZ = pauli_sum([(1.0, "XX"), (-1.0, "ZI"), (-1.0, "IZ")], 2)


def random_state(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return DensityMatrix.from_matrix(rho / np.trace(rho).real, check=False)


# ------------------------------------------------------------- free energy


def test_free_energy_of_maximally_mixed_qubit():
    rho = DensityMatrix.from_matrix(np.eye(2, dtype=complex) / 2)
    assert free_energy(rho, Z1, 1.0) == pytest.approx(-math.log(2.0), abs=1e-12)


def test_gibbs_state_attains_minus_log_partition_over_beta():
    beta = 1.3
    g = exact_gibbs(XXZZ, beta)
    assert free_energy(g.rho, XXZZ, beta) == pytest.approx(
        -g.log_partition_function / beta, abs=1e-10
    )


def test_free_energy_requires_positive_beta():
    rho = DensityMatrix.from_matrix(np.eye(2, dtype=complex) / 2)
    for beta in (0.0, -1.0):
        with pytest.raises(ValueError, match="beta"):
            free_energy(rho, Z1, beta)


def test_variational_identity_on_random_states():
    # F(rho) - F(rho_beta) = S(rho || rho_beta) / beta, and never negative
    beta = 0.7
    g = exact_gibbs(XXZZ, beta)
    f_min = -g.log_partition_function / beta
    rng = np.random.default_rng(12)
    for _ in range(100):
        rho = random_state(rng, 4)
        gap = free_energy(rho, XXZZ, beta) - f_min
        assert gap == pytest.approx(relative_entropy(rho, g.rho) / beta, abs=1e-9)
        assert gap >= -1e-9


# ---------------------------------------------------------------- optimizer


def toy_config(**overrides):
    base = dict(hamiltonian=Z1, beta=1.0, cycles=2, mode=3, samples=1, seed=4, p2=0.05)
    base.update(overrides)
    return UniversalConfig(**base)


def test_optimizer_matches_brute_force_grid():
    cfg = toy_config()
    res = optimize(MitigationProblem(base_config=cfg, adjustable=("angles",), budget=400))

    def objective(a1, a2):
        rho, p = simulate_angle_set(cfg, np.array([[a1], [a2]]))
        return free_energy(rho / p, Z1, 1.0)

    coarse_axis = np.arange(-2.0, 2.0 + 1e-12, 0.05)
    best_f, best_at = math.inf, None
    for a1, a2 in itertools.product(coarse_axis, coarse_axis):
        f = objective(a1, a2)
        if f < best_f:
            best_f, best_at = f, (a1, a2)
    fine_axis = np.arange(-0.1, 0.1 + 1e-12, 0.01)
    for d1, d2 in itertools.product(fine_axis, fine_axis):
        f = objective(best_at[0] + d1, best_at[1] + d2)
        best_f = min(best_f, f)

    assert abs(res.f_after - best_f) <= 1e-4
    assert res.improved


def test_noiseless_descent_reaches_thermal_minimum():
    cfg = toy_config(p2=0.0)
    res = optimize(MitigationProblem(base_config=cfg, adjustable=("angles",), budget=400))
    f_min = -exact_gibbs(Z1, 1.0).log_partition_function
    assert res.f_after >= f_min - 1e-9
    assert res.f_after <= f_min + 1e-6
    assert res.trace_distance_after <= res.trace_distance_before + 1e-9
    assert res.trace_distance_after < 1e-5


def test_trajectory_records_every_evaluation():
    res = optimize(MitigationProblem(base_config=toy_config(), adjustable=("angles",), budget=120))
    assert res.trajectory.shape == (res.evaluations, 3)
    assert res.evaluations <= 120
    assert np.array_equal(res.trajectory[:, 0], np.arange(res.evaluations))
    assert res.trajectory[0, 1] == res.f_before
    assert res.f_after == np.min(res.trajectory[:, 1])
    assert res.f_after <= res.f_before
    # every evaluated state respects the variational lower bound
    f_min = -exact_gibbs(Z1, 1.0).log_partition_function
    finite = res.trajectory[np.isfinite(res.trajectory[:, 1]), 1]
    assert np.all(finite >= f_min - 1e-9)


def test_budget_one_flags_no_improvement():
    cfg = toy_config()
    res = optimize(MitigationProblem(base_config=cfg, adjustable=("angles",), budget=1))
    assert not res.improved
    assert res.evaluations == 1
    assert res.f_after == res.f_before
    assert res.trace_distance_after == res.trace_distance_before
    expected = sample_generator(cfg.seed, 0).standard_normal((2, 1))
    assert np.array_equal(res.best_params["angles"], expected)


def test_optimization_is_deterministic():
    problem = MitigationProblem(base_config=toy_config(), adjustable=("angles",), budget=90)
    a, b = optimize(problem), optimize(problem)
    assert np.array_equal(a.trajectory, b.trajectory)
    assert np.array_equal(a.best_params["angles"], b.best_params["angles"])


def test_problem_validation():
    ucfg = toy_config()
    with pytest.raises(ValueError, match="non-empty"):
        MitigationProblem(base_config=ucfg, adjustable=()).validate()
    with pytest.raises(ValueError, match="budget"):
        MitigationProblem(base_config=ucfg, adjustable=("angles",), budget=0).validate()
    with pytest.raises(ValueError, match="unknown adjustable"):
        MitigationProblem(base_config=ucfg, adjustable=("couplings",)).validate()
    with pytest.raises(ValueError, match="mode 3"):
        MitigationProblem(
            base_config=toy_config(mode=1), adjustable=("angles",)
        ).validate()
    with pytest.raises(ValueError, match="unsupported config"):
        MitigationProblem(base_config=Z1, adjustable=("angles",)).validate()


# ------------------------------------------------------------ ergodic path


def ergodic_config():
    return ErgodicConfig(
        system_hamiltonian=Z1,
        n_ancilla=1,
        beta=1.0,
        lam=0.3,
        gamma=0.1,
        omega=2.0,
        cycles=4,
        samples=1,
        seed=3,
        noise_rate=1e-3,
    )


def test_ergodic_frequency_tuning_improves_frozen_noisy_run():
    cfg = ergodic_config()
    res = optimize(MitigationProblem(base_config=cfg, adjustable=("frequencies",), budget=200))
    assert res.improved
    assert res.f_after < res.f_before
    assert res.trace_distance_after < res.trace_distance_before
    freqs = res.best_params["frequencies"]
    assert freqs.shape == (cfg.cycles, cfg.n_ancilla)
    assert np.max(np.abs(freqs)) <= cfg.omega + 1e-12


def test_ergodic_couplings_can_join_the_search():
    cfg = ergodic_config()
    res = optimize(
        MitigationProblem(base_config=cfg, adjustable=("frequencies", "couplings"), budget=200)
    )
    assert res.improved
    assert set(res.best_params) == {"frequencies", "couplings"}
    assert res.best_params["couplings"].shape == (2, cfg.cycles, cfg.n_ancilla)
    assert res.trace_distance_after < 0.1


def test_ergodic_rejects_universal_parameter_names():
    with pytest.raises(ValueError, match="unknown adjustable"):
        MitigationProblem(base_config=ergodic_config(), adjustable=("angles",)).validate()
