"""Free-energy minimization over a circuit's random parameters.

Treats the randomness of one frozen realization as decision variables:
for the monitored sampler the fixed-angle set of a mode-3 run, for the
cycle simulation the ancilla frequencies (and optionally the coupling
coefficients) of a frozen draw sequence. The objective is the exact
output free energy F(rho) = Tr(rho H) - S(rho)/beta, which the Gibbs
state minimizes, so pushing F down pulls the noisy output toward the
thermal target.

The search is a deterministic coordinate descent: cycle through the
flattened parameters, probe +/- step (scaled per parameter block), keep
strict improvements, accelerate along an accepted direction, halve the
step after a fruitless sweep, and after convergence restart once or
twice at a coarser step. Evaluation count is capped by the budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._rng import sample_generator
from .ergodic import ErgodicConfig, cycle_channel, depolarize, draw_cycle
from .gibbs import exact_gibbs
from .operator_core import DensityMatrix, trace_distance
from .universal import UniversalConfig, _build_gates, simulate_angle_set

_UNIVERSAL_PARAMS = ("angles",)
_ERGODIC_PARAMS = ("frequencies", "couplings")

_MIN_STEP = 1e-6
_RESTART_STEP = 0.125
_MAX_RESTARTS = 2


def free_energy(rho, h, beta):
    """F(rho) = Tr(rho H) - S_vN(rho)/beta with the entropy in nats."""
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    rho_m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    hm = h.to_matrix() if hasattr(h, "to_matrix") else np.asarray(h, dtype=complex)
    energy = float(np.real(np.trace(rho_m @ hm)))
    evals = np.clip(np.linalg.eigvalsh(0.5 * (rho_m + rho_m.conj().T)), 0.0, None)
    pos = evals[evals > 0]
    entropy = float(-np.sum(pos * np.log(pos)))
    return energy - entropy / beta


@dataclass(frozen=True)
class MitigationProblem:
    """A frozen noisy run plus the parameter subset the optimizer may move."""

    base_config: object
    adjustable: tuple
    budget: int = 500
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "adjustable", tuple(self.adjustable))

    def validate(self):
        if len(self.adjustable) == 0:
            raise ValueError("adjustable parameter set must be non-empty")
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        if isinstance(self.base_config, UniversalConfig):
            allowed = _UNIVERSAL_PARAMS
            if self.base_config.mode != 3:
                raise ValueError("universal mitigation needs a fixed-angle (mode 3) config")
        elif isinstance(self.base_config, ErgodicConfig):
            allowed = _ERGODIC_PARAMS
        else:
            raise ValueError(f"unsupported config type {type(self.base_config).__name__}")
        unknown = [a for a in self.adjustable if a not in allowed]
        if unknown:
            raise ValueError(f"unknown adjustable parameters {unknown}; allowed: {allowed}")
        self.base_config.validate()
        return self


@dataclass(frozen=True)
class MitigationResult:
    best_params: dict
    best_state: DensityMatrix
    f_before: float
    f_after: float
    trace_distance_before: float
    trace_distance_after: float
    improved: bool
    evaluations: int
    trajectory: np.ndarray = field(repr=False)


class _UniversalObjective:
    def __init__(self, config):
        self.config = config
        self.gates = _build_gates(config)
        self.hamiltonian = config.hamiltonian
        self.beta = config.beta

    def initial(self, adjustable):
        rng = sample_generator(self.config.seed, 0)
        return {"angles": rng.standard_normal((self.config.cycles, len(self.gates)))}

    def scale(self, name):
        return 1.0

    def clip(self, name, values):
        return values

    def state(self, params):
        rho, prob = simulate_angle_set(self.config, params["angles"], self.gates)
        if self.config.undivided:
            rho = self.gates[0].from_eigen(rho)
        if prob < 1e-12:
            return None
        out = rho / prob
        return DensityMatrix.from_matrix(0.5 * (out + out.conj().T), check=False)


class _ErgodicObjective:
    """Evolves the maximally mixed state through one frozen draw sequence."""

    def __init__(self, config):
        self.config = config
        rng = sample_generator(config.seed, 0)
        self.draws = [draw_cycle(config, rng) for _ in range(config.cycles)]
        self.hamiltonian = config.system_hamiltonian
        self.beta = config.beta

    def initial(self, adjustable):
        params = {}
        if "frequencies" in adjustable:
            params["frequencies"] = np.stack([d.omegas for d in self.draws])
        if "couplings" in adjustable:
            params["couplings"] = np.stack(
                [np.stack([d.a for d in self.draws]), np.stack([d.b for d in self.draws])]
            )
        return params

    def scale(self, name):
        return self.config.omega if name == "frequencies" else 1.0

    def clip(self, name, values):
        if name == "frequencies":
            return np.clip(values, -self.config.omega, self.config.omega)
        return values

    def state(self, params):
        cfg = self.config
        n = cfg.n_system
        rho = np.eye(2**n, dtype=complex) / 2**n
        for k, draw in enumerate(self.draws, start=1):
            kwargs = {}
            if "frequencies" in params:
                kwargs["omegas"] = params["frequencies"][k - 1]
            if "couplings" in params:
                kwargs["a"] = params["couplings"][0, k - 1]
                kwargs["b"] = params["couplings"][1, k - 1]
            if kwargs:
                draw = replace(draw, **kwargs)
            rho = cycle_channel(rho, cfg, draw, lam=cfg.lambda_at(k)).matrix
            if cfg.noise_rate > 0:
                p = min(cfg.noise_rate * draw.t, 0.25)
                for q in range(n):
                    rho = depolarize(rho, q, p).matrix
        return DensityMatrix.from_matrix(rho, check=False)


def _make_objective(config):
    if isinstance(config, UniversalConfig):
        return _UniversalObjective(config)
    return _ErgodicObjective(config)


def _flatten(params, names):
    parts = [np.asarray(params[n], dtype=float).ravel() for n in names]
    shapes = [np.asarray(params[n]).shape for n in names]
    return np.concatenate(parts), shapes


def _unflatten(vector, names, shapes):
    params = {}
    pos = 0
    for name, shape in zip(names, shapes):
        size = int(np.prod(shape))
        params[name] = vector[pos : pos + size].reshape(shape)
        pos += size
    return params


def optimize(problem):
    """Minimize the output free energy within the evaluation budget.

    The first evaluation is the unmodified frozen realization, so
    f_before matches the plain noisy run; only strict improvements are
    ever accepted, hence f_after <= f_before.
    """
    problem.validate()
    obj = _make_objective(problem.base_config)
    gibbs = exact_gibbs(obj.hamiltonian, obj.beta)
    names = [n for n in ("angles", "frequencies", "couplings") if n in problem.adjustable]
    params0 = obj.initial(problem.adjustable)
    x0, shapes = _flatten(params0, names)
    scales = np.concatenate(
        [np.full(int(np.prod(s)), obj.scale(n)) for n, s in zip(names, shapes)]
    )

    trajectory = []

    def evaluate(vector):
        params = _unflatten(vector, names, shapes)
        state = obj.state(params)
        if state is None:
            f, td = math.inf, math.inf
        else:
            f = free_energy(state, obj.hamiltonian, obj.beta)
            td = trace_distance(state, gibbs.rho)
        trajectory.append((len(trajectory), f, td))
        return f, td, state

    def clip_vector(vector):
        params = _unflatten(vector, names, shapes)
        clipped = {n: obj.clip(n, params[n]) for n in names}
        return _flatten(clipped, names)[0]

    f0, td0, state0 = evaluate(x0)
    best_f, best_td, best_x, best_state = f0, td0, x0, state0
    evals = 1

    step = 0.25
    restarts = 0
    dim = len(x0)
    while evals < problem.budget:
        improved_sweep = False
        for i in range(dim):
            if evals >= problem.budget:
                break
            for sign in (1.0, -1.0):
                if evals >= problem.budget:
                    break
                cand = best_x.copy()
                cand[i] += sign * step * scales[i]
                cand = clip_vector(cand)
                f, td, state = evaluate(cand)
                evals += 1
                if f < best_f:
                    best_f, best_td, best_x, best_state = f, td, cand, state
                    improved_sweep = True
                    # ride the descent direction while it keeps paying
                    while evals < problem.budget:
                        again = best_x.copy()
                        again[i] += sign * step * scales[i]
                        again = clip_vector(again)
                        f2, td2, state2 = evaluate(again)
                        evals += 1
                        if f2 < best_f:
                            best_f, best_td, best_x, best_state = f2, td2, again, state2
                        else:
                            break
                    break
        if not improved_sweep:
            step *= 0.5
            if step < _MIN_STEP:
                if restarts >= _MAX_RESTARTS:
                    break
                restarts += 1
                step = _RESTART_STEP

    return MitigationResult(
        best_params=_unflatten(best_x, names, shapes),
        best_state=best_state,
        f_before=f0,
        f_after=best_f,
        trace_distance_before=td0,
        trace_distance_after=best_td,
        improved=best_f < f0,
        evaluations=evals,
        trajectory=np.array(trajectory, dtype=float),
    )
