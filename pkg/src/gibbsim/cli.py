"""Experiment command line: config resolution, runs, CSV/manifest output.

Subcommands: exact | ergodic | universal | gap | mitigate. Each takes a
TOML config (--config) or a bundled preset (--preset), writes its CSV
files plus a manifest.json into --out, and exits 0 on success, 2 on a
configuration problem, 1 on a runtime failure. A manifest.json from an
earlier run can be passed back as --config to replay it bit-exactly.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import _io
from ._io import ConfigError

PRESET_NAMES = ("fig1c", "fig2-ergodic", "fig2-universal", "figs3")

_TOP_TABLES = {
    "exact": {"run", "hamiltonian", "exact"},
    "ergodic": {"run", "hamiltonian", "ergodic"},
    "universal": {"run", "hamiltonian", "universal"},
    "gap": {"run", "gap"},
    "mitigate": {"run", "hamiltonian", "mitigate", "universal", "ergodic"},
}


def _load_preset(name):
    from importlib.resources import files

    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")
    text = files("gibbsim").joinpath("presets", f"{name}.toml").read_text(encoding="utf-8")
    return _io.tomllib.loads(text)


def _require_table(cfg, name):
    if name not in cfg:
        raise ConfigError(f"missing required table [{name}]")
    table = cfg[name]
    if not isinstance(table, dict):
        raise ConfigError(f"[{name}] must be a table")
    return table


def _check_top_level(cfg, command):
    unknown = sorted(set(cfg) - _TOP_TABLES[command])
    if unknown:
        raise ConfigError(f"unknown top-level tables for '{command}': {', '.join(unknown)}")


def _resolve_run(cfg, args):
    run = cfg.get("run", {})
    _io.check_keys(run, "run", (), ("seed", "threads"))
    seed = _io.get_number(run, "run", "seed", default=0, integer=True, minimum=0)
    threads = _io.get_number(run, "run", "threads", default=0, integer=True, minimum=0)
    if args.seed is not None:
        seed = args.seed
    if args.threads is not None:
        threads = args.threads
    return seed, threads


# --------------------------------------------------------- command: exact


def _resolve_exact(cfg):
    h = _io.build_hamiltonian(_require_table(cfg, "hamiltonian"))
    table = _require_table(cfg, "exact")
    _io.check_keys(table, "exact", ("beta",), ("beta_sweep",))
    beta = _io.get_number(table, "exact", "beta", minimum=0.0)
    sweep = _io.get_number_list(table, "exact", "beta_sweep", default=None, minimum=0.0)
    return h, beta, sweep


def _run_exact(cfg, outdir, seed):
    from .gibbs import eigen_table, exact_gibbs, thermal_energy

    h, beta, sweep = _resolve_exact(cfg)
    g = exact_gibbs(h, beta)
    outputs = [
        _io.write_csv(outdir / "eigen_table.csv", ("mu", "E_mu", "p_mu"), eigen_table(g))
    ]
    betas = sweep if sweep is not None else [beta]
    outputs.append(
        _io.write_csv(
            outdir / "energy_curve.csv",
            ("beta", "energy"),
            [(b, thermal_energy(h, b)) for b in betas],
        )
    )
    section = {"beta": beta}
    if sweep is not None:
        section["beta_sweep"] = sweep
    resolved = {
        "run": {"seed": seed},
        "hamiltonian": _io.hamiltonian_section(cfg["hamiltonian"]),
        "exact": section,
    }
    return outputs, resolved


# ------------------------------------------------------- command: ergodic


def _resolve_ergodic(cfg, seed):
    from .ergodic import ErgodicConfig

    h = _io.build_hamiltonian(_require_table(cfg, "hamiltonian"))
    table = _require_table(cfg, "ergodic")
    _io.check_keys(
        table,
        "ergodic",
        ("n_ancilla", "beta", "lam", "gamma", "omega", "cycles", "samples"),
        ("noise_rate", "lambda_schedule", "ancilla_map"),
    )
    ancilla_map = _io.get_number_list(
        table, "ergodic", "ancilla_map", default=None, integer=True, minimum=0
    )
    config = ErgodicConfig(
        system_hamiltonian=h,
        n_ancilla=_io.get_number(table, "ergodic", "n_ancilla", integer=True, minimum=1),
        beta=_io.get_number(table, "ergodic", "beta", minimum=0.0),
        lam=_io.get_number(table, "ergodic", "lam"),
        gamma=_io.get_number(table, "ergodic", "gamma"),
        omega=_io.get_number(table, "ergodic", "omega"),
        cycles=_io.get_number(table, "ergodic", "cycles", integer=True, minimum=1),
        samples=_io.get_number(table, "ergodic", "samples", integer=True, minimum=1),
        seed=seed,
        noise_rate=_io.get_number(table, "ergodic", "noise_rate", default=0.0, minimum=0.0),
        ancilla_map=tuple(ancilla_map) if ancilla_map is not None else None,
        lambda_schedule=_io.get_string(
            table, "ergodic", "lambda_schedule", default="constant"
        ),
    )
    try:
        config.validate()
    except ValueError as exc:
        raise ConfigError(f"[ergodic] {exc}") from exc
    return config


def _ergodic_section(config):
    return {
        "n_ancilla": config.n_ancilla,
        "beta": config.beta,
        "lam": config.lam,
        "gamma": config.gamma,
        "omega": config.omega,
        "cycles": config.cycles,
        "samples": config.samples,
        "noise_rate": config.noise_rate,
        "lambda_schedule": config.lambda_schedule,
        "ancilla_map": list(config.ancilla_map),
    }


def _eigenstate_rows(gibbs, sim_probs, records):
    stacked = np.stack([r.eigen_probs for r in records])
    if stacked.shape[0] > 1:
        stderr = stacked.std(axis=0, ddof=1) / np.sqrt(stacked.shape[0])
    else:
        stderr = np.zeros(stacked.shape[1])
    return [
        (mu, gibbs.energies[mu], gibbs.eigen_probs[mu], sim_probs[mu], stderr[mu])
        for mu in range(len(gibbs.energies))
    ]


def _run_ergodic(cfg, outdir, seed):
    from .ergodic import run_ergodic
    from .gibbs import exact_gibbs

    config = _resolve_ergodic(cfg, seed)
    res = run_ergodic(config)
    gibbs = exact_gibbs(config.system_hamiltonian, config.beta)
    outputs = [
        _io.write_csv(
            outdir / "eigenstates.csv",
            ("mu", "E_mu", "p_mu_exact", "p_mu_sim", "stderr"),
            _eigenstate_rows(gibbs, res.eigen_probs, res.records),
        ),
        _io.write_csv(
            outdir / "convergence.csv",
            ("cycle", "trace_distance", "energy"),
            [
                (k + 1, res.per_cycle_trace_distance[k], res.per_cycle_energy[k])
                for k in range(config.cycles)
            ],
        ),
    ]
    resolved = {
        "run": {"seed": seed},
        "hamiltonian": _io.hamiltonian_section(cfg["hamiltonian"]),
        "ergodic": _ergodic_section(config),
    }
    return outputs, resolved


# ----------------------------------------------------- command: universal


def _resolve_universal(cfg, seed):
    from .universal import UniversalConfig

    h = _io.build_hamiltonian(_require_table(cfg, "hamiltonian"))
    table = _require_table(cfg, "universal")
    _io.check_keys(
        table,
        "universal",
        ("beta", "cycles", "samples"),
        ("mode", "p2", "p3", "undivided", "depth_sweep"),
    )
    config = UniversalConfig(
        hamiltonian=h,
        beta=_io.get_number(table, "universal", "beta", minimum=0.0),
        cycles=_io.get_number(table, "universal", "cycles", integer=True, minimum=1),
        mode=_io.get_number(table, "universal", "mode", default=1, integer=True),
        samples=_io.get_number(table, "universal", "samples", integer=True, minimum=1),
        seed=seed,
        p2=_io.get_number(table, "universal", "p2", default=0.0, minimum=0.0),
        p3=_io.get_number(table, "universal", "p3", default=0.0, minimum=0.0),
        undivided=_io.get_bool(table, "universal", "undivided", False),
    )
    sweep = _io.get_number_list(table, "universal", "depth_sweep", default=None, integer=True, minimum=1)
    try:
        config.validate()
    except ValueError as exc:
        raise ConfigError(f"[universal] {exc}") from exc
    return config, sweep


def _universal_section(config, sweep):
    section = {
        "beta": config.beta,
        "cycles": config.cycles,
        "mode": config.mode,
        "samples": config.samples,
        "p2": config.p2,
        "p3": config.p3,
        "undivided": config.undivided,
    }
    if sweep is not None:
        section["depth_sweep"] = sweep
    return section


def _run_universal(cfg, outdir, seed):
    from .gibbs import exact_gibbs
    from .universal import run_universal

    config, sweep = _resolve_universal(cfg, seed)
    res = run_universal(config)
    gibbs = exact_gibbs(config.hamiltonian, config.beta)
    outputs = [
        _io.write_csv(
            outdir / "eigenstates.csv",
            ("mu", "E_mu", "p_mu_exact", "p_mu_sim", "stderr"),
            _eigenstate_rows(gibbs, res.eigen_probs, res.records),
        )
    ]
    scaling_rows = []
    for d in sweep if sweep is not None else [config.cycles]:
        if d == config.cycles and config.mode == 1:
            point = res
        else:
            point = run_universal(replace(config, cycles=d, mode=1))
        s3 = float(np.mean([r.relative_entropy for r in point.records]))
        scaling_rows.append(
            (d, point.xi, point.relative_entropy_to_gibbs, s3, point.success_probability)
        )
    outputs.append(
        _io.write_csv(
            outdir / "scaling.csv",
            ("d", "xi", "S_mode1", "S_mode3_mean", "success_prob"),
            scaling_rows,
        )
    )
    resolved = {
        "run": {"seed": seed},
        "hamiltonian": _io.hamiltonian_section(cfg["hamiltonian"]),
        "universal": _universal_section(config, sweep),
    }
    return outputs, resolved


# ----------------------------------------------------------- command: gap


def _resolve_gap(cfg):
    table = _require_table(cfg, "gap")
    _io.check_keys(
        table, "gap", ("sizes", "J", "U", "beta", "omega", "gamma"), ("half_filled",)
    )
    sizes = _io.get_number_list(table, "gap", "sizes", default=None, integer=True, minimum=2)
    if sizes is None:
        raise ConfigError("missing key 'sizes' in [gap]")
    half_filled = _io.get_bool(table, "gap", "half_filled", True)
    if half_filled and any(n % 2 for n in sizes):
        raise ConfigError("[gap] half_filled chains need even sizes")
    return {
        "sizes": sizes,
        "J": _io.get_number(table, "gap", "J"),
        "U": _io.get_number(table, "gap", "U"),
        "beta": _io.get_number(table, "gap", "beta", minimum=0.0),
        "omega": _io.get_number(table, "gap", "omega"),
        "gamma": _io.get_number(table, "gap", "gamma"),
        "half_filled": half_filled,
    }


def _run_gap(cfg, outdir, seed):
    from .hamiltonian import hardcore_bose_hubbard_1d, total_z_matrix
    from .markov import build_transition_matrix, density_couplings, spectral_gap

    settings = _resolve_gap(cfg)
    rows = []
    outputs = []
    for n in settings["sizes"]:
        h = hardcore_bose_hubbard_1d(n, settings["J"], settings["U"])
        sector = (total_z_matrix(n), 0.0) if settings["half_filled"] else None
        tm = build_transition_matrix(
            h,
            density_couplings(n),
            settings["beta"],
            settings["omega"],
            settings["gamma"],
            sector=sector,
        )
        gap = spectral_gap(tm).gap
        rows.append((n, tm.dim, gap, 1.0 / gap))
        if tm.dim <= 70:
            outputs.append(
                _io.write_json(
                    outdir / f"tmatrix_n{n}.json",
                    {
                        "n": n,
                        "dim": tm.dim,
                        "beta": tm.beta,
                        "omega": tm.omega,
                        "gamma": tm.gamma,
                        "energies": [float(e) for e in tm.energies],
                        "transition_matrix": [[float(x) for x in row] for row in tm.T],
                    },
                )
            )
    outputs.insert(
        0,
        _io.write_csv(outdir / "gap.csv", ("n", "dim_sector", "gap", "inverse_gap"), rows),
    )
    resolved = {"run": {"seed": seed}, "gap": settings}
    return outputs, resolved


# ------------------------------------------------------ command: mitigate


def _resolve_mitigate(cfg, seed):
    from .mitigation import MitigationProblem

    table = _require_table(cfg, "mitigate")
    _io.check_keys(table, "mitigate", ("simulator", "adjustable"), ("budget",))
    simulator = _io.get_string(
        table, "mitigate", "simulator", choices=("universal", "ergodic")
    )
    raw_adjustable = table.get("adjustable")
    if (
        not isinstance(raw_adjustable, list)
        or len(raw_adjustable) == 0
        or not all(isinstance(a, str) for a in raw_adjustable)
    ):
        raise ConfigError("[mitigate] adjustable must be a non-empty array of strings")
    budget = _io.get_number(table, "mitigate", "budget", default=500, integer=True, minimum=1)

    other = "ergodic" if simulator == "universal" else "universal"
    if other in cfg:
        raise ConfigError(f"unexpected [{other}] table for simulator = {simulator!r}")
    if simulator == "universal":
        base, sweep = _resolve_universal(cfg, seed)
        if sweep is not None:
            raise ConfigError("[universal] depth_sweep is not meaningful under mitigate")
    else:
        base = _resolve_ergodic(cfg, seed)
    problem = MitigationProblem(
        base_config=base, adjustable=tuple(raw_adjustable), budget=budget, seed=seed
    )
    try:
        problem.validate()
    except ValueError as exc:
        raise ConfigError(f"[mitigate] {exc}") from exc
    return problem, simulator


def _run_mitigate(cfg, outdir, seed):
    from .mitigation import optimize

    problem, simulator = _resolve_mitigate(cfg, seed)
    res = optimize(problem)
    outputs = [
        _io.write_csv(
            outdir / "trajectory.csv",
            ("evaluation_index", "F", "trace_distance_to_gibbs"),
            [(int(i), f, td) for i, f, td in res.trajectory],
        ),
        _io.write_json(
            outdir / "best_params.json",
            {
                "simulator": simulator,
                "adjustable": list(problem.adjustable),
                "budget": problem.budget,
                "improved": res.improved,
                "evaluations": res.evaluations,
                "f_before": res.f_before,
                "f_after": res.f_after,
                "trace_distance_before": res.trace_distance_before,
                "trace_distance_after": res.trace_distance_after,
                "best_params": {k: v.tolist() for k, v in res.best_params.items()},
            },
        ),
    ]
    resolved = {
        "run": {"seed": seed},
        "hamiltonian": _io.hamiltonian_section(cfg["hamiltonian"]),
        "mitigate": {
            "simulator": simulator,
            "adjustable": list(problem.adjustable),
            "budget": problem.budget,
        },
    }
    if simulator == "universal":
        resolved["universal"] = _universal_section(problem.base_config, None)
    else:
        resolved["ergodic"] = _ergodic_section(problem.base_config)
    return outputs, resolved


_RUNNERS = {
    "exact": _run_exact,
    "ergodic": _run_ergodic,
    "universal": _run_universal,
    "gap": _run_gap,
    "mitigate": _run_mitigate,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gibbsim",
        description="Gibbs-state preparation experiments: exact references, "
        "cycle and monitored-circuit simulations, chain gaps, mitigation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("exact", "exact Gibbs eigenstate table and energy curve"),
        ("ergodic", "cycle-channel Monte-Carlo run"),
        ("universal", "monitored random-circuit run (optionally a depth sweep)"),
        ("gap", "transition-matrix spectral gaps over chain sizes"),
        ("mitigate", "free-energy parameter optimization of a noisy run"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", type=Path, help="TOML config or manifest.json to replay")
        p.add_argument("--preset", help=f"bundled preset: {', '.join(PRESET_NAMES)}")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--threads", type=int, help="override the worker thread count (0 = auto)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if (args.config is None) == (args.preset is None):
            raise ConfigError("exactly one of --config or --preset is required")
        if args.config is not None:
            cfg, manifest_command = _io.load_config(args.config)
            if manifest_command is not None and manifest_command != args.command:
                raise ConfigError(
                    f"manifest records subcommand {manifest_command!r}, "
                    f"but {args.command!r} was invoked"
                )
        else:
            cfg = _load_preset(args.preset)
        _check_top_level(cfg, args.command)
        seed, threads = _resolve_run(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    outdir = args.out
    started = time.monotonic()
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        try:
            outputs, resolved = _RUNNERS[args.command](cfg, outdir, seed)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        resolved["run"]["threads"] = threads
        manifest = {
            "schema": 1,
            "subcommand": args.command,
            "config": resolved,
            "seed": seed,
            "code_version": _io.code_version(),
            "wall_clock_seconds": round(time.monotonic() - started, 6),
            "outputs": sorted(p.name for p in outputs),
        }
        manifest_path = _io.write_json(outdir / "manifest.json", manifest)
    except Exception as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1
    for path in outputs + [manifest_path]:
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
