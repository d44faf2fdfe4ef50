"""Config loading, strict schema validation, and CSV/JSON emission.

Configs are TOML tables; every table rejects unknown keys so typos fail
before any computation starts. A previously written run manifest (JSON)
can stand in for the config file, which replays the recorded resolved
settings and reproduces the CSV outputs byte for byte.

CSV files open with the version comment `# schema=1`, then a header row;
floats are written with repr so they round-trip exactly.
"""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

CSV_SCHEMA_LINE = "# schema=1"


class ConfigError(Exception):
    """Invalid or inconsistent run configuration."""


# ------------------------------------------------------------- file output


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("boolean CSV cells are not part of the schema")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    raise TypeError(f"unsupported CSV cell type {type(value).__name__}")


def write_csv(path, columns, rows):
    path = Path(path)
    lines = [CSV_SCHEMA_LINE, ",".join(columns)]
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row width {len(row)} != {len(columns)} columns")
        lines.append(",".join(_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_json(path, payload):
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def code_version():
    """Package version plus the build's git describe when available."""
    try:
        from importlib.metadata import version

        base = version("gibbsim")
    except Exception:  # pragma: no cover
        base = "unknown"
    try:
        described = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True,
            text=True,
            timeout=5,
            cwd=Path(__file__).parent,
        )
        if described.returncode == 0:
            return f"{base}+{described.stdout.strip()}"
    except Exception:
        pass
    return base


# ------------------------------------------------------------ config input


def load_config(path):
    """Read a TOML config or a JSON manifest.

    Returns (config_dict, manifest_subcommand); the subcommand is None
    for plain TOML configs and the recorded one for manifests.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    if path.suffix.lower() == ".json":
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        if not isinstance(payload, dict) or "config" not in payload or "subcommand" not in payload:
            raise ConfigError(
                f"{path} is not a run manifest (expected 'subcommand' and 'config' keys)"
            )
        config = payload["config"]
        if not isinstance(config, dict):
            raise ConfigError(f"manifest 'config' must be a table, got {type(config).__name__}")
        return config, payload["subcommand"]
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh), None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc


def check_keys(table, where, required, optional=()):
    if not isinstance(table, dict):
        raise ConfigError(f"[{where}] must be a table")
    unknown = sorted(set(table) - set(required) - set(optional))
    if unknown:
        raise ConfigError(f"unknown keys in [{where}]: {', '.join(unknown)}")
    missing = [k for k in required if k not in table]
    if missing:
        raise ConfigError(f"missing keys in [{where}]: {', '.join(missing)}")


def get_number(table, where, key, default=None, minimum=None, integer=False):
    if key not in table:
        if default is None:
            raise ConfigError(f"missing key '{key}' in [{where}]")
        return default
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"[{where}] {key} must be a number, got {value!r}")
    if integer:
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"[{where}] {key} must be an integer, got {value!r}")
        value = int(value)
    else:
        value = float(value)
    if minimum is not None and value < minimum:
        raise ConfigError(f"[{where}] {key} must be >= {minimum}, got {value}")
    return value


def get_string(table, where, key, default=None, choices=None):
    if key not in table:
        if default is None:
            raise ConfigError(f"missing key '{key}' in [{where}]")
        return default
    value = table[key]
    if not isinstance(value, str):
        raise ConfigError(f"[{where}] {key} must be a string, got {value!r}")
    if choices is not None and value not in choices:
        raise ConfigError(f"[{where}] {key} must be one of {sorted(choices)}, got {value!r}")
    return value


def get_bool(table, where, key, default):
    value = table.get(key, default)
    if not isinstance(value, bool):
        raise ConfigError(f"[{where}] {key} must be a boolean, got {value!r}")
    return value


def get_number_list(table, where, key, default=None, integer=False, minimum=None):
    if key not in table:
        return default
    raw = table[key]
    if not isinstance(raw, list):
        raise ConfigError(f"[{where}] {key} must be an array, got {raw!r}")
    if len(raw) == 0:
        raise ConfigError(f"[{where}] {key} must not be empty")
    out = []
    for item in raw:
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigError(f"[{where}] {key} entries must be numbers, got {item!r}")
        if integer:
            if isinstance(item, float) and not item.is_integer():
                raise ConfigError(f"[{where}] {key} entries must be integers, got {item!r}")
            item = int(item)
        else:
            item = float(item)
        if minimum is not None and item < minimum:
            raise ConfigError(f"[{where}] {key} entries must be >= {minimum}, got {item}")
        out.append(item)
    return out


# ---------------------------------------------------- Hamiltonian building


def build_hamiltonian(section):
    from .hamiltonian import (
        from_text,
        hardcore_bose_hubbard_1d,
        heisenberg_like_1d,
        pauli_sum,
    )

    kind = get_string(section, "hamiltonian", "kind")
    if kind == "bose_hubbard_chain":
        check_keys(section, "hamiltonian", ("kind", "sites", "J", "U"))
        return hardcore_bose_hubbard_1d(
            get_number(section, "hamiltonian", "sites", integer=True, minimum=2),
            get_number(section, "hamiltonian", "J"),
            get_number(section, "hamiltonian", "U"),
        )
    if kind == "heisenberg_chain":
        check_keys(section, "hamiltonian", ("kind", "sites", "t", "U", "h"))
        return heisenberg_like_1d(
            get_number(section, "hamiltonian", "sites", integer=True, minimum=2),
            get_number(section, "hamiltonian", "t"),
            get_number(section, "hamiltonian", "U"),
            get_number(section, "hamiltonian", "h"),
        )
    if kind == "pauli_terms":
        check_keys(section, "hamiltonian", ("kind", "qubits", "terms"))
        qubits = get_number(section, "hamiltonian", "qubits", integer=True, minimum=1)
        raw_terms = section.get("terms")
        if not isinstance(raw_terms, list) or len(raw_terms) == 0:
            raise ConfigError("[hamiltonian] terms must be a non-empty array")
        pairs = []
        for entry in raw_terms:
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or isinstance(entry[0], bool)
                or not isinstance(entry[0], (int, float))
                or not isinstance(entry[1], str)
            ):
                raise ConfigError(
                    f"[hamiltonian] terms entries must be [coefficient, pauli-string], got {entry!r}"
                )
            pairs.append((float(entry[0]), entry[1]))
        try:
            return pauli_sum(pairs, qubits)
        except ValueError as exc:
            raise ConfigError(f"[hamiltonian] invalid terms: {exc}") from exc
    if kind == "text":
        check_keys(section, "hamiltonian", ("kind", "source"))
        source = get_string(section, "hamiltonian", "source")
        try:
            return from_text(source)
        except ValueError as exc:
            raise ConfigError(f"[hamiltonian] invalid text source: {exc}") from exc
    raise ConfigError(
        "[hamiltonian] kind must be one of "
        "bose_hubbard_chain, heisenberg_chain, pauli_terms, text; "
        f"got {kind!r}"
    )


def hamiltonian_section(section):
    """The validated hamiltonian table as plain data for the manifest."""
    build_hamiltonian(section)
    return {k: section[k] for k in sorted(section)}
