"""Text formats: key-value config files, matrix files, CSV tables and run manifests."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import re
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .states import ParameterError
from .sweep import ALL_PAIRS, OBJECTIVES, SweepResult, SweepSpec
from .zeno import ProtocolConfig

CONFIG_KEYS = (
    "F", "alpha", "theta", "i_alice", "j_alice", "i_bob", "j_bob",
    "k", "outcome_a", "outcome_b", "rounds",
)
SWEEP_KEYS = ("F", "alpha", "theta", "pairs", "bob_pairs", "k_min", "k_max", "outcomes", "objective")


class ConfigError(ValueError):
    """A config or spec file could not be parsed."""


_PI_EXPR = re.compile(r"^\s*(?:([-+]?[0-9.]+(?:[eE][-+]?\d+)?)\s*\*\s*)?pi\s*(?:/\s*([0-9.]+(?:[eE][-+]?\d+)?))?\s*$")


def parse_angle(text: str) -> float:
    """Parse a float or a multiple of pi such as ``pi/180`` or ``2*pi/3``."""
    m = _PI_EXPR.match(text)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse angle {text!r}") from None


def parse_key_values(text: str, allowed: Sequence[str]) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in allowed:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def _number(values, key, cast, default):
    if key not in values:
        return default
    try:
        return cast(values[key])
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {values[key]!r}") from None


def _int(text: str) -> int:
    f = float(text)
    if not f.is_integer():
        raise ValueError(text)
    return int(f)


def parse_config(text: str) -> tuple[ProtocolConfig, int]:
    """Return the protocol config and the number of chained rounds.

    Missing keys fall back to the published single-round protocol.
    """
    v = parse_key_values(text, CONFIG_KEYS)
    d = ProtocolConfig.__dataclass_fields__
    F = _number(v, "F", float, d["F"].default)
    alpha = _number(v, "alpha", float, d["alpha"].default)
    theta = parse_angle(v["theta"]) if "theta" in v else d["theta"].default
    ia, ja = d["j_alice"].default
    ib, jb = d["j_bob"].default
    oa, ob = d["final_outcome"].default
    cfg = ProtocolConfig(
        F=F,
        alpha=alpha,
        theta=theta,
        j_alice=(_number(v, "i_alice", _int, ia), _number(v, "j_alice", _int, ja)),
        j_bob=(_number(v, "i_bob", _int, ib), _number(v, "j_bob", _int, jb)),
        k=_number(v, "k", _int, d["k"].default),
        final_outcome=(_number(v, "outcome_a", _int, oa), _number(v, "outcome_b", _int, ob)),
    )
    rounds = _number(v, "rounds", _int, 1)
    if rounds < 1:
        raise ParameterError(f"rounds must be >= 1, got {rounds}")
    return cfg, rounds


def format_config(cfg: ProtocolConfig, rounds: int = 1) -> str:
    return "".join(
        f"{k} = {val}\n"
        for k, val in (
            ("F", repr(cfg.F)),
            ("alpha", repr(cfg.alpha)),
            ("theta", repr(cfg.theta)),
            ("i_alice", cfg.j_alice[0]),
            ("j_alice", cfg.j_alice[1]),
            ("i_bob", cfg.j_bob[0]),
            ("j_bob", cfg.j_bob[1]),
            ("k", cfg.k),
            ("outcome_a", cfg.final_outcome[0]),
            ("outcome_b", cfg.final_outcome[1]),
            ("rounds", rounds),
        )
    )


def _parse_pairs(text: str, key: str) -> tuple[tuple[int, int], ...]:
    if text.strip() == "all":
        return ALL_PAIRS
    pairs = []
    for tok in text.replace(",", " ").split():
        try:
            a, b = tok.split(":")
            pairs.append((int(a), int(b)))
        except ValueError:
            raise ConfigError(f"{key}: expected 'i:j' tokens or 'all', got {tok!r}") from None
    return tuple(pairs)


def parse_sweep_spec(text: str) -> SweepSpec:
    v = parse_key_values(text, SWEEP_KEYS)
    d = SweepSpec.__dataclass_fields__
    bob = v.get("bob_pairs", "symmetric").strip()
    objective = v.get("objective", d["objective"].default)
    if objective not in OBJECTIVES:
        raise ConfigError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
    return SweepSpec(
        F=_number(v, "F", float, d["F"].default),
        alpha=_number(v, "alpha", float, d["alpha"].default),
        theta=parse_angle(v["theta"]) if "theta" in v else d["theta"].default,
        pairs=_parse_pairs(v["pairs"], "pairs") if "pairs" in v else ALL_PAIRS,
        bob_pairs=None if bob == "symmetric" else _parse_pairs(bob, "bob_pairs"),
        k_min=_number(v, "k_min", _int, d["k_min"].default),
        k_max=_number(v, "k_max", _int, d["k_max"].default),
        outcomes=_parse_pairs(v["outcomes"], "outcomes") if "outcomes" in v else ALL_PAIRS,
        objective=objective,
    )


def fmt(x: float) -> str:
    """12 significant digits; NaN as ``nan``; negative zero folded to zero."""
    if math.isnan(x):
        return "nan"
    return f"{float(x) + 0.0:.12g}"


def _fmt_fixed(x: float) -> str:
    x = round(float(x), 10) + 0.0
    return f"{x:.10f}"


def format_matrix(m) -> str:
    """One row per line; entries are ``re+imi`` with 10 decimals, space separated."""
    m = np.asarray(m, dtype=complex)
    lines = []
    for row in m:
        entries = []
        for z in row:
            im = _fmt_fixed(z.imag)
            entries.append(f"{_fmt_fixed(z.real)}{'' if im.startswith('-') else '+'}{im}i")
        lines.append(" ".join(entries))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    rows = [
        [complex(tok[:-1] + "j") for tok in line.split()]
        for line in text.splitlines() if line.strip()
    ]
    m = np.array(rows, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigError(f"matrix file is not square: shape {m.shape}")
    return m


def write_matrix(path: Path, m) -> Path:
    path.write_text(format_matrix(m))
    return path


def read_matrix(path: Path) -> np.ndarray:
    return parse_matrix(Path(path).read_text())


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) if isinstance(x, float) else x for x in row])
    return path


def read_csv(path: Path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def sweep_rows(result: SweepResult):
    for c in result.table:
        yield (
            c.j_alice[0], c.j_alice[1], c.j_bob[0], c.j_bob[1], c.k, c.outcome[0], c.outcome[1],
            c.negativity, c.fidelity, c.probability, "ok" if c.ok else "dead_end",
        )


SWEEP_HEADER = (
    "i_alice", "j_alice", "i_bob", "j_bob", "k", "outcome_a", "outcome_b",
    "negativity", "fidelity", "probability", "status",
)
TRAJECTORY_HEADER = ("k", "negativity", "fidelity", "cumulative_probability")


def sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_dir: Path, command: str, config_text: str, outputs: Sequence[tuple[Path, str]]) -> Path:
    """List every emitted file with a description and content hash.

    ``config_text`` is the exact input that reproduces the outputs.
    """
    manifest = {
        "tool": "zenobound",
        "version": __version__,
        "command": command,
        "config": config_text,
        "outputs": [
            {"file": p.name, "describes": label, "sha256": sha256(p)} for p, label in outputs
        ],
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
