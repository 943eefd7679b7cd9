"""Flat key = value experiment configs.

The grammar is line-oriented UTF-8: one ``key = value`` pair per line, blank
lines and ``#`` comments ignored, repeated keys forming lists where a list is
expected. Unknown keys are rejected. The full grammar lives in
docs/config-format.md and is versioned through ``CONFIG_FORMAT_VERSION``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .interaction import Interaction, LocalTerm, preset_tfim
from .lattice import DEFAULT_QUBIT_CAP, linf_diameter

CONFIG_FORMAT_VERSION = 1

_LIST_KEYS = {"volume", "delta", "t", "rate"}
_SCALAR_KEYS = {
    "model", "d", "J", "h_field", "lambda", "c", "beta", "boundary",
    "boundary_periods", "boundary_cell", "h_ref", "seed", "max_qubits", "out",
}
_TERM_FIELDS = {"support", "classical", "quantum"}
_U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class GenericTermSpec:
    """Raw generic-model term: offsets plus matrix data, pre-validation."""

    support: tuple[tuple[int, ...], ...]
    classical: tuple[float, ...]
    quantum: tuple[tuple[int, int, float, float], ...]


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated sweep parameters with documented defaults."""

    model: str = "tfim"
    d: int = 1
    J: float = 1.0
    h_field: float = 0.5
    lam: float = 0.2
    c: float = 1.0
    beta: float = 2.0
    volumes: tuple[int, ...] = (1, 2)
    deltas: tuple[float, ...] = (0.15,)
    boundary: str = "all-up"
    boundary_periods: tuple[int, ...] | None = None
    boundary_cell: tuple[int, ...] | None = None
    h_ref: float | None = None  # None = per-volume entropy rate
    ts: tuple[float, ...] = (1.0,)
    rates: tuple[float, ...] = (0.25,)
    seed: int = 12345
    max_qubits: int = DEFAULT_QUBIT_CAP
    out: str | None = None
    terms: tuple[GenericTermSpec, ...] = ()
    warnings: tuple[str, ...] = field(default=(), compare=False)


class _Issues:
    def __init__(self) -> None:
        self.messages: list[str] = []

    def add(self, line: int | None, fieldname: str, message: str) -> None:
        where = f"line {line}: " if line is not None else ""
        self.messages.append(f"{where}{fieldname}: {message}")

    def raise_if_any(self) -> None:
        if self.messages:
            raise ConfigError("invalid config:\n" + "\n".join(self.messages))


def _parse_float(raw: str, fieldname: str, line: int, issues: _Issues) -> float | None:
    try:
        value = float(raw)
    except ValueError:
        issues.add(line, fieldname, f"expected a number, got {raw!r}")
        return None
    if not math.isfinite(value):
        issues.add(line, fieldname, f"must be finite, got {raw!r}")
        return None
    return value


def _parse_int(raw: str, fieldname: str, line: int, issues: _Issues) -> int | None:
    try:
        return int(raw)
    except ValueError:
        issues.add(line, fieldname, f"expected an integer, got {raw!r}")
        return None


def _parse_sites(raw: str, fieldname: str, line: int, issues: _Issues):
    sites = []
    for chunk in raw.split(";"):
        coords = []
        for part in chunk.split(","):
            v = _parse_int(part.strip(), fieldname, line, issues)
            if v is None:
                return None
            coords.append(v)
        sites.append(tuple(coords))
    return tuple(sites)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and fully validate a config document.

    Raises :class:`ConfigError` with one diagnostic per problem; parse-time
    warnings are collected on the returned config.
    """
    issues = _Issues()
    scalars: dict[str, tuple[str, int]] = {}
    lists: dict[str, list[tuple[str, int]]] = {k: [] for k in _LIST_KEYS}
    term_fields: dict[int, dict[str, tuple[str, int]]] = {}

    for lineno, rawline in enumerate(text.splitlines(), start=1):
        stripped = rawline.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            issues.add(lineno, "syntax", f"expected 'key = value', got {stripped!r}")
            continue
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key in _LIST_KEYS:
            lists[key].append((value, lineno))
        elif key in _SCALAR_KEYS:
            if key in scalars:
                issues.add(lineno, key, "repeated; this key takes a single value")
            scalars[key] = (value, lineno)
        elif key.startswith("term."):
            parts = key.split(".")
            idx = None
            if len(parts) == 3 and parts[2] in _TERM_FIELDS:
                try:
                    idx = int(parts[1])
                except ValueError:
                    idx = None
            if idx is None:
                issues.add(lineno, key, "term keys must look like term.<index>.<support|classical|quantum>")
                continue
            entry = term_fields.setdefault(idx, {})
            if parts[2] in entry:
                issues.add(lineno, key, "repeated term field")
            entry[parts[2]] = (value, lineno)
        else:
            issues.add(lineno, key, "unknown key")
    issues.raise_if_any()

    warnings: list[str] = []

    def scalar(key: str) -> tuple[str, int] | None:
        return scalars.get(key)

    model = scalar("model")[0] if scalar("model") else "tfim"
    if model not in ("tfim", "generic"):
        issues.add(scalar("model")[1], "model", f"must be 'tfim' or 'generic', got {model!r}")

    d = 1
    if scalar("d"):
        v = _parse_int(scalar("d")[0], "d", scalar("d")[1], issues)
        if v is not None:
            if v < 1:
                issues.add(scalar("d")[1], "d", f"must be >= 1, got {v}")
            else:
                d = v

    def float_field(key: str, default: float) -> float:
        if not scalar(key):
            return default
        v = _parse_float(scalar(key)[0], key, scalar(key)[1], issues)
        return default if v is None else v

    J = float_field("J", 1.0)
    h_field = float_field("h_field", 0.5)
    lam = float_field("lambda", 0.2)
    c = float_field("c", 1.0)
    beta = float_field("beta", 2.0)
    if scalar("beta") and beta <= 0:
        issues.add(scalar("beta")[1], "beta", f"must be > 0, got {beta}")
    if scalar("lambda") and not 0 <= lam < 1:
        issues.add(scalar("lambda")[1], "lambda", f"must lie in [0, 1), got {lam}")

    max_qubits = DEFAULT_QUBIT_CAP
    if scalar("max_qubits"):
        v = _parse_int(scalar("max_qubits")[0], "max_qubits", scalar("max_qubits")[1], issues)
        if v is not None:
            if v < 1:
                issues.add(scalar("max_qubits")[1], "max_qubits", f"must be >= 1, got {v}")
            else:
                max_qubits = v

    volumes: list[int] = []
    for raw, line in lists["volume"] or [("1", None), ("2", None)]:
        v = _parse_int(raw, "volume", line, issues)
        if v is None:
            continue
        if v < 0:
            issues.add(line, "volume", f"must be >= 0, got {v}")
            continue
        volumes.append(v)
    if any(b <= a for a, b in zip(volumes, volumes[1:])):
        issues.add(
            lists["volume"][0][1] if lists["volume"] else None,
            "volume",
            f"volumes must be strictly increasing, got {volumes}",
        )

    deltas: list[float] = []
    for raw, line in lists["delta"] or [("0.15", None)]:
        v = _parse_float(raw, "delta", line, issues)
        if v is not None:
            if v <= 0:
                issues.add(line, "delta", f"must be > 0, got {v}")
            else:
                deltas.append(v)

    ts: list[float] = []
    for raw, line in lists["t"] or [("1.0", None)]:
        v = _parse_float(raw, "t", line, issues)
        if v is not None:
            ts.append(v)

    rates: list[float] = []
    for raw, line in lists["rate"] or [("0.25", None)]:
        v = _parse_float(raw, "rate", line, issues)
        if v is not None:
            if v < 0:
                issues.add(line, "rate", f"must be >= 0, got {v}")
            else:
                rates.append(v)

    boundary = scalar("boundary")[0] if scalar("boundary") else "all-up"
    boundary_periods = None
    boundary_cell = None
    if boundary not in ("all-up", "all-down", "cell"):
        issues.add(scalar("boundary")[1], "boundary", f"must be all-up, all-down, or cell, got {boundary!r}")
    if boundary == "cell":
        if not scalar("boundary_periods") or not scalar("boundary_cell"):
            issues.add(
                scalar("boundary")[1], "boundary",
                "boundary = cell needs boundary_periods and boundary_cell",
            )
        else:
            raw, line = scalar("boundary_periods")
            periods = []
            for part in raw.split(","):
                v = _parse_int(part.strip(), "boundary_periods", line, issues)
                if v is not None:
                    if v < 1:
                        issues.add(line, "boundary_periods", f"periods must be >= 1, got {v}")
                    else:
                        periods.append(v)
            if len(periods) != d:
                issues.add(line, "boundary_periods", f"need {d} periods, got {len(periods)}")
            else:
                boundary_periods = tuple(periods)
            raw, line = scalar("boundary_cell")
            cell = []
            for part in raw.split(";"):
                p = part.strip()
                if p in ("+1", "1"):
                    cell.append(1)
                elif p == "-1":
                    cell.append(-1)
                else:
                    issues.add(line, "boundary_cell", f"values must be +1 or -1, got {p!r}")
            if boundary_periods is not None:
                expected = math.prod(boundary_periods)
                if len(cell) != expected:
                    issues.add(line, "boundary_cell", f"need {expected} values for the cell, got {len(cell)}")
                else:
                    boundary_cell = tuple(cell)
    else:
        for key in ("boundary_periods", "boundary_cell"):
            if scalar(key):
                issues.add(scalar(key)[1], key, "only meaningful with boundary = cell")

    h_ref: float | None = None
    if scalar("h_ref"):
        raw, line = scalar("h_ref")
        if raw != "per-volume":
            v = _parse_float(raw, "h_ref", line, issues)
            if v is not None:
                h_ref = v

    seed = 12345
    if scalar("seed"):
        v = _parse_int(scalar("seed")[0], "seed", scalar("seed")[1], issues)
        if v is not None:
            if not 0 <= v <= _U64_MAX:
                issues.add(scalar("seed")[1], "seed", "must fit in an unsigned 64-bit integer")
            else:
                seed = v

    out = scalar("out")[0] if scalar("out") else None

    terms: list[GenericTermSpec] = []
    if model == "tfim":
        if term_fields:
            first = min(term_fields)
            line = next(iter(term_fields[first].values()))[1]
            issues.add(line, "term", "term definitions require model = generic")
        if d != 1:
            issues.add(scalar("d")[1] if scalar("d") else None, "d", "the tfim preset is one-dimensional")
    else:
        if not term_fields:
            issues.add(None, "term", "model = generic needs at least one term.<index>.* block")
        for idx in sorted(term_fields):
            entry = term_fields[idx]
            if "support" not in entry or "classical" not in entry:
                line = next(iter(entry.values()))[1]
                issues.add(line, f"term.{idx}", "needs support and classical fields")
                continue
            raw, line = entry["support"]
            support = _parse_sites(raw, f"term.{idx}.support", line, issues)
            if support is None:
                continue
            if any(len(s) != d for s in support):
                issues.add(line, f"term.{idx}.support", f"sites must have dimension {d}")
                continue
            raw, line = entry["classical"]
            classical = []
            for part in raw.replace(",", " ").split():
                v = _parse_float(part, f"term.{idx}.classical", line, issues)
                if v is not None:
                    classical.append(v)
            if len(classical) != 2 ** len(support):
                issues.add(
                    line, f"term.{idx}.classical",
                    f"need {2 ** len(support)} entries for {len(support)} sites, got {len(classical)}",
                )
                continue
            quadruples: list[tuple[int, int, float, float]] = []
            if "quantum" in entry:
                raw, line = entry["quantum"]
                ok = True
                for chunk in raw.split(";"):
                    parts = [p.strip() for p in chunk.split(",")]
                    if len(parts) != 4:
                        issues.add(line, f"term.{idx}.quantum", f"entries are row,col,re,im quadruples, got {chunk.strip()!r}")
                        ok = False
                        break
                    row = _parse_int(parts[0], f"term.{idx}.quantum", line, issues)
                    col = _parse_int(parts[1], f"term.{idx}.quantum", line, issues)
                    re_ = _parse_float(parts[2], f"term.{idx}.quantum", line, issues)
                    im = _parse_float(parts[3], f"term.{idx}.quantum", line, issues)
                    if None in (row, col, re_, im):
                        ok = False
                        break
                    dim = 2 ** len(support)
                    if not (0 <= row < dim and 0 <= col < dim):
                        issues.add(line, f"term.{idx}.quantum", f"entry ({row}, {col}) outside the {dim}x{dim} matrix")
                        ok = False
                        break
                    quadruples.append((row, col, re_, im))
                if not ok:
                    continue
            terms.append(GenericTermSpec(support=support, classical=tuple(classical), quantum=tuple(quadruples)))
        if scalar("lambda") and terms and all(not t.quantum for t in terms):
            warnings.append("lambda is set but no generic term carries a quantum part")

    issues.raise_if_any()

    config = ExperimentConfig(
        model=model, d=d, J=J, h_field=h_field, lam=lam, c=c, beta=beta,
        volumes=tuple(volumes), deltas=tuple(deltas), boundary=boundary,
        boundary_periods=boundary_periods, boundary_cell=boundary_cell,
        h_ref=h_ref, ts=tuple(ts), rates=tuple(rates), seed=seed,
        max_qubits=max_qubits, out=out, terms=tuple(terms),
        warnings=tuple(warnings),
    )
    return config


def build_interaction(config: ExperimentConfig) -> Interaction:
    """Materialize the configured model as an interaction."""
    if config.model == "tfim":
        return preset_tfim(config.J, config.h_field, config.lam, c=config.c)
    local_terms = []
    for spec in config.terms:
        dim = 2 ** len(spec.support)
        quantum = np.zeros((dim, dim), dtype=complex)
        for row, col, re_, im in spec.quantum:
            quantum[row, col] += re_ + 1j * im
        try:
            local_terms.append(
                LocalTerm(
                    support=spec.support,
                    classical_part=np.asarray(spec.classical),
                    quantum_part=quantum,
                )
            )
        except ValueError as exc:
            raise ConfigError(f"invalid generic term: {exc}") from exc
    radius = max(linf_diameter(t.support) for t in local_terms)
    try:
        return Interaction(terms=tuple(local_terms), R=radius, lam=config.lam, c=config.c)
    except ValueError as exc:
        raise ConfigError(f"invalid generic interaction: {exc}") from exc
