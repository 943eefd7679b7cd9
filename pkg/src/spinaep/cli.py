"""Experiment runner: volume sweeps emitting deterministic CSV tables.

Subcommands: ``sweep`` (full pipeline), ``spectrum`` (energy and log-weight
dump), ``codec-demo`` (codebook plus fidelity for one volume), and ``check``
(built-in oracle suite at six qubits or fewer). Reals are printed with 17
significant digits so doubles round-trip and reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import itertools
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .checks import run_checks
from .codec import build_codebook, fidelity, make_decomposition, typical_projector
from .config import ExperimentConfig, build_interaction, parse_config
from .errors import CapabilityError, ConfigError, NumericError, QubitCapError, SpinAepError
from .gibbs import GibbsEnsemble, LOG2E, gibbs_ensemble, thermo_densities
from .hamiltonian import assemble_hamiltonian
from .interaction import GroundStateConfig, Interaction, check_perturbation_bound, find_periodic_ground_states
from .lattice import build_hypercube
from .typicality import best_rate_mass, dimension_rate, lln_residual, typical_subspace

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAP = 3
EXIT_NUMERIC = 4

SWEEP_COLUMNS = (
    "n", "n_sites", "beta", "lambda", "S_bits", "f", "g", "h_bits",
    "identity_residual", "delta", "typical_dim", "typical_mass", "dim_rate",
    "best_rate_R", "best_rate_mass", "lln_t", "lln_residual", "fidelity",
    "codeword_len",
)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _boundary_state(config: ExperimentConfig) -> GroundStateConfig:
    if config.boundary == "all-up":
        return GroundStateConfig.uniform(config.d, +1)
    if config.boundary == "all-down":
        return GroundStateConfig.uniform(config.d, -1)
    cell_sites = list(itertools.product(*(range(p) for p in config.boundary_periods)))
    return GroundStateConfig(
        periods=config.boundary_periods,
        cell_values=dict(zip(cell_sites, config.boundary_cell)),
    )


def _model_warnings(interaction: Interaction, boundary: GroundStateConfig) -> list[str]:
    notes = []
    for report in check_perturbation_bound(interaction):
        if not report.satisfied:
            notes.append(
                f"term {report.term_index}: quantum norm {report.spectral_norm:.4g} "
                f"exceeds the smallness bound {report.bound:.4g}"
            )
    try:
        ground_states = find_periodic_ground_states(
            interaction, max_period=max(2, *boundary.periods)
        )
        if boundary.minimal_form() not in ground_states:
            notes.append("boundary configuration is not a classical ground state of the model")
    except CapabilityError:
        notes.append("boundary ground-state membership not verified (search bound exceeded)")
    return notes


@dataclass(frozen=True)
class VolumeResult:
    """Everything one volume contributes to the output tables."""

    n: int
    n_sites: int
    ensemble: GibbsEnsemble
    s_bits: float
    f: float
    g: float
    h_bits: float
    identity_residual: float


def _run_volume(config: ExperimentConfig, interaction: Interaction,
                boundary: GroundStateConfig, n: int) -> VolumeResult:
    volume = build_hypercube(n, config.d, max_qubits=config.max_qubits)
    h_matrix = assemble_hamiltonian(interaction, volume, boundary)
    ensemble = gibbs_ensemble(h_matrix, config.beta)
    densities = thermo_densities(ensemble)
    return VolumeResult(
        n=n,
        n_sites=volume.n_sites,
        ensemble=ensemble,
        s_bits=densities.h_bits * volume.n_sites,
        f=densities.f,
        g=densities.g,
        h_bits=densities.h_bits,
        identity_residual=densities.identity_residual,
    )


def run_sweep(config: ExperimentConfig, out_dir: Path, *, quiet: bool = False) -> list[Path]:
    """Execute the configured sweep and write ``sweep.csv`` and ``aep.csv``."""
    interaction = build_interaction(config)
    boundary = _boundary_state(config)
    notes = list(config.warnings) + _model_warnings(interaction, boundary)
    if notes and not quiet:
        for note in notes:
            print(f"warning: {note}", file=sys.stderr)

    out_dir.mkdir(parents=True, exist_ok=True)
    sweep_rows: list[tuple] = []
    aep_rows: list[tuple] = []

    for n in config.volumes:
        result = _run_volume(config, interaction, boundary, n)
        ens = result.ensemble
        h_ref = config.h_ref if config.h_ref is not None else result.h_bits
        decomposition = make_decomposition(
            ens, ens.dim, seed=np.random.default_rng([config.seed, n])
        )
        rate_masses = [best_rate_mass(ens, r) for r in config.rates]
        lln_values = [lln_residual(ens, t) for t in config.ts]
        per_delta = []
        for delta in config.deltas:
            sub = typical_subspace(ens, h_ref, delta)
            projector = typical_projector(sub, ens.spectrum)
            fid = fidelity(decomposition, projector)
            length = build_codebook(sub).length if sub.dim else None
            per_delta.append((delta, sub, fid, length))
            aep_rows.append(
                (n, result.n_sites, h_ref, delta, sub.mass, sub.dim, dimension_rate(sub))
                + tuple(rate_masses)
                + tuple(lln_values)
            )
        for (delta, sub, fid, length), (r_idx, rate), (t_idx, t) in itertools.product(
            per_delta, enumerate(config.rates), enumerate(config.ts)
        ):
            sweep_rows.append((
                n, result.n_sites, config.beta, config.lam, result.s_bits,
                result.f, result.g, result.h_bits, result.identity_residual,
                delta, sub.dim, sub.mass, dimension_rate(sub),
                rate, rate_masses[r_idx], t, lln_values[t_idx], fid, length,
            ))
        if not quiet:
            print(
                f"n={n} sites={result.n_sites} S={result.s_bits:.6f} bits "
                f"h={result.h_bits:.6f} bits/site"
            )

    sweep_path = out_dir / "sweep.csv"
    with open(sweep_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(SWEEP_COLUMNS) + "\n")
        for row in sweep_rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")

    aep_header = ["n", "n_sites", "h_ref", "delta", "typical_mass", "typical_dim", "dim_rate"]
    aep_header += [f"best_rate_mass[R={rate:g}]" for rate in config.rates]
    aep_header += [f"lln_residual[t={t:g}]" for t in config.ts]
    aep_path = out_dir / "aep.csv"
    with open(aep_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(aep_header) + "\n")
        for row in sorted(aep_rows, key=lambda r: (r[3], r[0])):
            fh.write(",".join(_fmt(v) for v in row) + "\n")

    if not quiet:
        print(f"wrote {sweep_path} and {aep_path}")
    return [sweep_path, aep_path]


def run_spectrum(config: ExperimentConfig, out_dir: Path, *, quiet: bool = False) -> list[Path]:
    """Dump energies and log2 weights for every configured volume."""
    interaction = build_interaction(config)
    boundary = _boundary_state(config)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for n in config.volumes:
        result = _run_volume(config, interaction, boundary, n)
        path = out_dir / f"spectrum_n{n}.csv"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("j,energy,log2_kappa\n")
            energies = result.ensemble.spectrum.energies
            log2k = result.ensemble.log_weights * LOG2E
            for j in range(result.ensemble.dim):
                fh.write(f"{j},{_fmt(energies[j])},{_fmt(log2k[j])}\n")
        paths.append(path)
        if not quiet:
            print(f"wrote {path}")
    return paths


def run_codec_demo(config: ExperimentConfig, out_dir: Path, *, quiet: bool = False) -> list[Path]:
    """Codebook and projection fidelity for the largest configured volume."""
    interaction = build_interaction(config)
    boundary = _boundary_state(config)
    out_dir.mkdir(parents=True, exist_ok=True)
    n = config.volumes[-1]
    result = _run_volume(config, interaction, boundary, n)
    ens = result.ensemble
    h_ref = config.h_ref if config.h_ref is not None else result.h_bits
    delta = config.deltas[0]
    sub = typical_subspace(ens, h_ref, delta)
    if sub.dim == 0:
        print(
            f"n={n}: no typical states at delta={delta:g}; nothing to encode",
            file=sys.stderr,
        )
        raise NumericError("empty typical subspace in codec-demo")
    codebook = build_codebook(sub)
    path = out_dir / f"codebook_n{n}.txt"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in codebook.lines():
            fh.write(line + "\n")
    decomposition = make_decomposition(ens, ens.dim, seed=np.random.default_rng([config.seed, n]))
    fid = fidelity(decomposition, typical_projector(sub, ens.spectrum))
    if not quiet:
        print(
            f"n={n} sites={result.n_sites} delta={delta:g} typical_dim={sub.dim} "
            f"codeword_len={codebook.length} mass={sub.mass:.12f} fidelity={fid:.12f}"
        )
        print(f"wrote {path}")
    return [path]


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config!r}: {exc}") from exc
    config = parse_config(text)
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError(f"seed: must fit in an unsigned 64-bit integer, got {args.seed}")
        config = replace(config, seed=args.seed)
    if args.max_qubits is not None:
        if args.max_qubits < 1:
            raise ConfigError(f"max_qubits: must be >= 1, got {args.max_qubits}")
        config = replace(config, max_qubits=args.max_qubits)
    return config


def _resolve_out(args: argparse.Namespace, config: ExperimentConfig) -> Path:
    out = args.out if args.out is not None else config.out
    if out is None:
        raise ConfigError("out: no output directory given (use --out or set out in the config)")
    return Path(out)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="spinaep",
        description="Gibbs-state entropy, typicality, and compression sweeps for spin chains",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("sweep", "run the full pipeline over all configured volumes"),
        ("spectrum", "dump energies and log2 weights per volume"),
        ("codec-demo", "emit a codebook and fidelity for the largest volume"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to a key = value config document")
        p.add_argument("--out", default=None, help="output directory (overrides the config)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--max-qubits", type=int, default=None, help="override the qubit cap")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")
    p = sub.add_parser("check", help="run the built-in oracle suite (six qubits or fewer)")
    p.add_argument("--quiet", action="store_true", help="only report failures")

    args = parser.parse_args(argv)
    try:
        if args.command == "check":
            results = run_checks()
            for r in results:
                if not r.passed or not args.quiet:
                    status = "ok" if r.passed else "FAIL"
                    print(f"{status:4s} {r.name}: {r.detail}")
            return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC
        config = _load_config(args)
        out_dir = _resolve_out(args, config)
        if args.command == "sweep":
            run_sweep(config, out_dir, quiet=args.quiet)
        elif args.command == "spectrum":
            run_spectrum(config, out_dir, quiet=args.quiet)
        else:
            run_codec_demo(config, out_dir, quiet=args.quiet)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QubitCapError, CapabilityError) as exc:
        print(f"size limit: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (NumericError, SpinAepError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
