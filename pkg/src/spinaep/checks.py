"""Self-contained oracle suite for small volumes.

Each check recomputes a pipeline quantity along an independent route
(matrix exponential, exhaustive configuration enumeration, finite
differences) and compares at a fixed tolerance. Meant for the ``check``
CLI subcommand; the pytest suite carries its own, separate oracles.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .codec import build_codebook, compress, decompress, fidelity, make_decomposition, typical_projector
from .gibbs import GibbsEnsemble, LOG2E, entropy_bits, expectation, gibbs_ensemble, thermo_densities
from .hamiltonian import assemble_hamiltonian
from .interaction import GroundStateConfig, classical_energy, preset_tfim
from .lattice import Configuration, boundary_envelope, chain
from .typicality import typical_subspace


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _ensemble(n_sites: int, beta: float, lam: float, J: float = 1.0, h: float = 0.5) -> GibbsEnsemble:
    volume = chain(n_sites)
    boundary = GroundStateConfig.uniform(1, +1)
    h_matrix = assemble_hamiltonian(preset_tfim(J, h, lam), volume, boundary)
    return gibbs_ensemble(h_matrix, beta)


def _check_expm_oracle(n_sites: int = 5, beta: float = 1.5, lam: float = 0.3) -> CheckResult:
    ens = _ensemble(n_sites, beta, lam)
    rho = expm(-beta * np.asarray(ens.hamiltonian, dtype=complex))
    rho /= np.trace(rho).real
    oracle = np.sort(np.linalg.eigvalsh(rho))
    mine = np.sort(np.exp(ens.log_weights))
    worst = float(np.abs(oracle - mine).max())
    return CheckResult("matrix-exponential eigenvalues", worst <= 1e-8, f"max deviation {worst:.3e}")


def _check_classical_entropy(n_sites: int = 5, beta: float = 2.0) -> CheckResult:
    model = preset_tfim(1.0, 0.5, 0.0)
    volume = chain(n_sites)
    boundary = GroundStateConfig.uniform(1, +1)
    ens = gibbs_ensemble(assemble_hamiltonian(model, volume, boundary), beta)
    envelope = boundary.restricted_to(boundary_envelope(volume, model.R))
    energies = []
    for spins in itertools.product((1, -1), repeat=n_sites):
        config = Configuration(dict(zip(volume.sites, spins)))
        energies.append(classical_energy(model, config.merge(envelope), volume=volume))
    scaled = -beta * np.asarray(energies)
    scaled -= scaled.max()
    weights = np.exp(scaled)
    weights /= weights.sum()
    nonzero = weights[weights > 0]
    oracle = float(-(nonzero * np.log2(nonzero)).sum())
    mine = entropy_bits(ens)
    gap = abs(oracle - mine)
    return CheckResult("classical enumeration entropy", gap <= 1e-10, f"|gap| {gap:.3e}")


def _check_energy_derivative(n_sites: int = 5, beta: float = 1.2, lam: float = 0.25) -> CheckResult:
    ens = _ensemble(n_sites, beta, lam)
    mine = expectation(ens, ens.hamiltonian)
    step = 1e-5
    spectrum = ens.spectrum
    up = gibbs_ensemble(ens.hamiltonian, beta + step, spectrum=spectrum).log_partition
    down = gibbs_ensemble(ens.hamiltonian, beta - step, spectrum=spectrum).log_partition
    oracle = -(up - down) / (2 * step)
    rel = abs(mine - oracle) / max(abs(oracle), 1.0)
    return CheckResult("energy as log-partition derivative", rel <= 1e-5, f"relative gap {rel:.3e}")


def _check_entropy_identity(n_sites: int = 6, beta: float = 2.0, lam: float = 0.2) -> CheckResult:
    densities = thermo_densities(_ensemble(n_sites, beta, lam))
    res = densities.identity_residual
    return CheckResult("entropy-rate identity", res <= 1e-10, f"residual {res:.3e}")


def _check_typical_filter(n_sites: int = 6, beta: float = 0.5, lam: float = 0.2) -> CheckResult:
    ens = _ensemble(n_sites, beta, lam)
    h_ref = entropy_bits(ens) / n_sites
    delta = 0.3
    sub = typical_subspace(ens, h_ref, delta)
    weights = np.exp(ens.log_weights)
    picked = [
        j
        for j in range(ens.dim)
        if -n_sites * (h_ref + delta) <= LOG2E * ens.log_weights[j] <= -n_sites * (h_ref - delta)
    ]
    mass = float(weights[picked].sum()) if picked else 0.0
    ok = bool(picked) and list(sub.indices) == picked and abs(mass - sub.mass) <= 1e-12
    return CheckResult("typical window filter", ok, f"dim {sub.dim}, mass {sub.mass:.6f}")


def _check_codec(n_sites: int = 6, beta: float = 0.5, lam: float = 0.2, seed: int = 7) -> CheckResult:
    ens = _ensemble(n_sites, beta, lam)
    sub = typical_subspace(ens, entropy_bits(ens) / n_sites, 0.3)
    if sub.dim == 0:
        return CheckResult("codec round trip and fidelity", False, "typical subspace came out empty")
    book = build_codebook(sub)
    round_trip = all(decompress(book, compress(book, int(j))) == int(j) for j in sub.indices)
    projector = typical_projector(sub, ens.spectrum)
    decomp = make_decomposition(ens, ens.dim, seed=seed)
    gap = abs(fidelity(decomp, projector) - sub.mass)
    ok = round_trip and gap <= 1e-10
    return CheckResult("codec round trip and fidelity", ok, f"|F - mass| {gap:.3e}")


def run_checks() -> list[CheckResult]:
    """Run the whole oracle suite on six qubits or fewer."""
    return [
        _check_expm_oracle(),
        _check_classical_entropy(),
        _check_energy_derivative(),
        _check_entropy_identity(),
        _check_typical_filter(),
        _check_codec(),
    ]
