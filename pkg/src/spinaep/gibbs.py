"""Full Hermitian eigendecomposition and the log-domain Gibbs ensemble.

All statistical weights live in natural-log domain: at low temperature the
linear-domain weights underflow double precision well before ten qubits, so
``exp(-beta * E)`` is never materialized when forming probabilities. The
base-2 conversion factor ``LOG2E`` is applied once at output boundaries;
internal sums are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import logsumexp

from .errors import NumericError

LOG2E = math.log2(math.e)

SPECTRUM_RESIDUAL_TOL = 1e-9
IDENTITY_RESIDUAL_TOL = 1e-10


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenpairs of a Hermitian matrix, energies ascending."""

    energies: np.ndarray
    vectors: np.ndarray  # orthonormal columns, same order as energies

    def __post_init__(self) -> None:
        e = np.asarray(self.energies, dtype=float)
        v = np.asarray(self.vectors)
        if e.ndim != 1 or v.shape != (e.size, e.size):
            raise ValueError("energies must be a vector and vectors a matching square matrix")
        if np.any(np.diff(e) < 0):
            raise ValueError("energies must be ascending")
        object.__setattr__(self, "energies", _readonly(e))
        object.__setattr__(self, "vectors", _readonly(v))

    @property
    def dim(self) -> int:
        return self.energies.size


def diagonalize(h: np.ndarray, *, check: bool = True) -> Spectrum:
    """Full eigendecomposition of a Hermitian matrix, ascending energies.

    With ``check`` on, the residual ``|H v - E v|`` and the orthonormality of
    the eigenvector matrix are verified against the spectrum tolerances and a
    :class:`NumericError` carries the offending residual.
    """
    h = np.asarray(h)
    try:
        energies, vectors = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed to converge: {exc}") from exc
    if check:
        scale = float(np.abs(energies).max(initial=0.0))
        residual = float(np.abs(h @ vectors - vectors * energies).max())
        # not-below comparisons so NaN residuals count as failures
        if not residual <= SPECTRUM_RESIDUAL_TOL * max(scale, 1e-300):
            raise NumericError(
                f"eigenpair residual {residual:.3e} exceeds {SPECTRUM_RESIDUAL_TOL:g} * |H|"
            )
        gram_dev = float(np.abs(vectors.conj().T @ vectors - np.eye(energies.size)).max())
        if not gram_dev <= SPECTRUM_RESIDUAL_TOL:
            raise NumericError(f"eigenvectors deviate from orthonormal by {gram_dev:.3e}")
    return Spectrum(energies=energies, vectors=vectors)


@dataclass(frozen=True, eq=False)
class GibbsEnsemble:
    """Thermal state of a Hamiltonian: eigenpairs plus log-domain weights.

    ``log_weights[j]`` is the natural log of the j-th state probability,
    ``-beta * E_j - log_partition``; they sum to one by construction.
    """

    beta: float
    spectrum: Spectrum
    hamiltonian: np.ndarray
    log_weights: np.ndarray
    log_partition: float
    n_sites: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "hamiltonian", _readonly(self.hamiltonian))
        object.__setattr__(self, "log_weights", _readonly(self.log_weights))

    @property
    def dim(self) -> int:
        return self.spectrum.dim

    @cached_property
    def weights(self) -> np.ndarray:
        """Linear-domain probabilities; tiny ones may underflow to zero."""
        return _readonly(np.exp(self.log_weights))


def gibbs_ensemble(
    h: np.ndarray, beta: float, *, spectrum: Spectrum | None = None, check: bool = True
) -> GibbsEnsemble:
    """Gibbs ensemble of ``h`` at inverse temperature ``beta > 0``.

    Passing a precomputed ``spectrum`` skips the eigensolve.
    """
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    if not math.isfinite(beta):
        raise ValueError(f"beta must be finite, got {beta}")
    h = np.asarray(h)
    if spectrum is None:
        spectrum = diagonalize(h, check=check)
    elif spectrum.dim != h.shape[0]:
        raise ValueError("spectrum dimension does not match the Hamiltonian")
    dim = spectrum.dim
    n_sites = dim.bit_length() - 1
    if dim != 1 << n_sites:
        raise ValueError(f"dimension {dim} is not a power of two")
    scaled = -beta * spectrum.energies
    log_partition = float(logsumexp(scaled))
    return GibbsEnsemble(
        beta=float(beta),
        spectrum=spectrum,
        hamiltonian=h,
        log_weights=scaled - log_partition,
        log_partition=log_partition,
        n_sites=n_sites,
    )


def eigenvalue_via_energy(ensemble: GibbsEnsemble, j: int) -> float:
    """Log weight of state ``j`` recomputed through the energy quadratic form.

    Evaluates ``-beta <psi_j|H|psi_j> - log Xi`` rather than reading the
    stored eigenvalue; the two agree to the spectrum residual tolerance.
    """
    if not 0 <= j < ensemble.dim:
        raise ValueError(f"state index {j} outside [0, {ensemble.dim})")
    v = ensemble.spectrum.vectors[:, j]
    energy = float(np.real(v.conj() @ (ensemble.hamiltonian @ v)))
    return -ensemble.beta * energy - ensemble.log_partition


def entropy_bits(ensemble: GibbsEnsemble) -> float:
    """Von Neumann entropy of the ensemble in bits."""
    s_nats = -float(np.sum(ensemble.weights * ensemble.log_weights))
    return max(LOG2E * s_nats, 0.0)


def expectation(ensemble: GibbsEnsemble, observable: np.ndarray) -> float:
    """Thermal expectation of a Hermitian observable."""
    a = np.asarray(observable)
    if a.shape != (ensemble.dim, ensemble.dim):
        raise ValueError(f"observable must have shape ({ensemble.dim}, {ensemble.dim})")
    v = ensemble.spectrum.vectors
    diagonal = np.einsum("ij,ij->j", v.conj(), a @ v).real
    return float(np.sum(ensemble.weights * diagonal))


def characteristic_function(ensemble: GibbsEnsemble, tau: float) -> complex:
    """Weighted phase average ``sum_j kappa_j exp(i tau E_j)``.

    Normalized by the realized weight sum, accumulated through the same
    complex summation, so that the value at ``tau = 0`` is exactly one.
    """
    phases = np.exp(1j * tau * ensemble.spectrum.energies)
    z = np.sum(ensemble.weights * phases)
    total = np.sum(ensemble.weights + 0.0j)
    return complex(z / total)


@dataclass(frozen=True)
class ThermoDensities:
    """Per-site thermodynamic functions of one finite-volume ensemble.

    ``h_bits = beta * LOG2E * (g - f)`` holds algebraically at finite volume;
    construction via :func:`thermo_densities` enforces it to within
    ``IDENTITY_RESIDUAL_TOL``.
    """

    beta: float
    f: float       # free energy per site
    g: float       # energy per site
    h_bits: float  # entropy per site, bits
    n_sites: int

    @property
    def identity_residual(self) -> float:
        return abs(self.h_bits - self.beta * LOG2E * (self.g - self.f))


def thermo_densities(ensemble: GibbsEnsemble) -> ThermoDensities:
    """Free energy, energy, and entropy per site of the ensemble."""
    beta = ensemble.beta
    n = ensemble.n_sites
    f = -ensemble.log_partition / (beta * n)
    g = float(np.sum(ensemble.weights * ensemble.spectrum.energies)) / n
    h_bits = entropy_bits(ensemble) / n
    densities = ThermoDensities(beta=beta, f=f, g=g, h_bits=h_bits, n_sites=n)
    if not densities.identity_residual <= IDENTITY_RESIDUAL_TOL:
        raise NumericError(
            f"entropy-rate identity violated: residual {densities.identity_residual:.3e}"
        )
    return densities
