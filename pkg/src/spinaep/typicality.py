"""Typical subspaces and concentration diagnostics for Gibbs ensembles.

A state is delta-typical when its log2 weight per site sits within delta of
a reference entropy rate. At desk scale the reference defaults to the
per-volume entropy rate; a fixed externally supplied rate is also accepted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gibbs import LOG2E, GibbsEnsemble, entropy_bits, thermo_densities, characteristic_function

def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TypicalSubspace:
    """Indices of eigenstates inside a two-sided log-weight window.

    The window is inclusive at both ends: states with log2 weight exactly on
    an edge count as typical.
    """

    indices: np.ndarray  # sorted eigenstate indices
    h_ref: float         # reference rate, bits per site
    delta: float         # half-width, bits per site
    mass: float          # total weight captured
    n_sites: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", _freeze(np.asarray(self.indices, dtype=np.int64)))

    @property
    def dim(self) -> int:
        return int(self.indices.size)


def typical_subspace(ensemble: GibbsEnsemble, h_ref: float, delta: float) -> TypicalSubspace:
    """States whose log2 weight lies in ``[-n(h_ref+delta), -n(h_ref-delta)]``."""
    if not delta > 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    n = ensemble.n_sites
    log2_weights = ensemble.log_weights * LOG2E
    lo = -n * (h_ref + delta)
    hi = -n * (h_ref - delta)
    mask = (log2_weights >= lo) & (log2_weights <= hi)
    indices = np.nonzero(mask)[0]
    mass = float(ensemble.weights[mask].sum()) if indices.size else 0.0
    return TypicalSubspace(
        indices=indices, h_ref=h_ref, delta=delta, mass=min(mass, 1.0), n_sites=n
    )


def _reference_rate(ensemble: GibbsEnsemble, h_ref: float | None) -> float:
    if h_ref is None:
        return entropy_bits(ensemble) / ensemble.n_sites
    return h_ref


def _check_family(ensembles: Sequence[GibbsEnsemble]) -> None:
    if len(ensembles) < 2:
        raise ValueError("a volume sweep needs at least two ensembles")
    sizes = [e.n_sites for e in ensembles]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError(f"volume sizes must be strictly increasing, got {sizes}")
    betas = {e.beta for e in ensembles}
    if len(betas) != 1:
        raise ValueError(f"ensembles mix inverse temperatures {sorted(betas)}")


def typical_mass_curve(
    ensembles: Sequence[GibbsEnsemble], delta: float, *, h_ref: float | None = None
) -> np.ndarray:
    """Typical-window mass for each ensemble of a growing-volume family.

    ``h_ref=None`` uses each volume's own entropy rate. Purely diagnostic:
    no convergence rate is asserted at fixed finite sizes.
    """
    _check_family(ensembles)
    return np.array(
        [typical_subspace(e, _reference_rate(e, h_ref), delta).mass for e in ensembles]
    )


def dimension_rate(subspace: TypicalSubspace) -> float | None:
    """Bits per site needed to index the subspace; ``None`` when it is empty."""
    if subspace.dim == 0:
        return None
    return float(np.log2(subspace.dim)) / subspace.n_sites


def best_rate_mass(ensemble: GibbsEnsemble, rate: float) -> float:
    """Largest weight any ``2^[n * rate]`` eigenstates can capture.

    Equals the sum of that many largest weights; the exponent takes the
    integer part of ``n * rate``.
    """
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    count = min(2 ** int(ensemble.n_sites * rate), ensemble.dim)
    top = np.sort(ensemble.log_weights)[::-1][:count]
    return float(min(np.exp(top).sum(), 1.0))


def lln_residual(ensemble: GibbsEnsemble, t: float) -> float:
    """Distance between the rescaled phase average and the pure energy phase.

    Compares the characteristic function at ``t / n`` with
    ``exp(i t g)`` for the per-site energy ``g``; zero at ``t = 0``, and it
    shrinks with volume when energy fluctuations stay extensive.
    """
    g = thermo_densities(ensemble).g
    phi = characteristic_function(ensemble, t / ensemble.n_sites)
    return float(abs(phi - np.exp(1j * t * g)))


@dataclass(frozen=True)
class AepRow:
    """One volume's concentration diagnostics at a fixed window width."""

    n_sites: int
    h_ref: float
    delta: float
    mass: float
    dim: int
    dim_rate: float | None
    best_rate_masses: tuple[float, ...]
    lln_residuals: tuple[float, ...]


def build_aep_report(
    ensembles: Sequence[GibbsEnsemble],
    delta: float,
    rates: Sequence[float] = (),
    ts: Sequence[float] = (),
    *,
    h_ref: float | None = None,
) -> list[AepRow]:
    """Concentration diagnostics across a growing-volume family of ensembles."""
    _check_family(ensembles)
    rows = []
    for ens in ensembles:
        ref = _reference_rate(ens, h_ref)
        sub = typical_subspace(ens, ref, delta)
        rows.append(
            AepRow(
                n_sites=ens.n_sites,
                h_ref=ref,
                delta=delta,
                mass=sub.mass,
                dim=sub.dim,
                dim_rate=dimension_rate(sub),
                best_rate_masses=tuple(best_rate_mass(ens, r) for r in rates),
                lln_residuals=tuple(lln_residual(ens, t) for t in ts),
            )
        )
    return rows
