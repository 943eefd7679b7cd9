"""Translation-invariant finite-range interactions split into a diagonal
classical part and a small Hermitian quantum perturbation.

A model is described by one representative term per translation orbit; the
terms are instantiated at every base site when a Hamiltonian is assembled.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import CapabilityError
from .lattice import (
    Configuration,
    Site,
    Volume,
    connected_span_size,
    linf_diameter,
    spin_to_bit,
)

MAX_SUPPORT_SITES = 6
HERMITICITY_TOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def support_config_index(support: Sequence[Site], spin_at: Callable[[Site], int]) -> int:
    """Basis index of a spin assignment on a sorted support (first site = MSB)."""
    idx = 0
    for site in support:
        idx = (idx << 1) | spin_to_bit(spin_at(site))
    return idx


@dataclass(frozen=True, eq=False)
class LocalTerm:
    """One local interaction term on a set of site offsets.

    ``classical_part`` holds the diagonal entries of the classical piece in
    the configuration basis of the support (energy units); ``quantum_part``
    is the Hermitian perturbation on the same factor ordering.
    """

    support: tuple[Site, ...]
    classical_part: np.ndarray
    quantum_part: np.ndarray

    def __post_init__(self) -> None:
        support = tuple(sorted({tuple(s) for s in self.support}))
        if not support:
            raise ValueError("a term needs a nonempty support")
        d = len(support[0])
        if any(len(s) != d for s in support):
            raise ValueError("support sites have inconsistent dimensions")
        if len(support) > MAX_SUPPORT_SITES:
            raise ValueError(
                f"support has {len(support)} sites, beyond the cap of {MAX_SUPPORT_SITES}"
            )
        dim = 2 ** len(support)
        classical = np.asarray(self.classical_part, dtype=float)
        if classical.shape != (dim,):
            raise ValueError(f"classical_part must have shape ({dim},), got {classical.shape}")
        quantum = np.asarray(self.quantum_part, dtype=complex)
        if quantum.shape != (dim, dim):
            raise ValueError(f"quantum_part must have shape ({dim}, {dim}), got {quantum.shape}")
        scale = max(1.0, float(np.linalg.norm(quantum)))
        if np.abs(quantum - quantum.conj().T).max() > HERMITICITY_TOL * scale:
            raise ValueError("quantum_part is not Hermitian within tolerance")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "classical_part", _readonly(classical))
        object.__setattr__(self, "quantum_part", _readonly(quantum))

    @property
    def n_sites(self) -> int:
        return len(self.support)

    @property
    def d(self) -> int:
        return len(self.support[0])

    def full_matrix(self) -> np.ndarray:
        """Dense classical-plus-quantum matrix on the support."""
        return np.diag(self.classical_part).astype(complex) + self.quantum_part


@dataclass(frozen=True)
class Interaction:
    """A finite-range interaction: orbit representatives plus global parameters.

    ``lam`` is the perturbation parameter in [0, 1) and ``c`` the norm
    constant used when checking that quantum parts are genuinely small.
    """

    terms: tuple[LocalTerm, ...]
    R: int
    lam: float
    c: float = 1.0

    def __post_init__(self) -> None:
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("an interaction needs at least one term")
        d = terms[0].d
        if any(t.d != d for t in terms):
            raise ValueError("terms have inconsistent dimensions")
        if self.R < 0:
            raise ValueError(f"range must be >= 0, got {self.R}")
        for i, t in enumerate(terms):
            diam = linf_diameter(t.support)
            if diam > self.R:
                raise ValueError(
                    f"term {i} has support diameter {diam}, beyond the declared range {self.R}"
                )
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"lam must lie in [0, 1), got {self.lam}")
        object.__setattr__(self, "terms", terms)

    @property
    def d(self) -> int:
        return self.terms[0].d


def preset_tfim(J: float, h_field: float, lam: float, *, c: float = 1.0) -> Interaction:
    """Transverse-field Ising chain: -J z z on bonds, -h_field z and -lam x on sites."""
    if lam < 0:
        raise ValueError(f"lam must be >= 0, got {lam}")
    bond = LocalTerm(
        support=((0,), (1,)),
        classical_part=np.array([-J, J, J, -J]),
        quantum_part=np.zeros((4, 4)),
    )
    onsite = LocalTerm(
        support=((0,),),
        classical_part=np.array([-h_field, h_field]),
        quantum_part=np.array([[0.0, -lam], [-lam, 0.0]]),
    )
    return Interaction(terms=(bond, onsite), R=1, lam=lam, c=c)


@dataclass(frozen=True)
class PerturbationReport:
    """Per-term norms of the quantum part against the smallness bound."""

    term_index: int
    spectral_norm: float
    hilbert_schmidt_norm: float
    span_size: int
    bound: float
    satisfied: bool


def check_perturbation_bound(interaction: Interaction) -> list[PerturbationReport]:
    """Check ``|Q| <= c * lam**s`` for every term, s being the connected span size.

    The spectral norm is compared against the bound; the Hilbert-Schmidt norm
    is reported alongside. The result is advisory and never raises.
    """
    reports = []
    for i, term in enumerate(interaction.terms):
        spectral = float(np.linalg.norm(term.quantum_part, ord=2))
        hs = float(np.linalg.norm(term.quantum_part))
        s = connected_span_size(term.support)
        bound = interaction.c * interaction.lam**s
        ok = spectral <= bound * (1.0 + 1e-9) + 1e-12
        reports.append(PerturbationReport(i, spectral, hs, s, bound, ok))
    return reports


def _instantiation_offsets(
    interaction: Interaction, anchor_sites: Iterable[Site]
) -> dict[LocalTerm, list[Site]]:
    """Base translations whose translated support could touch the anchor set."""
    anchors = [tuple(s) for s in anchor_sites]
    out: dict[LocalTerm, list[Site]] = {}
    for term in interaction.terms:
        offsets = {
            tuple(x - s for x, s in zip(site, sup))
            for site in anchors
            for sup in term.support
        }
        out[term] = sorted(offsets)
    return out


def classical_energy(
    interaction: Interaction,
    config: Configuration,
    volume: Volume | None = None,
) -> float:
    """Classical energy of a configuration.

    With ``volume=None`` the free sum is taken: every instantiated term whose
    translated support lies inside the configuration's domain contributes.
    With a volume given, every term whose translated support meets the volume
    is included, and the configuration must cover all its sites (this matches
    the boundary-pinned Hamiltonian's term selection).
    """
    domain = config.sites
    anchors = volume.sites if volume is not None else sorted(domain)
    total = 0.0
    for term, offsets in _instantiation_offsets(interaction, anchors).items():
        for off in offsets:
            translated = tuple(
                tuple(c + o for c, o in zip(site, off)) for site in term.support
            )
            if volume is None:
                if not all(s in domain for s in translated):
                    continue
            else:
                if not any(s in volume for s in translated):
                    continue
            idx = support_config_index(translated, config.spin)
            total += float(term.classical_part[idx])
    return total


@dataclass(frozen=True)
class GroundStateConfig:
    """A periodic infinite-volume configuration given by values on a period cell."""

    periods: tuple[int, ...]
    cell_values: Mapping[Site, int] = field(hash=False, compare=True)

    def __post_init__(self) -> None:
        periods = tuple(int(p) for p in self.periods)
        if not periods or any(p < 1 for p in periods):
            raise ValueError(f"periods must be positive, got {periods!r}")
        expected = set(itertools.product(*(range(p) for p in periods)))
        cleaned = {tuple(s): v for s, v in self.cell_values.items()}
        if set(cleaned) != expected:
            raise ValueError("cell_values must cover exactly the period cell")
        if any(v not in (1, -1) for v in cleaned.values()):
            raise ValueError("cell values must be +1 or -1")
        object.__setattr__(self, "periods", periods)
        object.__setattr__(self, "cell_values", dict(sorted(cleaned.items())))

    @classmethod
    def uniform(cls, d: int, spin: int) -> "GroundStateConfig":
        return cls(periods=(1,) * d, cell_values={(0,) * d: spin})

    @property
    def d(self) -> int:
        return len(self.periods)

    def spin(self, site: Site) -> int:
        cell_site = tuple(c % p for c, p in zip(site, self.periods))
        return self.cell_values[cell_site]

    def restricted_to(self, sites: Iterable[Site]) -> Configuration:
        return Configuration({tuple(s): self.spin(s) for s in sites})

    def minimal_form(self) -> "GroundStateConfig":
        """Equivalent configuration with the smallest periods along each axis."""
        periods = list(self.periods)
        for axis in range(self.d):
            for q in range(1, periods[axis] + 1):
                if periods[axis] % q != 0:
                    continue
                shifted_ok = all(
                    self.cell_values[
                        tuple(
                            (c + (q if i == axis else 0)) % p
                            for i, (c, p) in enumerate(zip(site, self.periods))
                        )
                    ]
                    == v
                    for site, v in self.cell_values.items()
                )
                if shifted_ok:
                    periods[axis] = q
                    break
        cell = {
            site: self.spin(site)
            for site in itertools.product(*(range(p) for p in periods))
        }
        return GroundStateConfig(periods=tuple(periods), cell_values=cell)


def energy_density(interaction: Interaction, state: GroundStateConfig) -> float:
    """Classical energy per site of the infinite periodic configuration."""
    cell = list(itertools.product(*(range(p) for p in state.periods)))
    total = 0.0
    for term in interaction.terms:
        for base in cell:
            translated = tuple(
                tuple(c + b for c, b in zip(site, base)) for site in term.support
            )
            idx = support_config_index(translated, state.spin)
            total += float(term.classical_part[idx])
    return total / len(cell)


def find_periodic_ground_states(
    interaction: Interaction,
    max_period: int,
    *,
    max_cell_sites: int = 16,
    tie_tol: float = 1e-12,
) -> list[GroundStateConfig]:
    """All periodic configurations of period <= max_period minimizing the
    classical energy density, by exhaustive search over one period cell.

    Configurations tied with the minimum within ``tie_tol`` are all returned,
    reduced to their minimal periods and sorted deterministically.
    """
    if max_period < 1:
        raise ValueError(f"max_period must be >= 1, got {max_period}")
    d = interaction.d
    if max_period**d > max_cell_sites:
        raise CapabilityError(
            f"period cell has {max_period**d} sites, beyond the bound of {max_cell_sites}"
        )

    def density(periods: tuple[int, ...], assignment: tuple[int, ...],
                cell_sites: list[Site], cell_index: dict[Site, int]) -> float:
        total = 0.0
        for term in interaction.terms:
            for base in cell_sites:
                idx = 0
                for s in term.support:
                    wrapped = tuple((c + b) % p for c, b, p in zip(s, base, periods))
                    idx = (idx << 1) | spin_to_bit(assignment[cell_index[wrapped]])
                total += float(term.classical_part[idx])
        return total / len(cell_sites)

    # periods not dividing each other give distinct patterns, so every period
    # tuple up to the bound is scanned and duplicates are merged afterwards
    candidates: dict[tuple, tuple[float, GroundStateConfig]] = {}
    for periods in itertools.product(*(range(1, max_period + 1) for _ in range(d))):
        cell_sites = list(itertools.product(*(range(p) for p in periods)))
        cell_index = {site: i for i, site in enumerate(cell_sites)}
        for assignment in itertools.product((1, -1), repeat=len(cell_sites)):
            e = density(periods, assignment, cell_sites, cell_index)
            state = GroundStateConfig(
                periods=periods, cell_values=dict(zip(cell_sites, assignment))
            ).minimal_form()
            key = (state.periods, tuple(sorted(state.cell_values.items())))
            candidates.setdefault(key, (e, state))
    best = min(e for e, _ in candidates.values())
    minimal = [s for e, s in candidates.values() if e <= best + tie_tol]
    minimal.sort(key=lambda s: (s.periods, tuple(sorted(s.cell_values.items()))))
    return minimal
