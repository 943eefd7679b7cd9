import itertools

import pytest

import spinaep as sa

EXHIBIT = {"J": 1.0, "h": 0.5, "lam": 0.2, "beta": 2.0, "delta": 0.15}
EXHIBIT_SIZES = (4, 6, 8, 10)


def chain_ensemble(n_sites: int, J: float, h: float, lam: float, beta: float,
                   boundary_spin: int = 1) -> sa.GibbsEnsemble:
    volume = sa.chain(n_sites)
    boundary = sa.GroundStateConfig.uniform(1, boundary_spin)
    model = sa.preset_tfim(J, h, lam)
    return sa.gibbs_ensemble(sa.assemble_hamiltonian(model, volume, boundary), beta)


@pytest.fixture(scope="session")
def exhibit_ensembles() -> dict[int, sa.GibbsEnsemble]:
    """Pinned-boundary transverse-field Ising chains at the exhibit parameters."""
    return {
        n: chain_ensemble(n, EXHIBIT["J"], EXHIBIT["h"], EXHIBIT["lam"], EXHIBIT["beta"])
        for n in EXHIBIT_SIZES
    }


@pytest.fixture(scope="session")
def grid_ensembles() -> list[sa.GibbsEnsemble]:
    """24 five-site ensembles across couplings, fields, and temperatures."""
    points = itertools.product((0.0, 1.0), (0.0, 0.5), (0.0, 0.2, 0.35), (0.5, 2.0))
    return [chain_ensemble(5, J, h, lam, beta) for J, h, lam, beta in points]
