"""Independent oracle implementations used by the test suite.

Everything here deliberately avoids the package's assembly and log-domain
paths: Hamiltonians come from explicit Kronecker chains, entropies from
exhaustive configuration enumeration, typical windows from plain loops.
"""

import itertools

import numpy as np

SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
SX = np.array([[0.0, 1.0], [1.0, 0.0]])
ID2 = np.eye(2)


def kron_site_op(op: np.ndarray, site: int, n: int) -> np.ndarray:
    factors = [ID2] * n
    factors[site] = op
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def kron_chain_tfim(n: int, J: float, h: float, lam: float, boundary: int = 1) -> np.ndarray:
    """Pinned-boundary transverse-field Ising chain via explicit Kronecker sums."""
    dim = 2**n
    H = np.zeros((dim, dim))
    z_ops = [kron_site_op(SZ, i, n) for i in range(n)]
    for i in range(n - 1):
        H -= J * z_ops[i] @ z_ops[i + 1]
    for i in range(n):
        H -= h * z_ops[i]
        H -= lam * kron_site_op(SX, i, n)
    H -= J * boundary * z_ops[0]
    H -= J * boundary * z_ops[n - 1]
    return H


def chain_config_energies(n: int, J: float, h: float, boundary: int = 1) -> np.ndarray:
    """Classical chain energies for every configuration, basis-index order."""
    energies = np.empty(2**n)
    for idx, bits in enumerate(itertools.product((0, 1), repeat=n)):
        spins = [1 - 2 * b for b in bits]
        e = -J * sum(spins[i] * spins[i + 1] for i in range(n - 1))
        e -= h * sum(spins)
        e -= J * boundary * (spins[0] + spins[-1])
        energies[idx] = e
    return energies


def classical_chain_entropy_bits(n: int, J: float, h: float, beta: float, boundary: int = 1) -> float:
    """Entropy of the classical pinned chain by exhaustive enumeration."""
    energies = chain_config_energies(n, J, h, boundary)
    scaled = -beta * energies
    scaled -= scaled.max()
    w = np.exp(scaled)
    w /= w.sum()
    w = w[w > 0]
    return float(-(w * np.log2(w)).sum())


def window_filter(log2_weights: np.ndarray, n_sites: int, h_ref: float, delta: float):
    """Explicit-loop typical window: returns (indices, mass)."""
    lo = -n_sites * (h_ref + delta)
    hi = -n_sites * (h_ref - delta)
    picked = [j for j, v in enumerate(log2_weights) if lo <= v <= hi]
    mass = float(sum(2.0 ** log2_weights[j] for j in picked))
    return picked, mass


def min_connected_superset_size(sites: set, box_lo, box_hi) -> int:
    """Brute-force smallest connected superset within a box (subset bitmask scan)."""
    cells = list(itertools.product(*(range(lo, hi + 1) for lo, hi in zip(box_lo, box_hi))))
    best = None
    for r in range(len(sites), len(cells) + 1):
        for combo in itertools.combinations(cells, r):
            chosen = set(combo)
            if not sites <= chosen:
                continue
            if _connected(chosen):
                best = r
                break
        if best is not None:
            break
    return best


def _connected(cells: set) -> bool:
    start = next(iter(cells))
    seen = {start}
    stack = [start]
    while stack:
        cur = stack.pop()
        for axis in range(len(cur)):
            for step in (-1, 1):
                nb = cur[:axis] + (cur[axis] + step,) + cur[axis + 1 :]
                if nb in cells and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
    return len(seen) == len(cells)
