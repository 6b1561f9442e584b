"""Shared seeded generators for the test suite."""

import numpy as np

from eofkit import BipartiteDensity, Dims
from eofkit.states import Lemma3Mc


def random_hermitian(seed: int, dim: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return G + G.conj().T


def random_density(seed: int, dims, rank: int | None = None) -> BipartiteDensity:
    dims = Dims(*dims)
    rank = rank if rank is not None else dims.total
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((dims.total, rank)) + 1j * rng.standard_normal((dims.total, rank))
    M = G @ G.conj().T
    return BipartiteDensity(M / M.trace().real, dims)


def random_two_qubit_density(seed: int, rank: int = 4) -> BipartiteDensity:
    return random_density(seed, (2, 2), rank)


def random_ket(seed: int, dims) -> np.ndarray:
    dims = Dims(*dims)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dims.total) + 1j * rng.standard_normal(dims.total)
    return v / np.linalg.norm(v)


def seeded_lemma3_params(seed: int, max_d: int = 4) -> Lemma3Mc:
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, max_d + 1))
    f = int(rng.integers(1, d))
    p = float(rng.uniform(0.1, 0.9))
    c = rng.uniform(0.25, 1.0, d)
    c = c / np.linalg.norm(c)
    return Lemma3Mc(p, tuple(c), f)
