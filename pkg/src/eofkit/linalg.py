"""Dense complex linear algebra for bipartite systems.

Everything here works on plain numpy arrays. A bipartite vector or matrix
uses the A-major composite index: basis state |a⟩|b⟩ sits at index
``a * dB + b``, so reshaping a ket to ``(dA, dB)`` recovers the amplitude
matrix.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ShapeError

HERMITICITY_TOL = 1e-12
EIGENVALUE_CLAMP = 1e-12


class Dims(NamedTuple):
    """Subsystem dimensions (dA, dB) of a bipartite space."""

    dA: int
    dB: int

    @property
    def total(self) -> int:
        return self.dA * self.dB


def as_dims(dims) -> Dims:
    d = Dims(int(dims[0]), int(dims[1]))
    if d.dA < 1 or d.dB < 1:
        raise ShapeError(f"subsystem dimensions must be >= 1, got {d}")
    return d


def _check_square(M: np.ndarray, what: str = "matrix") -> None:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeError(f"{what} must be square, got shape {M.shape}")


def _check_bipartite(M: np.ndarray, dims: Dims) -> None:
    _check_square(M)
    if M.shape[0] != dims.total:
        raise ShapeError(
            f"matrix dimension {M.shape[0]} does not equal dA*dB = {dims.total}"
        )


def hermiticity_defect(M: np.ndarray) -> float:
    """Max absolute entry of M - M†."""
    return float(np.abs(M - M.conj().T).max())


def eig_hermitian(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns ``(w, V)`` with real eigenvalues ``w`` sorted in descending
    order and orthonormal eigenvectors as the columns of ``V``, so that
    ``M = V @ diag(w) @ V†``. The input is symmetrized as (M + M†)/2
    before the decomposition to absorb accumulated roundoff.
    """
    _check_square(M)
    defect = hermiticity_defect(M)
    if defect > HERMITICITY_TOL:
        raise ShapeError(f"matrix is not Hermitian: max|M - M†| = {defect:.3e}")
    w, V = np.linalg.eigh((M + M.conj().T) / 2)
    return w[::-1].copy(), V[:, ::-1].copy()


def schmidt_coefficients(v: np.ndarray, dims) -> np.ndarray:
    """Schmidt coefficients of a unit bipartite ket, descending.

    The squared coefficients sum to one; the list has length
    ``min(dA, dB)``.
    """
    dims = as_dims(dims)
    v = np.asarray(v).ravel()
    if v.size != dims.total:
        raise ShapeError(f"vector length {v.size} does not equal dA*dB = {dims.total}")
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError(f"ket is not normalized: ||v|| = {nrm!r}")
    return np.linalg.svd(v.reshape(dims.dA, dims.dB), compute_uv=False)


def partial_trace(rho: np.ndarray, dims, keep: str) -> np.ndarray:
    """Trace out one subsystem; ``keep`` is "A" or "B"."""
    dims = as_dims(dims)
    _check_bipartite(rho, dims)
    R = rho.reshape(dims.dA, dims.dB, dims.dA, dims.dB)
    if keep == "A":
        return np.einsum("abcb->ac", R)
    if keep == "B":
        return np.einsum("abad->bd", R)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def partial_transpose(rho: np.ndarray, dims, side: str) -> np.ndarray:
    """Transpose one tensor factor; an exact involution."""
    dims = as_dims(dims)
    _check_bipartite(rho, dims)
    R = rho.reshape(dims.dA, dims.dB, dims.dA, dims.dB)
    if side == "A":
        out = R.transpose(2, 1, 0, 3)
    elif side == "B":
        out = R.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    return out.reshape(dims.total, dims.total)


def kron(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kronecker product (thin alias kept for API symmetry)."""
    return np.kron(A, B)


def frob_dist(A: np.ndarray, B: np.ndarray) -> float:
    """Frobenius distance ||A - B||_F."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise ShapeError(f"shape mismatch: {A.shape} vs {B.shape}")
    return float(np.linalg.norm(A - B))


def clamp_probabilities(w: np.ndarray) -> np.ndarray:
    """Zero out eigenvalues below the roundoff clamp so logs stay finite."""
    w = np.asarray(w, dtype=float).copy()
    w[w < EIGENVALUE_CLAMP] = 0.0
    return w


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random unitary from the QR of a complex Gaussian matrix."""
    return random_isometry(dim, dim, rng)


def random_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Random ``rows x cols`` matrix with orthonormal columns.

    QR of a complex Gaussian, with the R-diagonal phases absorbed so the
    result is canonical for a given draw.
    """
    if cols > rows:
        raise ShapeError(f"isometry needs rows >= cols, got {rows} x {cols}")
    G = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    Q, R = np.linalg.qr(G)
    diag = np.diagonal(R)
    phases = diag / np.abs(diag)
    return Q * phases.conj()
