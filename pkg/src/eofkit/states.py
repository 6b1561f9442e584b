"""Bipartite state constructors and domain types.

Covers the named families studied by the package (two-qubit maximally
correlated mixtures, the sigma two-qubit family, rank-2 maximally
correlated states in d x d, isotropic and Werner states), the twirling
and level-mixing channels, and ensemble <-> density conversion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import atan, cos, pi, sin, sqrt

import numpy as np

from .errors import DegenerateParameterError, ParameterError, ShapeError
from .linalg import Dims, as_dims, eig_hermitian, hermiticity_defect, kron

MC_PATTERN_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class BipartiteDensity:
    """Positive unit-trace matrix together with its (dA, dB) factorization."""

    matrix: np.ndarray
    dims: Dims

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=complex)
        dims = as_dims(self.dims)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "dims", dims)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] != dims.total:
            raise ShapeError(
                f"density matrix shape {M.shape} does not match dims {dims}"
            )
        defect = hermiticity_defect(M)
        if defect > 1e-12:
            raise ValueError(f"density matrix not Hermitian: max|M - M†| = {defect:.3e}")
        tr = float(M.trace().real)
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"density matrix trace {tr!r} is not 1")
        lo = float(np.linalg.eigvalsh((M + M.conj().T) / 2).min())
        if lo < -1e-10:
            raise ValueError(f"density matrix not PSD: min eigenvalue {lo:.3e}")

    @property
    def dim(self) -> int:
        return self.dims.total

    def rank(self, tol: float = 1e-12) -> int:
        w, _ = eig_hermitian(self.matrix)
        return int((w > tol).sum())


@dataclass(frozen=True, eq=False)
class PureKet:
    """Unit vector on a bipartite space."""

    vector: np.ndarray
    dims: Dims

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex).ravel()
        dims = as_dims(self.dims)
        object.__setattr__(self, "vector", v)
        object.__setattr__(self, "dims", dims)
        if v.size != dims.total:
            raise ShapeError(f"ket length {v.size} does not match dims {dims}")
        nrm = float(np.linalg.norm(v))
        if abs(nrm - 1.0) > 1e-10:
            raise ValueError(f"ket is not normalized: ||v|| = {nrm!r}")

    def projector(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())


@dataclass(frozen=True, eq=False)
class WeightedEnsemble:
    """Finite list of (weight, ket) pairs realizing a density matrix."""

    members: tuple

    def __post_init__(self):
        members = tuple((float(w), k) for w, k in self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise ValueError("ensemble must have at least one member")
        dims = members[0][1].dims
        for w, k in members:
            if w < -1e-12:
                raise ValueError(f"negative ensemble weight {w!r}")
            if k.dims != dims:
                raise ShapeError("ensemble kets do not share dimensions")
        total = sum(w for w, _ in members)
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"ensemble weights sum to {total!r}, not 1")

    @property
    def dims(self) -> Dims:
        return self.members[0][1].dims

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.members])

    def kets(self) -> list[PureKet]:
        return [k for _, k in self.members]

    def mix_matrix(self) -> np.ndarray:
        out = np.zeros((self.dims.total, self.dims.total), dtype=complex)
        for w, k in self.members:
            if w > 0.0:
                out += w * k.projector()
        return out


def ensemble_mix(ensemble: WeightedEnsemble) -> BipartiteDensity:
    """Mix an ensemble into the density matrix it realizes."""
    return BipartiteDensity(ensemble.mix_matrix(), ensemble.dims)


# ---------------------------------------------------------------------------
# Family parameter records
# ---------------------------------------------------------------------------

def _check_unit_interval(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class McTwoQubit:
    """Two-qubit maximally correlated mixture parameters."""

    p: float
    theta: float

    def __post_init__(self):
        _check_unit_interval("p", self.p)
        if not 0.0 <= self.theta <= pi / 2:
            raise ParameterError(f"theta must lie in [0, pi/2], got {self.theta!r}")


@dataclass(frozen=True)
class SigmaFamily:
    """Parameters of the general two-qubit family with equal-entanglement kets."""

    q: float
    p: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("q", "p", "x", "y", "z"):
            _check_unit_interval(name, getattr(self, name))
        s = self.x**2 + self.y**2 + self.z**2
        if abs(s - 1.0) > 1e-9:
            raise ParameterError(f"x^2 + y^2 + z^2 must equal 1, got {s!r}")


@dataclass(frozen=True)
class Lemma3Mc:
    """Rank-2 maximally correlated mixture in d x d.

    ``c`` holds the d positive Schmidt-like coefficients of the full ket
    (squares summing to 1); ``f`` is the cut index of the truncated ket.
    """

    p: float
    c: tuple
    f: int

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(x) for x in self.c))
        _check_unit_interval("p", self.p)
        d = len(self.c)
        if d < 2:
            raise ParameterError("coefficient list needs length >= 2")
        if any(x <= 0 for x in self.c):
            raise ParameterError("all coefficients must be strictly positive")
        s = sum(x * x for x in self.c)
        if abs(s - 1.0) > 1e-9:
            raise ParameterError(f"squared coefficients must sum to 1, got {s!r}")
        if not 1 <= self.f < d:
            raise ParameterError(f"f must satisfy 1 <= f < d = {d}, got {self.f}")

    @property
    def d(self) -> int:
        return len(self.c)

    @property
    def cos_theta(self) -> float:
        return sqrt(sum(x * x for x in self.c[: self.f]))

    @property
    def theta(self) -> float:
        return float(np.arccos(min(1.0, self.cos_theta)))


@dataclass(frozen=True)
class IsotropicParams:
    """Isotropic-state parameters in the range where the decomposition exists."""

    d: int
    F: float
    m: int = 2

    def __post_init__(self):
        if self.d < 3 or self.d % 2 == 0:
            raise ParameterError(f"decomposition requires odd d >= 3, got d = {self.d}")
        lo = (4 * self.d - 4) / self.d**2
        if not lo < self.F <= 1.0:
            raise ParameterError(
                f"F must satisfy F > (4d-4)/d^2 = {lo!r} and F <= 1, got {self.F!r}"
            )
        if self.m < 2:
            raise ParameterError(f"m must be an integer > 1, got {self.m}")


@dataclass(frozen=True)
class WernerParams:
    d: int
    F: float

    def __post_init__(self):
        if self.d < 2:
            raise ParameterError(f"d must be >= 2, got {self.d}")
        if not -1.0 <= self.F <= 1.0:
            raise ParameterError(f"F must lie in [-1, 1], got {self.F!r}")


_TAG_AMPLITUDES = {
    "0": (1.0, 0.0),
    "1": (0.0, 1.0),
    "+": (1 / sqrt(2), 1 / sqrt(2)),
    "-": (1 / sqrt(2), -1 / sqrt(2)),
}


@dataclass(frozen=True)
class SeparableTag:
    """Product-ket labels for a separable family on qubit x qubit.

    Each label is two characters from {0, 1, +, -}: the A-side and B-side
    single-qubit states, e.g. ("00", "++").
    """

    kets: tuple = field(default=("00", "++"))

    def __post_init__(self):
        object.__setattr__(self, "kets", tuple(str(k) for k in self.kets))
        if not self.kets:
            raise ParameterError("separable tag needs at least one ket label")
        for label in self.kets:
            if len(label) != 2 or any(ch not in _TAG_AMPLITUDES for ch in label):
                raise ParameterError(
                    f"ket label {label!r} must be two characters from 0,1,+,-"
                )

    def pure_kets(self) -> list[PureKet]:
        out = []
        for label in self.kets:
            a = np.array(_TAG_AMPLITUDES[label[0]])
            b = np.array(_TAG_AMPLITUDES[label[1]])
            out.append(PureKet(np.kron(a, b), Dims(2, 2)))
        return out


FamilyParams = (McTwoQubit, SigmaFamily, Lemma3Mc, IsotropicParams, WernerParams, SeparableTag)


# ---------------------------------------------------------------------------
# Pure-state builders
# ---------------------------------------------------------------------------

def basis_ket(index: int, dims) -> PureKet:
    dims = as_dims(dims)
    v = np.zeros(dims.total, dtype=complex)
    v[index] = 1.0
    return PureKet(v, dims)


def mc_ket(theta: float) -> PureKet:
    """cos(theta)|00> + sin(theta)|11> on two qubits."""
    v = np.zeros(4, dtype=complex)
    v[0] = cos(theta)
    v[3] = sin(theta)
    return PureKet(v, Dims(2, 2))


def max_entangled(d: int) -> PureKet:
    """(1/sqrt(d)) sum_i |ii>."""
    if d < 2:
        raise ParameterError(f"d must be >= 2, got {d}")
    v = np.zeros(d * d, dtype=complex)
    for i in range(d):
        v[i * d + i] = 1 / sqrt(d)
    return PureKet(v, Dims(d, d))


def diagonal_correlated_ket(coeffs, d: int) -> PureKet:
    """sum_i coeffs[i] |ii> in d x d."""
    v = np.zeros(d * d, dtype=complex)
    for i, ci in enumerate(coeffs):
        v[i * d + i] = ci
    return PureKet(v, Dims(d, d))


# ---------------------------------------------------------------------------
# Mixed-state family constructors
# ---------------------------------------------------------------------------

def mc_two_qubit(p: float, theta: float) -> BipartiteDensity:
    """p |psi_theta><psi_theta| + (1-p) |psi_{pi/2-theta}><psi_{pi/2-theta}|."""
    params = McTwoQubit(p, theta)
    k1 = mc_ket(params.theta)
    k2 = mc_ket(pi / 2 - params.theta)
    M = params.p * k1.projector() + (1 - params.p) * k2.projector()
    return BipartiteDensity(M, Dims(2, 2))


def sigma_theta(p: float, x: float) -> float:
    """Mixing angle of the sigma family (principal arctan branch).

    The radicand 1 + 4(1-p)^2 (x^4 - x^2) is analytically nonnegative for
    x in [0, 1] and is clamped at 0 against roundoff.
    """
    denominator = 2 * x * sqrt(max(p - p * p, 0.0))
    if denominator == 0.0:
        raise DegenerateParameterError(
            "sigma family is degenerate: the denominator 2x*sqrt(p - p^2) "
            f"vanishes for p = {p!r}, x = {x!r}"
        )
    radicand = max(1 + 4 * (1 - p) ** 2 * (x**4 - x**2), 0.0)
    numerator = -1 + 2 * (1 - p) * x**2 - sqrt(radicand)
    return atan(numerator / denominator)


def sigma_family_kets(p: float, x: float, y: float, z: float):
    """The two normalized kets of the sigma family, plus the mixing angle."""
    for name, v in (("p", p), ("x", x), ("y", y), ("z", z)):
        _check_unit_interval(name, v)
    s = x**2 + y**2 + z**2
    if abs(s - 1.0) > 1e-9:
        raise ParameterError(f"x^2 + y^2 + z^2 must equal 1, got {s!r}")
    theta = sigma_theta(p, x)
    w = np.zeros(4, dtype=complex)
    w[0], w[1], w[3] = x, y, z
    e00 = np.zeros(4, dtype=complex)
    e00[0] = 1.0
    alpha = sqrt(p) * cos(theta) * e00 + sqrt(1 - p) * sin(theta) * w
    beta = sqrt(p) * sin(theta) * e00 - sqrt(1 - p) * cos(theta) * w
    alpha = alpha / np.linalg.norm(alpha)
    beta = beta / np.linalg.norm(beta)
    return PureKet(alpha, Dims(2, 2)), PureKet(beta, Dims(2, 2)), theta


def sigma_family_state(q: float, p: float, x: float, y: float, z: float):
    """Weighted mixture of the two sigma-family kets; returns (state, theta)."""
    params = SigmaFamily(q, p, x, y, z)
    ka, kb, theta = sigma_family_kets(params.p, params.x, params.y, params.z)
    M = params.q * ka.projector() + (1 - params.q) * kb.projector()
    return BipartiteDensity(M, Dims(2, 2)), theta


def lemma3_mc(p: float, c, f: int) -> BipartiteDensity:
    """Rank-2 mixture of a diagonal-correlated ket and its truncation."""
    params = Lemma3Mc(p, tuple(c), f)
    d = params.d
    psi = diagonal_correlated_ket(params.c, d)
    phi = diagonal_correlated_ket(
        [ci / params.cos_theta for ci in params.c[: params.f]], d
    )
    M = params.p * psi.projector() + (1 - params.p) * phi.projector()
    return BipartiteDensity(M, Dims(d, d))


def isotropic(d: int, F: float) -> BipartiteDensity:
    """(1-F)/(d^2-1) * I + (F d^2 - 1)/(d^2-1) * |psi+><psi+|."""
    if d < 2:
        raise ParameterError(f"d must be >= 2, got {d}")
    if not 0.0 <= F <= 1.0:
        raise ParameterError(f"F must lie in [0, 1], got {F!r}")
    D = d * d
    P = max_entangled(d).projector()
    M = (1 - F) / (D - 1) * np.eye(D) + (F * D - 1) / (D - 1) * P
    return BipartiteDensity(M, Dims(d, d))


def swap_operator(d: int) -> np.ndarray:
    """sum_ij |ij><ji| on d x d."""
    S = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            S[i * d + j, j * d + i] = 1.0
    return S


def werner(d: int, F: float) -> BipartiteDensity:
    """Werner state with swap expectation Tr(rho * SWAP) = F."""
    params = WernerParams(d, F)
    d, F = params.d, params.F
    M = (d - F) / (d**3 - d) * np.eye(d * d) + (d * F - 1) / (d**3 - d) * swap_operator(d)
    return BipartiteDensity(M, Dims(d, d))


# ---------------------------------------------------------------------------
# Channels
# ---------------------------------------------------------------------------

def isotropic_twirl(rho: BipartiteDensity) -> BipartiteDensity:
    """Project onto the isotropic family: keep F = <psi+|rho|psi+>."""
    if rho.dims.dA != rho.dims.dB:
        raise ShapeError(f"twirl needs dA == dB, got {rho.dims}")
    d = rho.dims.dA
    plus = max_entangled(d).vector
    F = float(np.real(plus.conj() @ rho.matrix @ plus))
    return isotropic(d, min(max(F, 0.0), 1.0))


def werner_mixing_channel(rho_qubit: BipartiteDensity, d: int) -> BipartiteDensity:
    """Spread a 2x2-bipartite state over all level pairs of a d x d space.

    Applies (2/(d^2-d)) sum_{i>j} (v_ij ⊗ v_ij) rho (v_ij ⊗ v_ij)†, where
    v_ij is the d x 2 embedding |0> -> |i>, |1> -> |j>. Trace-preserving
    because the embeddings are isometries.
    """
    if rho_qubit.dims != Dims(2, 2):
        raise ShapeError(f"input must be a 2x2-bipartite state, got {rho_qubit.dims}")
    if d < 3:
        raise ParameterError(f"target dimension must be >= 3, got {d}")
    out = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(i):
            v = np.zeros((d, 2), dtype=complex)
            v[i, 0] = 1.0
            v[j, 1] = 1.0
            K = kron(v, v)
            out += K @ rho_qubit.matrix @ K.conj().T
    out *= 2 / (d * d - d)
    return BipartiteDensity(out, Dims(d, d))


# ---------------------------------------------------------------------------
# Structure checks
# ---------------------------------------------------------------------------

def mc_pattern_defect(rho: BipartiteDensity) -> float:
    """Largest matrix entry outside the |ii><jj| support pattern."""
    if rho.dims.dA != rho.dims.dB:
        return float(np.abs(rho.matrix).max())
    d = rho.dims.dA
    mask = np.zeros((d * d, d * d), dtype=bool)
    diag = [i * d + i for i in range(d)]
    for a in diag:
        for b in diag:
            mask[a, b] = True
    off = np.abs(rho.matrix)[~mask]
    return float(off.max()) if off.size else 0.0


def is_maximally_correlated(rho: BipartiteDensity, tol: float = MC_PATTERN_TOL) -> bool:
    return rho.dims.dA == rho.dims.dB and mc_pattern_defect(rho) <= tol
