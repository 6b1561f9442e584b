"""Scalar entanglement functionals.

All entropies are base-2 (ebits). Closed-form family values follow the
analytic expressions for each named family; cross-checks against the
Wootters formula and the numerical oracle live in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, log2, sin, sqrt

import numpy as np

from .errors import ParameterError, PatternError, ShapeError
from .linalg import clamp_probabilities, partial_trace, schmidt_coefficients
from .states import (
    BipartiteDensity,
    IsotropicParams,
    Lemma3Mc,
    McTwoQubit,
    PureKet,
    SeparableTag,
    SigmaFamily,
    WernerParams,
    is_maximally_correlated,
    lemma3_mc,
    mc_pattern_defect,
    mc_two_qubit,
)

_DOMAIN_SLACK = 1e-12


def binary_entropy(x: float) -> float:
    """h(x) = -x log2 x - (1-x) log2(1-x), with 0 log 0 := 0."""
    if not -_DOMAIN_SLACK <= x <= 1.0 + _DOMAIN_SLACK:
        raise ParameterError(f"binary entropy argument {x!r} outside [0, 1]")
    x = min(max(x, 0.0), 1.0)
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * log2(x) - (1 - x) * log2(1 - x)


def entropy_of_probs(p: np.ndarray) -> float:
    """Shannon entropy (base 2) of a clamped probability vector."""
    p = clamp_probabilities(np.asarray(p, dtype=float))
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def von_neumann_entropy(rho: np.ndarray) -> float:
    """-Tr rho log2 rho for a PSD Hermitian matrix (trace renormalized)."""
    rho = np.asarray(rho)
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if w.min() < -1e-10:
        raise ValueError(f"matrix not PSD: min eigenvalue {w.min():.3e}")
    total = w.sum()
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"trace {total!r} too far from 1 to renormalize")
    return entropy_of_probs(w / total)


def pure_entanglement(ket: PureKet) -> float:
    """Entropy of entanglement of a pure bipartite state."""
    s = schmidt_coefficients(ket.vector, ket.dims)
    return entropy_of_probs(s**2)


_SIGMA_Y2 = np.array(
    [
        [0, 0, 0, -1],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [-1, 0, 0, 0],
    ],
    dtype=complex,
)


def concurrence(rho: BipartiteDensity) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    The lambda_i are computed as the singular values of
    sqrt(rho) (sy ⊗ sy) conj(sqrt(rho)), which equal the square roots of
    the spectrum of rho rho~ but stay accurate near rank deficiency.
    """
    if rho.dims.total != 4:
        raise ShapeError(f"concurrence needs a 2x2-bipartite state, got {rho.dims}")
    w, V = np.linalg.eigh((rho.matrix + rho.matrix.conj().T) / 2)
    root = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T
    lam = np.linalg.svd(root @ _SIGMA_Y2 @ root.conj(), compute_uv=False)
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


def wootters_eof(rho: BipartiteDensity) -> float:
    """Exact two-qubit entanglement of formation via the concurrence."""
    C = concurrence(rho)
    return binary_entropy(0.5 + 0.5 * sqrt(max(0.0, 1.0 - C * C)))


# ---------------------------------------------------------------------------
# Closed-form family values
# ---------------------------------------------------------------------------

def eof_mc_two_qubit(theta: float) -> float:
    """h(cos^2 theta); independent of the mixing weight."""
    if not 0.0 <= theta <= np.pi / 2:
        raise ParameterError(f"theta must lie in [0, pi/2], got {theta!r}")
    return binary_entropy(cos(theta) ** 2)


def eof_sigma(p: float, x: float, z: float) -> float:
    """h(1/2 + 1/2 sqrt(1 - 4 (1-p)^2 x^2 z^2)); independent of q and y."""
    for name, v in (("p", p), ("x", x), ("z", z)):
        if not 0.0 <= v <= 1.0:
            raise ParameterError(f"{name} must lie in [0, 1], got {v!r}")
    return binary_entropy(0.5 + 0.5 * sqrt(max(0.0, 1 - 4 * (1 - p) ** 2 * x * x * z * z)))


def eof_lemma3(p: float, c, f: int) -> float:
    """Closed-form formation entanglement of the rank-2 d x d mixture."""
    params = Lemma3Mc(p, tuple(c), f)
    p = params.p
    ct2 = params.cos_theta**2
    s2t = sin(2 * params.theta)
    mixed = -p * sum(ci**2 * log2(ci**2) for ci in params.c)
    mixed -= (1 - p) * sum(
        (ci**2 / ct2) * log2(ci**2 / ct2) for ci in params.c[: params.f]
    )
    mixed += binary_entropy(0.5 + 0.5 * sqrt(max(0.0, 1 - p * p * s2t * s2t)))
    mixed -= p * binary_entropy(ct2)
    return mixed


def eof_isotropic_member(d: int) -> float:
    """Entanglement of each twirled member ket: ((2-d)/d) log2(d-1) + log2 d."""
    if d < 3:
        raise ParameterError(f"member value needs d >= 3, got {d}")
    return (2 - d) / d * log2(d - 1) + log2(d)


def eof_isotropic_family(d: int, F: float, m: int = 2) -> float:
    """Formation entanglement of the isotropic state in the decomposition range.

    Equals w log2 d + (1 - w) * member value, where w is the weight on the
    maximally entangled ket.
    """
    params = IsotropicParams(d, F, m)
    w_plus = (4 - 4 * params.d + params.F * params.d**2) / (params.d - 2) ** 2
    return w_plus * log2(params.d) + (1 - w_plus) * eof_isotropic_member(params.d)


def eof_werner(F: float) -> float:
    """h(1/2 + 1/2 sqrt(1 - F^2)) for an entangled Werner state (F < 0)."""
    if not -1.0 <= F < 0.0:
        raise ParameterError(
            f"Werner formation entanglement is defined for F in [-1, 0), got {F!r}"
        )
    return binary_entropy(0.5 + 0.5 * sqrt(max(0.0, 1 - F * F)))


# ---------------------------------------------------------------------------
# Distillable entanglement and cost gaps for maximally correlated states
# ---------------------------------------------------------------------------

def distillable_mc(rho: BipartiteDensity, side: str = "A") -> float:
    """Hashing value S(Tr_side rho) - S(rho) of a maximally correlated state."""
    if not is_maximally_correlated(rho):
        raise PatternError(
            "state is not maximally correlated: off-pattern entry "
            f"{mc_pattern_defect(rho):.3e} exceeds tolerance"
        )
    keep = {"A": "B", "B": "A"}.get(side)
    if keep is None:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    marginal = partial_trace(rho.matrix, rho.dims, keep=keep)
    value = von_neumann_entropy(marginal) - von_neumann_entropy(rho.matrix)
    return max(0.0, value)


def gap_tensor_mc(theta_list, rho: BipartiteDensity) -> float:
    """Undistillable entanglement of a composed MC-family member.

    sum_i h(cos^2 theta_i) - S(Tr_A rho) + S(rho). The state must carry
    the maximally correlated pattern.
    """
    cost = sum(eof_mc_two_qubit(t) for t in theta_list)
    return cost - distillable_mc(rho, side="A")


def gap_lemma3(p: float, theta: float) -> float:
    """Cost-minus-distillable gap of the rank-2 d x d mixture.

    Depends only on the mixing weight and the overlap angle, not on the
    individual coefficients.
    """
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must lie in [0, 1], got {p!r}")
    if not 0.0 < theta < np.pi / 2:
        raise ParameterError(f"theta must lie in (0, pi/2), got {theta!r}")
    s2t = sin(2 * theta)
    st2 = sin(theta) ** 2
    return (
        binary_entropy(0.5 + 0.5 * sqrt(max(0.0, 1 - p * p * s2t * s2t)))
        - binary_entropy(p * st2)
        + binary_entropy(0.5 + 0.5 * sqrt(max(0.0, 1 - 4 * p * st2 + 4 * p * p * st2)))
    )


# ---------------------------------------------------------------------------
# Per-family summary reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EntanglementReport:
    """Formation entanglement plus cost/distillable data where available.

    ``cost`` is populated only for families whose formation entanglement
    is additive, in which case it equals ``eof``. ``distillable`` is the
    hashing value, defined here for maximally correlated states only.
    """

    family: str
    eof: float
    cost: float | None = None
    distillable: float | None = None
    gap: float | None = None

    def __post_init__(self):
        if self.cost is not None and self.distillable is not None and self.gap is not None:
            if abs(self.gap - (self.cost - self.distillable)) > 1e-12:
                raise ValueError("gap does not equal cost - distillable")
            if self.cost < self.distillable - 1e-9:
                raise ValueError("cost below distillable entanglement")


def family_report(params) -> EntanglementReport:
    """Evaluate the closed-form quantities for one family parameter record."""
    if isinstance(params, McTwoQubit):
        eof = eof_mc_two_qubit(params.theta)
        ed = distillable_mc(mc_two_qubit(params.p, params.theta))
        return EntanglementReport("mc2", eof, cost=eof, distillable=ed, gap=eof - ed)
    if isinstance(params, SigmaFamily):
        eof = eof_sigma(params.p, params.x, params.z)
        return EntanglementReport("sigma", eof, cost=eof)
    if isinstance(params, Lemma3Mc):
        eof = eof_lemma3(params.p, params.c, params.f)
        ed = distillable_mc(lemma3_mc(params.p, params.c, params.f))
        return EntanglementReport("lemma3", eof, cost=eof, distillable=ed, gap=eof - ed)
    if isinstance(params, WernerParams):
        eof = eof_werner(params.F) if params.F < 0 else 0.0
        return EntanglementReport("werner", eof)
    if isinstance(params, IsotropicParams):
        eof = eof_isotropic_family(params.d, params.F, params.m)
        return EntanglementReport("isotropic", eof)
    if isinstance(params, SeparableTag):
        return EntanglementReport("separable", 0.0, cost=0.0)
    raise TypeError(f"unknown family parameter record: {params!r}")
