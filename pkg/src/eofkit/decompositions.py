"""Construction and verification of optimal decompositions.

Each ``od_*`` builder returns the weighted ensemble that realizes its
family's state while attaining the closed-form formation entanglement.
``ODFamily`` captures the family spanned by a fixed ket set (arbitrary
re-weighting), ``compose`` tensors two families into a new one, and
``verify_od`` checks a claimed decomposition against its target state,
its analytic value, and the numerical oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb, cos, pi, sin, sqrt

import numpy as np

from .entanglement import (
    eof_isotropic_member,
    eof_mc_two_qubit,
    eof_sigma,
    pure_entanglement,
)
from .errors import ParameterError, ShapeError
from .linalg import Dims, frob_dist
from .oracle import CertificationReport, OracleConfig, certify_not_below
from .states import (
    BipartiteDensity,
    IsotropicParams,
    Lemma3Mc,
    McTwoQubit,
    PureKet,
    SeparableTag,
    SigmaFamily,
    WeightedEnsemble,
    WernerParams,
    max_entangled,
    mc_ket,
    diagonal_correlated_ket,
    sigma_family_kets,
)

_NEGLIGIBLE_WEIGHT = 1e-14


@dataclass(frozen=True, eq=False)
class ODFamily:
    """A fixed ket set spanning a family of states under re-weighting.

    ``additive`` is set only for the families whose formation entanglement
    is additive (two-qubit MC, sigma, separable) and for their tensor
    compositions; it gates the composition hypothesis.
    """

    kets: tuple
    per_ket_entanglement: tuple
    additive: bool
    provenance: object = None

    def __post_init__(self):
        kets = tuple(self.kets)
        ents = tuple(float(e) for e in self.per_ket_entanglement)
        object.__setattr__(self, "kets", kets)
        object.__setattr__(self, "per_ket_entanglement", ents)
        if len(kets) != len(ents):
            raise ValueError("one entanglement value per ket required")
        if not kets:
            raise ValueError("family needs at least one ket")
        dims = kets[0].dims
        for k, e in zip(kets, ents):
            if k.dims != dims:
                raise ShapeError("family kets do not share dimensions")
            actual = pure_entanglement(k)
            if abs(actual - e) > 1e-10:
                raise ValueError(
                    f"claimed per-ket entanglement {e!r} differs from computed {actual!r}"
                )

    @property
    def dims(self) -> Dims:
        return self.kets[0].dims

    def __len__(self) -> int:
        return len(self.kets)

    @classmethod
    def from_ensemble(cls, ensemble: WeightedEnsemble, additive: bool, provenance=None):
        kets = ensemble.kets()
        return cls(tuple(kets), tuple(pure_entanglement(k) for k in kets), additive, provenance)

    def ensemble(self, weights) -> WeightedEnsemble:
        """Attach a probability vector to the family kets."""
        w = _as_prob_vector(weights, len(self))
        return WeightedEnsemble(tuple(zip(w, self.kets)))

    def member(self, weights) -> BipartiteDensity:
        """Mix the family kets with the given probability vector."""
        from .states import ensemble_mix

        return ensemble_mix(self.ensemble(weights))


def _as_prob_vector(weights, n: int) -> np.ndarray:
    w = np.asarray(list(weights), dtype=float)
    if w.size != n:
        raise ValueError(f"expected {n} weights, got {w.size}")
    if w.min() < -1e-12:
        raise ValueError(f"negative weight {w.min()!r}")
    if abs(w.sum() - 1.0) > 1e-10:
        raise ValueError(f"weights sum to {w.sum()!r}, not 1")
    return np.clip(w, 0.0, None)


def family_eof(fam: ODFamily, weights) -> float:
    """Formation entanglement of the family member with the given weights."""
    w = _as_prob_vector(weights, len(fam))
    return float(w @ np.asarray(fam.per_ket_entanglement))


# ---------------------------------------------------------------------------
# Named decompositions
# ---------------------------------------------------------------------------

def _ensemble_dropping_null(pairs) -> WeightedEnsemble:
    kept = [(w, k) for w, k in pairs if w > _NEGLIGIBLE_WEIGHT]
    return WeightedEnsemble(tuple(kept))


def od_mc_two_qubit(p: float, theta: float) -> WeightedEnsemble:
    """Two-member decomposition {p, 1-p} over the theta / (pi/2 - theta) kets."""
    params = McTwoQubit(p, theta)
    return _ensemble_dropping_null(
        [
            (params.p, mc_ket(params.theta)),
            (1 - params.p, mc_ket(pi / 2 - params.theta)),
        ]
    )


def mc_two_qubit_family(theta: float) -> ODFamily:
    kets = (mc_ket(theta), mc_ket(pi / 2 - theta))
    e = eof_mc_two_qubit(theta)
    return ODFamily(kets, (e, e), additive=True, provenance=("mc2", theta))


def od_sigma(q: float, p: float, x: float, y: float, z: float) -> WeightedEnsemble:
    """Weights q, 1-q over the two normalized sigma-family kets."""
    params = SigmaFamily(q, p, x, y, z)
    ka, kb, _ = sigma_family_kets(params.p, params.x, params.y, params.z)
    return _ensemble_dropping_null([(params.q, ka), (1 - params.q, kb)])


def sigma_family(p: float, x: float, y: float, z: float) -> ODFamily:
    ka, kb, _ = sigma_family_kets(p, x, y, z)
    e = eof_sigma(p, x, z)
    return ODFamily((ka, kb), (e, e), additive=True, provenance=("sigma", p, x, y, z))


def lemma3_od_kets(params: Lemma3Mc) -> list[np.ndarray]:
    """The two unnormalized decomposition kets of the rank-2 d x d mixture.

    The radicands 1/2 +- (-1 + p + p cos 2 theta)/(2 sqrt(1 - p^2 sin^2 2 theta))
    are clamped at zero against roundoff.
    """
    p = params.p
    theta = params.theta
    root = sqrt(max(0.0, 1 - p * p * sin(2 * theta) ** 2))
    shift = (-1 + p + p * cos(2 * theta)) / (2 * root)
    a = sqrt(max(0.0, 0.5 + shift))
    b = sqrt(max(0.0, 0.5 - shift))
    u = np.array([[a, b], [b, -a]])
    d = params.d
    psi = diagonal_correlated_ket(params.c, d).vector
    phi = diagonal_correlated_ket(
        [ci / params.cos_theta for ci in params.c[: params.f]], d
    ).vector
    return [u[i, 0] * sqrt(p) * psi + u[i, 1] * sqrt(1 - p) * phi for i in range(2)]


def od_lemma3(p: float, c, f: int) -> WeightedEnsemble:
    """Two-member decomposition with weights from the unnormalized ket norms."""
    params = Lemma3Mc(p, tuple(c), f)
    pairs = []
    for raw in lemma3_od_kets(params):
        w = float(np.vdot(raw, raw).real)
        if w > _NEGLIGIBLE_WEIGHT:
            pairs.append((w, PureKet(raw / sqrt(w), Dims(params.d, params.d))))
    return WeightedEnsemble(tuple(pairs))


def lemma3_family(p: float, c, f: int) -> ODFamily:
    ens = od_lemma3(p, c, f)
    return ODFamily.from_ensemble(ens, additive=False, provenance=("lemma3", p, tuple(c), f))


@dataclass(frozen=True, eq=False)
class CoeffMatrix:
    """Row set used to build the twirled members of the isotropic decomposition.

    Every nonzero entry has modulus sqrt(2/(d+1)); each of the
    L = n * C(d, (d+1)/2) rows supports exactly (d+1)/2 columns. The phase
    exponents f_i = m^i obey the divisibility law: n divides
    f_i + f_j - f_k - f_l only when {i, j} = {k, l} as multisets.
    """

    d: int
    m: int
    n: int
    f: tuple
    rows: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(int(x) for x in self.f))
        rows = np.asarray(self.rows, dtype=complex)
        object.__setattr__(self, "rows", rows)
        d, n = self.d, self.n
        expected_rows = self.n * comb(d, (d + 1) // 2)
        if rows.shape != (expected_rows, d):
            raise ValueError(
                f"coefficient matrix must be {expected_rows} x {d}, got {rows.shape}"
            )
        mag = np.abs(rows)
        support = mag > 1e-14
        if not np.all(support.sum(axis=1) == (d + 1) // 2):
            raise ValueError("each row must support exactly (d+1)/2 columns")
        if np.abs(mag[support] - sqrt(2 / (d + 1))).max() > 1e-12:
            raise ValueError("nonzero entries must have modulus sqrt(2/(d+1))")
        if np.abs((mag**2).sum(axis=1) - 1.0).max() > 1e-12:
            raise ValueError("rows must have unit norm")
        violation = _divisibility_violation(self.f, n)
        if violation is not None:
            raise ValueError(
                f"divisibility law fails for index quadruple {violation} with n = {n}"
            )

    @property
    def L(self) -> int:
        return self.rows.shape[0]


def _divisibility_violation(f, n):
    """First quadruple breaking 'n | f_i + f_j - f_k - f_l iff {i,j} == {k,l}'."""
    d = len(f)
    for i in range(d):
        for j in range(d):
            for k in range(d):
                for l in range(d):
                    divides = (f[i] + f[j] - f[k] - f[l]) % n == 0
                    same = sorted((i, j)) == sorted((k, l))
                    if divides != same:
                        return (i, j, k, l)
    return None


def coeff_matrix(d: int, m: int, n: int | None = None) -> CoeffMatrix:
    """Build the coefficient rows for odd d >= 3 with exponents f_i = m^i.

    ``n`` defaults to 2 m^d - 3, the smallest integer exceeding 2 m^d - 4.
    Rows enumerate all (d+1)/2-column support patterns, each expanded into
    n phase rows with entry sqrt(2/(d+1)) * exp(2 pi i f_j k / n).
    """
    if d < 3 or d % 2 == 0:
        raise ParameterError(
            f"coefficient matrix construction requires odd d >= 3, got d = {d}"
        )
    if m < 2:
        raise ParameterError(f"m must be an integer > 1, got {m}")
    if n is None:
        n = 2 * m**d - 3
    if n <= 2 * m**d - 4:
        raise ParameterError(f"n must exceed 2 m^d - 4 = {2 * m**d - 4}, got {n}")
    f = tuple(m ** (i + 1) for i in range(d))
    amp = sqrt(2 / (d + 1))
    rows = np.zeros((n * comb(d, (d + 1) // 2), d), dtype=complex)
    r = 0
    for support in combinations(range(d), (d + 1) // 2):
        for k in range(n):
            for j in support:
                rows[r, j] = amp * np.exp(2j * pi * f[j] * k / n)
            r += 1
    return CoeffMatrix(d, m, n, f, rows)


def isotropic_member_ket(row: np.ndarray, d: int) -> PureKet:
    """Decomposition member built from one coefficient row."""
    ident = np.zeros(d * d, dtype=complex)
    for i in range(d):
        ident[i * d + i] = 1.0
    v = (d - 2) / sqrt(d * d - d) * np.kron(row, row.conj()) + ident / sqrt(d * d - d)
    return PureKet(v, Dims(d, d))


def od_isotropic(d: int, F: float, m: int = 2) -> WeightedEnsemble:
    """L twirled members plus the maximally entangled ket.

    Weights are d^2 (1-F) / ((d-2)^2 L) per twirled member and
    (4 - 4d + F d^2)/(d-2)^2 on the maximally entangled ket; they sum to
    one identically. Zero-weight members are kept (the kets are still
    well defined at the boundary).
    """
    params = IsotropicParams(d, F, m)
    d, F = params.d, params.F
    cm = coeff_matrix(d, params.m)
    w_member = d * d * (1 - F) / ((d - 2) ** 2 * cm.L)
    w_plus = (4 - 4 * d + F * d * d) / (d - 2) ** 2
    pairs = [(w_member, isotropic_member_ket(row, d)) for row in cm.rows]
    pairs.append((w_plus, max_entangled(d)))
    return WeightedEnsemble(tuple(pairs))


def isotropic_family(d: int, m: int = 2) -> ODFamily:
    """Ket set of the isotropic decomposition (independent of F)."""
    cm = coeff_matrix(d, m)
    kets = tuple(isotropic_member_ket(row, d) for row in cm.rows) + (max_entangled(d),)
    ents = tuple([eof_isotropic_member(d)] * cm.L + [float(np.log2(d))])
    return ODFamily(kets, ents, additive=False, provenance=("isotropic", d, m))


_WERNER_U = np.array(
    [
        [-0.5, 0.5, 0.5, 0.5],
        [0.5, -0.5, 0.5, 0.5],
        [0.5j, 0.5j, -0.5, 0.5],
        [0.5j, 0.5j, 0.5, -0.5],
    ]
)


def werner_member_ket(d: int, F: float, i: int, j: int, k: int) -> PureKet:
    """Decomposition ket on levels i > j with phase row k of the fixed 4x4 matrix."""
    if not 0 <= j < i < d:
        raise ParameterError(f"levels must satisfy 0 <= j < i < d, got i={i}, j={j}")
    a = sqrt((F + 1) / (2 * d + 2))
    b = sqrt((1 - F) / 2)
    g = sqrt((d - 1) * (F + 1) / (2 * d + 2))
    v = np.zeros(d * d, dtype=complex)
    u = _WERNER_U[k]
    v[i * d + i] += 2 * u[0] * a
    v[j * d + j] += 2 * u[1] * a
    sym = 2 * u[2] * g / sqrt(2)
    anti = 2 * u[3] * b / sqrt(2)
    v[i * d + j] += sym + anti
    v[j * d + i] += sym - anti
    return PureKet(v, Dims(d, d))


def od_werner(d: int, F: float) -> WeightedEnsemble:
    """2 d (d-1) equally weighted kets realizing the Werner state."""
    params = WernerParams(d, F)
    d, F = params.d, params.F
    w = 1 / (2 * d * d - 2 * d)
    pairs = []
    for i in range(d):
        for j in range(i):
            for k in range(4):
                pairs.append((w, werner_member_ket(d, F, i, j, k)))
    return WeightedEnsemble(tuple(pairs))


def werner_family(d: int, F: float) -> ODFamily:
    ens = od_werner(d, F)
    return ODFamily.from_ensemble(ens, additive=False, provenance=("werner", d, F))


def separable_family(kets) -> ODFamily:
    """Family of product kets; every member has zero formation entanglement."""
    kets = tuple(kets)
    for k in kets:
        e = pure_entanglement(k)
        if e > 1e-10:
            raise ParameterError(
                f"separable family requires product kets; found entanglement {e!r}"
            )
    return ODFamily(kets, (0.0,) * len(kets), additive=True, provenance="separable")


def separable_family_from_tag(tag: SeparableTag) -> ODFamily:
    return separable_family(tag.pure_kets())


# ---------------------------------------------------------------------------
# Composition
# ---------------------------------------------------------------------------

def tensor_bipartite_ket(k1: PureKet, k2: PureKet) -> PureKet:
    """Tensor two bipartite kets, regrouping indices to (A1 A2 | B1 B2).

    The joined A index is a1 * dA2 + a2, likewise for B.
    """
    dA1, dB1 = k1.dims
    dA2, dB2 = k2.dims
    v = np.kron(k1.vector, k2.vector)
    v = v.reshape(dA1, dB1, dA2, dB2).transpose(0, 2, 1, 3).ravel()
    return PureKet(v, Dims(dA1 * dA2, dB1 * dB2))


def compose(a: ODFamily, b: ODFamily) -> ODFamily:
    """Tensor two decomposition families into one on the joined bipartition.

    Requires at least one factor with additive formation entanglement;
    the result is flagged additive only when both factors are.
    """
    if not (a.additive or b.additive):
        raise ParameterError(
            "composition hypothesis violated: neither factor has additive "
            "formation entanglement"
        )
    kets = []
    ents = []
    for ka, ea in zip(a.kets, a.per_ket_entanglement):
        for kb, eb in zip(b.kets, b.per_ket_entanglement):
            kets.append(tensor_bipartite_ket(ka, kb))
            ents.append(ea + eb)
    return ODFamily(
        tuple(kets),
        tuple(ents),
        additive=a.additive and b.additive,
        provenance=("compose", a.provenance, b.provenance),
    )


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    """Three-part check of a claimed decomposition.

    The oracle can only refute a claim by finding a cheaper decomposition;
    it never proves optimality.
    """

    reconstruction_error: float
    average_entanglement: float
    claimed_eof: float
    certification: CertificationReport
    reconstruction_tol: float
    average_tol: float

    @property
    def average_error(self) -> float:
        return abs(self.average_entanglement - self.claimed_eof)

    @property
    def reconstruction_ok(self) -> bool:
        return self.reconstruction_error <= self.reconstruction_tol

    @property
    def average_ok(self) -> bool:
        return self.average_error <= self.average_tol

    @property
    def certified(self) -> bool:
        return self.certification.passed

    @property
    def passed(self) -> bool:
        return self.reconstruction_ok and self.average_ok and self.certified


def average_entanglement(ensemble: WeightedEnsemble) -> float:
    return float(
        sum(w * pure_entanglement(k) for w, k in ensemble if w > _NEGLIGIBLE_WEIGHT)
    )


def verify_od(
    ensemble: WeightedEnsemble,
    target: BipartiteDensity,
    claimed_eof: float,
    oracle_budget: OracleConfig | None = None,
    reconstruction_tol: float = 1e-9,
    average_tol: float = 1e-9,
) -> VerificationReport:
    """Check reconstruction, the analytic value, and oracle non-refutation."""
    if ensemble.dims != target.dims:
        raise ShapeError(
            f"ensemble dims {ensemble.dims} do not match target dims {target.dims}"
        )
    cfg = oracle_budget if oracle_budget is not None else OracleConfig(
        restarts=10, value_tolerance=1e-4, force=True
    )
    recon = frob_dist(ensemble.mix_matrix(), target.matrix)
    avg = average_entanglement(ensemble)
    cert = certify_not_below(target, claimed_eof, cfg)
    return VerificationReport(
        reconstruction_error=recon,
        average_entanglement=avg,
        claimed_eof=claimed_eof,
        certification=cert,
        reconstruction_tol=reconstruction_tol,
        average_tol=average_tol,
    )
