"""Brute-force convex-roof minimization.

Every size-N decomposition of a rank-r state corresponds to an N x r
isometry applied to the eigendecomposition. The oracle draws seeded
random isometries and locally minimizes the average pure-state
entanglement with derivative-free coordinate descent over pairwise ket
rotations (each 2x2 unitary on a pair of unnormalized kets preserves the
mixture). The minimum found is an upper bound on the formation
entanglement: the oracle can refute an analytic claim but never prove it
optimal.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, log2, sin, sqrt

import numpy as np

from .errors import ParameterError, ScaleGuardError
from .linalg import Dims, clamp_probabilities, eig_hermitian, random_isometry
from .states import BipartiteDensity, PureKet, WeightedEnsemble

_RANK_TOL = 1e-12
_NULL_KET = 1e-14

MAX_ORACLE_RANK = 6
MAX_ORACLE_DIM = 16


def splitmix64(x: int) -> int:
    """One step of the splitmix64 mixer; derives independent restart seeds.

    Restart k of a run with seed s uses ``splitmix64(s ^ k)``.
    """
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return (z ^ (z >> 31)) & 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class OracleConfig:
    """Search budget and tolerances for the convex-roof oracle.

    ``ensemble_size`` defaults to min(r^2, r + 4) for a rank-r state.
    """

    ensemble_size: int | None = None
    restarts: int = 50
    max_iters: int = 400
    step_tolerance: float = 1e-8
    value_tolerance: float = 1e-6
    seed: int = 0
    force: bool = False

    def __post_init__(self):
        if self.restarts < 1:
            raise ParameterError(f"restarts must be >= 1, got {self.restarts}")
        if self.ensemble_size is not None and self.ensemble_size < 1:
            raise ParameterError(f"ensemble_size must be >= 1, got {self.ensemble_size}")
        if self.max_iters < 1:
            raise ParameterError(f"max_iters must be >= 1, got {self.max_iters}")

    def size_for_rank(self, rank: int) -> int:
        if self.ensemble_size is not None:
            if self.ensemble_size < rank:
                raise ParameterError(
                    f"ensemble_size {self.ensemble_size} below state rank {rank}"
                )
            return self.ensemble_size
        return min(rank * rank, rank + 4)


@dataclass(frozen=True, eq=False)
class OracleResult:
    min_value: float
    argmin: WeightedEnsemble
    per_restart_values: tuple
    converged_fraction: float
    trajectories: tuple = ()


@dataclass(frozen=True)
class CertificationReport:
    """Outcome of checking that no decomposition beats a claimed value."""

    claim: float
    min_found: float
    tolerance: float
    passed: bool
    restarts: int
    samples: int
    ensemble_size: int

    @property
    def margin(self) -> float:
        return self.min_found - self.claim


# ---------------------------------------------------------------------------
# Decomposition bookkeeping
# ---------------------------------------------------------------------------

def _eigen_support(rho: BipartiteDensity):
    w, V = eig_hermitian(rho.matrix)
    w = clamp_probabilities(w)
    r = int((w > _RANK_TOL).sum())
    return w[:r], V[:, :r]


def _kets_from_isometry(evals: np.ndarray, evecs: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Rows are the unnormalized kets sum_i conj(V[j,i]) sqrt(l_i) |e_i>."""
    B = (np.sqrt(evals)[:, None]) * evecs.T
    return V.conj() @ B


def _ensemble_from_kets(K: np.ndarray, dims: Dims) -> WeightedEnsemble:
    pairs = []
    for row in K:
        w = float(np.vdot(row, row).real)
        if w > _NULL_KET:
            pairs.append((w, PureKet(row / np.sqrt(w), dims)))
    return WeightedEnsemble(tuple(pairs))


def decomposition_from_isometry(
    evals, evecs: np.ndarray, V: np.ndarray, dims
) -> WeightedEnsemble:
    """Ensemble realized by an N x r isometry on the eigen-support.

    ``evals``/``evecs`` are the positive eigenvalues and matching
    eigenvector columns; V must satisfy V†V = I.
    """
    evals = np.asarray(evals, dtype=float)
    r = int((evals > _RANK_TOL).sum())
    evals = evals[:r]
    evecs = np.asarray(evecs)[:, :r]
    V = np.asarray(V, dtype=complex)
    if V.ndim != 2 or V.shape[1] != r:
        raise ParameterError(f"isometry must be N x {r}, got {V.shape}")
    defect = float(np.abs(V.conj().T @ V - np.eye(r)).max())
    if defect > 1e-10:
        raise ParameterError(f"matrix is not an isometry: max|V†V - I| = {defect:.3e}")
    return _ensemble_from_kets(_kets_from_isometry(evals, evecs, V), Dims(*dims))


def random_decomposition(rho: BipartiteDensity, N: int, seed: int) -> WeightedEnsemble:
    """Seeded size-N decomposition from a Haar-ish random isometry."""
    evals, evecs = _eigen_support(rho)
    r = evals.size
    if N < r:
        raise ParameterError(f"ensemble size {N} below state rank {r}")
    V = random_isometry(N, r, np.random.default_rng(seed))
    return decomposition_from_isometry(evals, evecs, V, rho.dims)


# ---------------------------------------------------------------------------
# Objective
# ---------------------------------------------------------------------------

def _row_term(row: np.ndarray, dA: int, dB: int) -> float:
    """Weighted entanglement contribution ||k||^2 * E(k / ||k||) of one ket."""
    w = float(np.vdot(row, row).real)
    if w <= _NULL_KET:
        return 0.0
    M = row.reshape(dA, dB)
    if dA == 2 and dB == 2:
        # closed-form Schmidt spectrum of a 2x2 amplitude matrix
        det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        disc = max(w * w - 4 * (det.real**2 + det.imag**2), 0.0)
        root = np.sqrt(disc)
        probs = np.array([(w + root) / (2 * w), (w - root) / (2 * w)])
    else:
        s = np.linalg.svd(M, compute_uv=False)
        probs = s * s / w
    probs = probs[probs > 1e-15]
    return float(w * -(probs * np.log2(probs)).sum())


def average_entanglement_of_kets(K: np.ndarray, dims: Dims) -> float:
    dA, dB = dims
    return float(sum(_row_term(row, dA, dB) for row in K))


# ---------------------------------------------------------------------------
# Local search
# ---------------------------------------------------------------------------

def _descent_general(
    K: np.ndarray,
    dims: Dims,
    max_iters: int,
    step_tolerance: float,
) -> tuple[np.ndarray, list[float], bool]:
    """Greedy pairwise-rotation descent; objective is nonincreasing."""
    dA, dB = dims
    N = K.shape[0]
    terms = [_row_term(K[a], dA, dB) for a in range(N)]
    value = float(sum(terms))
    trajectory = [value]
    step = 0.5
    converged = False
    for _ in range(max_iters):
        improved = False
        c, s = cos(step), sin(step)
        for a in range(N):
            for b in range(a + 1, N):
                for phase in (1.0, 1.0j):
                    # both rotation senses of the 2x2 unitary
                    # [[c, -s*conj(phase)], [s*phase, c]] on rows (a, b)
                    for sgn in (1.0, -1.0):
                        while True:
                            sa = sgn * s
                            new_a = c * K[a] - sa * np.conj(phase) * K[b]
                            new_b = sa * phase * K[a] + c * K[b]
                            ta = _row_term(new_a, dA, dB)
                            tb = _row_term(new_b, dA, dB)
                            delta = ta + tb - terms[a] - terms[b]
                            if delta < -1e-15:
                                K[a], K[b] = new_a, new_b
                                terms[a], terms[b] = ta, tb
                                value += delta
                                trajectory.append(value)
                                improved = True
                            else:
                                break
        if not improved:
            step /= 2
            if step < step_tolerance:
                converged = True
                break
    return K, trajectory, converged


def _term2(w: float, adet2: float) -> float:
    """Weighted two-qubit entanglement from the norm^2 and |det|^2 invariants."""
    if w <= _NULL_KET:
        return 0.0
    disc = w * w - 4 * adet2
    if disc <= 0.0:
        return w
    r = sqrt(disc)
    lp, lm = (w + r) / 2, (w - r) / 2
    out = 0.0
    if lp > 1e-18:
        out -= lp * log2(lp / w)
    if lm > 1e-18:
        out -= lm * log2(lm / w)
    return out


def _descent_two_qubit(
    K: np.ndarray,
    max_iters: int,
    step_tolerance: float,
) -> tuple[np.ndarray, list[float], bool]:
    """Two-qubit fast path of the pairwise-rotation descent.

    The objective term of each unnormalized ket depends only on its
    squared norm and the determinant of its 2x2 amplitude matrix; both
    transform by closed-form scalar algebra under a pair rotation, so
    trial moves cost O(1) and the rows are rewritten only on acceptance.
    """
    N = K.shape[0]
    w = [float(np.vdot(K[a], K[a]).real) for a in range(N)]
    dt = [complex(K[a, 0] * K[a, 3] - K[a, 1] * K[a, 2]) for a in range(N)]
    terms = [_term2(w[a], abs(dt[a]) ** 2) for a in range(N)]
    value = float(sum(terms))
    trajectory = [value]
    step = 0.5
    converged = False
    for _ in range(max_iters):
        improved = False
        c, s = cos(step), sin(step)
        c2, s2, cs = c * c, s * s, c * s
        for a in range(N):
            for b in range(a + 1, N):
                g = complex(np.vdot(K[a], K[b]))
                bil = complex(
                    K[a, 0] * K[b, 3] + K[b, 0] * K[a, 3]
                    - K[a, 1] * K[b, 2] - K[b, 1] * K[a, 2]
                )
                wa, wb = w[a], w[b]
                da, db = dt[a], dt[b]
                ta, tb = terms[a], terms[b]
                net = None  # accumulated rotation applied to the rows on exit
                for phase in (1.0, 1.0j):
                    pc = phase.conjugate()
                    for sgn in (1.0, -1.0):
                        while True:
                            sa = sgn * s
                            csa = sgn * cs
                            re_pg = (pc * g).real
                            nwa = c2 * wa + s2 * wb - 2 * csa * re_pg
                            nwb = s2 * wa + c2 * wb + 2 * csa * re_pg
                            nda = c2 * da + s2 * pc * pc * db - csa * pc * bil
                            ndb = s2 * phase * phase * da + c2 * db + csa * phase * bil
                            nta = _term2(nwa, nda.real**2 + nda.imag**2)
                            ntb = _term2(nwb, ndb.real**2 + ndb.imag**2)
                            delta = nta + ntb - ta - tb
                            if delta < -1e-15:
                                ng = csa * phase * (wa - wb) + c2 * g - s2 * phase * phase * g.conjugate()
                                bil = 2 * csa * phase * da - 2 * csa * pc * db + (c2 - s2) * bil
                                g = ng
                                wa, wb, da, db, ta, tb = nwa, nwb, nda, ndb, nta, ntb
                                value += delta
                                trajectory.append(value)
                                improved = True
                                G = np.array(
                                    [[c, -sa * pc], [sa * phase, c]], dtype=complex
                                )
                                net = G if net is None else G @ net
                            else:
                                break
                if net is not None:
                    K[[a, b]] = net @ K[[a, b]]
                    w[a], w[b] = wa, wb
                    dt[a], dt[b] = da, db
                    terms[a], terms[b] = ta, tb
        if not improved:
            step /= 2
            if step < step_tolerance:
                converged = True
                break
    return K, trajectory, converged


def _coordinate_descent(
    K: np.ndarray,
    dims: Dims,
    max_iters: int,
    step_tolerance: float,
) -> tuple[np.ndarray, float, list[float], bool]:
    if dims == (2, 2):
        K, trajectory, converged = _descent_two_qubit(K, max_iters, step_tolerance)
    else:
        K, trajectory, converged = _descent_general(K, dims, max_iters, step_tolerance)
    # re-evaluate from the rows so the reported value matches the ensemble
    value = average_entanglement_of_kets(K, dims)
    return K, value, trajectory, converged


def eof_bruteforce(rho: BipartiteDensity, cfg: OracleConfig | None = None) -> OracleResult:
    """Multi-restart convex-roof minimization; returns the best ensemble.

    Deterministic for a fixed config: restart k starts from the isometry
    drawn with seed splitmix64(cfg.seed ^ k).
    """
    cfg = cfg or OracleConfig()
    evals, evecs = _eigen_support(rho)
    r = evals.size
    if not cfg.force and (r > MAX_ORACLE_RANK or rho.dims.total > MAX_ORACLE_DIM):
        raise ScaleGuardError(
            f"state has rank {r} on dimension {rho.dims.total}; the oracle guard "
            f"allows rank <= {MAX_ORACLE_RANK} and dimension <= {MAX_ORACLE_DIM} "
            "(set force=True / --force to override)"
        )
    N = cfg.size_for_rank(r)
    best_value = np.inf
    best_kets = None
    finals = []
    trajectories = []
    converged = 0
    for k in range(cfg.restarts):
        rng = np.random.default_rng(splitmix64(cfg.seed ^ k))
        V = random_isometry(N, r, rng)
        K = _kets_from_isometry(evals, evecs, V)
        K, value, trajectory, conv = _coordinate_descent(
            K, rho.dims, cfg.max_iters, cfg.step_tolerance
        )
        finals.append(value)
        trajectories.append(tuple(trajectory))
        converged += conv
        if value < best_value:
            best_value = value
            best_kets = K.copy()
    argmin = _ensemble_from_kets(best_kets, rho.dims)
    return OracleResult(
        min_value=float(best_value),
        argmin=argmin,
        per_restart_values=tuple(finals),
        converged_fraction=converged / cfg.restarts,
        trajectories=tuple(trajectories),
    )


def certify_not_below(
    rho: BipartiteDensity, claim: float, cfg: OracleConfig | None = None
) -> CertificationReport:
    """Search for a decomposition cheaper than ``claim``.

    Runs the optimizer plus pure random sampling; passes when nothing
    found lies below claim - value_tolerance.
    """
    cfg = cfg or OracleConfig()
    result = eof_bruteforce(rho, cfg)
    evals, evecs = _eigen_support(rho)
    N = cfg.size_for_rank(evals.size)
    min_found = result.min_value
    samples = cfg.restarts
    for j in range(samples):
        rng = np.random.default_rng(splitmix64(cfg.seed ^ (cfg.restarts + j)))
        V = random_isometry(N, evals.size, rng)
        K = _kets_from_isometry(evals, evecs, V)
        min_found = min(min_found, average_entanglement_of_kets(K, rho.dims))
    passed = min_found >= claim - cfg.value_tolerance
    return CertificationReport(
        claim=float(claim),
        min_found=float(min_found),
        tolerance=cfg.value_tolerance,
        passed=bool(passed),
        restarts=cfg.restarts,
        samples=samples,
        ensemble_size=N,
    )
