import numpy as np
import pytest

from conftest import random_density
from eofkit import (
    DegenerateParameterError,
    Dims,
    ParameterError,
    PureKet,
    ShapeError,
    WeightedEnsemble,
    ensemble_mix,
    frob_dist,
    isotropic,
    isotropic_twirl,
    lemma3_mc,
    max_entangled,
    mc_two_qubit,
    pure_entanglement,
    sigma_family_state,
    werner,
    werner_mixing_channel,
    wootters_eof,
)
from eofkit.decompositions import coeff_matrix, isotropic_member_ket, od_werner
from eofkit.linalg import kron, random_unitary
from eofkit.states import (
    BipartiteDensity,
    IsotropicParams,
    Lemma3Mc,
    SeparableTag,
    SigmaFamily,
    WernerParams,
    is_maximally_correlated,
    mc_ket,
    mc_pattern_defect,
    swap_operator,
)


def assert_valid_density(rho: BipartiteDensity):
    M = rho.matrix
    assert np.abs(M - M.conj().T).max() <= 1e-12
    assert abs(M.trace().real - 1.0) <= 1e-10
    assert np.linalg.eigvalsh(M).min() >= -1e-10


class TestDensityInvariants:
    def test_constructors_yield_valid_densities(self):
        cases = [
            mc_two_qubit(0.3, 0.7),
            sigma_family_state(0.4, 0.5, 0.6, 0.0, 0.8)[0],
            lemma3_mc(0.5, (1 / np.sqrt(3),) * 3, 2),
            isotropic(3, 0.95),
            isotropic(4, 0.2),
            werner(3, -0.5),
            werner(2, -1.0),
            werner(5, 0.9),
        ]
        for rho in cases:
            assert_valid_density(rho)

    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError, match="trace"):
            BipartiteDensity(np.eye(4), Dims(2, 2))

    def test_rejects_non_hermitian(self):
        M = np.eye(4) / 4
        M[0, 1] = 0.1
        with pytest.raises(ValueError, match="Hermitian"):
            BipartiteDensity(M, Dims(2, 2))

    def test_rejects_negative(self):
        M = np.diag([1.2, -0.2, 0.0, 0.0]).astype(complex)
        with pytest.raises(ValueError, match="PSD"):
            BipartiteDensity(M, Dims(2, 2))

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ShapeError):
            BipartiteDensity(np.eye(4) / 4, Dims(2, 3))


class TestPureKet:
    def test_norm_enforced(self):
        with pytest.raises(ValueError, match="normalized"):
            PureKet(np.ones(4), Dims(2, 2))

    def test_projector(self):
        k = max_entangled(2)
        P = k.projector()
        assert frob_dist(P @ P, P) <= 1e-12


class TestWeightedEnsemble:
    def test_weight_sum_enforced(self):
        k = max_entangled(2)
        with pytest.raises(ValueError, match="sum"):
            WeightedEnsemble(((0.5, k), (0.2, k)))

    def test_negative_weight_rejected(self):
        k = max_entangled(2)
        with pytest.raises(ValueError, match="negative"):
            WeightedEnsemble(((1.5, k), (-0.5, k)))

    def test_mixed_dims_rejected(self):
        with pytest.raises(ShapeError):
            WeightedEnsemble(((0.5, max_entangled(2)), (0.5, max_entangled(3))))


class TestMcTwoQubit:
    def test_pure_bell(self):
        rho = mc_two_qubit(1.0, np.pi / 4)
        assert frob_dist(rho.matrix, max_entangled(2).projector()) <= 1e-12

    def test_theta_zero_classical(self):
        rho = mc_two_qubit(0.5, 0.0)
        assert frob_dist(rho.matrix, np.diag([0.5, 0, 0, 0.5])) <= 1e-12

    def test_entry_value(self):
        rho = mc_two_qubit(0.3, 0.7)
        expected = 0.3 * np.cos(0.7) ** 2 + 0.7 * np.sin(0.7) ** 2
        assert abs(rho.matrix[0, 0].real - expected) <= 1e-12

    def test_rank_and_support(self):
        rho = mc_two_qubit(0.3, 0.7)
        assert rho.rank(1e-10) <= 2
        # supported on span{|00>, |11>}
        assert np.abs(rho.matrix[1, :]).max() <= 1e-14
        assert np.abs(rho.matrix[2, :]).max() <= 1e-14
        assert mc_pattern_defect(rho) <= 1e-14

    def test_range_errors(self):
        with pytest.raises(ParameterError):
            mc_two_qubit(1.2, 0.3)
        with pytest.raises(ParameterError):
            mc_two_qubit(0.5, 2.0)


class TestSigmaFamily:
    def test_degenerate_x_zero(self):
        with pytest.raises(DegenerateParameterError, match=r"2x\*sqrt\(p - p\^2\)"):
            sigma_family_state(1.0, 0.5, 0.0, 0.0, 1.0)

    def test_degenerate_p_boundary(self):
        for p in (0.0, 1.0):
            with pytest.raises(DegenerateParameterError):
                sigma_family_state(0.5, p, 0.6, 0.0, 0.8)

    def test_z_zero_separable(self):
        rho, _ = sigma_family_state(0.4, 0.5, 1.0, 0.0, 0.0)
        assert wootters_eof(rho) <= 1e-12

    def test_matches_wootters(self):
        rho, theta = sigma_family_state(0.5, 0.5, 0.6, 0.0, 0.8)
        target = 0.5 + 0.5 * np.sqrt(1 - 4 * 0.25 * 0.36 * 0.64)
        h = -target * np.log2(target) - (1 - target) * np.log2(1 - target)
        assert abs(wootters_eof(rho) - h) <= 1e-10
        assert theta < 0  # principal branch of the arctan expression

    def test_normalization_constraint(self):
        with pytest.raises(ParameterError, match="x\\^2"):
            SigmaFamily(0.5, 0.5, 0.9, 0.9, 0.9)


class TestLemma3Mc:
    def test_pure_limit(self):
        c = (0.6, 0.8)
        rho = lemma3_mc(1.0, c, 1)
        psi = np.zeros(4)
        psi[0], psi[3] = c
        assert frob_dist(rho.matrix, np.outer(psi, psi)) <= 1e-12

    def test_overlap_uniform(self):
        params = Lemma3Mc(0.5, (1 / np.sqrt(3),) * 3, 2)
        assert abs(params.cos_theta - np.sqrt(2 / 3)) <= 1e-12

    def test_f_one_truncates_to_00(self):
        theta = 0.6
        c = (np.cos(theta), np.sin(theta))
        rho = lemma3_mc(0.5, c, 1)
        psi = np.zeros(4)
        psi[0], psi[3] = c
        expected = 0.5 * np.outer(psi, psi)
        expected[0, 0] += 0.5
        assert frob_dist(rho.matrix, expected) <= 1e-12

    def test_mc_pattern(self):
        rho = lemma3_mc(0.4, (0.5, 0.5, 0.5, 0.5), 2)
        assert mc_pattern_defect(rho) <= 1e-14
        assert rho.rank(1e-10) <= 2

    def test_parameter_errors(self):
        with pytest.raises(ParameterError):
            Lemma3Mc(0.5, (0.0, 1.0), 1)
        with pytest.raises(ParameterError):
            Lemma3Mc(0.5, (0.6, 0.8), 2)
        with pytest.raises(ParameterError):
            Lemma3Mc(0.5, (0.6, 0.8), 0)


class TestIsotropic:
    def test_maximally_mixed_point(self):
        d = 3
        rho = isotropic(d, 1 / d**2)
        assert frob_dist(rho.matrix, np.eye(d * d) / d**2) <= 1e-12

    def test_pure_point(self):
        rho = isotropic(3, 1.0)
        assert frob_dist(rho.matrix, max_entangled(3).projector()) <= 1e-12

    def test_fidelity(self):
        rho = isotropic(3, 0.95)
        plus = max_entangled(3).vector
        F = np.real(plus.conj() @ rho.matrix @ plus)
        assert abs(F - 0.95) <= 1e-12
        assert abs(rho.matrix.trace().real - 1.0) <= 1e-12

    def test_range_error(self):
        with pytest.raises(ParameterError):
            isotropic(3, 1.1)
        with pytest.raises(ParameterError):
            isotropic(3, -0.1)

    def test_od_params_range(self):
        with pytest.raises(ParameterError, match=r"\(4d-4\)/d\^2"):
            IsotropicParams(3, 0.7)
        with pytest.raises(ParameterError):
            IsotropicParams(4, 0.95)  # even dimension unsupported


class TestWerner:
    def test_singlet(self):
        rho = werner(2, -1.0)
        singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
        assert frob_dist(rho.matrix, np.outer(singlet, singlet)) <= 1e-12

    def test_flip_coefficient_vanishes(self):
        d = 3
        rho = werner(d, 1 / d)
        assert frob_dist(rho.matrix, np.eye(d * d) / d**2) <= 1e-12

    def test_swap_expectation(self):
        for d, F in ((2, -0.3), (3, -0.5), (4, 0.7)):
            rho = werner(d, F)
            assert abs(np.trace(rho.matrix @ swap_operator(d)).real - F) <= 1e-12

    def test_npt(self):
        rho = werner(3, -0.5)
        from eofkit import partial_transpose

        w = np.linalg.eigvalsh(partial_transpose(rho.matrix, rho.dims, "B"))
        assert w.min() < -1e-6

    def test_range_error(self):
        with pytest.raises(ParameterError):
            WernerParams(3, -1.5)
        with pytest.raises(ParameterError):
            WernerParams(1, 0.0)


class TestMaxEntangled:
    def test_bell(self):
        v = max_entangled(2).vector
        assert np.allclose(v, np.array([1, 0, 0, 1]) / np.sqrt(2))

    def test_entanglement_log_d(self):
        assert abs(pure_entanglement(max_entangled(3)) - np.log2(3)) <= 1e-12

    def test_flat_marginal(self):
        from eofkit import partial_trace

        k = max_entangled(4)
        marg = partial_trace(k.projector(), k.dims, "A")
        assert frob_dist(marg, np.eye(4) / 4) <= 1e-12


class TestIsotropicTwirl:
    def test_fixed_point(self):
        rho = isotropic(3, 0.9)
        assert frob_dist(isotropic_twirl(rho).matrix, rho.matrix) <= 1e-12

    def test_idempotent(self):
        rho = random_density(42, (3, 3))
        once = isotropic_twirl(rho)
        twice = isotropic_twirl(once)
        assert frob_dist(once.matrix, twice.matrix) <= 1e-12

    def test_max_entangled_maps_to_f_one(self):
        P = BipartiteDensity(max_entangled(3).projector(), Dims(3, 3))
        out = isotropic_twirl(P)
        assert frob_dist(out.matrix, isotropic(3, 1.0).matrix) <= 1e-12

    def test_coefficient_row_members(self):
        cm = coeff_matrix(3, 2)
        plus = max_entangled(3).vector
        for row in cm.rows[:5]:
            k = isotropic_member_ket(row, 3)
            F = abs(np.vdot(plus, k.vector)) ** 2
            assert abs(F - 8 / 9) <= 1e-12
            out = isotropic_twirl(BipartiteDensity(k.projector(), Dims(3, 3)))
            assert frob_dist(out.matrix, isotropic(3, F).matrix) <= 1e-10

    def test_shape_error(self):
        with pytest.raises(ShapeError):
            isotropic_twirl(random_density(1, (2, 3)))


class TestWernerMixingChannel:
    def test_block_diagonal_on_maximally_mixed(self):
        rho = BipartiteDensity(np.eye(4) / 4, Dims(2, 2))
        out = werner_mixing_channel(rho, 3)
        assert_valid_density(out)
        # no weight outside the embedded level pairs
        assert abs(out.matrix.trace().real - 1.0) <= 1e-14

    def test_trace_exactly_preserved(self):
        for seed in range(3):
            rho = random_density(seed, (2, 2))
            out = werner_mixing_channel(rho, 4)
            assert abs(out.matrix.trace().real - 1.0) <= 1e-12

    def test_werner_input_swap_expectation(self):
        # the channel preserves the swap expectation of a 2x2 Werner input,
        # though its output differs from werner(d, F) itself
        F = -0.7
        out = werner_mixing_channel(werner(2, F), 3)
        swap_out = np.trace(out.matrix @ swap_operator(3)).real
        assert abs(swap_out - F) <= 1e-12
        assert frob_dist(out.matrix, werner(3, F).matrix) > 1e-3

    def test_shape_error(self):
        with pytest.raises(ShapeError):
            werner_mixing_channel(random_density(0, (3, 3)), 4)


class TestEnsembleMix:
    def test_single_member(self):
        k = max_entangled(2)
        rho = ensemble_mix(WeightedEnsemble(((1.0, k),)))
        assert frob_dist(rho.matrix, k.projector()) <= 1e-14

    def test_mc_ensemble_definitional(self):
        p, theta = 0.3, 0.7
        ens = WeightedEnsemble(((p, mc_ket(theta)), (1 - p, mc_ket(np.pi / 2 - theta))))
        assert frob_dist(ensemble_mix(ens).matrix, mc_two_qubit(p, theta).matrix) <= 1e-12

    def test_werner_ensemble(self):
        ens = od_werner(3, -0.5)
        assert frob_dist(ensemble_mix(ens).matrix, werner(3, -0.5).matrix) <= 1e-10


class TestGroupInvariances:
    def test_werner_uu_invariance(self):
        rho = werner(3, -0.4).matrix
        for seed in range(20):
            U = random_unitary(3, np.random.default_rng(seed))
            UU = kron(U, U)
            assert frob_dist(UU @ rho @ UU.conj().T, rho) <= 1e-10

    def test_isotropic_uubar_invariance(self):
        rho = isotropic(3, 0.8).matrix
        for seed in range(20):
            U = random_unitary(3, np.random.default_rng(100 + seed))
            UU = kron(U, U.conj())
            assert frob_dist(UU @ rho @ UU.conj().T, rho) <= 1e-10


class TestSeparableTag:
    def test_default_kets(self):
        tag = SeparableTag()
        kets = tag.pure_kets()
        assert len(kets) == 2
        for k in kets:
            assert pure_entanglement(k) <= 1e-12

    def test_bad_label(self):
        with pytest.raises(ParameterError):
            SeparableTag(("0x",))


class TestMcDetection:
    def test_mc_families_detected(self):
        assert is_maximally_correlated(mc_two_qubit(0.4, 0.9))
        assert is_maximally_correlated(lemma3_mc(0.7, (0.5, 0.5, 0.5, 0.5), 3))

    def test_non_mc_rejected(self):
        assert not is_maximally_correlated(werner(3, -0.5))
        assert not is_maximally_correlated(random_density(3, (2, 2)))
