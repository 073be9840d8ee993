import numpy as np
import pytest

from baedyn import (
    CovarianceMatrix,
    TwoModeParams,
    UnphysicalStateError,
    duan_sum,
    is_physical,
    log_negativity,
    partial_transpose,
    purity,
    squeezing_db,
    steady_state_rwa,
    symplectic_eigenvalues,
    symplectic_form,
    two_mode_squeezed_cm,
    two_mode_squeezing_db,
)

OMEGA_BLOCK = np.array([[0.0, 1.0], [-1.0, 0.0]])


def vacuum(n):
    return CovarianceMatrix(0.5 * np.eye(2 * n))


def thermal(nbar):
    return CovarianceMatrix((nbar + 0.5) * np.eye(2))


def random_physical_cm(rng, n_modes, scale=2.0):
    """Random physical CM: sigma = S S^T / 2 + thermal noise on the diagonal."""
    s = rng.normal(size=(2 * n_modes, 2 * n_modes))
    base = s @ s.T / (2 * n_modes)
    return CovarianceMatrix(0.5 * np.eye(2 * n_modes) + scale * base)


def local_rotation(angles):
    blocks = []
    for th in angles:
        blocks.append(np.array([[np.cos(th), np.sin(th)], [-np.sin(th), np.cos(th)]]))
    n = len(angles)
    out = np.zeros((2 * n, 2 * n))
    for i, b in enumerate(blocks):
        out[2 * i:2 * i + 2, 2 * i:2 * i + 2] = b
    return out


class TestSymplecticForm:
    def test_single_mode_block(self):
        assert np.array_equal(symplectic_form(1).data, OMEGA_BLOCK)

    def test_two_mode_direct_sum(self):
        want = np.zeros((4, 4))
        want[:2, :2] = OMEGA_BLOCK
        want[2:, 2:] = OMEGA_BLOCK
        assert np.array_equal(symplectic_form(2).data, want)

    def test_orthogonality_three_modes(self):
        om = symplectic_form(3).data
        assert np.allclose(om @ om.T, np.eye(6))
        assert np.allclose(om @ om, -np.eye(6))

    def test_zero_modes_rejected(self):
        with pytest.raises(ValueError):
            symplectic_form(0)


class TestSymplecticEigenvalues:
    def test_vacuum(self):
        for n in (1, 2, 3):
            assert np.allclose(symplectic_eigenvalues(vacuum(n)), 0.5)

    def test_thermal(self):
        assert np.allclose(symplectic_eigenvalues(thermal(10.0)), [10.5])

    def test_rwa_steady_state_against_dense_eigensolver(self):
        # independent oracle: nu^2 are the eigenvalues of -(Omega s)(Omega s)
        params = TwoModeParams(g=0.05, kappa=0.1, gamma=1e-4, nbar=10.0, eta=1.0)
        cm = steady_state_rwa(params).cm
        om = symplectic_form(2).data
        m = om @ cm.data
        ref = np.sort(np.sqrt(np.linalg.eigvals(-m @ m).real))[::2]
        assert np.allclose(symplectic_eigenvalues(cm), ref, rtol=1e-10)

    def test_local_rotation_invariance(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            cm = random_physical_cm(rng, 2)
            rot = local_rotation(rng.uniform(0, 2 * np.pi, size=2))
            rotated = CovarianceMatrix(rot @ cm.data @ rot.T)
            assert np.allclose(symplectic_eigenvalues(rotated),
                               symplectic_eigenvalues(cm), atol=1e-10)


class TestIsPhysical:
    def test_vacuum_is_physical_at_zero_tol(self):
        assert is_physical(vacuum(1), tol=0.0)

    def test_quarter_identity_unphysical(self):
        assert not is_physical(CovarianceMatrix(0.25 * np.eye(2)), tol=1e-9)

    def test_negative_tol_rejected(self):
        with pytest.raises(ValueError):
            is_physical(vacuum(1), tol=-1.0)


class TestPartialTranspose:
    def test_empty_set_identity(self):
        cm = two_mode_squeezed_cm(0.3)
        assert np.array_equal(partial_transpose(cm, set()).data, cm.data)

    def test_all_modes_equals_none_for_spectrum(self):
        cm = two_mode_squeezed_cm(0.4)
        flipped = partial_transpose(cm, {0, 1})
        assert np.allclose(symplectic_eigenvalues(flipped),
                           symplectic_eigenvalues(cm), atol=1e-12)

    def test_explicit_lambda_multiplication(self):
        cm = two_mode_squeezed_cm(0.5)
        lam = np.diag([1.0, 1.0, 1.0, -1.0])
        assert np.allclose(partial_transpose(cm, {1}).data, lam @ cm.data @ lam)

    def test_involution(self):
        rng = np.random.default_rng(3)
        cm = random_physical_cm(rng, 3)
        twice = partial_transpose(partial_transpose(cm, {0, 2}), {0, 2})
        assert np.array_equal(twice.data, cm.data)

    def test_out_of_range_index(self):
        with pytest.raises(ValueError):
            partial_transpose(vacuum(2), {2})


class TestLogNegativity:
    def test_product_state_zero(self):
        assert log_negativity(vacuum(2), {0}) == 0.0

    def test_tmsv_equals_two_r(self):
        # nu_min of the PT'd TMSV is exp(-2r)/2, so E_N = 2r
        assert log_negativity(two_mode_squeezed_cm(0.5), {0}) == pytest.approx(1.0, rel=1e-12)

    def test_unphysical_input_raises(self):
        with pytest.raises(UnphysicalStateError):
            log_negativity(CovarianceMatrix(0.25 * np.eye(4)), {0})

    def test_local_rotation_invariance(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            cm = random_physical_cm(rng, 2)
            rot = local_rotation(rng.uniform(0, 2 * np.pi, size=2))
            rotated = CovarianceMatrix(rot @ cm.data @ rot.T)
            assert log_negativity(rotated, {0}) == pytest.approx(
                log_negativity(cm, {0}), abs=1e-9)

    def test_ppt_implies_duan_holds_for_two_modes(self):
        # PPT is necessary and sufficient for 1x1 Gaussian bipartitions
        rng = np.random.default_rng(19)
        found_ppt = 0
        for _ in range(200):
            cm = random_physical_cm(rng, 2, scale=rng.uniform(0.1, 3.0))
            if log_negativity(cm, {0}) == 0.0:
                found_ppt += 1
                assert duan_sum(cm, 0, 1) >= 1.0 - 1e-9
        assert found_ppt > 10


class TestDuanSum:
    def test_thermal_product(self):
        cm = CovarianceMatrix(np.diag([10.5, 10.5, 10.5, 10.5]))
        assert duan_sum(cm, 0, 1) == pytest.approx(21.0)

    def test_vacuum_boundary(self):
        assert duan_sum(vacuum(2), 0, 1) == pytest.approx(1.0)

    def test_tmsv(self):
        assert duan_sum(two_mode_squeezed_cm(0.5), 0, 1) == pytest.approx(
            0.36787944117144233, rel=1e-12)

    def test_invalid_indices(self):
        with pytest.raises(ValueError):
            duan_sum(vacuum(2), 0, 0)
        with pytest.raises(ValueError):
            duan_sum(vacuum(1), 0, 1)


class TestSqueezingDb:
    def test_vacuum_reference(self):
        assert squeezing_db(0.5) == 0.0

    def test_arithmetic(self):
        assert squeezing_db(0.05) == pytest.approx(10.0, rel=1e-12)

    def test_fig2_peak(self):
        # frozen from a 50-digit evaluation of the exact variance at kappa_opt
        # g=0.05, kappa=0.0695205..., gamma=1e-4, nbar=10, eta=1
        params = TwoModeParams(g=0.05, kappa=0.06952053289772900, gamma=1e-4,
                               nbar=10.0, eta=1.0)
        var = steady_state_rwa(params).cm.variance(2)
        assert var == pytest.approx(0.08509126000013409, rel=1e-10)
        assert squeezing_db(var) == pytest.approx(7.690850497583992, rel=1e-10)

    def test_non_positive_rejected(self):
        with pytest.raises(ValueError):
            squeezing_db(0.0)

    def test_two_mode_db_zero_at_boundary(self):
        assert two_mode_squeezing_db(1.0) == 0.0
        assert two_mode_squeezing_db(np.exp(-1)) == pytest.approx(10.0 / np.log(10), rel=1e-12)


class TestPurity:
    def test_vacuum(self):
        for n in (1, 2, 3):
            assert purity(vacuum(n)) == pytest.approx(1.0, rel=1e-12)

    def test_thermal(self):
        assert purity(thermal(10.0)) == pytest.approx(1.0 / 21.0, rel=1e-12)

    def test_mechanical_subblock_of_rwa_state(self):
        params = TwoModeParams(g=0.05, kappa=0.1, gamma=1e-4, nbar=10.0, eta=1.0)
        sub = steady_state_rwa(params).cm.reduced([1])
        val = purity(sub)
        # oracle: determinant of the analytic sub-block
        ref = 1.0 / (2.0 * np.sqrt(0.09067301821734093 * 510.0004995004995))
        assert val == pytest.approx(ref, rel=1e-10)
        assert 0.0 < val < 1.0

    def test_bounded_by_one(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            cm = random_physical_cm(rng, 2)
            assert purity(cm) <= 1.0 + 1e-12


class TestCovarianceMatrix:
    def test_symmetrized_on_construction(self):
        arr = np.array([[1.0, 0.3], [0.1, 1.0]])
        cm = CovarianceMatrix(arr)
        assert cm.data[0, 1] == cm.data[1, 0] == pytest.approx(0.2)

    def test_read_only(self):
        cm = vacuum(1)
        with pytest.raises(ValueError):
            cm.data[0, 0] = 2.0

    def test_odd_dimension_rejected(self):
        with pytest.raises(ValueError):
            CovarianceMatrix(np.eye(3))

    def test_reduced(self):
        cm = two_mode_squeezed_cm(0.7)
        sub = cm.reduced([0])
        assert sub.n_modes == 1
        assert np.allclose(sub.data, 0.5 * np.cosh(1.4) * np.eye(2))
