import numpy as np
import pytest
from numpy.testing import assert_allclose

from slicemean import (
    AffineProblem,
    BelowMinN,
    Infeasible,
    ProjectionNotOnto,
    RankDeficient,
    closest_point,
    kernel_onb,
    min_valid_n,
    validate,
)
from slicemean.affine_model import INF, least_norm_center, truncated_matrix
from conftest import random_validated


class TestValidate:
    def test_fix_a_center_and_n_min(self, fix_a0):
        assert_allclose(fix_a0.z0, [0.0, 0.0])
        assert min_valid_n(fix_a0) == 4  # k + m + 2

    def test_fix_a_offset_needs_radius(self, fix_a3):
        assert_allclose(fix_a3.z0, [0.0, 3.0])
        # need N > |z0|^2 = 9 on top of N >= 4
        assert min_valid_n(fix_a3) == 10

    def test_fix_b(self, fix_b):
        assert_allclose(fix_b.z0, [0.6, 0.8], atol=1e-14)
        assert min_valid_n(fix_b) == 4

    def test_projection_not_onto(self):
        with pytest.raises(ProjectionNotOnto):
            validate(AffineProblem(q=[[1.0, 0.0]], w0=[1.0], k=1))

    def test_rank_deficient(self):
        with pytest.raises(RankDeficient):
            validate(AffineProblem(q=[[1.0, 2.0], [2.0, 4.0]], w0=[1.0, 1.0], k=1))

    def test_cylinder_wider_than_support_not_onto(self):
        # coordinates beyond the support are free, but the constrained block
        # still pins the first two coordinates to a line
        with pytest.raises(ProjectionNotOnto):
            validate(AffineProblem(q=[[1.0, 1.0]], w0=[0.0], k=3))

    def test_infeasible_when_center_too_far(self):
        # the sphere of radius sqrt(N) never reaches |z0| = 2000 below the cap
        with pytest.raises(Infeasible):
            validate(AffineProblem(q=[[0.0, 1.0]], w0=[2000.0], k=1), n_cap=10**6)

    def test_constraints_hold_at_center(self, fix_a3, fix_b, fix_c):
        for validated in (fix_a3, fix_b, fix_c):
            problem = validated.problem
            residual = problem.q @ validated.z0[: problem.s] - problem.w0
            assert np.abs(residual).max() < 1e-12


class TestClosestPoint:
    def test_stabilized_for_large_n(self, fix_a3):
        assert_allclose(closest_point(fix_a3, 100), [0.0, 3.0])

    def test_infinite(self, fix_b):
        assert_allclose(closest_point(fix_b, INF), [0.6, 0.8], atol=1e-14)

    def test_truncation_to_one_column(self, fix_b):
        # oracle: scalar least squares on Q_1 = [3]
        z1 = least_norm_center(fix_b.problem, 1)
        assert_allclose(z1, [5.0 / 3.0], rtol=1e-14)

    def test_below_min_n(self, fix_b):
        with pytest.raises(BelowMinN):
            closest_point(fix_b, 3)


class TestInvariants:
    def test_zero_padding_changes_nothing(self, fix_b):
        padded = validate(
            AffineProblem(q=[[3.0, 4.0, 0.0, 0.0, 0.0]], w0=[5.0], k=1)
        )
        assert padded.n_min == fix_b.n_min
        assert_allclose(padded.z0[:2], fix_b.z0, atol=0)
        assert_allclose(padded.z0[2:], 0.0, atol=0)

    def test_z0_orthogonal_to_kernel(self, fix_b):
        basis = kernel_onb(truncated_matrix(fix_b.problem, 2))
        assert np.abs(basis.T @ fix_b.z0).max() < 1e-10

    def test_fix_b_truncation_exact_from_two(self, fix_b):
        for n in range(2, 12):
            zn = least_norm_center(fix_b.problem, n)
            padded = np.zeros(2)
            padded[: min(2, zn.size)] = zn[:2]
            assert np.linalg.norm(padded - fix_b.z0) < 1e-14

    def test_truncated_center_error_non_increasing(self):
        rng = np.random.default_rng(42)
        for _ in range(5):
            validated = random_validated(rng)
            z0 = validated.z0
            errs = []
            for n in range(validated.n_min, 51):
                zn = least_norm_center(validated.problem, n)
                padded = np.zeros(z0.size)
                padded[: zn.size] = zn
                errs.append(np.linalg.norm(padded - z0))
            assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))
            assert errs[-1] < 1e-12

    def test_pre_stabilization_center_can_be_larger(self, fix_b):
        # |z0_1| = 5/3 exceeds |z0| = 1: slice feasibility must be per-N
        z1 = least_norm_center(fix_b.problem, 1)
        assert np.linalg.norm(z1) > np.linalg.norm(fix_b.z0)


class TestProblemType:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            AffineProblem(q=[[np.inf, 1.0]], w0=[0.0], k=1)

    def test_rejects_bad_k(self):
        with pytest.raises(ValueError):
            AffineProblem(q=[[1.0, 0.0]], w0=[0.0], k=0)

    def test_rejects_mismatched_w0(self):
        with pytest.raises(ValueError):
            AffineProblem(q=[[1.0, 0.0]], w0=[0.0, 1.0], k=1)
