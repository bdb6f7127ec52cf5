import math

import numpy as np
import pytest

from singlet_frame import (
    Direction,
    DistributionError,
    DomainError,
    JointDistribution2x2,
    analytic_mutual_information,
    cos_angle,
    direction_from_polar,
    joint_outcome_probability,
    mutual_information_from_joint,
    singlet_joint_distribution,
)
from conftest import random_direction

# hand evaluation of the mutual information at cos = 0.5:
# 2*(1/8)*log2((1/8)/(1/4)) + 2*(3/8)*log2((3/8)/(1/4))
MI_AT_HALF = 0.25 * math.log2(0.5) + 0.75 * math.log2(1.5)


class TestDirection:
    def test_construction_normalizes(self):
        d = Direction(3.0, 0.0, 4.0)
        assert (d.x, d.y, d.z) == (0.6, 0.0, 0.8)

    def test_unit_input_unchanged(self):
        d = Direction(1.0, 0.0, 0.0)
        assert (d.x, d.y, d.z) == (1.0, 0.0, 0.0)

    def test_zero_vector_rejected(self):
        with pytest.raises(DomainError):
            Direction(0.0, 0.0, 0.0)

    def test_nan_rejected(self):
        with pytest.raises(DomainError):
            Direction(float("nan"), 0.0, 1.0)

    def test_negation(self):
        d = Direction(0.6, 0.0, 0.8)
        assert (-d) == Direction(-0.6, 0.0, -0.8)

    def test_unit_norm_invariant(self, rng):
        for _ in range(100):
            d = Direction(*rng.normal(size=3) * 10.0)
            assert abs(d.x**2 + d.y**2 + d.z**2 - 1.0) < 1e-12


class TestDirectionFromPolar:
    def test_north_pole_any_azimuth(self):
        for phi in (0.0, 1.0, -2.5, 9.0):
            d = direction_from_polar(0.0, phi)
            assert (d.x, d.y, d.z) == (0.0, 0.0, 1.0)

    def test_equator(self):
        d = direction_from_polar(math.pi / 2.0, 0.0)
        assert abs(d.x - 1.0) < 1e-12 and abs(d.y) < 1e-12 and abs(d.z) < 1e-12

    def test_reference_direction(self):
        # the (theta, phi) = (1.5, 2.1) example vector, built independently
        d = direction_from_polar(1.5, 2.1)
        assert d.x == pytest.approx(math.sin(1.5) * math.cos(2.1), abs=1e-15)
        assert d.y == pytest.approx(math.sin(1.5) * math.sin(2.1), abs=1e-15)
        assert d.z == pytest.approx(math.cos(1.5), abs=1e-15)
        assert abs(d.x**2 + d.y**2 + d.z**2 - 1.0) < 1e-12


class TestCosAngle:
    def test_self_is_one(self, rng):
        assert cos_angle(Direction(1.0, 0.0, 0.0), Direction(1.0, 0.0, 0.0)) == 1.0
        for _ in range(50):
            d = random_direction(rng)
            assert cos_angle(d, d) == pytest.approx(1.0, abs=1e-15)

    def test_antipode_is_minus_one(self, rng):
        for _ in range(50):
            d = random_direction(rng)
            assert cos_angle(d, -d) == pytest.approx(-1.0, abs=1e-15)

    def test_polar_expansion_identity(self, rng):
        # dot product equals the explicit polar-angle expansion
        for _ in range(200):
            tx, ty = rng.uniform(0.0, math.pi, size=2)
            px, py = rng.uniform(0.0, 2.0 * math.pi, size=2)
            u = direction_from_polar(tx, px)
            v = direction_from_polar(ty, py)
            expansion = (
                math.sin(tx) * math.cos(px) * math.sin(ty) * math.cos(py)
                + math.sin(tx) * math.sin(px) * math.sin(ty) * math.sin(py)
                + math.cos(tx) * math.cos(ty)
            )
            assert cos_angle(u, v) == pytest.approx(expansion, abs=1e-12)

    def test_clamped(self):
        d = Direction(1.0, 0.0, 0.0)
        assert -1.0 <= cos_angle(d, d) <= 1.0


class TestJointOutcomeProbability:
    def test_parallel_settings_forbid_equal_outcomes(self):
        assert joint_outcome_probability(1, 1, 1.0) == 0.0
        assert joint_outcome_probability(-1, -1, 1.0) == 0.0

    def test_parallel_settings_perfect_anticorrelation(self):
        assert joint_outcome_probability(1, -1, 1.0) == 0.5
        assert joint_outcome_probability(-1, 1, 1.0) == 0.5

    def test_orthogonal_settings_independent(self):
        for a in (-1, 1):
            for b in (-1, 1):
                assert joint_outcome_probability(a, b, 0.0) == 0.25

    def test_range(self, rng):
        for c in rng.uniform(-1.0, 1.0, size=200):
            for a in (-1, 1):
                for b in (-1, 1):
                    p = joint_outcome_probability(a, b, float(c))
                    assert 0.0 <= p <= 0.5

    def test_domain_error(self):
        with pytest.raises(DomainError):
            joint_outcome_probability(1, 1, 1.0 + 1e-9)
        with pytest.raises(DomainError):
            joint_outcome_probability(1, 1, float("nan"))

    def test_bad_outcome(self):
        with pytest.raises(DomainError):
            joint_outcome_probability(0, 1, 0.5)
        with pytest.raises(DomainError):
            joint_outcome_probability(1, 2, 0.5)


class TestSingletJointDistribution:
    def test_orthogonal_uniform(self):
        d = singlet_joint_distribution(0.0)
        assert (d.p_pp, d.p_pm, d.p_mp, d.p_mm) == (0.25, 0.25, 0.25, 0.25)

    def test_parallel(self):
        d = singlet_joint_distribution(1.0)
        assert (d.p_pp, d.p_pm, d.p_mp, d.p_mm) == (0.0, 0.5, 0.5, 0.0)

    def test_half(self):
        d = singlet_joint_distribution(0.5)
        assert (d.p_pp, d.p_pm, d.p_mp, d.p_mm) == (0.125, 0.375, 0.375, 0.125)
        assert d.p_pp + d.p_pm + d.p_mp + d.p_mm == 1.0

    def test_matches_pointwise_probability(self, rng):
        for c in rng.uniform(-1.0, 1.0, size=50):
            d = singlet_joint_distribution(float(c))
            for a in (-1, 1):
                for b in (-1, 1):
                    assert d.prob(a, b) == joint_outcome_probability(a, b, float(c))


class TestJointDistributionValidation:
    def test_negative_entry(self):
        with pytest.raises(DistributionError):
            JointDistribution2x2(-0.1, 0.5, 0.5, 0.1)

    def test_bad_sum(self):
        with pytest.raises(DistributionError):
            JointDistribution2x2(0.3, 0.3, 0.3, 0.3)

    def test_non_finite(self):
        with pytest.raises(DistributionError):
            JointDistribution2x2(float("nan"), 0.5, 0.25, 0.25)


class TestMutualInformationFromJoint:
    def test_independent_is_zero(self):
        assert mutual_information_from_joint(JointDistribution2x2(0.25, 0.25, 0.25, 0.25)) == 0.0

    def test_perfect_anticorrelation_is_one(self):
        assert mutual_information_from_joint(JointDistribution2x2(0.0, 0.5, 0.5, 0.0)) == 1.0

    def test_half_against_hand_value(self):
        got = mutual_information_from_joint(singlet_joint_distribution(0.5))
        assert got == pytest.approx(0.1887, abs=1e-4)
        assert got == pytest.approx(MI_AT_HALF, abs=1e-14)


class TestAnalyticMutualInformation:
    def test_zero_at_orthogonal(self):
        assert analytic_mutual_information(0.0) == 0.0

    def test_one_at_endpoints(self):
        assert analytic_mutual_information(1.0) == 1.0
        assert analytic_mutual_information(-1.0) == 1.0

    def test_half_against_joint_oracle(self):
        got = analytic_mutual_information(0.5)
        assert got == pytest.approx(0.1887, abs=1e-4)
        assert got == pytest.approx(mutual_information_from_joint(singlet_joint_distribution(0.5)), abs=1e-12)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            analytic_mutual_information(1.1)
        with pytest.raises(DomainError):
            analytic_mutual_information(np.array([0.0, -1.2]))

    def test_array_input(self):
        c = np.array([[0.0, 1.0], [-1.0, 0.5]])
        out = analytic_mutual_information(c)
        assert out.shape == (2, 2)
        assert out[0, 0] == 0.0 and out[0, 1] == 1.0 and out[1, 0] == 1.0
        assert out[1, 1] == analytic_mutual_information(0.5)


class TestClosedFormInvariants:
    def test_distribution_valid_on_grid(self):
        for c in np.linspace(-1.0, 1.0, 1001):
            d = singlet_joint_distribution(float(c))
            entries = (d.p_pp, d.p_pm, d.p_mp, d.p_mm)
            assert all(p >= 0.0 for p in entries)
            assert abs(sum(entries) - 1.0) < 1e-12

    def test_marginals_are_half(self):
        for c in np.linspace(-1.0, 1.0, 1001):
            d = singlet_joint_distribution(float(c))
            for m in (*d.marginal_a(), *d.marginal_b()):
                assert abs(m - 0.5) < 1e-15

    def test_correlation_moment(self):
        # sum(a*b*p) = -cos over the grid
        for c in np.linspace(-1.0, 1.0, 1001):
            d = singlet_joint_distribution(float(c))
            moment = d.p_pp - d.p_pm - d.p_mp + d.p_mm
            assert abs(moment + c) < 1e-12

    def test_evenness_exact(self, rng):
        for c in rng.uniform(0.0, 1.0, size=500):
            assert analytic_mutual_information(float(c)) == analytic_mutual_information(-float(c))

    def test_closed_form_matches_tabulated(self):
        grid = np.linspace(-1.0, 1.0, 1003)[1:-1]
        for c in grid:
            via_joint = mutual_information_from_joint(singlet_joint_distribution(float(c)))
            assert abs(analytic_mutual_information(float(c)) - via_joint) < 1e-10

    def test_monotone_in_angle(self):
        theta = np.linspace(0.0, math.pi / 2.0, 2001)
        vals = analytic_mutual_information(np.cos(theta))
        assert np.all(np.diff(vals) <= 0.0)
