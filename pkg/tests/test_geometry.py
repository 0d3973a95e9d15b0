"""Geometry: membership, projection, reflection, normals."""

import numpy as np
import pytest

from rgld.geometry import (
    Ball,
    ReflectionUndefinedError,
    SphericalShell,
)

SHELL = SphericalShell(np.zeros(2), 0.9, 4.0)
BALL = Ball(np.zeros(2), 2.0)
SHELL3 = SphericalShell(np.zeros(3), 1.0, 3.0)


def margin_points(domain, count, seed):
    """Seeded points with distance_to_set <= reflection_margin (a mix of
    members and exterior points)."""
    rng = np.random.default_rng(seed)
    span = domain.bounding_radius + domain.reflection_margin
    pts = []
    while len(pts) < count:
        x = domain.center + rng.uniform(-1.05 * span, 1.05 * span, size=domain.dim)
        if domain.distance_to_set(x) <= domain.reflection_margin:
            pts.append(x)
    return pts


class TestContains:
    def test_ball_interior(self):
        assert BALL.contains([1.0, 0.0])

    def test_shell_cavity_excluded(self):
        assert not SHELL.contains([0.5, 0.0])

    def test_boundary_is_member(self):
        assert SHELL.contains([4.0, 0.0])
        assert SHELL.contains([0.9, 0.0])
        assert BALL.contains([2.0, 0.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            SHELL.contains([1.0, 0.0, 0.0])


class TestProject:
    def test_shell_outer_radial(self):
        np.testing.assert_allclose(SHELL.project([5.0, 0.0]), [4.0, 0.0])

    def test_shell_inner_radial(self):
        np.testing.assert_allclose(SHELL.project([0.5, 0.0]), [0.9, 0.0])

    def test_identity_on_members_is_exact(self):
        x = np.array([1.0, 1.0])
        assert np.array_equal(BALL.project(x), x)
        y = np.array([2.5, -1.0])
        assert np.array_equal(SHELL.project(y), y)

    def test_center_tie_break(self):
        p = SHELL.project(np.zeros(2))
        np.testing.assert_array_equal(p, [0.9, 0.0])
        assert SHELL.contains(p)

    def test_ball_exterior(self):
        np.testing.assert_allclose(BALL.project([3.0, 4.0]), [1.2, 1.6])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            BALL.project([1.0])


class TestReflect:
    def test_shell_outer(self):
        r, moved = SHELL.reflect([5.0, 0.0])
        np.testing.assert_allclose(r, [3.0, 0.0])
        assert moved

    def test_shell_cavity(self):
        r, moved = SHELL.reflect([0.5, 0.0])
        np.testing.assert_allclose(r, [1.3, 0.0])
        assert moved

    def test_identity_on_members_is_exact(self):
        x = np.array([0.3, -0.7])
        r, moved = BALL.reflect(x)
        assert np.array_equal(r, x)
        assert not moved

    def test_overshoot_raises(self):
        # Reflection across the outer sphere would land inside the cavity.
        with pytest.raises(ReflectionUndefinedError):
            SHELL.reflect([7.5, 0.0])
        with pytest.raises(ReflectionUndefinedError):
            BALL.reflect([6.5, 0.0])


class TestOutwardNormal:
    def test_ball(self):
        np.testing.assert_allclose(BALL.outward_normal([2.0, 0.0]), [1.0, 0.0])

    def test_shell_inner_points_into_cavity(self):
        np.testing.assert_allclose(SHELL.outward_normal([0.9, 0.0]), [-1.0, 0.0])

    def test_shell_outer(self):
        np.testing.assert_allclose(SHELL.outward_normal([0.0, 4.0]), [0.0, 1.0])

    def test_off_boundary_rejected(self):
        with pytest.raises(ValueError, match="sphere"):
            SHELL.outward_normal([2.0, 0.0])
        with pytest.raises(ValueError, match="boundary"):
            BALL.outward_normal([1.0, 0.0])

    def test_tolerance_absorbs_projection_rounding(self):
        p = SHELL.project([5.000000001, 0.0])
        n = SHELL.outward_normal(p)
        assert np.linalg.norm(n) == pytest.approx(1.0, abs=1e-12)


class TestDistanceToSet:
    def test_examples(self):
        assert SHELL.distance_to_set([5.0, 0.0]) == pytest.approx(1.0)
        assert SHELL.distance_to_set([0.5, 0.0]) == pytest.approx(0.4)

    def test_members_have_zero_distance(self):
        assert SHELL.distance_to_set([2.0, 0.0]) == 0.0
        assert BALL.distance_to_set([0.0, 0.0]) == 0.0


class TestConstruction:
    def test_bad_radii(self):
        with pytest.raises(ValueError):
            Ball(np.zeros(2), 0.0)
        with pytest.raises(ValueError):
            SphericalShell(np.zeros(2), 4.0, 0.9)
        with pytest.raises(ValueError):
            SphericalShell(np.zeros(2), 0.0, 1.0)

    def test_shell_needs_two_dimensions(self):
        with pytest.raises(ValueError, match="dimension"):
            SphericalShell(np.zeros(1), 0.5, 1.0)

    def test_derived_radii(self):
        assert SHELL.inscribed_radius == pytest.approx((4.0 - 0.9) / 2)
        assert SHELL.bounding_radius == 4.0
        assert SHELL.reflection_margin == pytest.approx(0.9)
        assert BALL.inscribed_radius == BALL.bounding_radius == 2.0
        assert BALL.reflection_margin == 2.0
        wide = SphericalShell(np.zeros(2), 3.0, 4.0)
        assert wide.reflection_margin == pytest.approx(0.5)


@pytest.mark.parametrize("domain,seed", [(BALL, 11), (SHELL, 12), (SHELL3, 13)])
class TestProperties:
    N = 10_000

    def test_projection_idempotent_and_feasible(self, domain, seed):
        for x in margin_points(domain, self.N, seed):
            p = domain.project(x)
            assert domain.contains(p)
            assert np.linalg.norm(domain.project(p) - p) <= 1e-12

    def test_reflection_isometry_and_feasibility(self, domain, seed):
        for x in margin_points(domain, self.N, seed + 100):
            p = domain.project(x)
            r, moved = domain.reflect(x)
            assert abs(
                np.linalg.norm(r - p) - np.linalg.norm(x - p)
            ) <= 1e-12
            assert domain.contains(r)
            if domain.contains(x):
                assert not moved
                assert np.array_equal(r, x)
            else:
                assert moved

    def test_normal_alignment(self, domain, seed):
        # <x - P(x), n(P(x))> equals ||x - P(x)|| for exterior points.
        count = 0
        for x in margin_points(domain, self.N, seed + 200):
            d = domain.distance_to_set(x)
            if d == 0.0:
                continue
            count += 1
            p = domain.project(x)
            n = domain.outward_normal(p)
            assert abs(float((x - p) @ n) - d) <= 1e-10
        assert count > self.N // 20


@pytest.mark.parametrize("domain", [BALL, SHELL, SHELL3])
def test_sample_uniform_feasible_and_deterministic(domain):
    rng = np.random.default_rng(5)
    pts = [domain.sample_uniform(rng) for _ in range(500)]
    assert all(domain.contains(p) for p in pts)
    rng2 = np.random.default_rng(5)
    pts2 = [domain.sample_uniform(rng2) for _ in range(500)]
    assert all(np.array_equal(a, b) for a, b in zip(pts, pts2))


def test_sample_uniform_shell_radius_law():
    # Empirical mean of ||x||^d should match uniform mass between the radii.
    dom = SHELL
    rng = np.random.default_rng(21)
    radii = np.array([np.linalg.norm(dom.sample_uniform(rng)) for _ in range(20_000)])
    assert radii.min() >= dom.inner_radius
    assert radii.max() <= dom.outer_radius
    u = (radii**2 - dom.inner_radius**2) / (dom.outer_radius**2 - dom.inner_radius**2)
    assert abs(u.mean() - 0.5) < 0.01
