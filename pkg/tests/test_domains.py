import math

import numpy as np
import pytest

from slicereg import (Quaternion, SphereSample, UnitImaginary, ball_spec,
                      connected_components, halfspace_spec, is_simple,
                      is_slice_convex, is_slice_domain, is_symmetric,
                      omega_jk_plus, rasterize, starlike_spec,
                      symmetric_completion)
from slicereg.domains import DomainSpec, fibonacci_points, intersect_specs, union_spec
from slicereg.quaternions import UNIT_I, UNIT_J
from slicereg.counterexample import intersection_grid

from conftest import random_unit

Q = Quaternion


def test_fibonacci_sample_invariants():
    for n in (16, 32, 64, 128):
        sample = SphereSample(n)
        assert len(sample) == 2 * n
        norms = np.linalg.norm(sample.vectors, axis=1)
        assert np.allclose(norms, 1.0, atol=1e-12)
        # antipodes are exact
        for a, b in sample.antipodal_pairs():
            assert np.allclose(sample.vectors[a], -sample.vectors[b])
        assert sample.min_angle >= sample.MIN_ANGLE_COEFF / math.sqrt(2 * n)


def test_sphere_sample_extra_units():
    axis = UnitImaginary(1, 0, 0)
    sample = SphereSample(16, extra=[axis])
    assert sample.base_count == 17
    assert any(u.approx(axis, 1e-15) for u in sample.units)
    assert any(u.approx(-axis, 1e-15) for u in sample.units)


def test_rasterize_half_disk_one_component(ball):
    grid = rasterize(ball, UNIT_I)
    n, _ = connected_components(grid)
    assert n == 1


def test_rasterize_two_disks_two_components():
    spec = union_spec([ball_spec(-1.5, 0.4), ball_spec(1.5, 0.4)])
    grid = rasterize(spec, UNIT_I)
    n, _ = connected_components(grid)
    assert n == 2


def test_empty_grid_zero_components():
    spec = ball_spec(10.0, 0.1, bbox=(-1.0, 1.0, 1.0))
    n, _ = connected_components(rasterize(spec, UNIT_I))
    assert n == 0


def test_annulus_slit_once_still_one_component():
    def membership(x, y, jx, jy, jz):
        r = np.hypot(np.asarray(x), np.asarray(y))
        return (r > 0.5) & (r < 1.0)

    def real_trace(x):
        return (np.abs(np.asarray(x)) > 0.5) & (np.abs(np.asarray(x)) < 1.0)

    slit = [np.array([[0.0, 0.5], [0.0, 1.0]])]
    spec = DomainSpec(membership, real_trace, (-1.2, 1.2, 1.2), 0.01,
                      cuts=lambda J: slit if J.vx > 0 else [])
    n, _ = connected_components(rasterize(spec, UNIT_I, full_slice=True))
    assert n == 1


def test_counterexample_slice_one_component_two_resolutions(omega, cfg):
    # flood-fill oracle at the finer step must agree
    for h in (0.01, 0.005):
        grid = rasterize(omega, cfg.axis, full_slice=True, h=h)
        n, _ = connected_components(grid)
        assert n == 1


def test_intersection_three_components(cfg):
    grid = intersection_grid(cfg)
    n, _ = connected_components(grid)
    assert n == 3


def test_slice_domain_ball(ball, sample16):
    assert is_slice_domain(ball, sample16).is_yes


def test_slice_domain_disconnected_witness():
    # the witness direction is seeded so the off-axis ball is actually seen
    witness_unit = UnitImaginary(1, 0, 0)
    sample = SphereSample(16, extra=[witness_unit])
    spec = union_spec([ball_spec(Q(0, 2, 0, 0), 0.5), ball_spec(0.0, 0.1)])
    verdict = is_slice_domain(spec, sample)
    assert verdict.value == "no"
    assert verdict.witness["reason"] == "disconnected slice"
    assert UnitImaginary.from_vector(verdict.witness["unit"]).approx(witness_unit)


def test_slice_domain_empty_trace(sample16):
    spec = ball_spec(Q(0, 2, 0, 0), 0.5)
    verdict = is_slice_domain(spec, sample16)
    assert verdict.value == "no"
    assert verdict.witness["reason"] == "empty real trace"


def test_counterexample_is_slice_domain(omega, sample64):
    assert is_slice_domain(omega, sample64).is_yes


def test_symmetric_ball_and_star(ball, star, sample16):
    assert is_symmetric(ball, sample16).is_yes
    assert is_symmetric(star, sample16).is_yes


def test_counterexample_not_symmetric(omega, sample16):
    verdict = is_symmetric(omega, sample16)
    assert verdict.value == "no"
    assert "units" in verdict.witness


def test_completion_of_symmetric_is_identity(ball, sample16):
    comp = symmetric_completion(ball, sample16)
    rng = np.random.default_rng(3)
    for _ in range(100):
        x = rng.uniform(-1.2, 1.2)
        y = rng.uniform(0.0, 1.2)
        J = random_unit(rng)
        assert comp.contains(x, y, J) == ball.contains(x, y, J)


def test_completion_is_symmetric_and_idempotent(omega, sample16):
    comp = symmetric_completion(omega, sample16)
    assert is_symmetric(comp, sample16).is_yes
    comp2 = symmetric_completion(comp, sample16)
    rng = np.random.default_rng(5)
    for _ in range(200):
        x = rng.uniform(-4.5, 4.5)
        y = rng.uniform(0.0, 4.5)
        J = random_unit(rng)
        assert comp.contains(x, y, J) == comp2.contains(x, y, J)


def test_completion_covers_disk_spheres(omega, cfg, sample64):
    # a sphere through the disk component joins the completion entirely:
    # some sampled slice is unobstructed there
    comp = symmetric_completion(omega, sample64)
    rng = np.random.default_rng(7)
    for _ in range(50):
        x = -1.0 + rng.uniform(-0.5, 0.5)
        y = 2.0 + rng.uniform(-0.5, 0.5)
        J = random_unit(rng)
        assert comp.contains(x, y, J)


def test_completion_excludes_half_line_spheres(omega, sample64):
    comp = symmetric_completion(omega, sample64)
    rng = np.random.default_rng(9)
    for _ in range(20):
        assert not comp.contains(rng.uniform(-4.5, -2.5), 2.0, random_unit(rng))


def test_omega_jk_ball_any_pair(ball, sample16):
    rng = np.random.default_rng(11)
    J, K = random_unit(rng), random_unit(rng)
    grid = omega_jk_plus(ball, J, K)
    n, _ = connected_components(grid)
    assert n == 1


def test_omega_jk_counterexample_antipodal_pair(omega, cfg):
    for h in (0.01, 0.005):
        grid = omega_jk_plus(omega, cfg.axis, -cfg.axis, h=h)
        n, _ = connected_components(grid)
        assert n == 2
        # one component is the open disk, the other the rest of the half plane
        assert grid.component_at(-1.0, 2.0) != grid.component_at(3.0, 1.0)


def test_omega_jk_same_unit_equals_slice(omega, cfg):
    grid_pair = omega_jk_plus(omega, cfg.axis, cfg.axis, h=0.02)
    grid_slice = rasterize(omega, cfg.axis, h=0.02)
    assert np.array_equal(grid_pair.occupied, grid_slice.occupied)


def test_omega_jk_subset_of_slice(omega, cfg, sample16):
    rng = np.random.default_rng(13)
    J, K = sample16.units[3], sample16.units[11]
    pair = omega_jk_plus(omega, J, K, h=0.02)
    slc = rasterize(omega, J, h=0.02)
    assert not (pair.occupied & ~slc.occupied).any()


def test_is_simple_ball(ball, sample16):
    assert is_simple(ball, sample16).is_yes


def test_is_simple_starlike(star, sample16):
    assert is_simple(star, sample16).is_yes


def test_counterexample_not_simple_antipodal_witness(omega, sample64):
    verdict = is_simple(omega, sample64, h=0.02)
    assert verdict.value == "no"
    assert verdict.witness["antipodal"]
    assert verdict.witness["components"] >= 2


def test_slice_convex_ball(ball, sample16):
    assert is_slice_convex(ball, sample16).is_yes


def test_slice_convex_l_shape(sample16):
    lower = halfspace_spec((0.0, 1.0), 0.5, bbox=(-1.5, 1.5, 1.5))
    left = halfspace_spec((1.0, 0.0), -0.5, bbox=(-1.5, 1.5, 1.5))
    box = ball_spec(0.0, 1.4, bbox=(-1.5, 1.5, 1.5))
    spec = union_spec([intersect_specs(box, lower), intersect_specs(box, left)],
                      name="l-shape")
    assert is_slice_convex(spec, sample16).value == "no"


def test_slice_convex_counterexample(omega, sample16):
    assert is_slice_convex(omega, sample16, h=0.02).value == "no"


def test_slice_convex_implies_simple(sample16):
    # convex test corpus: balls and half-space intersections
    specs = [ball_spec(0.0, 1.0), ball_spec(0.5, 0.8),
             intersect_specs(ball_spec(0.0, 1.0),
                             halfspace_spec((1.0, 0.0), 0.6,
                                            bbox=(-1.2, 1.2, 1.2)))]
    for spec in specs:
        assert is_slice_convex(spec, sample16).is_yes
        assert is_simple(spec, sample16).is_yes


def test_open_set_spot_check(ball, omega, cfg):
    rng = np.random.default_rng(17)
    for spec, box in ((ball, (-0.9, 0.9, 0.9)), (omega, (-4, 4, 4))):
        hits = 0
        for _ in range(200):
            x = rng.uniform(box[0], box[1])
            y = rng.uniform(0.01, box[2])
            J = random_unit(rng)
            if not spec.contains(x, y, J):
                continue
            hits += 1
            for dx, dy in ((1e-7, 0), (-1e-7, 0), (0, 1e-7), (0, -1e-7)):
                if y + dy <= 0:
                    continue
                assert spec.contains(x + dx, y + dy, J)
            if hits > 40:
                break


def test_resolution_stability_of_verdicts(ball, omega, cfg, sample16):
    for h in (0.02, 0.01):
        assert is_simple(ball, sample16, h=h).is_yes
        v = is_simple(omega, sample16, h=h)
        assert v.value == "no" and v.witness["antipodal"]
