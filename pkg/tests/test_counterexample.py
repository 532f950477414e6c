import math

import numpy as np
import pytest

from slicereg import Quaternion, SliceCoord, SphereSample, UnitImaginary
from slicereg.counterexample import (ARC_CLEARANCE, BranchedLogFamily,
                                     CounterexampleConfig, arc_coords,
                                     arc_point, demonstrate, intersection_grid,
                                     log_pair, omega_spec, pair_set_grid, t_of)
from slicereg.extension import extension_formula
from slicereg.holomorphic import dbar_residual
from slicereg.quaternions import UNIT_I, UNIT_J, slice_decompose

from conftest import random_unit

Q = Quaternion
TWO_PI = 2.0 * math.pi


def test_t_of_values(cfg):
    assert t_of(cfg.axis, cfg) == 0.0
    assert t_of(-cfg.axis, cfg) == 1.0  # |(-I) - I| = 2 >= 1
    ortho = UnitImaginary(0, 1, 0)
    assert t_of(ortho, cfg) == 1.0  # |J - I|^2 = 2 >= 1


def test_arc_endpoints_random_units(cfg):
    rng = np.random.default_rng(71)
    for _ in range(50):
        J = random_unit(rng)
        ends = {0.0: arc_point(J, 0.0, cfg), 0.5: arc_point(J, 0.5, cfg)}
        two_j = SliceCoord(0.0, 2.0, J).to_quaternion()
        other = SliceCoord(-2.0, 2.0, J).to_quaternion()
        # the endpoint set is {2J, -2+2J}; orientation puts t=0 at 2J
        assert ends[0.0].isclose(two_j, atol=1e-12)
        assert ends[0.5].isclose(other, atol=1e-12)


def test_arc_inside_closed_disk(cfg):
    rng = np.random.default_rng(73)
    for _ in range(50):
        J = random_unit(rng)
        for t in rng.uniform(0.0, 0.5, size=20):
            p = arc_point(J, float(t), cfg)
            c = slice_decompose(p)
            center = SliceCoord(-1.0, 2.0, c.unit if c.unit else J).to_quaternion()
            assert (p - center).norm() <= 1.0 + 1e-12


def test_arc_shapes_at_extremes(cfg):
    # reference unit: upper half circle; far units: lower half circle
    up = arc_coords(cfg.axis, cfg)
    assert (up[:, 1] >= 2.0 - 1e-12).all()
    down = arc_coords(-cfg.axis, cfg)
    assert (down[:, 1] <= 2.0 + 1e-12).all()
    assert down[:, 1].min() >= 1.0 - 1e-12  # stays in the upper half plane


def test_membership_examples(omega, cfg):
    rng = np.random.default_rng(79)
    for _ in range(20):
        assert omega.contains(3.0, 1.0, random_unit(rng))
    # on the half line
    assert not omega.contains(-5.0, 2.0, cfg.axis)
    assert omega.contains(-1.0, 2.9, cfg.axis)
    # the top of the circle lies on the arc of the reference slice
    assert not omega.contains(-1.0, 3.0, cfg.axis)
    # but other slices are open there
    assert omega.contains(-1.0, 3.0, UnitImaginary(0, 0, 1))


def test_membership_open_along_non_cut_points(omega, cfg):
    rng = np.random.default_rng(83)
    for _ in range(50):
        x = rng.uniform(-4, 4)
        y = rng.uniform(0.05, 4)
        J = random_unit(rng)
        if not omega.contains(x, y, J):
            continue
        for dx, dy in ((1e-6, 0), (0, 1e-6), (-1e-6, 0), (0, -1e-6)):
            assert omega.contains(x + dx, y + dy, J)


def test_log_values(logs):
    # both logarithms restrict to ln on the ray x + 2*axis, x > 0
    direct, conj = logs
    assert (direct.eval(SliceCoord(math.e, 2.0, UNIT_I)) - Q(1.0)).norm() <= 1e-9
    assert (conj.eval_plane(math.e, 2.0) - Q(1.0)).norm() <= 1e-9
    assert (direct.eval(SliceCoord(1.0, 2.0, UNIT_I))).norm() <= 1e-9


def test_logs_coincide_outside_disks(logs):
    direct, conj = logs
    rng = np.random.default_rng(89)
    checked = 0
    while checked < 40:
        x = rng.uniform(-4.5, 4.5)
        y = rng.uniform(-4.5, 4.5)
        if math.hypot(x + 1, abs(y) - 2.0) < 1.1:
            continue
        if abs(abs(y) - 2.0) < 0.1 and x < -1.8:
            continue
        d = (direct.eval_plane(x, y) - conj.eval_plane(x, y)).norm()
        assert d <= 1e-9
        checked += 1


def test_logs_coincide_in_lower_disk(logs):
    direct, conj = logs
    rng = np.random.default_rng(97)
    for _ in range(30):
        rr = math.sqrt(rng.uniform(0, 0.85 ** 2))
        th = rng.uniform(0, TWO_PI)
        x, y = -1.0 + rr * math.cos(th), -2.0 + rr * math.sin(th)
        assert (direct.eval_plane(x, y) - conj.eval_plane(x, y)).norm() <= 1e-9


def test_log_jump_in_upper_disk(logs, cfg):
    direct, conj = logs
    d = direct.eval_plane(-1.0, 2.5) - conj.eval_plane(-1.0, 2.5)
    assert abs(d.norm() - TWO_PI) <= 1e-8
    # the jump is purely along the reference unit
    axis_part = d.x * cfg.axis.vx + d.y * cfg.axis.vy + d.z * cfg.axis.vz
    assert abs(abs(axis_part) - TWO_PI) <= 1e-8


def test_ordering_jump_on_disk_slice(logs, cfg):
    direct, conj = logs
    swapped_d = direct.on_slice(-cfg.axis)
    swapped_c = conj.on_slice(cfg.axis)
    t = SliceCoord(-1.0, 1.5, cfg.axis)
    f1 = extension_formula(direct, conj, t)
    f2 = extension_formula(swapped_d, swapped_c, t)
    diff = f1 - f2
    assert abs(diff.norm() - TWO_PI) <= 1e-8
    # 2 pi times the target's unit, up to sign
    assert min((diff - cfg.axis.as_quaternion() * TWO_PI).norm(),
               (diff + cfg.axis.as_quaternion() * TWO_PI).norm()) <= 1e-8


def test_orderings_agree_outside(logs, cfg):
    direct, conj = logs
    swapped_d = direct.on_slice(-cfg.axis)
    swapped_c = conj.on_slice(cfg.axis)
    rng = np.random.default_rng(101)
    checked = 0
    while checked < 30:
        x = rng.uniform(-4.5, 4.5)
        y = rng.uniform(0.05, 4.5)
        if math.hypot(x + 1, y - 2.0) < 1.1:
            continue
        if abs(y - 2.0) < 0.1 and x < -1.8:
            continue
        t = SliceCoord.make(x, y, random_unit(rng))
        f1 = extension_formula(direct, conj, t)
        f2 = extension_formula(swapped_d, swapped_c, t)
        assert (f1 - f2).norm() <= 1e-8
        checked += 1


def test_family_restricts_to_direct_log(log_family, logs, cfg):
    direct, _ = logs
    rng = np.random.default_rng(103)
    checked = 0
    while checked < 25:
        x = rng.uniform(-4, 4)
        y = rng.uniform(0.05, 4)
        if abs(y - 2.0) < 0.08 and x < -1.8:
            continue
        t = SliceCoord(x, y, cfg.axis)
        try:
            a = log_family.eval(t)
            b = direct.eval(t)
        except Exception:
            continue
        assert (a - b).norm() <= 1e-9
        checked += 1


def test_family_slices_are_holomorphic(log_family, cfg):
    class Restriction:
        def __init__(self, fam, unit):
            self.fam = fam
            self.slice_unit = unit

        def eval(self, coord):
            return self.fam.eval(coord)

    rng = np.random.default_rng(107)
    for _ in range(6):
        W = random_unit(rng)
        x = rng.uniform(-2.0, 3.0)
        y = rng.uniform(0.3, 1.5)
        res = dbar_residual(Restriction(log_family, W),
                            SliceCoord(x, y, W), 1e-3)
        val = log_family.eval(SliceCoord(x, y, W)).norm()
        assert res <= 1e-6 * (1.0 + val)


def test_component_grids(cfg):
    tg = intersection_grid(cfg)
    n, _ = tg.label()
    assert n == 3
    pg = pair_set_grid(cfg)
    n2, _ = pg.label()
    assert n2 == 2


def test_demonstrate_bundle(cfg):
    sample = SphereSample(24, extra=[cfg.axis])
    report = demonstrate(cfg, sample=sample, seed=0)
    assert report["checks"]["slice_domain_yes"]
    assert report["intersection_components"] == 3
    assert report["pair_set_components"] == 2
    assert report["checks"]["jump_is_2pi"]
    assert report["checks"]["orderings_disagree_2pi"]
    assert report["checks"]["orderings_agree_outside"]
    assert report["checks"]["not_simple_with_antipodal_witness"]
    assert report["all_checks_pass"]
    # deterministic given the configuration
    again = demonstrate(cfg, sample=sample, seed=0)
    assert again == report
