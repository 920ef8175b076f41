"""Hausdorff distances between polygonal curves."""

import math

import numpy as np
import pytest

from sausagelab.brownian import PhiloxSource, Polyline, sample_increment_path, subsample_path
from sausagelab.hausdorff import (
    directed_hausdorff,
    directed_hausdorff_sampled,
    hausdorff_polyline,
    sup_norm_gap,
)


def pl(*pts):
    return Polyline.from_vertices(list(pts))


class TestExamples:
    def test_identical_is_zero(self):
        p = pl([0, 0], [1, 1], [2, 0])
        assert hausdorff_polyline(p, p) == 0.0

    def test_parallel_segments(self):
        h = 0.7
        p = pl([0, 0], [1, 0])
        q = pl([0, h], [1, h])
        assert hausdorff_polyline(p, q) == pytest.approx(h, abs=1e-13)

    def test_apex_dominates(self):
        p = pl([0, 0], [2, 0])
        q = pl([0, 0], [1, 1], [2, 0])
        assert hausdorff_polyline(p, q) == pytest.approx(1.0, abs=1e-13)

    def test_interior_maximum_found(self):
        # the sup over the base segment sits strictly between its endpoints
        p = pl([0, 0], [4, 0])
        q = pl([0, 0], [2, 1], [4, 0])
        d = hausdorff_polyline(p, q)
        # apex at distance 1; foot of the base midpoint to the tent sides
        assert d == pytest.approx(1.0, abs=1e-13)

    def test_point_vs_segment(self):
        p = Polyline(np.array([[0.0, 0.0]]), np.zeros(1), 0.0)
        q = pl([1, 0], [2, 0])
        assert hausdorff_polyline(p, q) == pytest.approx(2.0, abs=1e-13)


class TestProperties:
    def test_symmetry_and_triangle(self):
        rng = np.random.default_rng(31)
        paths = [sample_increment_path(12, 1.0, PhiloxSource(600 + i)) for i in range(6)]
        d = {}
        for i in range(6):
            for j in range(6):
                d[i, j] = hausdorff_polyline(paths[i], paths[j])
        for i in range(6):
            assert d[i, i] == 0.0
            for j in range(6):
                assert d[i, j] == pytest.approx(d[j, i], rel=1e-10, abs=1e-12)
                for k in range(6):
                    assert d[i, j] <= d[i, k] + d[k, j] + 1e-10

    def test_exact_within_sampled_bracket(self):
        # sampling underestimates by at most step/2 (1-Lipschitz distance)
        for seed in range(4):
            p = sample_increment_path(64, 1.0, PhiloxSource(700 + seed))
            q = subsample_path(p, 8)
            step = 0.002
            lo1, err = directed_hausdorff_sampled(p, q, step)
            exact = directed_hausdorff(p, q)
            assert lo1 - 1e-12 <= exact <= lo1 + err + 1e-12

    def test_directed_asymmetry_case(self):
        p = pl([0, 0], [1, 0])
        q = pl([0, 0], [1, 0], [1, 5])
        assert directed_hausdorff(p, q) == 0.0
        assert directed_hausdorff(q, p) == pytest.approx(5.0, abs=1e-13)


class TestSupNormGap:
    def test_exact_linear_case(self):
        fine = pl([0, 0], [1, 1], [2, 0])
        coarse = subsample_path(fine, 2)
        # gap attained at the middle vertex: |(1,0) - (1,1)| = 1
        assert sup_norm_gap(fine, coarse) == 1.0

    def test_zero_for_identical(self):
        p = sample_increment_path(16, 1.0, PhiloxSource(3))
        assert sup_norm_gap(p, p) == 0.0

    def test_hausdorff_bounded_by_gap(self):
        # the Hausdorff bound d_H <= sup-norm gap of the coupled curves
        for seed in range(5):
            fine = sample_increment_path(256, 1.0, PhiloxSource(800 + seed))
            for stride in (4, 16, 64):
                coarse = subsample_path(fine, stride)
                dh = hausdorff_polyline(fine, coarse)
                gap = sup_norm_gap(fine, coarse)
                assert dh <= gap * (1.0 + 1e-12) + 1e-15


class TestModes:
    def test_sampled_mode_requires_step(self):
        p = pl([0, 0], [1, 0])
        with pytest.raises(ValueError):
            hausdorff_polyline(p, p, exact=False)

    def test_sampled_close_to_exact(self):
        p = sample_increment_path(32, 1.0, PhiloxSource(9))
        q = subsample_path(p, 4)
        exact = hausdorff_polyline(p, q)
        approx = hausdorff_polyline(p, q, exact=False, sample_step=1e-3)
        assert abs(exact - approx) <= 5e-4 + 1e-12
