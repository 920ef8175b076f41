"""Path construction: increment lattice, Haar-Schauder, subsampling."""

import math

import numpy as np
import pytest

from sausagelab.brownian import (
    PhiloxSource,
    Polyline,
    SequenceSource,
    haar,
    haar_schauder_path,
    rescale_path,
    sample_increment_path,
    schauder,
    schauder_series,
    subsample_path,
)
from sausagelab.montecarlo import derive_stream

SQRT2 = math.sqrt(2.0)


class TestIncrementPath:
    def test_scale_sqrt_T_over_k(self):
        p = sample_increment_path(1, 4.0, SequenceSource([1.0, 0.0]))
        assert p.vertices.tolist() == [[0.0, 0.0], [2.0, 0.0]]
        assert p.times.tolist() == [0.0, 4.0]

    def test_two_steps(self):
        p = sample_increment_path(2, 2.0, SequenceSource([1.0, 0.0, 0.0, 1.0]))
        assert p.vertices.tolist() == [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]

    def test_degenerate_all_zero(self):
        p = sample_increment_path(3, 1.0, SequenceSource([]))
        assert p.n_vertices == 4
        assert np.all(p.vertices == 0.0)
        assert p.times[-1] == 1.0

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            sample_increment_path(0, 1.0, SequenceSource([]))
        with pytest.raises(ValueError):
            sample_increment_path(4, 0.0, SequenceSource([]))
        with pytest.raises(ValueError):
            sample_increment_path(4, -1.0, SequenceSource([]))

    def test_starts_at_origin_times_exact(self):
        p = sample_increment_path(3, 1.0, PhiloxSource(5))
        assert p.vertices[0].tolist() == [0.0, 0.0]
        assert p.times[0] == 0.0 and p.times[-1] == 1.0

    def test_increment_distribution(self):
        # mean -> 0 and per-coordinate variance -> T/k, asserted at 4 sigma
        k, T, n_streams = 64, 2.0, 400
        incs = []
        for i in range(n_streams):
            p = sample_increment_path(k, T, derive_stream(500, i))
            incs.append(np.diff(p.vertices, axis=0))
        incs = np.concatenate(incs)
        n = incs.shape[0]
        var = T / k
        se_mean = math.sqrt(var / n)
        assert abs(incs[:, 0].mean()) < 4 * se_mean
        assert abs(incs[:, 1].mean()) < 4 * se_mean
        se_var = var * math.sqrt(2.0 / n)
        assert abs(incs[:, 0].var() - var) < 4 * se_var
        assert abs(incs[:, 1].var() - var) < 4 * se_var


class TestHaar:
    def test_first_function_is_one(self):
        assert haar(1, 0.7) == 1.0
        assert haar(1, 0.0) == 1.0
        assert haar(1, 1.0) == 1.0

    def test_second_function_case_split(self):
        assert haar(2, 0.25) == 1.0
        assert haar(2, 0.75) == -1.0

    def test_third_function_amplitude(self):
        assert haar(3, 0.1) == SQRT2
        assert haar(3, 0.3) == -SQRT2
        assert haar(3, 0.6) == 0.0

    def test_value_at_one_is_zero_for_k_ge_2(self):
        for k in (2, 3, 4, 5, 8):
            assert haar(k, 1.0) == 0.0

    def test_domain(self):
        with pytest.raises(ValueError):
            haar(0, 0.5)
        with pytest.raises(ValueError):
            haar(2, -0.1)
        with pytest.raises(ValueError):
            haar(2, 1.5)


class TestSchauder:
    def test_identity_for_k1(self):
        assert schauder(1, 0.3) == 0.3

    def test_tent_for_k2(self):
        assert schauder(2, 0.5) == 0.5
        assert schauder(2, 1.0) == 0.0

    def test_tent_for_k3(self):
        assert schauder(3, 0.25) == pytest.approx(SQRT2 / 4, abs=0)

    def test_integral_of_haar(self):
        # S_k(t) equals the Riemann integral of the piecewise-constant H_k
        for k in (1, 2, 3, 5, 9):
            for t in (0.0, 0.11, 0.37, 0.5, 0.81, 1.0):
                n = 20000
                s = sum(haar(k, (j + 0.5) * t / n) for j in range(n)) * (t / n)
                assert schauder(k, t) == pytest.approx(s, abs=2e-4)

    def test_domain(self):
        with pytest.raises(ValueError):
            schauder(0, 0.5)
        with pytest.raises(ValueError):
            schauder(1, 1.01)


class TestHaarSchauderPath:
    def test_level0_is_linear(self):
        p = haar_schauder_path(0, SequenceSource([1.0, 0.0]))
        assert p.vertices.tolist() == [[0.0, 0.0], [1.0, 0.0]]

    def test_level1_tent(self):
        p = haar_schauder_path(1, SequenceSource([0.0, 0.0, 1.0, 1.0]))
        assert p.vertices.tolist() == [[0.0, 0.0], [0.5, 0.5], [0.0, 0.0]]
        assert p.times.tolist() == [0.0, 0.5, 1.0]

    def test_level2_degenerate(self):
        p = haar_schauder_path(2, SequenceSource([]))
        assert p.n_vertices == 5
        assert np.all(p.vertices == 0.0)

    def test_nesting_with_zero_padded_tail(self):
        # At times j/2^m the level-n sum equals the level-m sum built from
        # the same first 2*2^m deviates, because S_k(j/2^m) = 0 for k > 2^m.
        rng = np.random.default_rng(7)
        dev = rng.standard_normal(2 * 8)
        for m in (0, 1, 2):
            coarse = haar_schauder_path(m, SequenceSource(dev[: 2 * 2**m]))
            fine = haar_schauder_path(3, SequenceSource(dev[: 2 * 2**m]))  # rest zero
            stride = 2 ** (3 - m)
            assert np.array_equal(fine.vertices[::stride], coarse.vertices)

    def test_interpolation_identity(self):
        # Between dyadic nodes the truncated series is the linear interpolant:
        # sum = (1 - alpha) X((k-1)/2^n) + alpha X(k/2^n), alpha = 2^n t - k + 1.
        rng = np.random.default_rng(11)
        n = 3
        dev = rng.standard_normal((2**n, 2))
        flat = dev.reshape(-1)
        p = haar_schauder_path(n, SequenceSource(flat))
        for t in rng.uniform(0.0, 1.0, size=12):
            k = min(int(t * 2**n) + 1, 2**n)
            alpha = 2**n * t - k + 1
            expect = (1 - alpha) * p.vertices[k - 1] + alpha * p.vertices[k]
            direct = schauder_series(n, dev, float(t))
            assert np.allclose(direct, expect, atol=1e-12)

    def test_deviate_consumption_is_coordinate_interleaved(self):
        # index-major: for each k the x deviate precedes the y deviate
        p = haar_schauder_path(0, SequenceSource([3.0, 5.0]))
        assert p.vertices[1].tolist() == [3.0, 5.0]


class TestSubsample:
    def test_keeps_every_other_vertex(self):
        p = Polyline.from_vertices([[0, 0], [1, 0], [2, 0], [3, 0], [4, 0]])
        q = subsample_path(p, 2)
        assert q.vertices[:, 0].tolist() == [0.0, 2.0, 4.0]
        assert q.times.tolist() == [0.0, 0.5, 1.0]

    def test_stride_one_is_identity(self):
        p = Polyline.from_vertices([[0, 0], [1, 1], [2, 0]])
        assert subsample_path(p, 1) is p

    def test_endpoints_only(self):
        p = Polyline.from_vertices([[0, 0], [1, 1], [2, 0]])
        q = subsample_path(p, 2)
        assert q.n_vertices == 2
        assert q.vertices[-1].tolist() == [2.0, 0.0]

    def test_rejects_non_dividing_stride(self):
        p = Polyline.from_vertices([[0, 0], [1, 0], [2, 0], [3, 0]])
        with pytest.raises(ValueError):
            subsample_path(p, 2)


class TestDeterminism:
    def test_same_stream_id_bit_identical(self):
        a = sample_increment_path(64, 1.0, PhiloxSource(123))
        b = sample_increment_path(64, 1.0, PhiloxSource(123))
        assert np.array_equal(a.vertices, b.vertices)
        c = haar_schauder_path(4, PhiloxSource(99))
        d = haar_schauder_path(4, PhiloxSource(99))
        assert np.array_equal(c.vertices, d.vertices)

    def test_different_streams_differ(self):
        a = sample_increment_path(8, 1.0, PhiloxSource(1))
        b = sample_increment_path(8, 1.0, PhiloxSource(2))
        assert not np.array_equal(a.vertices, b.vertices)


class TestRescale:
    def test_brownian_scaling(self):
        p = haar_schauder_path(2, PhiloxSource(3))
        q = rescale_path(p, 4.0)
        assert q.horizon == 4.0
        assert q.times[-1] == 4.0
        assert np.allclose(q.vertices, 2.0 * p.vertices)

    def test_rejects_non_unit_horizon(self):
        p = Polyline.from_vertices([[0, 0], [1, 0]], horizon=2.0)
        with pytest.raises(ValueError):
            rescale_path(p, 4.0)


class TestPolylineInvariants:
    def test_times_must_increase(self):
        with pytest.raises(ValueError):
            Polyline(np.zeros((3, 2)), np.array([0.0, 0.5, 0.5]), 0.5)

    def test_times_must_start_at_zero(self):
        with pytest.raises(ValueError):
            Polyline(np.zeros((2, 2)), np.array([0.1, 1.0]), 1.0)

    def test_times_must_end_at_horizon(self):
        with pytest.raises(ValueError):
            Polyline(np.zeros((2, 2)), np.array([0.0, 0.9]), 1.0)

    def test_single_vertex_allowed(self):
        p = Polyline(np.zeros((1, 2)), np.zeros(1), 0.0)
        assert p.n_vertices == 1

    def test_diameter(self):
        p = Polyline.from_vertices([[0, 0], [3, 4], [1, 1]])
        assert p.diameter() == 5.0
