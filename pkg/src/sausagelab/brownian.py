"""Piecewise-linear planar Brownian paths.

Two constructions are provided: the increment-lattice scheme (independent
Gaussian increments on a regular time grid, any horizon T) and partial sums
of the Haar-Schauder series (dyadic grid, horizon fixed to 1).  Both are
driven by a replayable stream of standard-normal deviates so that a path is
a pure function of (parameters, stream id).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Polyline",
    "DeviateSource",
    "PhiloxSource",
    "SequenceSource",
    "sample_increment_path",
    "haar",
    "schauder",
    "haar_schauder_path",
    "subsample_path",
    "rescale_path",
]


@dataclass(frozen=True)
class Polyline:
    """A planar polygonal curve with time stamps.

    vertices : (n, 2) float array of points, n >= 1
    times    : (n,) strictly increasing, times[0] = 0, times[-1] = horizon
    horizon  : total time T >= 0 (0 only for a single-vertex path)
    """

    vertices: np.ndarray
    times: np.ndarray
    horizon: float

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        t = np.asarray(self.times, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 1:
            raise ValueError("vertices must be an (n, 2) array with n >= 1")
        if t.shape != (v.shape[0],):
            raise ValueError("times must match vertices in length")
        if t[0] != 0.0:
            raise ValueError("times must start at 0")
        if t[-1] != self.horizon:
            raise ValueError("times must end at the horizon")
        if v.shape[0] > 1 and not np.all(np.diff(t) > 0.0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "times", t)

    @classmethod
    def from_vertices(cls, vertices, horizon: float = 1.0) -> "Polyline":
        """Attach uniform time stamps to a bare vertex list (test/fixture helper)."""
        v = np.asarray(vertices, dtype=np.float64).reshape(-1, 2)
        if v.shape[0] == 1:
            return cls(v, np.zeros(1), 0.0)
        t = np.linspace(0.0, horizon, v.shape[0])
        return cls(v, t, horizon)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    def segments(self):
        """(x1, y1, x2, y2) arrays of the n-1 segments (empty for a point)."""
        v = self.vertices
        return v[:-1, 0], v[:-1, 1], v[1:, 0], v[1:, 1]

    def diameter(self) -> float:
        """Diameter of the vertex set (equals the curve's diameter: extreme
        points of a polygonal curve are vertices)."""
        v = self.vertices
        if np.ptp(v[:, 0]) == 0.0 and np.ptp(v[:, 1]) == 0.0:
            return 0.0
        if v.shape[0] > 64:
            from scipy.spatial import ConvexHull

            try:
                pts = v[ConvexHull(v).vertices]
            except Exception:
                # degenerate (collinear) cloud: extremes in x and y suffice
                idx = [v[:, 0].argmin(), v[:, 0].argmax(), v[:, 1].argmin(), v[:, 1].argmax()]
                pts = v[sorted(set(int(i) for i in idx))]
        else:
            pts = v
        diff = pts[:, None, :] - pts[None, :, :]
        return math.sqrt(np.max(np.einsum("ijk,ijk->ij", diff, diff)))


class DeviateSource:
    """Replayable stream of i.i.d. standard-normal deviates."""

    def normals(self, n: int) -> np.ndarray:
        raise NotImplementedError


class PhiloxSource(DeviateSource):
    """Counter-based stream: the 128-bit Philox key fully determines the sequence."""

    def __init__(self, key: int):
        if not 0 <= key < 1 << 128:
            raise ValueError("key must fit in 128 bits")
        self.key = key
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def normals(self, n: int) -> np.ndarray:
        return self._gen.standard_normal(n)


class SequenceSource(DeviateSource):
    """Fixed deviate sequence for tests; yields zeros once exhausted."""

    def __init__(self, values, pad_zero: bool = True):
        self._values = np.asarray(values, dtype=np.float64).ravel()
        self._pos = 0
        self._pad_zero = pad_zero

    def normals(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        avail = max(0, min(n, self._values.size - self._pos))
        out[:avail] = self._values[self._pos : self._pos + avail]
        if avail < n and not self._pad_zero:
            raise ValueError("deviate sequence exhausted")
        self._pos += avail
        return out


def sample_increment_path(k: int, T: float, src: DeviateSource) -> Polyline:
    """Path through k+1 vertices on the regular grid t_i = i T / k.

    Increment i is sqrt(T/k) * (d_x, d_y) with the next two deviates drawn
    x first, then y.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not T > 0.0:
        raise ValueError("T must be > 0")
    dev = src.normals(2 * k).reshape(k, 2)
    scale = math.sqrt(T / k)
    vertices = np.vstack([np.zeros((1, 2)), np.cumsum(scale * dev, axis=0)])
    times = np.linspace(0.0, T, k + 1)
    return Polyline(vertices, times, float(T))


def _haar_index(k: int):
    """k = 2^m + j with 1 <= j <= 2^m; returns (m, j)."""
    m = (k - 1).bit_length() - 1
    return m, k - (1 << m)


def haar(k: int, s: float):
    """Haar function H_k(s) on [0, 1].

    H_1 = 1; H_{2^m + j} is 2^{m/2} on [(j-1)/2^m, (2j-1)/2^{m+1}),
    -2^{m/2} on [(2j-1)/2^{m+1}, j/2^m), and 0 otherwise (so H_k(1) = 0
    for k >= 2).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0.0 <= s <= 1.0:
        raise ValueError("s must lie in [0, 1]")
    if k == 1:
        return 1.0
    m, j = _haar_index(k)
    lo = (j - 1) / (1 << m)
    mid = (2 * j - 1) / (1 << (m + 1))
    hi = j / (1 << m)
    amp = math.sqrt(float(1 << m))
    if lo <= s < mid:
        return amp
    if mid <= s < hi:
        return -amp
    return 0.0


def schauder(k: int, t: float):
    """Schauder function S_k(t) = integral of H_k over [0, t].

    S_1(t) = t; for k >= 2 a tent of height 2^{-m/2-1} peaking at the
    midpoint of the k-th dyadic interval.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    if k == 1:
        return float(t)
    m, j = _haar_index(k)
    lo = (j - 1) / (1 << m)
    mid = (2 * j - 1) / (1 << (m + 1))
    hi = j / (1 << m)
    amp = math.sqrt(float(1 << m))
    if t <= lo or t >= hi:
        return 0.0
    if t <= mid:
        return amp * (t - lo)
    return amp * (hi - t)


def haar_schauder_path(n: int, src: DeviateSource) -> Polyline:
    """Level-n Haar-Schauder partial sum, sampled at its own dyadic nodes.

    The sum over k = 1..2^n of Y_k S_k(t) per coordinate is piecewise linear
    with nodes at t = j/2^n, so the returned 2^n + 1 vertices represent it
    exactly.  Consumes 2 * 2^n deviates: for each index k, x then y.
    Horizon is fixed at T = 1.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    nk = 1 << n
    dev = src.normals(2 * nk).reshape(nk, 2)
    times = np.arange(nk + 1) / nk
    basis = np.empty((nk, nk + 1))
    for k in range(1, nk + 1):
        basis[k - 1] = [schauder(k, t) for t in times]
    vertices = basis.T @ dev
    vertices[0] = 0.0
    return Polyline(vertices, times, 1.0)


def schauder_series(n: int, dev: np.ndarray, t: float) -> np.ndarray:
    """Direct evaluation of the level-n partial sum at one time (test helper)."""
    nk = 1 << n
    s = np.array([schauder(k, t) for k in range(1, nk + 1)])
    return s @ dev


def subsample_path(p: Polyline, stride: int) -> Polyline:
    """Keep every stride-th vertex (first and last included)."""
    if stride < 1:
        raise ValueError("stride must be >= 1")
    n_seg = p.n_vertices - 1
    if n_seg % stride != 0:
        raise ValueError(f"stride {stride} does not divide segment count {n_seg}")
    if stride == 1:
        return p
    return Polyline(p.vertices[::stride].copy(), p.times[::stride].copy(), p.horizon)


def rescale_path(p: Polyline, T: float) -> Polyline:
    """Brownian rescaling t -> T t, x -> sqrt(T) x of a horizon-1 path."""
    if not T > 0.0:
        raise ValueError("T must be > 0")
    if p.horizon != 1.0:
        raise ValueError("rescale_path expects a horizon-1 path")
    times = p.times * T
    times[-1] = T
    return Polyline(p.vertices * math.sqrt(T), times, float(T))
