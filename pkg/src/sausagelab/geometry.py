"""Dilated-set geometry on a pixel raster.

The dilation of a polyline by a disc of radius r is realised implicitly as
the sublevel set {distance <= r} of the exact Euclidean distance map on
pixel centers.  From one map all radius thresholds derive: area by pixel
count, boundary length by a central difference of the volume function
(count of the band r - delta < D <= r + delta over 2 delta), and the Euler
characteristic from the cubical complex of the occupied closed pixels.

Conventions forced by the closed-pixel model: ties D == r are foreground,
foreground is 8-connected, background holes are 4-connected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import _kernels
from .brownian import Polyline

__all__ = [
    "RasterFrame",
    "DistanceMap",
    "BinaryGrid",
    "IntrinsicVolumes",
    "SegmentIndex",
    "FrameTooSmallError",
    "GeometryError",
    "auto_frame",
    "dist_point_polyline",
    "build_distance_map",
    "brute_force_distance_map",
    "threshold",
    "intrinsic_volumes",
    "euler_by_complex",
    "label_components",
    "dilation_summary",
    "DilationSummary",
]

GUARD_PIXELS = 16  # guard band beyond r_max kept exact in a distance map


class GeometryError(Exception):
    """Numeric/geometry failure in raster operations."""


class FrameTooSmallError(GeometryError):
    """The raster frame does not contain the dilated set with enough margin."""


@dataclass(frozen=True)
class RasterFrame:
    """Pixel grid: origin is the lower-left pixel center, spacing a."""

    origin: tuple[float, float]
    pixel_size: float
    width: int
    height: int

    def __post_init__(self):
        if self.pixel_size <= 0.0:
            raise ValueError("pixel_size must be > 0")
        if self.width < 1 or self.height < 1:
            raise ValueError("frame must be at least 1 x 1 pixels")

    @property
    def x_centers(self) -> np.ndarray:
        return self.origin[0] + self.pixel_size * np.arange(self.width)

    @property
    def y_centers(self) -> np.ndarray:
        return self.origin[1] + self.pixel_size * np.arange(self.height)

    def bounds(self):
        """Spatial extent (x0, y0, x1, y1), pixel centers inflated by a/2."""
        a = self.pixel_size
        return (
            self.origin[0] - 0.5 * a,
            self.origin[1] - 0.5 * a,
            self.origin[0] + a * (self.width - 1) + 0.5 * a,
            self.origin[1] + a * (self.height - 1) + 0.5 * a,
        )


@dataclass(frozen=True)
class DistanceMap:
    """Exact pixel-center distances to a polyline, valid up to valid_radius.

    values[iy, ix] is the exact Euclidean distance wherever it does not
    exceed valid_radius = r_max + GUARD_PIXELS * a; larger entries are only
    guaranteed to exceed that bound (saturation).
    """

    frame: RasterFrame
    values: np.ndarray
    r_max: float

    @property
    def valid_radius(self) -> float:
        return self.r_max + GUARD_PIXELS * self.frame.pixel_size


@dataclass(frozen=True)
class BinaryGrid:
    """Boolean occupancy on a raster frame (True = inside the dilated set)."""

    frame: RasterFrame
    occupancy: np.ndarray

    def to_pbm(self) -> bytes:
        """Plain PBM (P1); row 0 of the grid is the bottom row of the image."""
        occ = self.occupancy
        lines = [b"P1", f"{occ.shape[1]} {occ.shape[0]}".encode()]
        for row in occ[::-1]:
            lines.append(" ".join("1" if v else "0" for v in row).encode())
        return b"\n".join(lines) + b"\n"


@dataclass(frozen=True)
class IntrinsicVolumes:
    """Area, boundary length, and Euler characteristic of one dilated set."""

    area: float
    boundary_length: float
    euler: int


@dataclass(frozen=True)
class DilationSummary:
    volumes: IntrinsicVolumes
    components: int
    holes: int


class SegmentIndex:
    """Uniform-cell bucketing of a polyline's segments.

    Every segment is registered in every cell its bounding box overlaps.
    Queries walk expanding cell rings around a point and stop as soon as the
    ring's lower distance bound exceeds the best candidate (or the cap).
    """

    def __init__(self, p: Polyline, cell: float):
        if cell <= 0.0:
            raise ValueError("cell size must be > 0")
        v = p.vertices
        self.cell = float(cell)
        self.x0 = float(v[:, 0].min())
        self.y0 = float(v[:, 1].min())
        nseg = max(1, v.shape[0] - 1)
        if v.shape[0] == 1:
            segs = np.hstack([v, v])
        else:
            segs = np.hstack([v[:-1], v[1:]])
        self.segments = segs  # (n, 4): x1 y1 x2 y2
        self.nx = max(1, int(np.floor((v[:, 0].max() - self.x0) / cell)) + 1)
        self.ny = max(1, int(np.floor((v[:, 1].max() - self.y0) / cell)) + 1)
        buckets: dict[tuple[int, int], list[int]] = {}
        for i in range(nseg if v.shape[0] > 1 else 1):
            cx0 = int((min(segs[i, 0], segs[i, 2]) - self.x0) / cell)
            cx1 = int((max(segs[i, 0], segs[i, 2]) - self.x0) / cell)
            cy0 = int((min(segs[i, 1], segs[i, 3]) - self.y0) / cell)
            cy1 = int((max(segs[i, 1], segs[i, 3]) - self.y0) / cell)
            for cy in range(cy0, cy1 + 1):
                for cx in range(cx0, cx1 + 1):
                    buckets.setdefault((cx, cy), []).append(i)
        self.buckets = {k: np.array(ix, dtype=np.int64) for k, ix in buckets.items()}

    def _cell_of(self, x: float, y: float):
        return int(math.floor((x - self.x0) / self.cell)), int(math.floor((y - self.y0) / self.cell))

    def nearest_distance(self, x: float, y: float, cap: float = math.inf) -> float:
        """Exact distance from (x, y) to the polyline, or inf if > cap."""
        cx, cy = self._cell_of(x, y)
        best = math.inf
        ring = 0
        max_ring = max(self.nx, self.ny) + 2 + int(min(cap, 1e18) / self.cell + 2)
        while ring <= max_ring:
            lower = (ring - 1) * self.cell
            if lower > min(best, cap):
                break
            found_any = False
            for (bx, by), idx in self._ring_cells(cx, cy, ring):
                found_any = True
                segs = self.segments[idx]
                d = _point_segments_distance(x, y, segs)
                if d < best:
                    best = d
            ring += 1
            if ring > max_ring and not found_any:
                break
        return best if best <= cap else math.inf

    def candidates_within(self, x: float, y: float, radius: float) -> np.ndarray:
        """Indices of all segments whose distance to (x, y) may be <= radius
        (complete: every segment within radius is included)."""
        cx, cy = self._cell_of(x, y)
        nring = int(radius / self.cell) + 2
        out = []
        for ring in range(nring + 1):
            for _, idx in self._ring_cells(cx, cy, ring):
                out.append(idx)
        if not out:
            return np.empty(0, dtype=np.int64)
        return np.unique(np.concatenate(out))

    def _ring_cells(self, cx: int, cy: int, ring: int):
        b = self.buckets
        if ring == 0:
            cell = b.get((cx, cy))
            if cell is not None:
                yield (cx, cy), cell
            return
        for dx in range(-ring, ring + 1):
            for dy in (-ring, ring):
                cell = b.get((cx + dx, cy + dy))
                if cell is not None:
                    yield (cx + dx, cy + dy), cell
        for dy in range(-ring + 1, ring):
            for dx in (-ring, ring):
                cell = b.get((cx + dx, cy + dy))
                if cell is not None:
                    yield (cx + dx, cy + dy), cell


def _point_segments_distance(x: float, y: float, segs: np.ndarray) -> float:
    """Exact min distance from one point to (n, 4) segments, numpy-vectorised."""
    ex = segs[:, 2] - segs[:, 0]
    ey = segs[:, 3] - segs[:, 1]
    ux = x - segs[:, 0]
    uy = y - segs[:, 1]
    L2 = ex * ex + ey * ey
    with np.errstate(invalid="ignore", divide="ignore"):
        t = (ux * ex + uy * ey) / L2
    t = np.where(L2 > 0.0, np.clip(t, 0.0, 1.0), 0.0)
    wx = ux - t * ex
    wy = uy - t * ey
    return float(np.sqrt(np.min(wx * wx + wy * wy)))


def dist_point_polyline(x, p: Polyline) -> float:
    """Exact Euclidean distance from a point to the polyline."""
    px, py = float(x[0]), float(x[1])
    v = p.vertices
    if v.shape[0] == 1:
        return float(math.hypot(px - v[0, 0], py - v[0, 1]))
    segs = np.hstack([v[:-1], v[1:]])
    return _point_segments_distance(px, py, segs)


def auto_frame(p: Polyline, r_max: float, a: float) -> RasterFrame:
    """Frame covering the path's bounding box inflated by r_max + 16 a."""
    if a <= 0.0:
        raise ValueError("pixel size must be > 0")
    if r_max < 0.0:
        raise ValueError("r_max must be >= 0")
    v = p.vertices
    margin = r_max + GUARD_PIXELS * a
    x0 = v[:, 0].min() - margin
    y0 = v[:, 1].min() - margin
    width = int(math.ceil((v[:, 0].max() + margin - x0) / a)) + 1
    height = int(math.ceil((v[:, 1].max() + margin - y0) / a)) + 1
    return RasterFrame((float(x0), float(y0)), float(a), width, height)


def _check_margin(p: Polyline, frame: RasterFrame, r: float):
    x0, y0, x1, y1 = frame.bounds()
    a = frame.pixel_size
    v = p.vertices
    need = r + 2.0 * a
    if (
        v[:, 0].min() - x0 <= need
        or v[:, 1].min() - y0 <= need
        or x1 - v[:, 0].max() <= need
        or y1 - v[:, 1].max() <= need
    ):
        raise FrameTooSmallError(
            f"frame margin must exceed r + 2a = {need:g} around the path"
        )


def _segment_arrays(p: Polyline):
    v = p.vertices
    if v.shape[0] == 1:
        return v[:, 0].copy(), v[:, 1].copy(), v[:, 0].copy(), v[:, 1].copy()
    return v[:-1, 0].copy(), v[:-1, 1].copy(), v[1:, 0].copy(), v[1:, 1].copy()


def build_distance_map(
    p: Polyline, frame: RasterFrame, r_max: float, *, chunk_rows: int = 256
) -> DistanceMap:
    """Exact distance map, dense over the frame.

    Every pixel whose true distance is at most r_max + 16 a carries the
    exact value; pixels beyond may saturate (they only promise to exceed
    that bound).  Construction stamps each segment's capsule window per
    pixel row; rows are independent, so the parallel schedule cannot change
    any value.
    """
    _check_margin(p, frame, r_max)
    a = frame.pixel_size
    # half-pixel slack so window rounding cannot exclude a pixel whose true
    # distance sits within ulps of the validity bound
    cap = r_max + GUARD_PIXELS * a + 0.5 * a
    x1, y1, x2, y2 = _segment_arrays(p)
    seg_ylo = np.minimum(y1, y2)
    seg_yhi = np.maximum(y1, y2)
    W, H = frame.width, frame.height
    ox, oy = frame.origin
    values = np.full((H, W), np.inf)
    touched = np.empty((min(chunk_rows, H), 2), dtype=np.int64)
    for iy0 in range(0, H, chunk_rows):
        rows = min(chunk_rows, H - iy0)
        ylo = oy + a * iy0 - cap
        yhi = oy + a * (iy0 + rows - 1) + cap
        sel = np.nonzero((seg_yhi >= ylo) & (seg_ylo <= yhi))[0]
        if sel.size == 0:
            continue
        _kernels.stamp_rows_sq(
            x1, y1, x2, y2, sel, ox, oy, a, cap, iy0, rows, W, values[iy0 : iy0 + rows], touched[:rows]
        )
    np.sqrt(values, out=values)
    return DistanceMap(frame, values, float(r_max))


def brute_force_distance_map(p: Polyline, frame: RasterFrame) -> DistanceMap:
    """All-pixels x all-segments scan; the oracle for build_distance_map."""
    xs = frame.x_centers
    ys = frame.y_centers
    v = p.vertices
    if v.shape[0] == 1:
        segs = np.hstack([v, v])
    else:
        segs = np.hstack([v[:-1], v[1:]])
    ex = segs[:, 2] - segs[:, 0]
    ey = segs[:, 3] - segs[:, 1]
    L2 = ex * ex + ey * ey
    out = np.empty((frame.height, frame.width))
    for iy, y in enumerate(ys):
        ux = xs[:, None] - segs[None, :, 0]
        uy = y - segs[:, 1]
        with np.errstate(invalid="ignore", divide="ignore"):
            t = (ux * ex + uy * ey) / L2
        t = np.where(L2 > 0.0, np.clip(t, 0.0, 1.0), 0.0)
        wx = ux - t * ex
        wy = uy - t * ey
        out[iy] = np.sqrt(np.min(wx * wx + wy * wy, axis=1))
    return DistanceMap(frame, out, math.inf)


def threshold(m: DistanceMap, r: float) -> BinaryGrid:
    """Occupancy D <= r; ties are foreground (the dilated set is closed)."""
    if r > m.valid_radius:
        raise ValueError(f"r = {r:g} exceeds the map validity bound {m.valid_radius:g}")
    return BinaryGrid(m.frame, m.values <= r)


def euler_by_complex(g: BinaryGrid) -> int:
    """Euler characteristic V - E + F of the union of occupied closed pixels."""
    occ = np.asarray(g.occupancy, dtype=bool)
    H, W = occ.shape
    F = int(occ.sum())
    if F == 0:
        return 0
    vx = np.zeros((H + 1, W + 1), dtype=bool)
    vx[:H, :W] |= occ
    vx[:H, 1:] |= occ
    vx[1:, :W] |= occ
    vx[1:, 1:] |= occ
    V = int(vx.sum())
    eh = np.zeros((H + 1, W), dtype=bool)
    eh[:H] |= occ
    eh[1:] |= occ
    ev = np.zeros((H, W + 1), dtype=bool)
    ev[:, :W] |= occ
    ev[:, 1:] |= occ
    E = int(eh.sum()) + int(ev.sum())
    return V - E + F


_STRUCT8 = np.ones((3, 3), dtype=bool)


def label_components(g: BinaryGrid):
    """(foreground components, holes): 8-connected foreground, holes are
    4-connected background components not touching the frame border."""
    occ = np.asarray(g.occupancy, dtype=bool)
    _, n_fg = ndimage.label(occ, structure=_STRUCT8)
    bg_labels, n_bg = ndimage.label(~occ)
    if n_bg == 0:
        return n_fg, 0
    border = np.unique(
        np.concatenate(
            [bg_labels[0, :], bg_labels[-1, :], bg_labels[:, 0], bg_labels[:, -1]]
        )
    )
    border = border[border > 0]
    holes = n_bg - border.size
    return n_fg, int(holes)


def intrinsic_volumes(m: DistanceMap, r: float, delta: float) -> IntrinsicVolumes:
    """Area, boundary length and Euler characteristic at radius r.

    area            = a^2 * #{D <= r}
    boundary_length = a^2 * #{r - delta < D <= r + delta} / (2 delta)
    euler           = euler_by_complex of the thresholded grid

    The band count is the central difference of the volume function, whose
    r-derivative is the boundary length away from critical values.
    """
    a = m.frame.pixel_size
    if delta <= 0.0:
        raise ValueError("delta must be > 0")
    if r - delta <= 0.0:
        raise ValueError("r - delta must be > 0")
    if r + delta > m.valid_radius:
        raise ValueError("r + delta exceeds the map validity bound")
    vals = m.values
    n_fg = int((vals <= r).sum())
    n_band = int(((vals > r - delta) & (vals <= r + delta)).sum())
    chi = euler_by_complex(BinaryGrid(m.frame, vals <= r))
    return IntrinsicVolumes(a * a * n_fg, a * a * n_band / (2.0 * delta), chi)


def dilation_summary(
    p: Polyline,
    r: float,
    *,
    a: float,
    delta: float,
    chunk_rows: int = 256,
    frame: RasterFrame | None = None,
) -> DilationSummary:
    """Streaming intrinsic volumes + topology of {dist(path) <= r}.

    Equivalent to building the dense map and measuring it, but the frame is
    swept in row chunks so arbitrarily large frames never materialise.
    Euler characteristic and components come from the foreground row spans
    (cubical complex + union-find), holes = components - euler.
    """
    if delta <= 0.0 or r - delta <= 0.0:
        raise ValueError("need 0 < delta < r")
    if frame is None:
        frame = auto_frame(p, r, a)
    else:
        _check_margin(p, frame, r)
    a = frame.pixel_size
    cap = r + delta + 0.5 * a  # half-pixel slack, matches build_distance_map
    r2 = r * r
    lo2 = (r - delta) * (r - delta)
    hi2 = (r + delta) * (r + delta)
    x1, y1, x2, y2 = _segment_arrays(p)
    seg_ylo = np.minimum(y1, y2)
    seg_yhi = np.maximum(y1, y2)
    W, H = frame.width, frame.height
    ox, oy = frame.origin
    buf = np.full((min(chunk_rows, H), W), np.inf)
    touched = np.empty((buf.shape[0], 2), dtype=np.int64)
    counts = np.empty((buf.shape[0], 3), dtype=np.int64)
    n_fg = 0
    n_band = 0
    spans_per_row = []
    span_blocks_x0 = []
    span_blocks_x1 = []
    for iy0 in range(0, H, chunk_rows):
        rows = min(chunk_rows, H - iy0)
        ylo = oy + a * iy0 - cap
        yhi = oy + a * (iy0 + rows - 1) + cap
        sel = np.nonzero((seg_yhi >= ylo) & (seg_ylo <= yhi))[0]
        if sel.size == 0:
            spans_per_row.append(np.zeros(rows, dtype=np.int64))
            continue
        b = buf[:rows]
        t = touched[:rows]
        c = counts[:rows]
        _kernels.stamp_rows_sq(x1, y1, x2, y2, sel, ox, oy, a, cap, iy0, rows, W, b, t)
        _kernels.row_stats(b, t, r2, lo2, hi2, c)
        n_fg += int(c[:, 0].sum())
        n_band += int(c[:, 1].sum())
        n_spans = int(c[:, 2].sum())
        offsets = np.zeros(rows, dtype=np.int64)
        np.cumsum(c[:-1, 2], out=offsets[1:])
        sx0 = np.empty(n_spans, dtype=np.int64)
        sx1 = np.empty(n_spans, dtype=np.int64)
        _kernels.fill_spans(b, t, r2, offsets, sx0, sx1, True)
        spans_per_row.append(c[:, 2].copy())
        span_blocks_x0.append(sx0)
        span_blocks_x1.append(sx1)
    span_counts = np.concatenate(spans_per_row) if spans_per_row else np.zeros(H, dtype=np.int64)
    row_starts = np.zeros(H + 1, dtype=np.int64)
    np.cumsum(span_counts, out=row_starts[1:])
    sx0 = np.concatenate(span_blocks_x0) if span_blocks_x0 else np.zeros(0, dtype=np.int64)
    sx1 = np.concatenate(span_blocks_x1) if span_blocks_x1 else np.zeros(0, dtype=np.int64)
    V, E, F = _kernels.euler_terms_from_rows(row_starts, sx0, sx1)
    chi = int(V - E + F)
    comps = int(_kernels.union_spans(row_starts, sx0, sx1)) if sx0.size else 0
    vols = IntrinsicVolumes(a * a * n_fg, a * a * n_band / (2.0 * delta), chi)
    return DilationSummary(vols, comps, comps - chi)
