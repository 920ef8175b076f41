"""Seeded Monte Carlo experiments over dilated Brownian paths.

Each realization owns a counter-based deviate stream derived injectively
from (base_seed, realization index), so runs are reproducible bit-for-bit
across platforms and worker counts; aggregation always reduces in ascending
realization order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .brownian import (
    PhiloxSource,
    Polyline,
    haar_schauder_path,
    rescale_path,
    sample_increment_path,
    subsample_path,
)
from .geometry import GeometryError, dilation_summary
from .hausdorff import hausdorff_polyline, sup_norm_gap

__all__ = [
    "ExperimentConfig",
    "AggregateRow",
    "ConvergenceResult",
    "DESK_RADII",
    "derive_stream",
    "make_path",
    "run_experiment",
    "convergence_study",
    "hole_statistics",
    "STATISTICS",
]

DESK_RADII = (0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0)
STATISTICS = ("area", "boundary_length", "euler", "holes")


@dataclass(frozen=True)
class ExperimentConfig:
    """Monte Carlo design; the defaults are the desk-scale preset.

    resolution is the pixel size as a fraction of the radius (a = resolution
    * r); delta is the half-width of the perimeter band in pixels (delta =
    delta_pixels * a).  generator is "increments", "haar:L" (Haar-Schauder
    level L, rescaled to T), or "segment" (a fixed unit-speed segment of
    length 2 for diagnostics; deviates unused).
    """

    T: float = 1.0
    k: int = 4096
    radii: tuple[float, ...] = DESK_RADII
    N: int = 200
    resolution: float = 1.0 / 128.0
    delta_pixels: float = 8.0
    base_seed: int = 17
    generator: str = "increments"

    def __post_init__(self):
        if not self.T > 0.0:
            raise ValueError("T must be > 0")
        if int(self.k) < 1:
            raise ValueError("k must be >= 1")
        radii = tuple(float(r) for r in self.radii)
        if not radii:
            raise ValueError("radii must be nonempty")
        if any(r <= 0.0 for r in radii):
            raise ValueError("radii must be strictly positive")
        if list(radii) != sorted(radii) or len(set(radii)) != len(radii):
            raise ValueError("radii must be strictly ascending")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if not 0.0 < self.resolution <= 1.0:
            raise ValueError("resolution must lie in (0, 1]")
        if not self.delta_pixels > 0.0:
            raise ValueError("delta_pixels must be > 0")
        if not 0 <= int(self.base_seed) < 1 << 64:
            raise ValueError("base_seed must fit in 64 bits")
        g = self.generator
        if g not in ("increments", "segment") and not _parse_haar_level(g):
            raise ValueError(f"unknown generator {g!r}")
        object.__setattr__(self, "radii", radii)


def _parse_haar_level(g: str):
    if not g.startswith("haar:"):
        return None
    try:
        level = int(g.split(":", 1)[1])
    except ValueError:
        return None
    return level if level >= 0 else None


@dataclass(frozen=True)
class AggregateRow:
    r: float
    statistic: str
    mean: float
    min: float
    max: float
    std: float
    N: int


def derive_stream(base_seed: int, realization_index: int) -> PhiloxSource:
    """Philox stream with the 128-bit key base_seed + index * 2^64.

    The mapping is injective for 64-bit base seeds and indices; Philox keys
    that differ in any bit yield statistically independent streams, and the
    same key replays the same deviates on every platform.
    """
    if not 0 <= base_seed < 1 << 64:
        raise ValueError("base_seed must fit in 64 bits")
    if not 0 <= realization_index < 1 << 64:
        raise ValueError("realization_index must fit in 64 bits")
    return PhiloxSource((realization_index << 64) | base_seed)


_SEGMENT_PATH_LENGTH = 2.0


def make_path(cfg: ExperimentConfig, realization_index: int) -> Polyline:
    """The realization's path, a pure function of (cfg, index)."""
    src = derive_stream(cfg.base_seed, realization_index)
    if cfg.generator == "increments":
        return sample_increment_path(int(cfg.k), cfg.T, src)
    if cfg.generator == "segment":
        v = np.array([[0.0, 0.0], [_SEGMENT_PATH_LENGTH, 0.0]])
        return Polyline(v, np.array([0.0, cfg.T]), cfg.T)
    level = _parse_haar_level(cfg.generator)
    path = haar_schauder_path(level, src)
    if cfg.T != 1.0:
        path = rescale_path(path, cfg.T)
    return path


def _aggregate(r: float, statistic: str, values: np.ndarray) -> AggregateRow:
    return AggregateRow(
        r=float(r),
        statistic=statistic,
        mean=float(np.mean(values)),
        min=float(np.min(values)),
        max=float(np.max(values)),
        std=float(np.std(values)),
        N=int(values.size),
    )


def _measure(path: Polyline, r: float, cfg: ExperimentConfig, chunk_rows: int):
    a = cfg.resolution * r
    delta = cfg.delta_pixels * a
    return dilation_summary(path, r, a=a, delta=delta, chunk_rows=chunk_rows)


def run_experiment(
    cfg: ExperimentConfig,
    *,
    path_source=None,
    chunk_rows: int = 256,
    collect_values: bool = False,
):
    """Per-radius aggregates of area, boundary length, Euler characteristic
    and hole count over N realizations.

    path_source optionally overrides the configured generator with a
    callable index -> Polyline (used to stub paths in tests).
    """
    source = path_source or (lambda i: make_path(cfg, i))
    n_r = len(cfg.radii)
    values = {s: np.empty((cfg.N, n_r)) for s in STATISTICS}
    for i in range(cfg.N):
        path = source(i)
        for j, r in enumerate(cfg.radii):
            try:
                summary = _measure(path, r, cfg, chunk_rows)
            except GeometryError as exc:
                raise GeometryError(f"realization {i}, radius {r:g}: {exc}") from exc
            values["area"][i, j] = summary.volumes.area
            values["boundary_length"][i, j] = summary.volumes.boundary_length
            values["euler"][i, j] = summary.volumes.euler
            values["holes"][i, j] = summary.holes
    rows = []
    for j, r in enumerate(cfg.radii):
        for s in STATISTICS:
            rows.append(_aggregate(r, s, values[s][:, j]))
    if collect_values:
        return rows, values
    return rows


@dataclass(frozen=True)
class ConvergenceResult:
    """Coupled discretization study at a single radius.

    values[(k, statistic)] holds per-realization measurements; all k share
    the same underlying fine draw (coarser paths are subsamples), so the
    per-k differences are coupled.  hausdorff[k] is the exact Hausdorff
    distance of each coarse polyline to the finest one, and sup_gap[k] the
    exact sup-norm curve gap (the Hausdorff upper bound).
    """

    ks: tuple[int, ...]
    r: float
    rows: tuple
    values: dict
    hausdorff: dict
    sup_gap: dict


def convergence_study(
    cfg: ExperimentConfig,
    k_list,
    *,
    path_source=None,
    chunk_rows: int = 256,
    exact_hausdorff: bool = True,
) -> ConvergenceResult:
    """Measure the same realizations at several discretization levels.

    The finest k generates the path; each coarser k must divide it so the
    coarse polyline is a strict subsample of the same draw.
    """
    ks = sorted(int(k) for k in k_list)
    if len(ks) < 2:
        raise ValueError("convergence study needs at least two k values")
    if len(cfg.radii) != 1:
        raise ValueError("convergence study runs at a single radius")
    k_fine = ks[-1]
    for k in ks[:-1]:
        if k_fine % k != 0:
            raise ValueError(f"coarse k = {k} must divide the finest k = {k_fine}")
    r = cfg.radii[0]
    fine_cfg = replace(cfg, k=k_fine)
    source = path_source or (lambda i: make_path(fine_cfg, i))
    values = {(k, s): np.empty(cfg.N) for k in ks for s in STATISTICS}
    hdist = {k: np.zeros(cfg.N) for k in ks}
    sgap = {k: np.zeros(cfg.N) for k in ks}
    for i in range(cfg.N):
        fine = source(i)
        for k in ks:
            stride = (fine.n_vertices - 1) // k
            path = subsample_path(fine, stride) if stride > 1 else fine
            summary = _measure(path, r, cfg, chunk_rows)
            values[(k, "area")][i] = summary.volumes.area
            values[(k, "boundary_length")][i] = summary.volumes.boundary_length
            values[(k, "euler")][i] = summary.volumes.euler
            values[(k, "holes")][i] = summary.holes
            if k != k_fine:
                hdist[k][i] = hausdorff_polyline(path, fine, exact=exact_hausdorff,
                                                 sample_step=None if exact_hausdorff else r / 64)
                sgap[k][i] = sup_norm_gap(fine, path)
    rows = []
    for k in ks:
        for s in STATISTICS:
            agg = _aggregate(r, s, values[(k, s)])
            rows.append((k, agg))
    return ConvergenceResult(tuple(ks), r, tuple(rows), values, hdist, sgap)


def hole_statistics(cfg: ExperimentConfig, *, path_source=None, chunk_rows: int = 256):
    """Per-radius hole and Euler aggregates, with the connectedness identity
    checked per realization: the dilated path has one component, so its
    Euler characteristic must equal 1 - holes."""
    source = path_source or (lambda i: make_path(cfg, i))
    n_r = len(cfg.radii)
    holes = np.empty((cfg.N, n_r))
    euler = np.empty((cfg.N, n_r))
    for i in range(cfg.N):
        path = source(i)
        for j, r in enumerate(cfg.radii):
            summary = _measure(path, r, cfg, chunk_rows)
            if summary.components != 1:
                raise GeometryError(
                    f"realization {i}, radius {r:g}: dilated path split into "
                    f"{summary.components} components"
                )
            holes[i, j] = summary.holes
            euler[i, j] = summary.volumes.euler
    rows = []
    for j, r in enumerate(cfg.radii):
        rows.append(_aggregate(r, "holes", holes[:, j]))
        rows.append(_aggregate(r, "euler", euler[:, j]))
    return rows
