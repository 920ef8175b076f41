"""Numba kernels for distance-map construction and span topology.

All kernels are deterministic under any thread schedule: each pixel row is
written by exactly one iteration, reductions are integer, and per-pixel
minima are order-independent.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

__all__ = [
    "stamp_rows_sq",
    "row_stats",
    "fill_spans",
    "euler_terms_from_rows",
    "union_spans",
]


@njit(cache=True, parallel=True, fastmath=False)
def stamp_rows_sq(x1, y1, x2, y2, sel, ox, oy, a, cap, iy0, rows, width, buf, touched):
    """Min-update squared point-segment distances into buf[rows, width].

    Pixel (ix, iy0 + j) has center (ox + a*ix, oy + a*(iy0 + j)).  Only the
    segments listed in sel are stamped, each restricted to its capsule of
    radius cap: per row the x-window is derived from the row's distance to
    the segment's y-extent, so every pixel with true distance <= cap is
    visited by every segment that can realise it.  buf rows must hold inf
    outside previously touched columns; touched[j] receives the [lo, hi)
    column range written in row j (lo >= hi if none).
    """
    cap2 = cap * cap
    for j in prange(rows):
        py = oy + a * (iy0 + j)
        row = buf[j]
        tlo = width
        thi = -1
        for s in range(sel.shape[0]):
            i = sel[s]
            ax = x1[i]
            ay = y1[i]
            bx = x2[i]
            by = y2[i]
            ylo = ay if ay < by else by
            yhi = ay if ay > by else by
            dy = 0.0
            if py < ylo:
                dy = ylo - py
            elif py > yhi:
                dy = py - yhi
            if dy > cap:
                continue
            halfw = np.sqrt(cap2 - dy * dy)
            xlo = (ax if ax < bx else bx) - halfw
            xhi = (ax if ax > bx else bx) + halfw
            i0 = int(np.ceil((xlo - ox) / a))
            i1 = int(np.floor((xhi - ox) / a))
            if i0 < 0:
                i0 = 0
            if i1 >= width:
                i1 = width - 1
            if i0 > i1:
                continue
            if i0 < tlo:
                tlo = i0
            if i1 > thi:
                thi = i1
            ex = bx - ax
            ey = by - ay
            L2 = ex * ex + ey * ey
            for ix in range(i0, i1 + 1):
                ux = (ox + a * ix) - ax
                uy = py - ay
                if L2 > 0.0:
                    t = (ux * ex + uy * ey) / L2
                    if t < 0.0:
                        t = 0.0
                    elif t > 1.0:
                        t = 1.0
                    wx = ux - t * ex
                    wy = uy - t * ey
                else:
                    wx = ux
                    wy = uy
                d2 = wx * wx + wy * wy
                if d2 < row[ix]:
                    row[ix] = d2
        touched[j, 0] = tlo
        touched[j, 1] = thi + 1


@njit(cache=True, parallel=True, fastmath=False)
def row_stats(buf, touched, r2, lo2, hi2, counts):
    """Per-row counts: foreground (d2 <= r2), band (lo2 < d2 <= hi2), spans."""
    rows = buf.shape[0]
    for j in prange(rows):
        c_fg = 0
        c_band = 0
        c_spans = 0
        inside = False
        row = buf[j]
        for ix in range(touched[j, 0], touched[j, 1]):
            d2 = row[ix]
            if d2 <= r2:
                c_fg += 1
                if not inside:
                    c_spans += 1
                    inside = True
            else:
                inside = False
            if lo2 < d2 <= hi2:
                c_band += 1
        counts[j, 0] = c_fg
        counts[j, 1] = c_band
        counts[j, 2] = c_spans


@njit(cache=True, parallel=True, fastmath=False)
def fill_spans(buf, touched, r2, offsets, span_x0, span_x1, reset):
    """Write foreground runs [x0, x1] per row at precomputed offsets; then
    reset the touched columns to inf so the buffer can be reused."""
    rows = buf.shape[0]
    for j in prange(rows):
        pos = offsets[j]
        inside = False
        row = buf[j]
        for ix in range(touched[j, 0], touched[j, 1]):
            if row[ix] <= r2:
                if not inside:
                    span_x0[pos] = ix
                    inside = True
            else:
                if inside:
                    span_x1[pos] = ix - 1
                    pos += 1
                    inside = False
        if inside:
            span_x1[pos] = touched[j, 1] - 1
            pos += 1
        if reset:
            for ix in range(touched[j, 0], touched[j, 1]):
                row[ix] = np.inf


@njit(cache=True, fastmath=False)
def _interval_union_two(s1, e1, s2, e2, pad):
    """Total length of the union of half-open [s, e+pad) intervals drawn from
    two span lists, each sorted with within-list gaps >= 1 pixel."""
    n1 = s1.shape[0]
    n2 = s2.shape[0]
    i = 0
    j = 0
    total = 0
    cur_s = 0
    cur_e = -1
    have = False
    while i < n1 or j < n2:
        if j >= n2 or (i < n1 and s1[i] <= s2[j]):
            a = s1[i]
            b = e1[i] + pad
            i += 1
        else:
            a = s2[j]
            b = e2[j] + pad
            j += 1
        if not have:
            cur_s, cur_e, have = a, b, True
        elif a <= cur_e:
            if b > cur_e:
                cur_e = b
        else:
            total += cur_e - cur_s
            cur_s, cur_e = a, b
    if have:
        total += cur_e - cur_s
    return total


@njit(cache=True, fastmath=False)
def euler_terms_from_rows(row_starts, span_x0, span_x1):
    """(V, E, F) of the union of closed unit pixels given per-row spans.

    row_starts[k] .. row_starts[k+1] index the spans of pixel row k; a span
    [x0, x1] is an inclusive run of occupied pixels.  A pixel covers vertex
    columns x..x+1, so spans contribute [x0, x1+2) to vertex rows and to
    vertical-edge counts, and [x0, x1+1) to horizontal-edge rows.  Counted
    without multiplicity via interval unions.
    """
    n_rows = row_starts.shape[0] - 1
    empty = np.empty(0, dtype=span_x0.dtype)
    V = 0
    E = 0
    F = 0
    for k in range(n_rows + 1):
        if k == 0:
            a0, a1 = 0, 0
        else:
            a0, a1 = row_starts[k - 1], row_starts[k]
        if k == n_rows:
            b0, b1 = 0, 0
        else:
            b0, b1 = row_starts[k], row_starts[k + 1]
        sa0, sa1 = span_x0[a0:a1], span_x1[a0:a1]
        sb0, sb1 = span_x0[b0:b1], span_x1[b0:b1]
        V += _interval_union_two(sa0, sa1, sb0, sb1, 2)
        E += _interval_union_two(sa0, sa1, sb0, sb1, 1)
    for k in range(n_rows):
        a0, a1 = row_starts[k], row_starts[k + 1]
        E += _interval_union_two(span_x0[a0:a1], span_x1[a0:a1], empty, empty, 2)
        F += int(np.sum(span_x1[a0:a1] - span_x0[a0:a1] + 1))
    return V, E, F


@njit(cache=True, fastmath=False)
def _uf_find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True, fastmath=False)
def union_spans(row_starts, span_x0, span_x1):
    """8-connected component count of per-row foreground spans."""
    n_spans = span_x0.shape[0]
    parent = np.arange(n_spans, dtype=np.int64)
    n_rows = row_starts.shape[0] - 1
    for k in range(1, n_rows):
        a0, a1 = row_starts[k - 1], row_starts[k]
        b0, b1 = row_starts[k], row_starts[k + 1]
        i = a0
        j = b0
        while i < a1 and j < b1:
            # 8-connectivity: spans connect iff the x-intervals inflated by 1 meet
            if span_x1[i] < span_x0[j] - 1:
                i += 1
            elif span_x1[j] < span_x0[i] - 1:
                j += 1
            else:
                ri = _uf_find(parent, i)
                rj = _uf_find(parent, j)
                if ri != rj:
                    if ri < rj:
                        parent[rj] = ri
                    else:
                        parent[ri] = rj
                if span_x1[i] <= span_x1[j]:
                    i += 1
                else:
                    j += 1
    count = 0
    for s in range(n_spans):
        if _uf_find(parent, s) == s:
            count += 1
    return count
