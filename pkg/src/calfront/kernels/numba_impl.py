"""Numba kernel backend.

Mirrors :mod:`calfront.kernels.numpy_impl` bit-for-bit; the semantics notes
live there. All kernels are ``@njit(cache=True)`` so compiled code persists
on disk and repeat processes pay ~0.2 s, not full compile cost.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = [
    "NAME",
    "binary_dilate",
    "binary_erode",
    "distance_transform",
    "fill_holes",
    "flood_fill",
    "label_components",
    "thin",
]

NAME = "numba"


@njit(cache=True)
def binary_dilate(mask, offsets):
    h, w = mask.shape
    out = np.zeros((h, w), dtype=np.bool_)
    for r in range(h):
        for c in range(w):
            hit = False
            for k in range(offsets.shape[0]):
                rr = r + offsets[k, 0]
                cc = c + offsets[k, 1]
                if 0 <= rr < h and 0 <= cc < w and mask[rr, cc]:
                    hit = True
                    break
            out[r, c] = hit
    return out


@njit(cache=True)
def binary_erode(mask, offsets):
    h, w = mask.shape
    out = np.zeros((h, w), dtype=np.bool_)
    for r in range(h):
        for c in range(w):
            ok = True
            for k in range(offsets.shape[0]):
                rr = r + offsets[k, 0]
                cc = c + offsets[k, 1]
                # out-of-bounds counts as False, so borders always fail
                if rr < 0 or rr >= h or cc < 0 or cc >= w or not mask[rr, cc]:
                    ok = False
                    break
            out[r, c] = ok
    return out


_NO_SITE = np.int64(1) << 40  # larger than any (dr^2 + dc^2) on sane grids


@njit(cache=True)
def distance_transform(occupied):
    """Exact EDT via the two-pass lower-envelope algorithm.

    Pass 1 finds, per column, the row distance to the nearest
    occupied cell. Pass 2 computes, per row, the lower envelope of the
    parabolas (c - c')^2 + rowdist[c']^2 over columns that actually have a
    site; columns without one are excluded rather than given an infinite
    height (envelope arithmetic on +inf produces NaNs).

    All envelope quantities are small integers (grids up to 4096^2 keep
    heights below 2^24), so float64 intersection math is exact enough
    that the selected parabola is always a true argmin: rational
    intersections are separated by at least 1/(2w)^2, well above the
    rounding error of the two divisions involved.
    """
    h, w = occupied.shape
    rowdist = np.empty((h, w), dtype=np.int64)
    for c in range(w):
        d = _NO_SITE
        for r in range(h):
            if occupied[r, c]:
                d = 0
            elif d < _NO_SITE:
                d += 1
            rowdist[r, c] = d
        d = _NO_SITE
        for r in range(h - 1, -1, -1):
            if occupied[r, c]:
                d = 0
            elif d < _NO_SITE:
                d += 1
            if d < rowdist[r, c]:
                rowdist[r, c] = d
    out = np.empty((h, w), dtype=np.float64)
    cols = np.empty(w, dtype=np.int64)
    f = np.empty(w, dtype=np.float64)
    v = np.empty(w, dtype=np.int64)
    z = np.empty(w + 1, dtype=np.float64)
    for r in range(h):
        m = 0
        for c in range(w):
            if rowdist[r, c] < _NO_SITE:
                cols[m] = c
                f[m] = np.float64(rowdist[r, c] * rowdist[r, c])
                m += 1
        if m == 0:
            for c in range(w):
                out[r, c] = np.inf
            continue
        k = 0
        v[0] = 0
        z[0] = -np.inf
        z[1] = np.inf
        for i in range(1, m):
            ci = np.float64(cols[i])
            s = 0.0
            while True:
                cv = np.float64(cols[v[k]])
                s = ((f[i] + ci * ci) - (f[v[k]] + cv * cv)) / (2.0 * ci - 2.0 * cv)
                if s > z[k]:
                    break
                k -= 1
            k += 1
            v[k] = i
            z[k] = s
            z[k + 1] = np.inf
        k = 0
        for c in range(w):
            while z[k + 1] < c:
                k += 1
            dc = np.float64(c - cols[v[k]])
            out[r, c] = np.sqrt(dc * dc + f[v[k]])
    return out


@njit(cache=True)
def label_components(mask, connectivity):
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    stack_r = np.empty(h * w, dtype=np.int32)
    stack_c = np.empty(h * w, dtype=np.int32)
    count = 0
    for r0 in range(h):
        for c0 in range(w):
            if mask[r0, c0] and labels[r0, c0] == 0:
                count += 1
                top = 0
                stack_r[0] = r0
                stack_c[0] = c0
                labels[r0, c0] = count
                while top >= 0:
                    r = stack_r[top]
                    c = stack_c[top]
                    top -= 1
                    for dr in range(-1, 2):
                        for dc in range(-1, 2):
                            if dr == 0 and dc == 0:
                                continue
                            if connectivity == 4 and dr != 0 and dc != 0:
                                continue
                            rr = r + dr
                            cc = c + dc
                            if (
                                0 <= rr < h
                                and 0 <= cc < w
                                and mask[rr, cc]
                                and labels[rr, cc] == 0
                            ):
                                labels[rr, cc] = count
                                top += 1
                                stack_r[top] = rr
                                stack_c[top] = cc
    return labels, count


@njit(cache=True)
def flood_fill(passable, seeds):
    h, w = passable.shape
    out = np.zeros((h, w), dtype=np.bool_)
    stack_r = np.empty(h * w, dtype=np.int32)
    stack_c = np.empty(h * w, dtype=np.int32)
    top = -1
    for k in range(seeds.shape[0]):
        r = int(seeds[k, 0])
        c = int(seeds[k, 1])
        if passable[r, c] and not out[r, c]:
            out[r, c] = True
            top += 1
            stack_r[top] = r
            stack_c[top] = c
    while top >= 0:
        r = stack_r[top]
        c = stack_c[top]
        top -= 1
        for i in range(4):
            rr = r + (1 if i == 0 else -1 if i == 1 else 0)
            cc = c + (1 if i == 2 else -1 if i == 3 else 0)
            if 0 <= rr < h and 0 <= cc < w and passable[rr, cc] and not out[rr, cc]:
                out[rr, cc] = True
                top += 1
                stack_r[top] = rr
                stack_c[top] = cc
    return out


@njit(cache=True)
def fill_holes(mask):
    h, w = mask.shape
    reached = np.zeros((h, w), dtype=np.bool_)
    stack_r = np.empty(h * w, dtype=np.int32)
    stack_c = np.empty(h * w, dtype=np.int32)
    top = -1
    for c in range(w):
        for r in (0, h - 1):
            if not mask[r, c] and not reached[r, c]:
                reached[r, c] = True
                top += 1
                stack_r[top] = r
                stack_c[top] = c
    for r in range(h):
        for c in (0, w - 1):
            if not mask[r, c] and not reached[r, c]:
                reached[r, c] = True
                top += 1
                stack_r[top] = r
                stack_c[top] = c
    while top >= 0:
        r = stack_r[top]
        c = stack_c[top]
        top -= 1
        for i in range(4):
            rr = r + (1 if i == 0 else -1 if i == 1 else 0)
            cc = c + (1 if i == 2 else -1 if i == 3 else 0)
            if 0 <= rr < h and 0 <= cc < w and not mask[rr, cc] and not reached[rr, cc]:
                reached[rr, cc] = True
                top += 1
                stack_r[top] = rr
                stack_c[top] = cc
    # anything not border-reachable background is foreground after filling
    out = np.empty((h, w), dtype=np.bool_)
    for r in range(h):
        for c in range(w):
            out[r, c] = not reached[r, c]
    return out


@njit(cache=True)
def _deletable(grid, r, c, sub):
    h, w = grid.shape
    ring = np.zeros(8, dtype=np.uint8)
    # ring order N, NE, E, SE, S, SW, W, NW
    drs = (-1, -1, 0, 1, 1, 1, 0, -1)
    dcs = (0, 1, 1, 1, 0, -1, -1, -1)
    b = 0
    for i in range(8):
        rr = r + drs[i]
        cc = c + dcs[i]
        if 0 <= rr < h and 0 <= cc < w and grid[rr, cc]:
            ring[i] = 1
            b += 1
    if b < 2 or b > 6:
        return False
    a = 0
    for i in range(8):
        if ring[i] == 0 and ring[(i + 1) % 8] == 1:
            a += 1
    if a != 1:
        return False
    n = ring[0]
    e = ring[2]
    s = ring[4]
    w_ = ring[6]
    if sub == 0:
        return n * e * s == 0 and e * s * w_ == 0
    return n * e * w_ == 0 and n * s * w_ == 0


@njit(cache=True)
def thin(mask):
    h, w = mask.shape
    grid = mask.copy()
    cand_r = np.empty(h * w, dtype=np.int32)
    cand_c = np.empty(h * w, dtype=np.int32)
    changed = True
    while changed:
        changed = False
        for sub in (0, 1):
            # collect candidates on a frozen copy, row-major
            m = 0
            frozen = grid.copy()
            for r in range(h):
                for c in range(w):
                    if frozen[r, c] and _deletable(frozen, r, c, sub):
                        cand_r[m] = r
                        cand_c[m] = c
                        m += 1
            # delete sequentially, re-checking against the live grid
            for i in range(m):
                r = cand_r[i]
                c = cand_c[i]
                if _deletable(grid, r, c, sub):
                    grid[r, c] = False
                    changed = True
    return grid
