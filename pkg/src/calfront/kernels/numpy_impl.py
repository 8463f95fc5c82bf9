"""Pure numpy/scipy kernel backend.

Reference implementations of the hot raster kernels. The numba backend in
:mod:`calfront.kernels.numba_impl` must produce bit-identical outputs; the
cross-backend test suite enforces that. Everything here works on plain 2-D
arrays: boolean grids in, boolean/integer/float grids out.

Conventions shared by both backends:

* out-of-bounds pixels count as background (False) for dilation/erosion,
* component labels are dense ``1..count`` in row-major first-encounter order,
* distances are exact Euclidean, ``+inf`` where no foreground exists.
"""

from __future__ import annotations

import numpy as np
import scipy.ndimage as ndi

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

NAME = "numpy"


def _shifted(mask: np.ndarray, dr: int, dc: int) -> np.ndarray:
    """mask translated by (-dr, -dc) with False spilling in at the edges.

    Result[r, c] == mask[r + dr, c + dc] where in bounds, False otherwise.
    """
    h, w = mask.shape
    out = np.zeros_like(mask)
    rs_src = slice(max(dr, 0), h + min(dr, 0))
    cs_src = slice(max(dc, 0), w + min(dc, 0))
    rs_dst = slice(max(-dr, 0), h + min(-dr, 0))
    cs_dst = slice(max(-dc, 0), w + min(-dc, 0))
    out[rs_dst, cs_dst] = mask[rs_src, cs_src]
    return out


def binary_dilate(mask: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """OR over the offset neighbourhood: out[p] = any(mask[p + o])."""
    out = np.zeros_like(mask, dtype=bool)
    for dr, dc in offsets:
        out |= _shifted(mask, int(dr), int(dc))
    return out

def binary_erode(mask: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """AND over the offset neighbourhood; out-of-bounds counts as False."""
    out = np.ones_like(mask, dtype=bool)
    for dr, dc in offsets:
        out &= _shifted(mask, int(dr), int(dc))
    return out


def distance_transform(occupied: np.ndarray) -> np.ndarray:
    """Exact Euclidean distance to the nearest True pixel; +inf if none.

    scipy's EDT measures distance to the nearest zero, and its output is
    undefined when the grid has no zero at all, hence the empty guard.
    """
    if not occupied.any():
        return np.full(occupied.shape, np.inf, dtype=np.float64)
    return ndi.distance_transform_edt(~occupied).astype(np.float64, copy=False)


_STRUCT_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_STRUCT_8 = np.ones((3, 3), dtype=bool)


def label_components(mask: np.ndarray, connectivity: int) -> tuple[np.ndarray, int]:
    """Dense labels 1..count, row-major first-encounter order (scipy's order)."""
    structure = _STRUCT_4 if connectivity == 4 else _STRUCT_8
    labels, count = ndi.label(mask, structure=structure)
    return labels.astype(np.int32, copy=False), int(count)


def fill_holes(mask: np.ndarray) -> np.ndarray:
    """Fill background regions not 4-connected to the border."""
    # scipy's default structure is the 4-connected cross, which is exactly
    # the background connectivity this package pairs with 8-connected lines.
    return ndi.binary_fill_holes(mask)


def flood_fill(passable: np.ndarray, seeds: np.ndarray) -> np.ndarray:
    """4-connected region reachable from seed pixels through passable cells.

    Seeds on non-passable cells contribute nothing. Implemented as masked
    frontier propagation: each round ORs the four axis shifts.
    """
    out = np.zeros(passable.shape, dtype=bool)
    for r, c in seeds:
        if passable[int(r), int(c)]:
            out[int(r), int(c)] = True
    while True:
        grow = (
            _shifted(out, 1, 0)
            | _shifted(out, -1, 0)
            | _shifted(out, 0, 1)
            | _shifted(out, 0, -1)
        )
        grow &= passable
        grow &= ~out
        if not grow.any():
            return out
        out |= grow


# Ring order north, NE, east, SE, south, SW, west, NW — the circular
# neighbour sequence the thinning predicate counts transitions over.
_RING = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))


def _ring_values(padded: np.ndarray) -> list[np.ndarray]:
    h, w = padded.shape[0] - 2, padded.shape[1] - 2
    return [padded[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w] for dr, dc in _RING]


def _candidates(mask: np.ndarray, sub: int) -> np.ndarray:
    """Frozen-grid thinning candidates for subiteration 0 or 1 (vectorised)."""
    padded = np.zeros((mask.shape[0] + 2, mask.shape[1] + 2), dtype=np.uint8)
    padded[1:-1, 1:-1] = mask
    ring = _ring_values(padded)
    b = np.zeros(mask.shape, dtype=np.uint8)
    for v in ring:
        b += v
    a = np.zeros(mask.shape, dtype=np.uint8)
    for i in range(8):
        a += (ring[i] == 0) & (ring[(i + 1) % 8] == 1)
    n, e, s, w = ring[0], ring[2], ring[4], ring[6]
    if sub == 0:
        direction = ((n & e & s) == 0) & ((e & s & w) == 0)
    else:
        direction = ((n & e & w) == 0) & ((n & s & w) == 0)
    return mask & (b >= 2) & (b <= 6) & (a == 1) & direction


def _deletable(grid: np.ndarray, r: int, c: int, sub: int) -> bool:
    """The same predicate as _candidates for one pixel of the current grid."""
    h, w = grid.shape
    ring = []
    for dr, dc in _RING:
        rr, cc = r + dr, c + dc
        ring.append(1 if 0 <= rr < h and 0 <= cc < w and grid[rr, cc] else 0)
    b = sum(ring)
    if b < 2 or b > 6:
        return False
    a = sum(1 for i in range(8) if ring[i] == 0 and ring[(i + 1) % 8] == 1)
    if a != 1:
        return False
    n, e, s, w_ = ring[0], ring[2], ring[4], ring[6]
    if sub == 0:
        return n * e * s == 0 and e * s * w_ == 0
    return n * e * w_ == 0 and n * s * w_ == 0


def thin(mask: np.ndarray) -> np.ndarray:
    """Iterative two-subiteration thinning to ~1-px width.

    Candidates are collected on a frozen grid, then deleted sequentially in
    row-major order with the predicate re-checked on the current grid. The
    re-check makes every deletion a simple-point deletion, so connectivity
    is preserved (simultaneous deletion would erase 2x2 blocks outright).
    """
    grid = mask.astype(bool).copy()
    changed = True
    while changed:
        changed = False
        for sub in (0, 1):
            cand = _candidates(grid, sub)
            for r, c in np.argwhere(cand):
                if _deletable(grid, int(r), int(c), sub):
                    grid[r, c] = False
                    changed = True
    return grid
