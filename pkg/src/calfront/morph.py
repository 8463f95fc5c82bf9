"""Binary-raster morphology on boolean numpy grids.

A "grid" throughout this module is a 2-D ``bool`` array indexed
``[row, col]`` with the origin at the top-left. Heavy lifting is delegated
to :mod:`calfront.kernels`; this layer owns validation, the structuring
element geometry, and the skeleton path search.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels

__all__ = [
    "StructuringElement",
    "connected_components",
    "dilate",
    "distance_transform",
    "erode",
    "fill_holes",
    "longest_path",
    "skeletonize",
]


def _as_grid(g) -> np.ndarray:
    a = np.asarray(g)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D grid, got shape {a.shape}")
    return a.astype(bool, copy=False)


@dataclass(frozen=True)
class StructuringElement:
    """Neighbourhood geometry as explicit (row, col) offsets.

    Construct via :meth:`square` (odd side, centred) or :meth:`disk`
    (Euclidean radius in pixels). Both are center-symmetric, so dilation
    and erosion need no reflection bookkeeping.
    """

    offsets: np.ndarray = field(repr=False)

    def __post_init__(self):
        offs = np.asarray(self.offsets, dtype=np.int64)
        if offs.ndim != 2 or offs.shape[1] != 2:
            raise ValueError("offsets must be an (N, 2) integer array")
        object.__setattr__(self, "offsets", offs)

    @classmethod
    def square(cls, k: int) -> "StructuringElement":
        if k < 1 or k % 2 == 0:
            raise ValueError(f"square side must be odd and >= 1, got {k}")
        half = k // 2
        offs = [(dr, dc) for dr in range(-half, half + 1) for dc in range(-half, half + 1)]
        return cls(np.array(offs, dtype=np.int64))

    @classmethod
    def disk(cls, radius: int) -> "StructuringElement":
        if radius < 0:
            raise ValueError(f"disk radius must be >= 0, got {radius}")
        r = int(radius)
        offs = [
            (dr, dc)
            for dr in range(-r, r + 1)
            for dc in range(-r, r + 1)
            if dr * dr + dc * dc <= r * r
        ]
        return cls(np.array(offs, dtype=np.int64))

    def __eq__(self, other):
        if not isinstance(other, StructuringElement):
            return NotImplemented
        return np.array_equal(self.offsets, other.offsets)

    def __hash__(self):
        return hash(self.offsets.tobytes())


def dilate(g, se: StructuringElement) -> np.ndarray:
    """out(p) = OR over the se-neighbourhood of p; grows regions outward."""
    return kernels.binary_dilate(_as_grid(g), se.offsets)


def erode(g, se: StructuringElement) -> np.ndarray:
    """out(p) = AND over the se-neighbourhood; out-of-bounds counts False,
    so a full grid loses its border under a 3x3 element."""
    return kernels.binary_erode(_as_grid(g), se.offsets)


def fill_holes(g) -> np.ndarray:
    """Set every false region that is not 4-connected to the border."""
    return kernels.fill_holes(_as_grid(g))


def connected_components(g, connectivity: int = 8) -> tuple[np.ndarray, int]:
    """Label components with dense int32 labels 1..count.

    Labels are assigned in row-major first-encounter order, which makes
    "largest component, ties to the smallest label" deterministic.
    """
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    return kernels.label_components(_as_grid(g), connectivity)


def skeletonize(g) -> np.ndarray:
    """Thin to ~1-px width while preserving each component's 8-connectivity."""
    return kernels.thin(_as_grid(g))


def distance_transform(g) -> np.ndarray:
    """Exact Euclidean distance (px) to the nearest true pixel; +inf if empty."""
    return kernels.distance_transform(_as_grid(g))


# Fixed neighbour order keeps BFS parents — and therefore extracted
# paths — identical across runs and backends.
_N8 = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


def _bfs(start: tuple[int, int], pixels: set[tuple[int, int]]):
    dist = {start: 0}
    parent = {start: None}
    queue = [start]
    head = 0
    while head < len(queue):
        p = queue[head]
        head += 1
        r, c = p
        for dr, dc in _N8:
            q = (r + dr, c + dc)
            if q in pixels and q not in dist:
                dist[q] = dist[p] + 1
                parent[q] = p
                queue.append(q)
    far = max(dist, key=lambda q: (dist[q], -q[0], -q[1]))
    return far, dist, parent


def longest_path(component) -> np.ndarray:
    """Longest simple path through one thin 8-connected component.

    Double-sweep BFS: from an arbitrary pixel find the farthest pixel u,
    then the farthest pixel v from u; the u->v parent walk is the path.
    Exact on trees (thinned skeletons are overwhelmingly tree-shaped); on
    a cyclic skeleton it returns a maximal double-sweep path. Ties are
    broken toward the smallest (row, col) so output is deterministic.

    Returns an (L, 2) int array of (row, col); consecutive entries are
    8-neighbours and no pixel repeats.
    """
    g = _as_grid(component)
    coords = np.argwhere(g)
    if len(coords) == 0:
        raise ValueError("empty component")
    pixels = {(int(r), int(c)) for r, c in coords}
    start = (int(coords[0][0]), int(coords[0][1]))
    u, dist, _ = _bfs(start, pixels)
    if len(dist) != len(pixels):
        raise ValueError("expected a single 8-connected component")
    v, _, parent = _bfs(u, pixels)
    path = []
    node = v
    while node is not None:
        path.append(node)
        node = parent[node]
    path.reverse()
    return np.array(path, dtype=np.int64)
