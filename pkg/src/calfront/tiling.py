"""Patch extraction, overlap merging, and longest-side resizing.

Grids are 2-D arrays indexed [row, col]. Tile origins advance by
patch - overlap; the final row/column of tiles is anchored to the canvas
edge so coverage never leaves a margin. Merging is a per-pixel weighted
mean over covering tiles, computed so that it reproduces the input
*exactly* when all covering tiles agree (no float drift), which makes
merge∘extract an identity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Gaussian",
    "PadPolicy",
    "Tile",
    "TileSpec",
    "Uniform",
    "extract_patches",
    "merge_patches",
    "resize_longest_side",
]


class PadPolicy(enum.Enum):
    """How tile area beyond the canvas is filled when patch > canvas."""

    ZERO_PAD = "zero"
    CLAMP_TO_EDGE = "clamp"


@dataclass(frozen=True)
class TileSpec:
    patch_w: int
    patch_h: int
    overlap_x: int = 0
    overlap_y: int = 0
    pad_policy: PadPolicy = PadPolicy.CLAMP_TO_EDGE

    def __post_init__(self):
        if self.patch_w < 1 or self.patch_h < 1:
            raise ValueError("patch size must be >= 1")
        if not (0 <= self.overlap_x < self.patch_w and 0 <= self.overlap_y < self.patch_h):
            raise ValueError("overlap must satisfy 0 <= overlap < patch size")


@dataclass
class Tile:
    origin: tuple[int, int]  # (row, col) of the tile's top-left on the canvas
    data: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class Uniform:
    """Every covering tile weighs the same."""


@dataclass(frozen=True)
class Gaussian:
    """Weight = separable Gaussian centred on the tile; sigma None → side/8."""

    sigma_px: float | None = None

    def __post_init__(self):
        if self.sigma_px is not None and not (self.sigma_px > 0):
            raise ValueError(f"sigma_px must be > 0, got {self.sigma_px}")


def _axis_origins(canvas: int, patch: int, overlap: int) -> list[int]:
    if patch >= canvas:
        return [0]
    stride = patch - overlap
    origins = list(range(0, canvas - patch + 1, stride))
    if origins[-1] != canvas - patch:
        origins.append(canvas - patch)  # anchor the last tile to the edge
    return origins


def extract_patches(img: np.ndarray, spec: TileSpec) -> list[Tile]:
    """Cut img into covering tiles of spec.patch_h x spec.patch_w."""
    img = np.asarray(img)
    if img.ndim != 2 or img.size == 0:
        raise ValueError("empty image")
    h, w = img.shape
    rows = _axis_origins(h, spec.patch_h, spec.overlap_y)
    cols = _axis_origins(w, spec.patch_w, spec.overlap_x)
    tiles = []
    pad_r = max(0, spec.patch_h - h)
    pad_c = max(0, spec.patch_w - w)
    if pad_r or pad_c:
        mode = "edge" if spec.pad_policy is PadPolicy.CLAMP_TO_EDGE else "constant"
        padded = np.pad(img, ((0, pad_r), (0, pad_c)), mode=mode)
    else:
        padded = img
    for r in rows:
        for c in cols:
            tiles.append(Tile((r, c), padded[r : r + spec.patch_h, c : c + spec.patch_w].copy()))
    return tiles


def _weight_grid(shape: tuple[int, int], weighting) -> np.ndarray:
    ph, pw = shape
    if isinstance(weighting, Uniform):
        return np.ones(shape, dtype=np.float64)
    if isinstance(weighting, Gaussian):
        sr = weighting.sigma_px if weighting.sigma_px is not None else ph / 8.0
        sc = weighting.sigma_px if weighting.sigma_px is not None else pw / 8.0
        r = np.arange(ph, dtype=np.float64) - (ph - 1) / 2.0
        c = np.arange(pw, dtype=np.float64) - (pw - 1) / 2.0
        gr = np.exp(-0.5 * (r / sr) ** 2)
        gc = np.exp(-0.5 * (c / sc) ** 2)
        return np.outer(gr, gc)
    raise TypeError(f"unknown weighting {weighting!r}")


def merge_patches(
    tiles: list[Tile], canvas_shape: tuple[int, int], weighting=Uniform()
) -> np.ndarray:
    """Weighted per-pixel mean of covering tiles on a (rows, cols) canvas.

    Accumulates weighted *differences from a per-pixel baseline* (the first
    covering tile's value): when all covering tiles agree, the numerator is
    exactly zero and the output equals the inputs bit-for-bit. Raises on
    any canvas pixel no tile covers.
    """
    h, w = canvas_shape
    if h < 1 or w < 1:
        raise ValueError("canvas must be non-empty")
    baseline = np.zeros((h, w), dtype=np.float64)
    covered = np.zeros((h, w), dtype=bool)
    for tile in tiles:
        r0, c0 = tile.origin
        if r0 < 0 or c0 < 0 or r0 >= h or c0 >= w:
            raise ValueError(f"tile origin {tile.origin} outside canvas")
        th, tw = tile.data.shape
        r1, c1 = min(r0 + th, h), min(c0 + tw, w)  # clip to canvas
        view = covered[r0:r1, c0:c1]
        fresh = ~view
        baseline[r0:r1, c0:c1][fresh] = tile.data[: r1 - r0, : c1 - c0][fresh]
        view |= True
    if not covered.all():
        r, c = np.argwhere(~covered)[0]
        raise ValueError(f"canvas pixel uncovered at ({r}, {c})")
    num = np.zeros((h, w), dtype=np.float64)
    den = np.zeros((h, w), dtype=np.float64)
    for tile in tiles:
        r0, c0 = tile.origin
        th, tw = tile.data.shape
        r1, c1 = min(r0 + th, h), min(c0 + tw, w)
        wgrid = _weight_grid(tile.data.shape, weighting)[: r1 - r0, : c1 - c0]
        data = tile.data[: r1 - r0, : c1 - c0]
        num[r0:r1, c0:c1] += wgrid * (data - baseline[r0:r1, c0:c1])
        den[r0:r1, c0:c1] += wgrid
    return baseline + num / den


def resize_longest_side(img: np.ndarray, target: int, sampling: str = "nearest") -> np.ndarray:
    """Scale so the longest side equals target, preserving aspect ratio.

    sampling: "nearest" (mandatory for class masks — no invented values)
    or "bilinear". Pixel-center coordinate mapping on both paths.
    """
    img = np.asarray(img)
    if img.ndim != 2 or img.size == 0:
        raise ValueError("empty image")
    if target < 1:
        raise ValueError(f"target must be >= 1, got {target}")
    if sampling not in ("nearest", "bilinear"):
        raise ValueError(f"sampling must be nearest or bilinear, got {sampling!r}")
    h, w = img.shape
    longest = max(h, w)
    if longest == target:
        return img.copy()
    scale = target / longest
    out_h = target if h == longest else max(1, int(round(h * scale)))
    out_w = target if w == longest else max(1, int(round(w * scale)))
    rows = (np.arange(out_h) + 0.5) * (h / out_h) - 0.5
    cols = (np.arange(out_w) + 0.5) * (w / out_w) - 0.5
    if sampling == "nearest":
        ri = np.clip(np.round(rows).astype(np.int64), 0, h - 1)
        ci = np.clip(np.round(cols).astype(np.int64), 0, w - 1)
        return img[np.ix_(ri, ci)]
    r0 = np.clip(np.floor(rows).astype(np.int64), 0, h - 1)
    c0 = np.clip(np.floor(cols).astype(np.int64), 0, w - 1)
    r1 = np.minimum(r0 + 1, h - 1)
    c1 = np.minimum(c0 + 1, w - 1)
    fr = np.clip(rows - r0, 0.0, 1.0)[:, None]
    fc = np.clip(cols - c0, 0.0, 1.0)[None, :]
    a = img[np.ix_(r0, c0)].astype(np.float64)
    b = img[np.ix_(r0, c1)].astype(np.float64)
    c_ = img[np.ix_(r1, c0)].astype(np.float64)
    d = img[np.ix_(r1, c1)].astype(np.float64)
    top = a * (1 - fc) + b * fc
    bot = c_ * (1 - fc) + d * fc
    return top * (1 - fr) + bot * fr
