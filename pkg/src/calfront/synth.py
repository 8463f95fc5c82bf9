"""Deterministic synthetic scenes with analytically known fronts.

Scene layout (size S, row-major, origin top-left):

* a rock frame ring around the whole image (fjord walls),
* a rock band of ``rock_rows`` rows under the top frame (shoreline),
* glacier filling the left interior, ocean the right,
* the glacier/ocean boundary column b(r) is vertical or a sinusoid,
* optionally a 16x16 NA block in the bottom-left glacier area.

The ground-truth front is *not* produced by the extraction pipeline; it is
re-derived here directly from the zone grid by the adjacency definition
(ocean pixel with a glacier 8-neighbour), so pipeline output can be tested
against an independent construction. The ocean region is a single
4-connected, hole-free component by construction, which keeps the
extraction pipeline's cleanup steps no-ops on these scenes.

The catchment covers the frame, the band, and the glacier side up to 20 px
left of the boundary: buffering it by 120 m (12 px at 10 m/px) erases
coastline pixels along rock edges while never touching the front itself.

``shift_px`` rebuilds the same scene with the boundary moved right by a
fixed number of columns — everything random is drawn before the shift is
applied, so a shifted dataset differs from its unshifted twin *only* by
the boundary position.
"""

from __future__ import annotations

import datetime as _dt
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fusion import SceneSeed, write_seeds
from .geodata import (
    BoundingBox,
    CatchmentMask,
    FrontMask,
    Manifest,
    SceneMeta,
    Season,
    Sensor,
    ZoneClass,
    ZoneMask,
    write_bbox,
    write_catchment_mask,
    write_front_mask,
    write_manifest,
    write_zone_mask,
)

__all__ = [
    "Sinusoid",
    "SynthParams",
    "SynthScene",
    "Vertical",
    "generate_dataset",
    "generate_scene",
    "parse_boundary",
    "write_dataset",
]

_RING = 4  # rock frame thickness
_NA_SIDE = 16  # NA corner block side
_CATCHMENT_GAP = 20  # px between catchment edge and the boundary


@dataclass(frozen=True)
class Vertical:
    pass


@dataclass(frozen=True)
class Sinusoid:
    amplitude_px: float
    period_px: float

    def __post_init__(self):
        if not (self.period_px > 0):
            raise ValueError(f"period must be > 0, got {self.period_px}")
        if self.amplitude_px < 0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude_px}")
        # keep the boundary single-stepped row to row so the front stays
        # one 8-connected chain
        slope = self.amplitude_px * 2.0 * math.pi / self.period_px
        if slope > 1.0:
            raise ValueError(
                f"sinusoid slope {slope:.2f} px/row exceeds 1; increase the period"
            )


def parse_boundary(text: str):
    """CLI syntax: "vertical" or "sinusoid:AMPLITUDE:PERIOD"."""
    t = text.strip().lower()
    if t == "vertical":
        return Vertical()
    if t.startswith("sinusoid:"):
        parts = t.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected sinusoid:AMPLITUDE:PERIOD, got {text!r}")
        return Sinusoid(float(parts[1]), float(parts[2]))
    raise ValueError(f"unknown boundary {text!r}; expected vertical or sinusoid:A:P")


@dataclass(frozen=True)
class SynthParams:
    seed: int = 42
    size: int = 256
    boundary: Vertical | Sinusoid = Vertical()
    rock_rows: int = 12
    na_corner: bool = True
    resolution_m: float = 10.0
    shift_px: int = 0

    def __post_init__(self):
        if self.size < 64:
            raise ValueError(f"size must be >= 64, got {self.size}")
        if isinstance(self.boundary, Sinusoid) and self.boundary.amplitude_px >= self.size / 2:
            raise ValueError("amplitude must be below size/2")
        if self.rock_rows < 0:
            raise ValueError("rock_rows must be >= 0")
        if not (self.resolution_m > 0):
            raise ValueError("resolution_m must be positive")


@dataclass
class SynthScene:
    zones: ZoneMask
    front: FrontMask
    bbox: BoundingBox
    catchment: CatchmentMask
    seed: SceneSeed
    meta: SceneMeta


_GLACIERS = ["Alpha", "Bravo", "Charlie"]
_SENSORS = [Sensor.TSX, Sensor.S1, Sensor.ENVISAT, Sensor.ERS]


def _neighbor8_or(mask: np.ndarray) -> np.ndarray:
    """OR over the 8 neighbours — local helper independent of the kernels."""
    h, w = mask.shape
    padded = np.zeros((h + 2, w + 2), dtype=bool)
    padded[1:-1, 1:-1] = mask
    out = np.zeros((h, w), dtype=bool)
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            if dr == 0 and dc == 0:
                continue
            out |= padded[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w]
    return out


def generate_scene(params: SynthParams, index: int) -> SynthScene:
    """Build scene `index`; deterministic in (params.seed, index)."""
    s = params.size
    rng = np.random.default_rng((params.seed, index))
    center = s // 2 + int(rng.integers(-(s // 16), s // 16 + 1))
    phase = float(rng.uniform(0.0, 2.0 * math.pi))

    ocean_top = _RING + params.rock_rows
    ocean_rows = np.arange(ocean_top, s - _RING)
    if len(ocean_rows) < 8:
        raise ValueError("rock_rows leaves too little ocean; reduce it or grow size")
    if isinstance(params.boundary, Vertical):
        b = np.full(len(ocean_rows), center, dtype=np.int64)
    else:
        wave = params.boundary.amplitude_px * np.sin(
            2.0 * math.pi * (ocean_rows - ocean_rows[0]) / params.boundary.period_px + phase
        )
        b = center + np.round(wave).astype(np.int64)
    b = b + params.shift_px
    left_limit = _RING + _NA_SIDE + _CATCHMENT_GAP + 2
    right_limit = s - _RING - 5
    if b.min() < left_limit or b.max() > right_limit:
        raise ValueError(
            f"boundary columns [{b.min()}, {b.max()}] leave the safe interior "
            f"[{left_limit}, {right_limit}]"
        )

    zones = np.full((s, s), ZoneClass.GLACIER.value, dtype=np.uint8)
    zones[:_RING, :] = ZoneClass.ROCK.value
    zones[-_RING:, :] = ZoneClass.ROCK.value
    zones[:, :_RING] = ZoneClass.ROCK.value
    zones[:, -_RING:] = ZoneClass.ROCK.value
    zones[_RING:ocean_top, _RING : s - _RING] = ZoneClass.ROCK.value
    cols = np.arange(s)
    ocean = np.zeros((s, s), dtype=bool)
    ocean[ocean_rows[:, None], cols[None, :]] = (cols[None, :] >= b[:, None]) & (
        cols[None, :] < s - _RING
    )
    zones[ocean] = ZoneClass.OCEAN.value
    if params.na_corner:
        zones[s - _RING - _NA_SIDE : s - _RING, _RING : _RING + _NA_SIDE] = ZoneClass.NA.value

    # independent front derivation: the adjacency definition, applied raw
    glacier = zones == ZoneClass.GLACIER.value
    front = (zones == ZoneClass.OCEAN.value) & _neighbor8_or(glacier)

    # construction walk self-check: one front pixel per ocean row, plus at
    # most two extras where the boundary steps sideways
    per_row = front[ocean_rows].sum(axis=1)
    if (per_row < 1).any() or per_row.sum() > 3 * len(ocean_rows):
        raise AssertionError("synthetic front failed its construction self-check")

    catchment = np.zeros((s, s), dtype=bool)
    catchment[:_RING, :] = True
    catchment[-_RING:, :] = True
    catchment[:, :_RING] = True
    catchment[:, -_RING:] = True
    catchment[_RING:ocean_top, :] = True
    catchment[ocean_rows[:, None], cols[None, :]] |= cols[None, :] <= (b[:, None] - _CATCHMENT_GAP)

    mid = int(ocean_rows[len(ocean_rows) // 2])
    seed = SceneSeed(
        row=s - _RING - 2,
        col=s - _RING - 2,
        sentinel=(mid, int(b[len(ocean_rows) // 2] - _CATCHMENT_GAP // 2)),
    )

    first = _dt.date(2015, 1, 1)
    meta = SceneMeta(
        id=f"scene_{index:03d}",
        glacier=_GLACIERS[index % len(_GLACIERS)],
        sensor=_SENSORS[index % len(_SENSORS)],
        date=first + _dt.timedelta(days=37 * index),
        season=Season.SUMMER if index % 2 == 0 else Season.WINTER,
        resolution_m=params.resolution_m,
    )
    return SynthScene(
        zones=ZoneMask(zones),
        front=FrontMask(front),
        bbox=BoundingBox(0, 0, s - 1, s - 1),
        catchment=CatchmentMask(catchment),
        seed=seed,
        meta=meta,
    )


def generate_dataset(params: SynthParams, n_scenes: int) -> list[SynthScene]:
    if n_scenes < 1:
        raise ValueError(f"need at least 1 scene, got {n_scenes}")
    return [generate_scene(params, i) for i in range(n_scenes)]


def write_dataset(scenes: list[SynthScene], out_dir) -> None:
    """Lay out zones/, fronts/, bboxes/, catchments/, seeds.csv, manifest.csv."""
    out = Path(out_dir)
    for sub in ("zones", "fronts", "bboxes", "catchments"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    seeds: dict[str, SceneSeed] = {}
    entries = {}
    for scene in scenes:
        sid = scene.meta.id
        write_zone_mask(scene.zones, out / "zones" / f"{sid}.png")
        write_front_mask(scene.front, out / "fronts" / f"{sid}.png")
        write_bbox(scene.bbox, out / "bboxes" / f"{sid}.txt")
        write_catchment_mask(scene.catchment, out / "catchments" / f"{sid}.png")
        seeds[sid] = scene.seed
        entries[sid] = scene.meta
    write_seeds(seeds, out / "seeds.csv")
    write_manifest(Manifest(entries), out / "manifest.csv")
