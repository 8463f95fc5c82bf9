"""Multi-annotator aggregation and leave-one-out agreement scoring.

Each annotator's front polyline (raster mask) is turned into an ocean mask
by flood-filling from a per-scene ocean seed, with the front and the
catchment acting as barriers. A pixel-wise majority vote fuses the ocean
masks; the coastline (ocean minus its erosion) becomes the aggregate
front after catchment-buffer removal and minimum-length filtering.

The flood-fill reconstruction is only faithful when front + catchment
actually separate ocean from glacier; a leak is detected by the fill
reaching a glacier-side sentinel pixel and is surfaced as a flag rather
than silently producing a bogus ocean.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels, morph
from .frontops import LengthMetric, LengthPolicy, apply_catchment, filter_short_fronts
from .geodata import CatchmentMask, FrontMask, Manifest
from .metrics import EvalReport, mde, pair_distance_terms

__all__ = [
    "AggregateResult",
    "AnnotatorRow",
    "OceanFill",
    "SceneSeed",
    "VoteParams",
    "aggregate_front",
    "coastline_from_ocean",
    "leave_one_out",
    "load_seeds",
    "majority_vote",
    "ocean_mask_from_front",
    "write_seeds",
]


@dataclass(frozen=True)
class VoteParams:
    """Fusion knobs: vote threshold, coastline erosion element, catchment
    buffer, and the minimum front length."""

    threshold: int | None = None  # None → majority: ceil(n/2) at call time
    erosion_se: morph.StructuringElement = field(
        default_factory=lambda: morph.StructuringElement.square(3)
    )
    buffer_m: float = 120.0
    min_front_m: float = 750.0

    def resolve_threshold(self, n_annotators: int) -> int:
        if self.threshold is None:
            return math.ceil(n_annotators / 2)
        if not (1 <= self.threshold <= n_annotators):
            raise ValueError(
                f"threshold {self.threshold} out of range for {n_annotators} annotators"
            )
        return self.threshold


@dataclass(frozen=True)
class SceneSeed:
    """Ocean flood seed, plus an optional glacier-side leak sentinel."""

    row: int
    col: int
    sentinel: tuple[int, int] | None = None


@dataclass
class OceanFill:
    ocean: np.ndarray
    leaked: bool


def ocean_mask_from_front(
    front: FrontMask,
    catchment: CatchmentMask,
    ocean_seed: tuple[int, int],
    glacier_sentinel: tuple[int, int] | None = None,
) -> OceanFill:
    """Ocean = pixels 4-reachable from the seed around front + catchment."""
    if front.grid.shape != catchment.inside.shape:
        raise ValueError(
            f"front shape {front.grid.shape} does not match catchment {catchment.inside.shape}"
        )
    r, c = int(ocean_seed[0]), int(ocean_seed[1])
    h, w = front.grid.shape
    if not (0 <= r < h and 0 <= c < w):
        raise ValueError(f"seed ({r}, {c}) outside grid")
    barrier = front.grid | catchment.inside
    if barrier[r, c]:
        raise ValueError(f"seed ({r}, {c}) lies on a front or catchment pixel")
    filled = kernels.flood_fill(~barrier, np.array([[r, c]], dtype=np.int64))
    leaked = False
    if glacier_sentinel is not None:
        sr, sc = int(glacier_sentinel[0]), int(glacier_sentinel[1])
        if 0 <= sr < h and 0 <= sc < w:
            leaked = bool(filled[sr, sc])
    return OceanFill(ocean=filled, leaked=leaked)


def majority_vote(oceans: list[np.ndarray], threshold: int) -> np.ndarray:
    """Pixel is ocean when at least `threshold` annotators marked it."""
    if not oceans:
        raise ValueError("no ocean masks to vote over")
    if not (1 <= threshold <= len(oceans)):
        raise ValueError(f"threshold {threshold} out of range for {len(oceans)} masks")
    shape = oceans[0].shape
    for o in oceans[1:]:
        if o.shape != shape:
            raise ValueError("ocean masks must share dimensions")
    votes = np.zeros(shape, dtype=np.int32)
    for o in oceans:
        votes += o.astype(np.int32)
    return votes >= threshold


def coastline_from_ocean(ocean: np.ndarray, se: morph.StructuringElement) -> np.ndarray:
    """ocean AND NOT erode(ocean): the ocean-side rim, 1 px for Square(3)."""
    return ocean & ~morph.erode(ocean, se)


@dataclass
class AggregateResult:
    front: FrontMask
    leaks: list[bool]  # per input annotation, in order


def aggregate_front(
    fronts: list[FrontMask],
    catchment: CatchmentMask,
    seed: SceneSeed,
    params: VoteParams,
    resolution_m: float,
) -> AggregateResult:
    """Fuse one scene's annotations into a single post-processed front."""
    if not fronts:
        raise ValueError("no annotations for scene")
    fills = [
        ocean_mask_from_front(f, catchment, (seed.row, seed.col), seed.sentinel) for f in fronts
    ]
    voted = majority_vote([f.ocean for f in fills], params.resolve_threshold(len(fronts)))
    coast = FrontMask(coastline_from_ocean(voted, params.erosion_se))
    trimmed = apply_catchment(coast, catchment, params.buffer_m, resolution_m)
    policy = LengthPolicy(metric=LengthMetric.PIXEL_COUNT, min_length_m=params.min_front_m)
    final = filter_short_fronts(trimmed, policy, resolution_m)
    return AggregateResult(front=final, leaks=[f.leaked for f in fills])


@dataclass(frozen=True)
class AnnotatorRow:
    annotator: str
    mde_m: float | None
    no_front_count: int
    report: EvalReport


def leave_one_out(
    annotations: dict[str, dict[str, FrontMask]],
    manifest: Manifest,
    catchments: dict[str, CatchmentMask],
    seeds: dict[str, SceneSeed],
    params: VoteParams,
) -> list[AnnotatorRow]:
    """Score each annotator against the aggregate of all the others.

    The held-out annotator's own front runs through the same
    single-annotation pipeline (flood → coastline → catchment → length
    filter) as the aggregate, so both sides carry the identical 1-px
    ocean-side offset and it cancels in the distances. The vote threshold
    for the n−1 remaining annotators defaults to ceil((n−1)/2).

    Returns one row per annotator plus a "Mean" row averaging the
    per-annotator MDEs (None entries skipped).
    """
    names = list(annotations)
    if len(names) < 2:
        raise ValueError("leave-one-out needs at least 2 annotators")
    rows: list[AnnotatorRow] = []
    for held_out in names:
        others = [n for n in names if n != held_out]
        results = []
        for scene_id in manifest.ids:
            seed = seeds[scene_id]
            catchment = catchments[scene_id]
            res = manifest[scene_id].resolution_m
            agg = aggregate_front(
                [annotations[n][scene_id] for n in others], catchment, seed, params, res
            )
            own = aggregate_front(
                [annotations[held_out][scene_id]], catchment, seed, params, res
            )
            if agg.front.is_empty():
                # no reference front to measure against; drop the scene
                # (real datasets should never fuse down to nothing)
                continue
            results.append(pair_distance_terms(agg.front, own.front, res, scene_id))
        report = mde(results)
        rows.append(AnnotatorRow(held_out, report.mde_m, report.no_front_count, report))
    valid = [r.mde_m for r in rows if r.mde_m is not None]
    mean = sum(valid) / len(valid) if valid else None
    mean_no_front = sum(r.no_front_count for r in rows)
    rows.append(
        AnnotatorRow(
            "Mean",
            mean,
            mean_no_front,
            EvalReport(scenes=(), mde_m=mean, no_front_count=mean_no_front),
        )
    )
    return rows


# --------------------------------------------------------------------------
# Seeds CSV

_SEED_HEADER_BASE = ["scene_id", "row", "col"]
_SEED_HEADER_EXT = _SEED_HEADER_BASE + ["glacier_row", "glacier_col"]


def load_seeds(path) -> dict[str, SceneSeed]:
    """Read per-scene flood seeds; 3-column base or 5-column sentinel form."""
    out: dict[str, SceneSeed] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header not in (_SEED_HEADER_BASE, _SEED_HEADER_EXT):
            raise ValueError(
                "seeds header must be scene_id,row,col[,glacier_row,glacier_col], "
                f"got {header}"
            )
        extended = header == _SEED_HEADER_EXT
        for row in reader:
            if not row:
                continue
            sid = row[0].strip()
            if sid in out:
                raise ValueError(f"duplicate scene_id {sid!r} in seeds")
            sentinel = (int(row[3]), int(row[4])) if extended else None
            out[sid] = SceneSeed(int(row[1]), int(row[2]), sentinel)
    return out


def write_seeds(seeds: dict[str, SceneSeed], path) -> None:
    extended = any(s.sentinel is not None for s in seeds.values())
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_SEED_HEADER_EXT if extended else _SEED_HEADER_BASE)
        for sid, s in seeds.items():
            if extended:
                sentinel = s.sentinel if s.sentinel is not None else (s.row, s.col)
                writer.writerow([sid, s.row, s.col, sentinel[0], sentinel[1]])
            else:
                writer.writerow([sid, s.row, s.col])
