"""Mean distance error between predicted and ground-truth fronts.

Per scene, the error terms are the two directed sums of nearest-neighbour
Euclidean distances between the truth pixel set P and the prediction pixel
set Q, converted to meters at that scene's resolution. The dataset-level
MDE divides the summed numerators by the summed |P|+|Q| weights — a single
global ratio, *not* the mean of per-scene MDEs. Scenes with an empty
prediction contribute to neither sum; they are tallied separately as the
no-front count.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

from .geodata import FrontMask, Manifest

__all__ = [
    "EvalReport",
    "GroupBy",
    "REPORT_SCHEMA",
    "ScenePairResult",
    "SubsetRow",
    "mde",
    "pair_distance_terms",
    "render_subset_csv",
    "render_subset_markdown",
    "report_from_json",
    "report_to_json",
    "subset_report",
]

REPORT_SCHEMA = "calfront-report/1"


@dataclass(frozen=True)
class ScenePairResult:
    """One scene's contribution to the global MDE.

    numerator_m and weight are None exactly when the prediction was empty
    (the scene is excluded from aggregation and counted as no-front).
    """

    id: str
    numerator_m: float | None
    weight: int | None
    predicted_empty: bool
    truth_px: int
    pred_px: int

    @property
    def mde_m(self) -> float | None:
        if self.predicted_empty:
            return None
        return self.numerator_m / self.weight

    def __post_init__(self):
        if self.predicted_empty:
            if self.numerator_m is not None or self.weight is not None:
                raise ValueError("empty-prediction scenes carry no numerator/weight")
        else:
            if self.numerator_m is None or self.weight is None:
                raise ValueError("non-empty scenes need numerator_m and weight")
            if self.weight != self.truth_px + self.pred_px:
                raise ValueError("weight must equal truth_px + pred_px")


@dataclass(frozen=True)
class EvalReport:
    scenes: tuple[ScenePairResult, ...]
    mde_m: float | None
    no_front_count: int


def pair_distance_terms(
    truth: FrontMask, pred: FrontMask, resolution_m: float, scene_id: str = ""
) -> ScenePairResult:
    """Directed nearest-distance sums for one truth/prediction pair.

    Computed with one distance transform per direction, sampled at the
    opposing set's pixels — O(N) against the brute-force O(|P|·|Q|) scan
    the tests compare against.
    """
    if truth.is_empty():
        raise ValueError("ground truth front missing")
    if not (resolution_m > 0):
        raise ValueError(f"resolution_m must be positive, got {resolution_m}")
    if truth.grid.shape != pred.grid.shape:
        raise ValueError(
            f"truth shape {truth.grid.shape} does not match prediction shape {pred.grid.shape}"
        )
    truth_px = truth.count
    if pred.is_empty():
        return ScenePairResult(scene_id, None, None, True, truth_px, 0)
    from . import morph  # local import keeps module import light

    to_pred = morph.distance_transform(pred.grid)
    to_truth = morph.distance_transform(truth.grid)
    tp = truth.coords
    pp = pred.coords
    numerator_px = float(to_pred[tp[:, 0], tp[:, 1]].sum() + to_truth[pp[:, 0], pp[:, 1]].sum())
    pred_px = pred.count
    return ScenePairResult(
        scene_id,
        numerator_px * resolution_m,
        truth_px + pred_px,
        False,
        truth_px,
        pred_px,
    )


def mde(results) -> EvalReport:
    """Aggregate scene results into the globally normalized report."""
    scenes = tuple(results)
    numerator = 0.0
    weight = 0
    no_front = 0
    for s in scenes:
        if s.predicted_empty:
            no_front += 1
        else:
            numerator += s.numerator_m
            weight += s.weight
    value = numerator / weight if weight > 0 else None
    return EvalReport(scenes=scenes, mde_m=value, no_front_count=no_front)


class GroupBy(enum.Enum):
    ALL = "all"
    SEASON = "season"
    GLACIER = "glacier"
    SENSOR = "sensor"
    RESOLUTION = "resolution"


@dataclass(frozen=True)
class SubsetRow:
    group: str
    mde_m: float | None
    no_front_count: int
    scenes: int


def _group_key(meta, group_by: GroupBy) -> str:
    if group_by is GroupBy.ALL:
        return "all"
    if group_by is GroupBy.SEASON:
        return meta.season.value
    if group_by is GroupBy.GLACIER:
        return meta.glacier
    if group_by is GroupBy.SENSOR:
        return meta.sensor.value
    return format(meta.resolution_m, "g")


def _group_order(keys, group_by: GroupBy) -> list[str]:
    if group_by is GroupBy.SEASON:
        order = ["summer", "winter"]
        return [k for k in order if k in keys] + sorted(k for k in keys if k not in order)
    if group_by is GroupBy.RESOLUTION:
        return sorted(keys, key=float, reverse=True)  # coarsest first
    return sorted(keys)


def subset_report(report: EvalReport, manifest: Manifest, group_by: GroupBy) -> list[SubsetRow]:
    """Recompute the global ratio within each manifest-defined group."""
    buckets: dict[str, list[ScenePairResult]] = {}
    for s in report.scenes:
        meta = manifest[s.id]  # raises on unknown scene id
        buckets.setdefault(_group_key(meta, group_by), []).append(s)
    rows = []
    for key in _group_order(buckets, group_by):
        sub = mde(buckets[key])
        rows.append(SubsetRow(key, sub.mde_m, sub.no_front_count, len(buckets[key])))
    return rows


# --------------------------------------------------------------------------
# Serialization


def report_to_json(report: EvalReport) -> str:
    doc = {
        "schema": REPORT_SCHEMA,
        "scenes": [
            {
                "id": s.id,
                "mde_m": s.mde_m,
                "truth_px": s.truth_px,
                "pred_px": s.pred_px,
            }
            for s in report.scenes
        ],
        "mde_m": report.mde_m,
        "no_front_count": report.no_front_count,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def report_from_json(text: str) -> EvalReport:
    """Rebuild a report from JSON.

    Per-scene numerators are reconstructed as mde_m * (truth_px + pred_px);
    exact up to float rounding, which is all subset recomputation needs.
    """
    doc = json.loads(text)
    if doc.get("schema") != REPORT_SCHEMA:
        raise ValueError(f"unsupported report schema {doc.get('schema')!r}")
    scenes = []
    for entry in doc["scenes"]:
        empty = entry["mde_m"] is None
        weight = None if empty else entry["truth_px"] + entry["pred_px"]
        numerator = None if empty else entry["mde_m"] * weight
        scenes.append(
            ScenePairResult(
                id=entry["id"],
                numerator_m=numerator,
                weight=weight,
                predicted_empty=empty,
                truth_px=entry["truth_px"],
                pred_px=entry["pred_px"],
            )
        )
    rebuilt = mde(scenes)
    return EvalReport(
        scenes=rebuilt.scenes,
        mde_m=doc["mde_m"],
        no_front_count=rebuilt.no_front_count,
    )


def _fmt_mde(value: float | None) -> str:
    # "/" marks groups where every prediction was empty, mirroring the
    # table convention for "no front predicted anywhere"
    return "/" if value is None else format(value, ".6g")


def render_subset_csv(rows: list[SubsetRow], group_by: GroupBy) -> str:
    lines = [f"{group_by.value},mde_m,no_front_count,scenes"]
    for row in rows:
        lines.append(f"{row.group},{_fmt_mde(row.mde_m)},{row.no_front_count},{row.scenes}")
    return "\n".join(lines) + "\n"


def render_subset_markdown(rows: list[SubsetRow], group_by: GroupBy) -> str:
    header = [group_by.value, "mde_m", "no_front_count", "scenes"]
    body = [[r.group, _fmt_mde(r.mde_m), str(r.no_front_count), str(r.scenes)] for r in rows]
    widths = [max(len(header[i]), *(len(b[i]) for b in body)) if body else len(header[i]) for i in range(4)]
    def line(cells):
        return "| " + " | ".join(c.ljust(widths[i]) for i, c in enumerate(cells)) + " |"
    rule = "|" + "|".join("-" * (w + 2) for w in widths) + "|"
    return "\n".join([line(header), rule] + [line(b) for b in body]) + "\n"
