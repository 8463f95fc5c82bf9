"""Front extraction and shared post-processing.

Two pipelines produce comparable 1-px front masks:

* :func:`zones_to_front` — from a multi-class zone mask: ocean cleanup
  (hole filling, largest component), then the glacier/ocean edge.
* :func:`refine_front_mask` — from a binary front prediction: skeleton +
  per-component longest path.

Both finish with bounding-box masking and minimum-length filtering. Front
pixels live on the **ocean side** of the glacier/ocean edge: the edge has
two pixel rails, and the ocean rail matches a coastline derived from an
ocean mask.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import morph
from .geodata import BoundingBox, CatchmentMask, FrontMask, ZoneClass, ZoneMask

__all__ = [
    "DistanceMapParams",
    "LengthMetric",
    "LengthPolicy",
    "apply_catchment",
    "dilate_front_label",
    "filter_short_fronts",
    "front_distance_map",
    "front_length",
    "mask_bbox",
    "refine_front_mask",
    "zones_to_front",
]


class LengthMetric(enum.Enum):
    PIXEL_COUNT = "pixelcount"
    GEOMETRIC = "geometric"


@dataclass(frozen=True)
class LengthPolicy:
    """Minimum front length rule: components measuring < min_length_m go.

    PIXEL_COUNT counts pixels x resolution; GEOMETRIC sums path steps
    (1 or sqrt(2) pixels) along the component's longest skeleton path.
    """

    metric: LengthMetric = LengthMetric.PIXEL_COUNT
    min_length_m: float = 750.0

    def __post_init__(self):
        if not math.isfinite(self.min_length_m) or self.min_length_m < 0:
            raise ValueError(f"min_length_m must be finite and >= 0, got {self.min_length_m}")


@dataclass(frozen=True)
class DistanceMapParams:
    """Optional exponential decay exp(-d/gamma) applied to the distance map."""

    decay_gamma: float | None = None

    def __post_init__(self):
        if self.decay_gamma is not None and not (self.decay_gamma > 0):
            raise ValueError(f"decay_gamma must be > 0, got {self.decay_gamma}")


def _check_dims(height: int, width: int, other_h: int, other_w: int, what: str) -> None:
    if (height, width) != (other_h, other_w):
        raise ValueError(
            f"{what} dimensions ({other_h}, {other_w}) do not match grid ({height}, {width})"
        )


_SQUARE3 = morph.StructuringElement.square(3)


def zones_to_front(
    z: ZoneMask,
    bbox: BoundingBox,
    resolution_m: float,
    policy: LengthPolicy = LengthPolicy(),
) -> FrontMask:
    """Extract the calving front from a zone mask.

    Order: ocean binary -> fill holes -> keep the largest 4-connected
    ocean component (ties to the first in row-major order) -> front =
    pixels that are Ocean in the input, survive the cleanup, and touch a
    Glacier pixel 8-adjacently -> bbox mask -> length filter.
    """
    if not (resolution_m > 0):
        raise ValueError(f"resolution_m must be positive, got {resolution_m}")
    bbox.validate_for(z.height, z.width)
    ocean = morph.fill_holes(z.binary(ZoneClass.OCEAN))
    labels, count = morph.connected_components(ocean, connectivity=4)
    if count > 1:
        sizes = np.bincount(labels.ravel(), minlength=count + 1)[1:]
        ocean = labels == (int(sizes.argmax()) + 1)  # argmax → smallest label on ties
    elif count == 0:
        return FrontMask(np.zeros_like(ocean))
    near_glacier = morph.dilate(z.binary(ZoneClass.GLACIER), _SQUARE3)
    # hole filling may swallow non-ocean islands; requiring Ocean in the
    # *input* keeps every front pixel an actual ocean pixel
    front = ocean & z.binary(ZoneClass.OCEAN) & near_glacier
    out = mask_bbox(FrontMask(front), bbox)
    return filter_short_fronts(out, policy, resolution_m)


def refine_front_mask(
    f: FrontMask,
    bbox: BoundingBox,
    resolution_m: float,
    policy: LengthPolicy = LengthPolicy(),
) -> FrontMask:
    """Reduce a (possibly thick) front prediction to 1-px longest paths."""
    if not (resolution_m > 0):
        raise ValueError(f"resolution_m must be positive, got {resolution_m}")
    bbox.validate_for(f.height, f.width)
    labels, count = morph.connected_components(f.grid, connectivity=8)
    out = np.zeros_like(f.grid)
    for i in range(1, count + 1):
        skeleton = morph.skeletonize(labels == i)
        chain = morph.longest_path(skeleton)
        out[chain[:, 0], chain[:, 1]] = True
    masked = mask_bbox(FrontMask(out), bbox)
    return filter_short_fronts(masked, policy, resolution_m)


def mask_bbox(f: FrontMask, bbox: BoundingBox) -> FrontMask:
    """Keep only pixels inside the (inclusive) box."""
    keep = np.zeros_like(f.grid)
    keep[bbox.y_min : bbox.y_max + 1, bbox.x_min : bbox.x_max + 1] = True
    return FrontMask(f.grid & keep)


def _component_length_m(component: np.ndarray, resolution_m: float, metric: LengthMetric) -> float:
    if metric is LengthMetric.PIXEL_COUNT:
        return float(component.sum()) * resolution_m
    chain = morph.longest_path(morph.skeletonize(component))
    return front_length(chain, resolution_m, LengthMetric.GEOMETRIC)


def filter_short_fronts(f: FrontMask, policy: LengthPolicy, resolution_m: float) -> FrontMask:
    """Drop 8-connected components strictly shorter than min_length_m."""
    if not (resolution_m > 0):
        raise ValueError(f"resolution_m must be positive, got {resolution_m}")
    labels, count = morph.connected_components(f.grid, connectivity=8)
    out = f.grid.copy()
    for i in range(1, count + 1):
        component = labels == i
        if _component_length_m(component, resolution_m, policy.metric) < policy.min_length_m:
            out &= ~component
    return FrontMask(out)


def front_length(chain: np.ndarray, resolution_m: float, metric: LengthMetric) -> float:
    """Length of a pixel chain in meters under the chosen metric."""
    chain = np.asarray(chain)
    if chain.ndim != 2 or chain.shape[1] != 2 or len(chain) == 0:
        raise ValueError("empty chain")
    if metric is LengthMetric.PIXEL_COUNT:
        return float(len(chain)) * resolution_m
    steps = np.abs(np.diff(chain, axis=0))
    if len(steps) and (steps.max(axis=1) != 1).any():
        raise ValueError("chain entries must be consecutive 8-neighbours")
    # diagonal steps measure sqrt(2), axis steps 1
    lengths = np.where(steps.sum(axis=1) == 2, math.sqrt(2.0), 1.0)
    return float(lengths.sum()) * resolution_m


def apply_catchment(
    f: FrontMask, catchment: CatchmentMask, buffer_m: float, resolution_m: float
) -> FrontMask:
    """Remove front pixels inside the catchment buffered by buffer_m."""
    if buffer_m < 0:
        raise ValueError(f"buffer_m must be >= 0, got {buffer_m}")
    if not (resolution_m > 0):
        raise ValueError(f"resolution_m must be positive, got {resolution_m}")
    _check_dims(f.height, f.width, catchment.height, catchment.width, "catchment")
    # round-half-up: a 0.5-px radius should not vanish under banker's rounding
    radius = int(buffer_m / resolution_m + 0.5)
    buffered = morph.dilate(catchment.inside, morph.StructuringElement.disk(radius))
    return FrontMask(f.grid & ~buffered)


def dilate_front_label(f: FrontMask, k: int) -> np.ndarray:
    """Thicken a front mask with a k x k square (k odd), e.g. for training labels."""
    if k % 2 == 0:
        raise ValueError(f"kernel size must be odd, got {k}")
    return morph.dilate(f.grid, morph.StructuringElement.square(k))


def front_distance_map(f: FrontMask, params: DistanceMapParams = DistanceMapParams()) -> np.ndarray:
    """Distance (px) to the nearest front pixel, optionally exp(-d/gamma) decayed."""
    if f.is_empty():
        raise ValueError("distance map of empty front")
    d = morph.distance_transform(f.grid)
    if params.decay_gamma is None:
        return d
    return np.exp(-d / params.decay_gamma)
