"""Raster and metadata ingestion.

Zone masks, front masks, catchments (8-bit grayscale PNG), bounding boxes
(four integers in a text file) and the dataset manifest (CSV). All loaders
are pure functions of their file contents and every ``load(write(x)) == x``
round trip is property-tested.
"""

from __future__ import annotations

import csv
import datetime as _dt
import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

__all__ = [
    "DEFAULT_FRONT_THRESHOLD",
    "DEFAULT_ZONE_GRAYS",
    "BoundingBox",
    "CatchmentMask",
    "FrontMask",
    "Manifest",
    "SceneMeta",
    "Season",
    "Sensor",
    "ZoneClass",
    "load_bbox",
    "load_catchment_mask",
    "load_front_mask",
    "load_manifest",
    "load_zone_mask",
    "write_bbox",
    "write_catchment_mask",
    "write_front_mask",
    "write_manifest",
    "write_zone_mask",
]


class ZoneClass(enum.IntEnum):
    """Landscape classes. OCEAN includes ice melange (sea ice + icebergs)."""

    NA = 0
    ROCK = 1
    GLACIER = 2
    OCEAN = 3


# Gray values are a documented convention of this toolkit, not a law of the
# data: real datasets must be checked and the mapping overridden if needed.
DEFAULT_ZONE_GRAYS: dict[int, ZoneClass] = {
    0: ZoneClass.NA,
    64: ZoneClass.ROCK,
    127: ZoneClass.GLACIER,
    254: ZoneClass.OCEAN,
}

DEFAULT_FRONT_THRESHOLD = 128


def _require_2d(a: np.ndarray, what: str) -> np.ndarray:
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"{what} must be a non-empty 2-D grid, got shape {a.shape}")
    return a


@dataclass
class ZoneMask:
    """Per-pixel ZoneClass values, stored as a uint8 grid of enum values."""

    classes: np.ndarray

    def __post_init__(self):
        a = _require_2d(np.asarray(self.classes), "zone mask")
        if not np.isin(a, [z.value for z in ZoneClass]).all():
            raise ValueError("zone mask contains values outside the ZoneClass enum")
        self.classes = a.astype(np.uint8)

    @property
    def height(self) -> int:
        return self.classes.shape[0]

    @property
    def width(self) -> int:
        return self.classes.shape[1]

    def binary(self, zone: ZoneClass) -> np.ndarray:
        return self.classes == zone.value

    def __eq__(self, other):
        if not isinstance(other, ZoneMask):
            return NotImplemented
        return np.array_equal(self.classes, other.classes)


@dataclass
class FrontMask:
    """A set of front pixels carried as a boolean grid (row, col indexed)."""

    grid: np.ndarray

    def __post_init__(self):
        self.grid = _require_2d(np.asarray(self.grid), "front mask").astype(bool)

    @classmethod
    def from_pixels(cls, shape: tuple[int, int], pixels) -> "FrontMask":
        g = np.zeros(shape, dtype=bool)
        for r, c in pixels:
            g[r, c] = True
        return cls(g)

    @property
    def height(self) -> int:
        return self.grid.shape[0]

    @property
    def width(self) -> int:
        return self.grid.shape[1]

    @property
    def coords(self) -> np.ndarray:
        """(N, 2) int array of (row, col), row-major order."""
        return np.argwhere(self.grid)

    @property
    def pixels(self) -> set[tuple[int, int]]:
        return {(int(r), int(c)) for r, c in self.coords}

    @property
    def count(self) -> int:
        return int(self.grid.sum())

    def is_empty(self) -> bool:
        return not self.grid.any()

    def __eq__(self, other):
        if not isinstance(other, FrontMask):
            return NotImplemented
        return np.array_equal(self.grid, other.grid)


@dataclass
class CatchmentMask:
    """Rasterized catchment polygon: True = inside."""

    inside: np.ndarray

    def __post_init__(self):
        self.inside = _require_2d(np.asarray(self.inside), "catchment mask").astype(bool)

    @property
    def height(self) -> int:
        return self.inside.shape[0]

    @property
    def width(self) -> int:
        return self.inside.shape[1]

    def __eq__(self, other):
        if not isinstance(other, CatchmentMask):
            return NotImplemented
        return np.array_equal(self.inside, other.inside)


@dataclass(frozen=True)
class BoundingBox:
    """Inclusive pixel box, origin top-left: x = column, y = row."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def __post_init__(self):
        if self.x_min > self.x_max:
            raise ValueError("x_min exceeds x_max")
        if self.y_min > self.y_max:
            raise ValueError("y_min exceeds y_max")
        if min(self.x_min, self.y_min) < 0:
            raise ValueError("bounding box coordinates must be >= 0")

    def validate_for(self, height: int, width: int) -> "BoundingBox":
        if self.x_max >= width or self.y_max >= height:
            raise ValueError(
                f"bounding box {self} exceeds grid of height {height}, width {width}"
            )
        return self


class Sensor(enum.Enum):
    """SAR sensors; TSX covers the TerraSAR-X / TanDEM-X twin pair."""

    ERS = "ERS"
    ENVISAT = "Envisat"
    RADARSAT = "RADARSAT"
    PALSAR = "PALSAR"
    TSX = "TSX"
    S1 = "S1"


class Season(enum.Enum):
    SUMMER = "summer"
    WINTER = "winter"


@dataclass(frozen=True)
class SceneMeta:
    id: str
    glacier: str
    sensor: Sensor
    date: _dt.date
    season: Season
    resolution_m: float

    def __post_init__(self):
        if not self.id:
            raise ValueError("scene id must be nonempty")
        if not (self.resolution_m > 0):
            raise ValueError(f"resolution_m must be positive, got {self.resolution_m}")


@dataclass
class Manifest:
    entries: dict[str, SceneMeta] = field(default_factory=dict)

    def __post_init__(self):
        for sid, meta in self.entries.items():
            if sid != meta.id:
                raise ValueError(f"manifest key {sid!r} does not match entry id {meta.id!r}")

    @property
    def ids(self) -> list[str]:
        return list(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, scene_id: str) -> SceneMeta:
        try:
            return self.entries[scene_id]
        except KeyError:
            raise KeyError(f"unknown scene id {scene_id!r}") from None


# --------------------------------------------------------------------------
# PNG raster IO


def _load_gray(path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("L"), dtype=np.uint8)


def _save_gray(arr: np.ndarray, path) -> None:
    Image.fromarray(arr.astype(np.uint8), mode="L").save(Path(path), format="PNG")


def load_zone_mask(path, mapping: dict[int, ZoneClass] | None = None) -> ZoneMask:
    """Read an 8-bit grayscale zone raster through a gray->class table."""
    mapping = DEFAULT_ZONE_GRAYS if mapping is None else mapping
    raw = _load_gray(path)
    lut = np.full(256, -1, dtype=np.int16)
    for gray, zone in mapping.items():
        lut[gray] = zone.value
    classes = lut[raw]
    if (classes < 0).any():
        r, c = np.argwhere(classes < 0)[0]
        raise ValueError(f"unknown zone value {raw[r, c]} at ({r}, {c})")
    return ZoneMask(classes.astype(np.uint8))


def write_zone_mask(mask: ZoneMask, path, mapping: dict[int, ZoneClass] | None = None) -> None:
    mapping = DEFAULT_ZONE_GRAYS if mapping is None else mapping
    inverse = np.zeros(len(ZoneClass), dtype=np.uint8)
    for gray, zone in mapping.items():
        inverse[zone.value] = gray
    _save_gray(inverse[mask.classes], path)


def load_front_mask(path, threshold: int = DEFAULT_FRONT_THRESHOLD) -> FrontMask:
    """Front = pixels with gray value >= threshold."""
    return FrontMask(_load_gray(path) >= threshold)


def write_front_mask(mask: FrontMask, path) -> None:
    _save_gray(np.where(mask.grid, 255, 0), path)


def load_catchment_mask(path, threshold: int = DEFAULT_FRONT_THRESHOLD) -> CatchmentMask:
    return CatchmentMask(_load_gray(path) >= threshold)


def write_catchment_mask(mask: CatchmentMask, path) -> None:
    _save_gray(np.where(mask.inside, 255, 0), path)


# --------------------------------------------------------------------------
# Text formats


def load_bbox(path) -> BoundingBox:
    """Parse "x_min y_min x_max y_max" (inclusive, origin top-left)."""
    tokens = Path(path).read_text().split()
    if len(tokens) != 4:
        raise ValueError(f"expected 4 integers, got {len(tokens)}")
    try:
        x_min, y_min, x_max, y_max = (int(t) for t in tokens)
    except ValueError:
        raise ValueError(f"expected 4 integers, got {tokens!r}") from None
    return BoundingBox(x_min, y_min, x_max, y_max)


def write_bbox(box: BoundingBox, path) -> None:
    Path(path).write_text(f"{box.x_min} {box.y_min} {box.x_max} {box.y_max}\n")


MANIFEST_HEADER = ["id", "glacier", "sensor", "date", "season", "resolution_m"]

_SENSOR_BY_TOKEN = {s.value: s for s in Sensor}
_SEASON_BY_TOKEN = {s.value: s for s in Season}


def load_manifest(path) -> Manifest:
    """Read the scene manifest CSV; header must match MANIFEST_HEADER exactly."""
    entries: dict[str, SceneMeta] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != MANIFEST_HEADER:
            raise ValueError(
                f"manifest header must be {','.join(MANIFEST_HEADER)}, got {header}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 6:
                raise ValueError(f"manifest line {lineno}: expected 6 fields, got {len(row)}")
            sid, glacier, sensor_tok, date_tok, season_tok, res_tok = (t.strip() for t in row)
            if sid in entries:
                raise ValueError(f"duplicate id {sid!r}")
            if sensor_tok not in _SENSOR_BY_TOKEN:
                raise ValueError(f"unknown sensor token {sensor_tok!r}")
            if season_tok not in _SEASON_BY_TOKEN:
                raise ValueError(f"unknown season token {season_tok!r}")
            try:
                date = _dt.date.fromisoformat(date_tok)
            except ValueError:
                raise ValueError(f"manifest line {lineno}: invalid ISO date {date_tok!r}") from None
            try:
                res = float(res_tok)
            except ValueError:
                raise ValueError(
                    f"manifest line {lineno}: invalid resolution_m {res_tok!r}"
                ) from None
            entries[sid] = SceneMeta(
                id=sid,
                glacier=glacier,
                sensor=_SENSOR_BY_TOKEN[sensor_tok],
                date=date,
                season=_SEASON_BY_TOKEN[season_tok],
                resolution_m=res,
            )
    return Manifest(entries)


def write_manifest(manifest: Manifest, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_HEADER)
        for meta in manifest.entries.values():
            writer.writerow(
                [
                    meta.id,
                    meta.glacier,
                    meta.sensor.value,
                    meta.date.isoformat(),
                    meta.season.value,
                    format(meta.resolution_m, "g"),
                ]
            )
