"""Reference paths: canonical shapes, letter strokes, resampling, JSON files."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

SAMPLE_SPACING_MM = 0.05

DATA_DIR = Path(__file__).parent / "data" / "paths"


class PathKind(str, Enum):
    LINE = "line"
    SQUARE = "square"
    CIRCLE = "circle"
    POLYLINE = "polyline"


@dataclass(frozen=True)
class ReferencePath:
    """A geometric reference sampled at (close to) uniform spacing."""

    kind: PathKind
    samples: np.ndarray  # (N, 2) mm
    params: dict = field(default_factory=dict)

    @property
    def spacing(self) -> float:
        seg = np.diff(self.samples, axis=0)
        return float(np.hypot(seg[:, 0], seg[:, 1]).mean())

    @property
    def length(self) -> float:
        seg = np.diff(self.samples, axis=0)
        return float(np.hypot(seg[:, 0], seg[:, 1]).sum())


def resample_vertices(points: Sequence[Sequence[float]], spacing: float = SAMPLE_SPACING_MM) -> np.ndarray:
    """Resample a polyline segment by segment, keeping every vertex.

    Each segment gets its own near-`spacing` subdivision, so sharp corners
    and retraced strokes stay sample-aligned and consecutive samples never
    collapse onto short chords across a turn.  Intended for hand-authored
    vertex lists; use resample_polyline for dense freehand strokes.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ValueError("polyline needs at least two 2-D points")
    out = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        length = float(np.hypot(*(b - a)))
        if length < 1e-12:
            continue
        n = max(1, round(length / spacing))
        for k in range(1, n + 1):
            out.append(a + (b - a) * (k / n))
    if len(out) < 2:
        raise ValueError("polyline has zero length")
    return np.asarray(out)


def resample_polyline(points: Sequence[Sequence[float]], spacing: float = SAMPLE_SPACING_MM) -> np.ndarray:
    """Uniformly resample a polyline by arc length.

    The actual spacing is total_length / round(total_length / spacing) so
    the samples land exactly on both endpoints.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ValueError("polyline needs at least two 2-D points")
    seg = np.diff(pts, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    keep = seg_len > 1e-12
    if not keep.all():  # drop zero-length segments to keep arc positions strict
        pts = np.concatenate([pts[:1], pts[1:][keep]])
        seg = np.diff(pts, axis=0)
        seg_len = np.hypot(seg[:, 0], seg[:, 1])
    total = float(seg_len.sum())
    if total <= 0:
        raise ValueError("polyline has zero length")
    n = max(1, round(total / spacing))
    arc = np.concatenate(([0.0], np.cumsum(seg_len)))
    targets = np.linspace(0.0, total, n + 1)
    idx = np.clip(np.searchsorted(arc, targets, side="right") - 1, 0, len(seg_len) - 1)
    frac = (targets - arc[idx]) / seg_len[idx]
    samples = pts[idx] + frac[:, None] * seg[idx]
    samples[-1] = pts[-1]
    return samples


def _check_fits(samples: np.ndarray, workspace_radius: float) -> None:
    r = float(np.hypot(samples[:, 0], samples[:, 1]).max())
    if r > workspace_radius:
        raise ValueError(f"path reaches {r:.2f} mm, beyond the {workspace_radius} mm workspace")


def make_path(
    kind: PathKind | str,
    *,
    length: float = 4.0,
    side: float = 3.0,
    radius: float = 1.5,
    center: tuple[float, float] = (0.0, 0.0),
    points: Sequence[Sequence[float]] | None = None,
    spacing: float = SAMPLE_SPACING_MM,
    workspace_radius: float = 4.0,
) -> ReferencePath:
    """Construct one of the canonical reference paths.

    line: `length` mm centred on `center`, left to right.
    square: closed, `side` mm, counter-clockwise from the lower-left corner.
    circle: closed, `radius` mm, counter-clockwise from the +x point.
    polyline: resampled from explicit `points`.
    """
    kind = PathKind(kind)
    cx, cy = center
    if kind is PathKind.LINE:
        ends = [(cx - length / 2.0, cy), (cx + length / 2.0, cy)]
        samples = resample_vertices(ends, spacing)
        params = {"length_mm": length, "center": [cx, cy]}
    elif kind is PathKind.SQUARE:
        h = side / 2.0
        corners = [
            (cx - h, cy - h),
            (cx + h, cy - h),
            (cx + h, cy + h),
            (cx - h, cy + h),
            (cx - h, cy - h),
        ]
        samples = resample_vertices(corners, spacing)
        params = {"side_mm": side, "center": [cx, cy]}
    elif kind is PathKind.CIRCLE:
        n = max(8, round(2.0 * math.pi * radius / spacing))
        theta = np.linspace(0.0, 2.0 * math.pi, n + 1)
        samples = np.column_stack((cx + radius * np.cos(theta), cy + radius * np.sin(theta)))
        samples[-1] = samples[0]
        params = {"radius_mm": radius, "center": [cx, cy]}
    else:
        if points is None:
            raise ValueError("polyline path needs explicit points")
        samples = resample_vertices(points, spacing)
        params = {"n_points": len(points)}
    _check_fits(samples, workspace_radius)
    return ReferencePath(kind=kind, samples=samples, params=params)


# Single-stroke letter skeletons for the letter-writing demo, sized to sit
# well inside the 4 mm workspace radius.
_LETTER_STROKES: dict[str, list[tuple[float, float]]] = {
    "aalto_a1": [(-1.0, -1.5), (0.0, 1.5), (1.0, -1.5), (0.5, 0.0), (-0.5, 0.0)],
    "aalto_a2": [(-1.0, -1.5), (0.0, 1.5), (1.0, -1.5), (0.5, 0.0), (-0.5, 0.0)],
    "aalto_l": [(-0.75, 1.5), (-0.75, -1.5), (0.75, -1.5)],
    "aalto_t": [(-1.0, 1.5), (1.0, 1.5), (0.0, 1.5), (0.0, -1.5)],
}


def preset_path(name: str) -> ReferencePath:
    """One of the shared presets: line, square, circle or an aalto_* letter."""
    if name == "line":
        return make_path(PathKind.LINE)
    if name == "square":
        return make_path(PathKind.SQUARE)
    if name == "circle":
        return make_path(PathKind.CIRCLE)
    if name == "aalto_o":
        return make_path(PathKind.CIRCLE, radius=1.25)
    if name in _LETTER_STROKES:
        return make_path(PathKind.POLYLINE, points=_LETTER_STROKES[name])
    raise KeyError(f"unknown preset path {name!r}")


PRESET_NAMES = ("line", "square", "circle", "aalto_a1", "aalto_a2", "aalto_l", "aalto_t", "aalto_o")


def path_to_dict(path: ReferencePath) -> dict:
    return {
        "kind": path.kind.value,
        "params": path.params,
        "spacing_mm": SAMPLE_SPACING_MM,
        "points_mm": [[float(x), float(y)] for x, y in path.samples],
    }


def path_from_dict(data: dict, workspace_radius: float = 4.0) -> ReferencePath:
    samples = np.asarray(data["points_mm"], dtype=float)
    _check_fits(samples, workspace_radius)
    return ReferencePath(
        kind=PathKind(data.get("kind", "polyline")),
        samples=samples,
        params=dict(data.get("params", {})),
    )


def dump_path(path: ReferencePath, file: str | Path) -> None:
    """Write the canonical JSON form (compact, newline-terminated)."""
    Path(file).write_text(json.dumps(path_to_dict(path), separators=(",", ":")) + "\n")


def load_path(file: str | Path, workspace_radius: float = 4.0) -> ReferencePath:
    return path_from_dict(json.loads(Path(file).read_text()), workspace_radius)


def write_preset_files(directory: str | Path = DATA_DIR) -> list[Path]:
    """(Re)generate the shared preset path files; returns the written paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in PRESET_NAMES:
        target = directory / f"{name}.json"
        dump_path(preset_path(name), target)
        written.append(target)
    return written
