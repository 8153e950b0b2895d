"""Synthetic measurement path: render the particle, threshold, find the blob.

Stands in for the physical camera so the loop can be closed through images:
the particle appears as a dark disk on a light background, position is
recovered by histogram-based thresholding and largest-blob centroid
extraction.  Pixel (0, 0) is the upper-left corner of the frame; workspace
y points up, image rows point down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

BACKGROUND_GRAY = 200
PARTICLE_GRAY = 60
MIN_BLOB_PIXELS = 9  # rejects salt noise at the default sigma


@dataclass(frozen=True)
class CameraModel:
    """Pinhole-free planar camera: resolution, mm/pixel scale, mounting origin.

    `origin` is the workspace point imaged at the centre of pixel (0, 0).
    """

    resolution: tuple[int, int] = (256, 256)  # (width, height) pixels
    scale: float = 0.04  # mm per pixel
    origin: tuple[float, float] = (-5.12, 5.12)
    noise_sigma: float = 5.0  # gray levels

    def __post_init__(self) -> None:
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.resolution[0] < 64 or self.resolution[1] < 64:
            raise ValueError("resolution must be at least 64x64")

    def to_pixel(self, point_mm) -> tuple[float, float]:
        """Workspace mm -> fractional (col, row)."""
        return (
            (point_mm[0] - self.origin[0]) / self.scale,
            (self.origin[1] - point_mm[1]) / self.scale,
        )

    def to_workspace(self, col: float, row: float) -> tuple[float, float]:
        """Fractional (col, row) -> workspace mm."""
        return (self.origin[0] + col * self.scale, self.origin[1] - row * self.scale)


@dataclass(frozen=True)
class GrayFrame:
    """8-bit grayscale frame; pixels stored row-major."""

    pixels: np.ndarray  # (height, width) uint8

    def __post_init__(self) -> None:
        if self.pixels.ndim != 2 or self.pixels.dtype != np.uint8:
            raise ValueError("pixels must be a 2-D uint8 array")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def histogram(self) -> np.ndarray:
        return np.bincount(self.pixels.ravel(), minlength=256)


def render_frame(state, cam: CameraModel, rng: np.random.Generator | None = None) -> GrayFrame:
    """Draw the particle as an anti-aliased dark disk, then add sensor noise.

    A particle outside the field of view simply leaves the frame blank; the
    detector downstream reports absence.
    """
    w, h = cam.resolution
    img = np.full((h, w), float(BACKGROUND_GRAY))
    col, row = cam.to_pixel(state.position)
    r_px = state.diameter / cam.scale / 2.0
    lo_c = max(0, int(math.floor(col - r_px - 2)))
    hi_c = min(w, int(math.ceil(col + r_px + 2)) + 1)
    lo_r = max(0, int(math.floor(row - r_px - 2)))
    hi_r = min(h, int(math.ceil(row + r_px + 2)) + 1)
    if lo_c < hi_c and lo_r < hi_r:
        cols = np.arange(lo_c, hi_c, dtype=float)
        rows = np.arange(lo_r, hi_r, dtype=float)
        dist = np.hypot(cols[None, :] - col, rows[:, None] - row)
        # one-pixel linear coverage ramp at the rim
        alpha = np.clip(r_px + 0.5 - dist, 0.0, 1.0)
        img[lo_r:hi_r, lo_c:hi_c] += alpha * (PARTICLE_GRAY - BACKGROUND_GRAY)
    if cam.noise_sigma > 0:
        if rng is None:
            raise ValueError("noise_sigma > 0 needs an rng")
        img += rng.normal(0.0, cam.noise_sigma, size=img.shape)
    return GrayFrame(pixels=np.clip(np.rint(img), 0, 255).astype(np.uint8))


def otsu_threshold(hist) -> int:
    """Threshold maximising the between-class variance of [0..k] vs [k+1..255].

    Comparisons use exact integer arithmetic on the variance numerators, so
    ties are deterministic and resolve to the smallest maximising level.  A
    single-valued histogram returns that value (degenerate split).
    """
    hist = [int(v) for v in hist]
    if len(hist) != 256:
        raise ValueError("histogram must have 256 bins")
    total = sum(hist)
    if total <= 0:
        raise ValueError("histogram is empty")
    populated = [k for k, v in enumerate(hist) if v]
    if len(populated) == 1:
        return populated[0]
    total_sum = sum(k * v for k, v in enumerate(hist))
    best_k, best_num, best_den = 0, 0, 1
    c0 = s0 = 0
    for k in range(256):
        c0 += hist[k]
        s0 += k * hist[k]
        c1 = total - c0
        if c0 == 0 or c1 == 0:
            continue
        s1 = total_sum - s0
        # sigma_B^2 proportional to (s0*c1 - s1*c0)^2 / (c0*c1)
        num = (s0 * c1 - s1 * c0) ** 2
        den = c0 * c1
        if num * best_den > best_num * den:
            best_k, best_num, best_den = k, num, den
    return best_k


_FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])


def blob_centroid(frame: GrayFrame, threshold: int, cam: CameraModel):
    """Workspace position of the largest dark blob, or None if nothing credible.

    Pixels strictly below the threshold are foreground; the largest
    4-connected component wins; components under MIN_BLOB_PIXELS pixels are
    treated as noise.  The centroid is the unweighted mean of the member
    pixel centres.
    """
    fg = frame.pixels < threshold
    labels, count = ndimage.label(fg, structure=_FOUR_CONNECTED)
    if count == 0:
        return None
    sizes = np.bincount(labels.ravel())
    sizes[0] = 0
    biggest = int(sizes.argmax())
    if sizes[biggest] < MIN_BLOB_PIXELS:
        return None
    rows, cols = np.nonzero(labels == biggest)
    return np.asarray(cam.to_workspace(cols.mean(), rows.mean()))


def locate_particle(frame: GrayFrame, cam: CameraModel):
    """Full measurement: histogram, threshold, largest-blob centroid."""
    return blob_centroid(frame, otsu_threshold(frame.histogram()), cam)


def write_pgm(frame: GrayFrame, file: str | Path) -> None:
    """Export as binary PGM (P5) for eyeballing in any image viewer."""
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    Path(file).write_bytes(header + frame.pixels.tobytes())
