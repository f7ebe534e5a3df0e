"""Immutable frame/video containers used throughout the package.

Pixel data is stored as ``float32`` in ``[0, 1]``; all weight and model
arithmetic elsewhere runs in ``float64``. Frame indices in provenance
records (segment bounds) are 1-based inclusive, matching the summation
convention of the weighting math; numpy arrays remain 0-based.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import DataError

PIXEL_DTYPE = np.float32


def check_pixels(pixels: np.ndarray, what: str = "pixels") -> np.ndarray:
    """Validate a (height, width, channels) pixel block and return it.

    Enforces: 3-D shape, 1 or 3 channels, non-empty spatial dims, finite
    values, and the [0, 1] value range.
    """
    if pixels.ndim != 3:
        raise DataError(f"{what}: expected (height, width, channels) array, got shape {pixels.shape}")
    h, w, c = pixels.shape
    if c not in (1, 3):
        raise DataError(f"{what}: channels must be 1 or 3, got {c}")
    if h < 1 or w < 1:
        raise DataError(f"{what}: empty spatial dimensions {pixels.shape}")
    if not np.all(np.isfinite(pixels)):
        raise DataError(f"{what}: non-finite values present")
    lo = float(pixels.min())
    hi = float(pixels.max())
    if lo < 0.0 or hi > 1.0:
        raise DataError(f"{what}: values outside [0, 1] (min {lo}, max {hi})")
    return pixels


@dataclasses.dataclass(frozen=True)
class Frame:
    """A single image: (height, width, channels) float32 values in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        pixels = np.asarray(self.pixels, dtype=PIXEL_DTYPE)
        check_pixels(pixels, "Frame")
        pixels.flags.writeable = False
        object.__setattr__(self, "pixels", pixels)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]


@dataclasses.dataclass(frozen=True)
class VideoTensor:
    """An ordered stack of same-shaped frames: (n, height, width, channels)."""

    frames: np.ndarray
    id: str = ""

    def __post_init__(self) -> None:
        frames = np.asarray(self.frames, dtype=PIXEL_DTYPE)
        if frames.ndim != 4:
            raise DataError(f"VideoTensor: expected (n, height, width, channels), got shape {frames.shape}")
        if frames.shape[0] < 1:
            raise DataError("VideoTensor: at least one frame required")
        check_pixels(frames[0], "VideoTensor")
        if not np.all(np.isfinite(frames)):
            raise DataError("VideoTensor: non-finite values present")
        lo = float(frames.min())
        hi = float(frames.max())
        if lo < 0.0 or hi > 1.0:
            raise DataError(f"VideoTensor: values outside [0, 1] (min {lo}, max {hi})")
        frames.flags.writeable = False
        object.__setattr__(self, "frames", frames)

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def height(self) -> int:
        return self.frames.shape[1]

    @property
    def width(self) -> int:
        return self.frames.shape[2]

    @property
    def channels(self) -> int:
        return self.frames.shape[3]

    def frame(self, index: int) -> Frame:
        """Return the frame at 1-based ``index``."""
        if not 1 <= index <= self.n_frames:
            raise DataError(f"frame index {index} outside 1..{self.n_frames}")
        return Frame(self.frames[index - 1])


@dataclasses.dataclass(frozen=True)
class ApexFrame:
    """A weighted-average summary frame plus its provenance.

    ``segment_start``/``segment_end`` are 1-based inclusive indices into the
    source video; the whole video is (1, n_frames).
    """

    frame: Frame
    source_id: str
    segment_start: int
    segment_end: int
    sigma: float

    def __post_init__(self) -> None:
        if not 1 <= self.segment_start <= self.segment_end:
            raise DataError(
                f"ApexFrame: invalid segment bounds ({self.segment_start}, {self.segment_end})"
            )
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise DataError(f"ApexFrame: sigma must be positive, got {self.sigma}")
