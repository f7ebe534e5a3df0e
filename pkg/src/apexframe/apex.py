"""Gaussian temporal weighting and apex-frame computation.

A video's apex frame is the convex combination of its frames under
normalized Gaussian weights centered on the central frame. Weight math
runs in float64 regardless of the float32 pixel storage; the tight
normalization tolerance (sum of weights within 1e-9 of 1) is not reliable
in float32 for long videos.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import DataError
from .video import ApexFrame, Frame, VideoTensor

DEFAULT_SIGMA = 5.0


@dataclasses.dataclass(frozen=True)
class WeightVector:
    """Per-frame weights for positions 1..n.

    ``values[k]`` is the weight of frame ``k + 1``. Raw weights lie in
    (0, 1] (extreme sigmas may underflow to 0); normalized weights sum
    to 1 within 1e-9.
    """

    values: np.ndarray
    center: float
    sigma: float
    normalized: bool = False

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.shape[0]


def central_index(n: int) -> float:
    """Central frame position of an n-frame video: exactly (n + 1) / 2.

    Integer for odd n, half-integer for even n.
    """
    if n < 1:
        raise DataError(f"frame count must be >= 1, got {n}")
    return (n + 1) / 2


def gaussian_weights(n: int, center: float, sigma: float) -> WeightVector:
    """Raw Gaussian weights exp(-(i - center)^2 / (2 sigma^2)) for i = 1..n."""
    if n < 1:
        raise DataError(f"frame count must be >= 1, got {n}")
    if not (math.isfinite(sigma) and sigma > 0):
        raise DataError(f"sigma must be a positive finite real, got {sigma}")
    if not math.isfinite(center):
        raise DataError(f"center must be finite, got {center}")
    positions = np.arange(1, n + 1, dtype=np.float64)
    values = np.exp(-((positions - center) ** 2) / (2.0 * sigma * sigma))
    return WeightVector(values=values, center=float(center), sigma=float(sigma))


def normalize_weights(weights: WeightVector) -> WeightVector:
    """Divide weights by their sum so they form a convex combination."""
    total = float(weights.values.sum())
    if not math.isfinite(total) or total <= 0.0:
        raise DataError(f"weight sum must be positive and finite, got {total}")
    return WeightVector(
        values=weights.values / total,
        center=weights.center,
        sigma=weights.sigma,
        normalized=True,
    )


def weighted_frame_sum(frames: np.ndarray, weights: WeightVector) -> np.ndarray:
    """Per-pixel convex combination of ``frames`` (n, h, w, c) under
    normalized ``weights``; float64 accumulation, float32 result."""
    if not weights.normalized:
        raise DataError("weighted_frame_sum requires normalized weights")
    if frames.shape[0] != len(weights):
        raise DataError(
            f"frame count {frames.shape[0]} does not match weight count {len(weights)}"
        )
    acc = np.tensordot(weights.values, frames.astype(np.float64, copy=False), axes=(0, 0))
    return acc.astype(np.float32)


def apex_frame(video: VideoTensor, sigma: float = DEFAULT_SIGMA) -> ApexFrame:
    """Compute the video's apex frame under Gaussian weights centered on
    the central frame; provenance covers the whole video (1..n)."""
    n = video.n_frames
    weights = normalize_weights(gaussian_weights(n, central_index(n), sigma))
    pixels = weighted_frame_sum(video.frames, weights)
    return ApexFrame(
        frame=Frame(pixels),
        source_id=video.id,
        segment_start=1,
        segment_end=n,
        sigma=float(sigma),
    )
