"""Fixed-length video segmentation and per-segment apex frames.

Videos are cut into consecutive non-overlapping windows of ``t`` frames
(stride = t). A trailing partial window is kept only when it spans at
least MIN_TAIL_FRAMES frames; shorter tails carry no temporal content
worth averaging. Each segment gets its own Gaussian weighting centered on
the segment's local central frame.
"""

from __future__ import annotations

import dataclasses
from typing import Sequence

import numpy as np

from .apex import central_index, gaussian_weights, normalize_weights, weighted_frame_sum
from .errors import DataError
from .video import ApexFrame, Frame, VideoTensor

MIN_TAIL_FRAMES = 3


@dataclasses.dataclass(frozen=True)
class Segment:
    """A consecutive frame range of a source video, 1-based inclusive."""

    source_id: str
    start: int
    end: int
    frames: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.start <= self.end:
            raise DataError(f"invalid segment bounds ({self.start}, {self.end})")
        if self.frames.shape[0] != self.end - self.start + 1:
            raise DataError(
                f"segment frame count {self.frames.shape[0]} does not match "
                f"bounds ({self.start}, {self.end})"
            )

    @property
    def length(self) -> int:
        return self.end - self.start + 1


@dataclasses.dataclass(frozen=True)
class UnlabeledPool:
    """Apex frames generated from all (video, temporal length, segment)
    combinations, in that nesting order."""

    apexes: tuple[ApexFrame, ...]
    temporal_lengths: tuple[int, ...]
    sigma: float

    def __len__(self) -> int:
        return len(self.apexes)


def split_segments(video: VideoTensor, t: int) -> list[Segment]:
    """Cut ``video`` into windows [1..t], [t+1..2t], ...; keep a trailing
    partial window only when its length is >= MIN_TAIL_FRAMES."""
    if t < 1:
        raise DataError(f"temporal length must be >= 1, got {t}")
    n = video.n_frames
    segments: list[Segment] = []
    start = 1
    while start <= n:
        end = min(start + t - 1, n)
        length = end - start + 1
        if length == t or length >= MIN_TAIL_FRAMES:
            segments.append(
                Segment(
                    source_id=video.id,
                    start=start,
                    end=end,
                    frames=video.frames[start - 1 : end],
                )
            )
        start = end + 1
    return segments


def segment_apex(segment: Segment, sigma: float) -> ApexFrame:
    """Apex frame of one segment: Gaussian weights over the segment's local
    positions 1..length, centered at the segment's own central frame."""
    weights = normalize_weights(
        gaussian_weights(segment.length, central_index(segment.length), sigma)
    )
    pixels = weighted_frame_sum(segment.frames, weights)
    return ApexFrame(
        frame=Frame(pixels),
        source_id=segment.source_id,
        segment_start=segment.start,
        segment_end=segment.end,
        sigma=float(sigma),
    )


def build_unlabeled_pool(
    videos: Sequence[VideoTensor],
    temporal_lengths: Sequence[int] = (50, 80),
    sigma: float = 5.0,
) -> UnlabeledPool:
    """Per-segment apex frames for every video at every temporal length.

    Ordering is (video order, temporal-length order, segment order) and the
    result is a pure function of the inputs; shuffling is the trainer's job.
    """
    if len(videos) == 0:
        raise DataError("at least one video required")
    if len(temporal_lengths) == 0:
        raise DataError("at least one temporal length required")
    apexes: list[ApexFrame] = []
    for video in videos:
        for t in temporal_lengths:
            for segment in split_segments(video, t):
                apexes.append(segment_apex(segment, sigma))
    return UnlabeledPool(
        apexes=tuple(apexes),
        temporal_lengths=tuple(int(t) for t in temporal_lengths),
        sigma=float(sigma),
    )
