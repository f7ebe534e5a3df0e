"""Bit-exact, dependency-free file formats.

Video container (``.afv``)
    magic ``AFV1``, then four little-endian uint32 fields
    (num_frames, height, width, channels), then the pixel payload as
    frame-major, row-major little-endian float32. File length must equal
    ``20 + 4 * num_frames * height * width * channels`` bytes exactly.

Frame previews
    binary PGM (``P5``) for grayscale, binary PPM (``P6``) for 3-channel,
    maxval 255, with pixel value ``v`` mapped to ``round(v * 255)``
    (half-up).

Dataset manifests
    UTF-8 text, one entry per line: ``path,label,split,domain_tag`` with
    ``label`` in {live, spoof, unlabeled} and ``split`` in
    {train, val, test}. Relative paths resolve against the manifest's
    directory. Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import dataclasses
import struct
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError
from .video import Frame, VideoTensor

VIDEO_MAGIC = b"AFV1"
_HEADER = struct.Struct("<4sIIII")

LABELS = ("live", "spoof", "unlabeled")
SPLITS = ("train", "val", "test")


def write_video(video: VideoTensor, path: str | Path) -> None:
    """Serialize ``video`` to ``path`` in the AFV1 container format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = _HEADER.pack(
        VIDEO_MAGIC, video.n_frames, video.height, video.width, video.channels
    )
    payload = np.ascontiguousarray(video.frames, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_video(path: str | Path) -> VideoTensor:
    """Read an AFV1 file back into a :class:`VideoTensor`.

    The tensor's ``id`` is the file's stem. Rejects bad magic, impossible
    dimensions, payloads whose byte length does not match the header, and
    pixel values outside [0, 1].
    """
    path = Path(path)
    data = path.read_bytes()
    if len(data) < _HEADER.size:
        raise DataError(f"{path}: file shorter than the {_HEADER.size}-byte header")
    magic, n, h, w, c = _HEADER.unpack_from(data)
    if magic != VIDEO_MAGIC:
        raise DataError(f"{path}: bad magic {magic!r}, expected {VIDEO_MAGIC!r}")
    if n < 1:
        raise DataError(f"{path}: zero frames")
    if h < 1 or w < 1 or c not in (1, 3):
        raise DataError(f"{path}: invalid dimensions ({h}, {w}, {c})")
    expected = _HEADER.size + 4 * n * h * w * c
    if len(data) != expected:
        raise DataError(
            f"{path}: payload length mismatch (file {len(data)} bytes, header implies {expected})"
        )
    flat = np.frombuffer(data, dtype="<f4", offset=_HEADER.size)
    frames = flat.reshape(n, h, w, c)
    return VideoTensor(frames=frames, id=path.stem)


def write_frame_image(frame: Frame, path: str | Path) -> None:
    """Write ``frame`` as binary PGM (1 channel) or PPM (3 channels)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fmt = "P5" if frame.channels == 1 else "P6"
    header = f"{fmt}\n{frame.width} {frame.height}\n255\n".encode("ascii")
    # round half up, per the v -> round(v*255) mapping
    bytes8 = np.floor(frame.pixels.astype(np.float64) * 255.0 + 0.5)
    bytes8 = np.clip(bytes8, 0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(bytes8.tobytes())


@dataclasses.dataclass(frozen=True)
class ManifestEntry:
    video_path: Path
    label: str
    split: str
    domain_tag: str


@dataclasses.dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]

    def select(self, split: str | None = None, labels: Iterable[str] | None = None,
               domain: str | None = None) -> tuple[ManifestEntry, ...]:
        """Filter entries by split, label set, and/or domain tag."""
        wanted = None if labels is None else set(labels)
        out = []
        for e in self.entries:
            if split is not None and e.split != split:
                continue
            if wanted is not None and e.label not in wanted:
                continue
            if domain is not None and e.domain_tag != domain:
                continue
            out.append(e)
        return tuple(out)

    @property
    def domains(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for e in self.entries:
            seen.setdefault(e.domain_tag, None)
        return tuple(seen)


def load_manifest(path: str | Path) -> DatasetManifest:
    """Parse a manifest file, validating labels, splits, uniqueness, and
    the existence of every referenced video file."""
    path = Path(path)
    base = path.parent
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise DataError(f"{path}:{lineno}: expected 'path,label,split,domain_tag', got {raw!r}")
        rel, label, split, domain = (p.strip() for p in parts)
        if label not in LABELS:
            raise DataError(f"{path}:{lineno}: unknown label {label!r}")
        if split not in SPLITS:
            raise DataError(f"{path}:{lineno}: unknown split {split!r}")
        if rel in seen:
            raise DataError(f"{path}:{lineno}: duplicate path {rel!r}")
        seen.add(rel)
        video_path = Path(rel)
        if not video_path.is_absolute():
            video_path = base / video_path
        if not video_path.is_file():
            raise DataError(f"{path}:{lineno}: referenced file does not exist: {video_path}")
        entries.append(ManifestEntry(video_path, label, split, domain))
    return DatasetManifest(entries=tuple(entries))


def save_manifest(rows: Sequence[tuple[str, str, str, str]], path: str | Path) -> None:
    """Write manifest rows (path, label, split, domain_tag) as text."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for rel, label, split, domain in rows:
        if label not in LABELS:
            raise DataError(f"unknown label {label!r}")
        if split not in SPLITS:
            raise DataError(f"unknown split {split!r}")
        lines.append(f"{rel},{label},{split},{domain}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
