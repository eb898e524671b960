"""Binary dataset format.

Layout (all integers little-endian u32 unless noted):

    magic  b"LTG1"
    C                         number of classes
    side                      image side in pixels
    counts[C]                 samples per class
    split_counts[3]           total train / val / test samples
    labels   u8[N]
    splits   u8[N]
    pixels   u8[N*side*side]  round(255 * value)
    sketches bit-packed, row-major, N*side*side bits

Loading rejects a wrong magic outright and any size inconsistency as
corruption; save/load round-trips a dataset exactly.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import CorruptionError, FormatError
from .shapes import ShapeDataset

MAGIC = b"LTG1"


def save_dataset(ds: ShapeDataset, path: str | Path) -> None:
    n = len(ds)
    split_totals = [int(np.sum(ds.splits == s)) for s in (0, 1, 2)]
    header = bytearray()
    header += MAGIC
    header += struct.pack("<II", ds.num_classes, ds.side)
    header += struct.pack(f"<{ds.num_classes}I", *ds.class_counts)
    header += struct.pack("<III", *split_totals)

    pixels_u8 = np.round(ds.pixels * 255.0).astype(np.uint8)
    sketch_bits = np.packbits(ds.sketches.astype(np.uint8).reshape(-1))

    with open(path, "wb") as f:
        f.write(bytes(header))
        f.write(ds.labels.astype(np.uint8).tobytes())
        f.write(ds.splits.astype(np.uint8).tobytes())
        f.write(pixels_u8.tobytes())
        f.write(sketch_bits.tobytes())


def load_dataset(path: str | Path) -> ShapeDataset:
    raw = Path(path).read_bytes()
    if len(raw) < 4 or raw[:4] != MAGIC:
        raise FormatError(f"{path}: bad magic, not a dataset file")
    off = 4

    def take(fmt: str):
        nonlocal off
        size = struct.calcsize(fmt)
        if off + size > len(raw):
            raise CorruptionError(f"{path}: truncated header")
        vals = struct.unpack_from(fmt, raw, off)
        off += size
        return vals

    num_classes, side = take("<II")
    if num_classes == 0 or side == 0:
        raise CorruptionError(f"{path}: degenerate header")
    counts = list(take(f"<{num_classes}I"))
    split_totals = list(take("<III"))
    n = sum(counts)
    if sum(split_totals) != n:
        raise CorruptionError(f"{path}: split totals {split_totals} do not sum to {n}")

    npix = n * side * side
    nsketch = (npix + 7) // 8
    expected = off + n + n + npix + nsketch
    if len(raw) != expected:
        raise CorruptionError(f"{path}: payload is {len(raw)} bytes, expected {expected}")

    labels = np.frombuffer(raw, dtype=np.uint8, count=n, offset=off).astype(np.int64)
    off += n
    splits = np.frombuffer(raw, dtype=np.uint8, count=n, offset=off).copy()
    off += n
    pixels_u8 = np.frombuffer(raw, dtype=np.uint8, count=npix, offset=off)
    off += npix
    sketch_bytes = np.frombuffer(raw, dtype=np.uint8, count=nsketch, offset=off)

    if n and labels.max() >= num_classes:
        raise CorruptionError(f"{path}: label exceeds class count")
    if n and splits.max() > 2:
        raise CorruptionError(f"{path}: invalid split tag")
    file_counts = [int(np.sum(labels == c)) for c in range(num_classes)]
    if file_counts != counts:
        raise CorruptionError(f"{path}: class counts in payload do not match header")

    pixels = pixels_u8.reshape(n, side, side).astype(np.float64) / 255.0
    sketches = np.unpackbits(sketch_bytes, count=npix).reshape(n, side, side)

    return ShapeDataset(side, num_classes, counts, pixels, labels,
                        sketches.astype(np.uint8), splits)
