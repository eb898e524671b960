"""Synthesizer checkpoint format.

Layout: magic "LTCK", u32 version, 32-byte config hash, schedule table
(u32 T then T f64 betas), model dims (C, image_dim, embed_dim, width1,
width2), training metadata (u32 epochs, f64 final loss, f64 sketch
weight), the named parameter payload as little-endian f64, and a CRC32
footer over everything before it.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from .denoiser import DenoiserModel
from .errors import CorruptionError, FormatError, ModelError
from .schedule import NoiseSchedule

MAGIC = b"LTCK"
VERSION = 1


def save_checkpoint(model: DenoiserModel, schedule: NoiseSchedule, path: str | Path,
                    config_hash: bytes = b"\x00" * 32, epochs_trained: int = 0,
                    final_loss: float = 0.0, lambda_sketch: float = 0.0) -> None:
    if len(config_hash) != 32:
        raise ModelError("config hash must be 32 bytes")
    out = bytearray()
    out += MAGIC
    out += struct.pack("<I", VERSION)
    out += config_hash
    out += struct.pack("<I", schedule.T)
    out += schedule.betas.astype("<f8").tobytes()
    out += struct.pack("<IIIII", model.num_classes, model.image_dim,
                       model.embed_dim, model.widths[0], model.widths[1])
    out += struct.pack("<Idd", epochs_trained, final_loss, lambda_sketch)
    out += struct.pack("<I", len(model.params))
    for name in sorted(model.params):
        arr = model.params[name]
        enc = name.encode()
        out += struct.pack("<H", len(enc)) + enc
        out += struct.pack("<II", arr.shape[0], arr.shape[1])
        out += arr.astype("<f8").tobytes()
    out += struct.pack("<I", zlib.crc32(bytes(out)) & 0xFFFFFFFF)
    Path(path).write_bytes(bytes(out))


def load_checkpoint(path: str | Path) -> tuple[DenoiserModel, NoiseSchedule, dict]:
    raw = Path(path).read_bytes()
    if len(raw) < 8 or raw[:4] != MAGIC:
        raise FormatError(f"{path}: bad magic, not a checkpoint")
    if len(raw) < 4 + 4 + 32 + 4 + 4:
        raise CorruptionError(f"{path}: truncated checkpoint")
    (stored_crc,) = struct.unpack_from("<I", raw, len(raw) - 4)
    if zlib.crc32(raw[:-4]) & 0xFFFFFFFF != stored_crc:
        raise CorruptionError(f"{path}: checksum mismatch")

    off = 4
    (version,) = struct.unpack_from("<I", raw, off)
    off += 4
    if version != VERSION:
        raise FormatError(f"{path}: unsupported checkpoint version {version}")
    config_hash = raw[off:off + 32]
    off += 32
    (steps,) = struct.unpack_from("<I", raw, off)
    off += 4
    betas = np.frombuffer(raw, dtype="<f8", count=steps, offset=off).copy()
    off += steps * 8
    num_classes, image_dim, embed_dim, w1, w2 = struct.unpack_from("<IIIII", raw, off)
    off += 20
    epochs_trained, final_loss, lambda_sketch = struct.unpack_from("<Idd", raw, off)
    off += 20
    (n_params,) = struct.unpack_from("<I", raw, off)
    off += 4
    params: dict[str, np.ndarray] = {}
    for _ in range(n_params):
        (name_len,) = struct.unpack_from("<H", raw, off)
        off += 2
        name = raw[off:off + name_len].decode()
        off += name_len
        rows, cols = struct.unpack_from("<II", raw, off)
        off += 8
        count = rows * cols
        arr = np.frombuffer(raw, dtype="<f8", count=count, offset=off).copy().reshape(rows, cols)
        off += count * 8
        params[name] = arr
    if off != len(raw) - 4:
        raise CorruptionError(f"{path}: payload size mismatch")

    model = DenoiserModel(steps, num_classes, image_dim, embed_dim, (w1, w2), params)
    for key in ("t_embed", "c_embed", "w_in", "w_eps", "w_sk1"):
        if key not in params:
            raise ModelError(f"{path}: checkpoint missing parameter {key!r}")
    if any(not np.all(np.isfinite(v)) for v in params.values()):
        raise ModelError(f"{path}: checkpoint contains non-finite parameters")
    meta = {"config_hash": config_hash, "epochs_trained": epochs_trained,
            "final_loss": final_loss, "lambda_sketch": lambda_sketch}
    return model, NoiseSchedule(betas), meta
