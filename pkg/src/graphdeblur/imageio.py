"""Image files: PGM (P5 binary, P2 ASCII) and the lossless GLF1 format.

GLF1 layout: the 4-byte magic ``b"GLF1"``, rows and cols as little-endian
uint32, then ``rows * cols`` little-endian float64 values in row-major
order. PGM intensities are scaled to ``[0, 1]`` by the file's maxval.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

__all__ = ["read_image", "write_image", "read_pgm", "write_pgm", "read_glf", "write_glf"]

GLF_MAGIC = b"GLF1"


def write_glf(path, img):
    img = np.asarray(img, dtype="<f8")
    if img.ndim != 2:
        raise ValueError(f"GLF1 stores 2-D arrays, got shape {img.shape}")
    with open(path, "wb") as fh:
        fh.write(GLF_MAGIC)
        fh.write(struct.pack("<II", *img.shape))
        fh.write(np.ascontiguousarray(img).tobytes())


def read_glf(path):
    data = Path(path).read_bytes()
    if data[:4] != GLF_MAGIC:
        raise OSError(f"{path}: not a GLF1 file")
    rows, cols = struct.unpack("<II", data[4:12])
    expected = 12 + 8 * rows * cols
    if len(data) != expected:
        raise OSError(f"{path}: expected {expected} bytes for {rows}x{cols}, found {len(data)}")
    return np.frombuffer(data, dtype="<f8", offset=12).reshape(rows, cols).astype(np.float64)


def _pgm_tokens(data, count, pos):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens = []
    while len(tokens) < count:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise OSError("truncated PGM header")
        tokens.append(int(data[start:pos]))
    return tokens, pos


def read_pgm(path):
    data = Path(path).read_bytes()
    magic = data[:2]
    if magic not in (b"P5", b"P2"):
        raise OSError(f"{path}: not a PGM file")
    (cols, rows, maxval), pos = _pgm_tokens(data, 3, 2)
    if not 0 < maxval < 65536:
        raise OSError(f"{path}: invalid maxval {maxval}")
    if magic == b"P2":
        values, _ = _pgm_tokens(data, rows * cols, pos)
        img = np.array(values, dtype=np.float64)
    else:
        pos += 1  # single whitespace after maxval
        dtype = np.uint8 if maxval < 256 else np.dtype(">u2")
        size = rows * cols * np.dtype(dtype).itemsize
        if len(data) - pos < size:
            raise OSError(f"{path}: truncated pixel data")
        img = np.frombuffer(data, dtype=dtype, count=rows * cols, offset=pos).astype(np.float64)
    return img.reshape(rows, cols) / maxval


def write_pgm(path, img, binary=True):
    """Quantize an image in ``[0, 1]`` to 8 bits (values are clipped)."""
    img = np.asarray(img, dtype=np.float64)
    q = np.rint(np.clip(img, 0.0, 1.0) * 255).astype(np.uint8)
    rows, cols = q.shape
    with open(path, "wb") as fh:
        if binary:
            fh.write(f"P5\n{cols} {rows}\n255\n".encode())
            fh.write(q.tobytes())
        else:
            fh.write(f"P2\n{cols} {rows}\n255\n".encode())
            for row in q:
                fh.write((" ".join(str(v) for v in row) + "\n").encode())


def read_image(path):
    """Read a PGM or GLF1 file, detected from its magic bytes."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == GLF_MAGIC:
        return read_glf(path)
    if head[:2] in (b"P5", b"P2"):
        return read_pgm(path)
    if path.suffix == ".npy":
        return np.load(path).astype(np.float64)
    raise OSError(f"{path}: unrecognized image format")


def write_image(path, img):
    """Write by extension: ``.pgm`` (8-bit) or anything else as GLF1."""
    if str(path).endswith(".pgm"):
        write_pgm(path, img)
    else:
        write_glf(path, img)
