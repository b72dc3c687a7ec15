"""Grayscale image files: binary PGM (P5, 8 or 16 bit) by hand, PNG via Pillow."""
from __future__ import annotations

from pathlib import Path

import numpy as np


def _pgm_tokens(data: bytes, count: int) -> tuple[list[int], int]:
    # header tokens separated by whitespace, '#' comments to end of line
    tokens: list[int] = []
    i = 0
    while len(tokens) < count:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if data[i : i + 1] == b"#":
            while i < len(data) and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < len(data) and not data[j : j + 1].isspace():
            j += 1
        if j == i:
            raise ValueError("truncated PGM header")
        tokens.append(int(data[i:j]))
        i = j
    return tokens, i + 1


def read_pgm(path) -> tuple[np.ndarray, int]:
    data = Path(path).read_bytes()
    if data[:2] != b"P5":
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    (w, h, maxval), start = _pgm_tokens(data[2:], 3)
    start += 2
    if not 0 < maxval < 65536:
        raise ValueError(f"{path}: invalid maxval {maxval}")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    need = w * h * dtype.itemsize
    body = data[start : start + need]
    if len(body) != need:
        raise ValueError(f"{path}: expected {need} bytes of pixel data, found {len(body)}")
    return np.frombuffer(body, dtype=dtype).reshape(h, w).astype(np.int64), maxval


def write_pgm(path, pixels: np.ndarray, maxval: int = 255) -> None:
    pixels = np.asarray(pixels)
    if pixels.ndim != 2:
        raise ValueError("PGM images are two-dimensional")
    if pixels.min(initial=0) < 0 or pixels.max(initial=0) > maxval:
        raise ValueError(f"pixel values must lie in [0, {maxval}]")
    dtype = ">u2" if maxval > 255 else "u1"
    h, w = pixels.shape
    header = f"P5\n{w} {h}\n{maxval}\n".encode("ascii")
    Path(path).write_bytes(header + pixels.astype(dtype).tobytes())


def read_image(path) -> tuple[np.ndarray, int]:
    """Pixels as int64 and the maxval (255 or 65535 for PNG)."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"{path}: no such file")
    with path.open("rb") as fh:
        magic = fh.read(8)
    if magic[:2] == b"P5":
        return read_pgm(path)
    if magic.startswith(b"\x89PNG"):
        from PIL import Image

        with Image.open(path) as im:
            if im.mode in ("I;16", "I;16B", "I"):
                arr = np.asarray(im, dtype=np.int64)
                return arr, 65535
            if im.mode != "L":
                raise ValueError(f"{path}: expected a grayscale PNG, got mode {im.mode}")
            return np.asarray(im, dtype=np.int64), 255
    raise ValueError(f"{path}: unsupported image format (PGM P5 or PNG expected)")


def write_image(path, pixels: np.ndarray, maxval: int = 255) -> None:
    path = Path(path)
    if path.suffix.lower() == ".png":
        from PIL import Image

        arr = np.asarray(pixels)
        if maxval > 255:
            Image.fromarray(arr.astype(np.uint16)).save(path)
        else:
            Image.fromarray(arr.astype(np.uint8), mode="L").save(path)
        return
    write_pgm(path, pixels, maxval)


def renormalize(values: np.ndarray, maxval: int) -> tuple[np.ndarray, dict]:
    """Affine map onto ``[0, maxval]``; ``value = scale * pixel + offset`` inverts it."""
    lo, hi = float(values.min()), float(values.max())
    if hi - lo <= 1e-12 * max(1.0, abs(hi), abs(lo)):
        # a flat result has no contrast to stretch
        pixels = np.zeros(values.shape, dtype=np.int64)
        return pixels, {"offset": lo, "scale": 0.0, "maxval": maxval}
    scale = (hi - lo) / maxval
    pixels = np.rint((values - lo) / scale).astype(np.int64)
    return np.clip(pixels, 0, maxval), {"offset": lo, "scale": scale, "maxval": maxval}
