"""Binary 8-bit PGM (P5) reading and writing."""
import numpy as np

from .errors import IngestionError

_WHITESPACE = b" \t\n\r\v\f"


def _tokens(buf, count):
    """Read ``count`` header tokens, skipping ``#`` comments; return tokens and offset."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        if pos >= len(buf):
            raise IngestionError("truncated PGM header")
        if buf[pos] == ord("#"):
            while pos < len(buf) and buf[pos] not in b"\n\r":
                pos += 1
        elif buf[pos] in _WHITESPACE:
            pos += 1
        else:
            start = pos
            while pos < len(buf) and buf[pos] not in _WHITESPACE:
                pos += 1
            tokens.append(buf[start:pos])
    return tokens, pos


def read_pgm(path):
    """Read a binary P5 PGM file into a ``height x width`` uint8 array."""
    try:
        with open(path, "rb") as fh:
            buf = fh.read()
    except OSError as exc:
        raise IngestionError(f"{path}: cannot read ({exc})") from exc
    try:
        (magic, w, h, maxval), pos = _tokens(buf, 4)
        width, height, maxval = int(w), int(h), int(maxval)
    except (IngestionError, ValueError) as exc:
        raise IngestionError(f"{path}: malformed PGM header") from exc
    if magic != b"P5":
        raise IngestionError(f"{path}: not a binary PGM (magic {magic!r})")
    if not 0 < maxval <= 255:
        raise IngestionError(f"{path}: only 8-bit PGM supported (maxval {maxval})")
    if width <= 0 or height <= 0:
        raise IngestionError(f"{path}: invalid size {width}x{height}")
    pos += 1  # single whitespace byte after maxval
    data = buf[pos:pos + width * height]
    if len(data) != width * height:
        raise IngestionError(f"{path}: expected {width * height} pixel bytes, got {len(data)}")
    return np.frombuffer(data, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(path, image):
    """Write a ``height x width`` array of values in [0, 255] as binary P5."""
    image = np.asarray(image)
    if image.ndim != 2:
        raise ValueError("image must be two-dimensional")
    if image.min(initial=0) < 0 or image.max(initial=0) > 255:
        raise ValueError("pixel values must lie in [0, 255]")
    height, width = image.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(image.astype(np.uint8).tobytes())


def resample_nearest(image, width, height):
    """Nearest-neighbour resampling to ``height x width``.

    Destination pixel ``i`` reads source index ``floor((i + 0.5) * src / dst)``.
    """
    src_h, src_w = image.shape
    if (src_h, src_w) == (height, width):
        return image
    rows = np.floor((np.arange(height) + 0.5) * src_h / height).astype(int)
    cols = np.floor((np.arange(width) + 0.5) * src_w / width).astype(int)
    return image[np.ix_(np.minimum(rows, src_h - 1), np.minimum(cols, src_w - 1))]
