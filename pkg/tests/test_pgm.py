import numpy as np
import pytest

from wfda.errors import IngestionError
from wfda.pgm import read_pgm, resample_nearest, write_pgm


def test_round_trip(tmp_path):
    img = np.arange(35, dtype=np.uint8).reshape(5, 7)
    path = str(tmp_path / "a.pgm")
    write_pgm(path, img)
    np.testing.assert_array_equal(read_pgm(path), img)


def test_header_with_comments(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# made by hand\n2 2\n# depth\n255\n\x01\x02\x03\x04")
    np.testing.assert_array_equal(read_pgm(str(path)), [[1, 2], [3, 4]])


@pytest.mark.parametrize("blob", [b"P2\n2 2\n255\n1 2 3 4", b"P5\n2 2\n65535\n" + b"\0" * 8,
                                  b"P5\n2 2\n255\n\x01\x02", b"P5\n2"])
def test_rejects_unsupported_or_truncated(tmp_path, blob):
    path = tmp_path / "bad.pgm"
    path.write_bytes(blob)
    with pytest.raises(IngestionError):
        read_pgm(str(path))


def test_resample_nearest_halves():
    img = np.arange(16, dtype=np.uint8).reshape(4, 4)
    # source index floor((i + 0.5) * 2) -> 1, 3
    np.testing.assert_array_equal(resample_nearest(img, 2, 2), [[5, 7], [13, 15]])
    np.testing.assert_array_equal(resample_nearest(img, 4, 4), img)
