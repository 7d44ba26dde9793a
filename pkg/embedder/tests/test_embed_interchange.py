"""Interchange file writing and reading: round trips and validation."""

import numpy as np
import pytest

from pvembed import InterchangeError, read_vectors, write_vectors


def test_round_trip_bit_exact(tmp_path):
    ids = ["a", "b", "c"]
    values = np.array([[1.5, -2.25e-8], [0.1, 3.0], [7e300, -0.0]])
    path = str(tmp_path / "v.txt")
    write_vectors(path, ids, values)
    got_ids, got_values = read_vectors(path)
    assert got_ids == ids
    assert np.array_equal(got_values, values)
    path2 = str(tmp_path / "v2.txt")
    write_vectors(path2, got_ids, got_values)
    assert open(path, "rb").read() == open(path2, "rb").read()


def test_header_written(tmp_path):
    path = str(tmp_path / "v.txt")
    write_vectors(path, ["x"], np.ones((1, 4)))
    assert open(path).readline() == "1 4\n"


@pytest.mark.parametrize(
    "ids, values, message",
    [
        (["a b"], np.ones((1, 2)), "not representable"),
        ([""], np.ones((1, 2)), "not representable"),
        (["a"], np.ones((1, 0)), "empty"),
        ([], np.ones((0, 2)), "empty"),
        (["a", "b"], np.ones((1, 2)), "ids"),
        (["a"], np.array([[np.nan, 1.0]]), "non-finite"),
        (["a"], np.ones(3), "2-d"),
    ],
)
def test_write_rejections(tmp_path, ids, values, message):
    with pytest.raises(InterchangeError, match=message):
        write_vectors(str(tmp_path / "v.txt"), ids, values)


@pytest.mark.parametrize(
    "content, message",
    [
        ("garbage\n", "header"),
        ("2 2\na 1.0 2.0\n", "end of file"),
        ("1 2\na 1.0\n", "fields"),
        ("2 2\na 1.0 2.0\na 3.0 4.0\n", "duplicate"),
        ("1 2\na 1.0 nan\n", "non-finite"),
        ("1 2\na 1.0 x\n", "unparseable"),
        ("1 2\na 1.0 2.0\nextra\n", "trailing"),
        ("0 2\n", "invalid header"),
    ],
)
def test_read_rejections(tmp_path, content, message):
    path = tmp_path / "v.txt"
    path.write_text(content)
    with pytest.raises(InterchangeError, match=message):
        read_vectors(str(path))
