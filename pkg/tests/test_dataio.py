import numpy as np
import pytest

from npcmi.dataio import format_value, read_pairs, write_pairs
from npcmi.errors import ParseError


class TestRoundTrip:
    def test_floats_exact(self, tmp_path, rng):
        data = rng.standard_normal((200, 2)) * 10.0 ** rng.integers(-300, 300, size=(200, 2))
        path = tmp_path / "d.csv"
        write_pairs(path, data)
        np.testing.assert_array_equal(read_pairs(path), data)

    def test_integers(self, tmp_path):
        data = np.array([[0, 5], [12, 3]], dtype=np.int64)
        path = tmp_path / "i.csv"
        write_pairs(path, data, header=("x", "y"))
        assert path.read_bytes() == b"x,y\n0,5\n12,3\n"
        out = read_pairs(path, integer=True)
        assert out.dtype == np.int64
        np.testing.assert_array_equal(out, data)

    def test_header_skipped(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("a,b\n1.5,2\n\n3,4\n")
        np.testing.assert_array_equal(read_pairs(path), [[1.5, 2.0], [3.0, 4.0]])

    def test_format_value(self):
        assert format_value(3) == "3"
        assert float(format_value(0.1)) == 0.1


class TestErrors:
    @pytest.mark.parametrize(
        "text, line",
        [("1,2\n3\n", 2), ("1,2\n3,x\n", 2), ("x,y\n1,2\n1,2,3\n", 3), ("1,nan\n", 1), ("1,2\n1,inf\n", 2)],
    )
    def test_line_numbers(self, tmp_path, text, line):
        path = tmp_path / "bad.csv"
        path.write_text(text)
        with pytest.raises(ParseError) as info:
            read_pairs(path)
        assert info.value.line == line
        assert str(info.value).startswith(f"{path}:{line}:")

    def test_non_integer(self, tmp_path):
        path = tmp_path / "f.csv"
        path.write_text("1,2\n1.5,2\n")
        with pytest.raises(ParseError):
            read_pairs(path, integer=True)

    def test_empty(self, tmp_path):
        path = tmp_path / "e.csv"
        path.write_text("x,y\n")
        with pytest.raises(ParseError):
            read_pairs(path)

    def test_is_value_error(self, tmp_path):
        path = tmp_path / "v.csv"
        path.write_text("q\n")
        with pytest.raises(ValueError):
            read_pairs(path)
