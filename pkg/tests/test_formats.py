import numpy as np
import pytest

from core.exceptions import FormatError, ParseError
from integrations.formats import (
    format_embedding_line, format_recording, parse_class_map, parse_embedding_line, parse_recordings,
    read_recordings, write_recordings,
)
from model.preprocess import EegRecording

CANONICAL = (
    "2 3 cat r1 img7\n"
    "0.1 -2.5 3.0\n"
    "1e-07 0.30000000000000004 -0.0\n"
    "1 2 dog r2\n"
    "4.0 5.5\n"
)


def test_parse_then_format_is_byte_stable():
    recordings = parse_recordings(CANONICAL)
    assert [r.recording_id for r in recordings] == ["r1", "r2"]
    assert recordings[0].stimulus_id == "img7" and recordings[1].stimulus_id is None
    assert "".join(format_recording(r) for r in recordings) == CANONICAL


def test_file_round_trip_preserves_every_bit(tmp_path):
    rng = np.random.default_rng(0)
    original = [EegRecording(rng.standard_normal((3, 7)), "x", f"r{i}") for i in range(2)]
    path = tmp_path / "recordings.txt"
    assert write_recordings(path, original) == 2
    for before, after in zip(original, read_recordings(path)):
        np.testing.assert_array_equal(before.signal, after.signal)


@pytest.mark.parametrize("text,line", [
    ("2 3 cat\n", 1),
    ("x 3 cat r1\n", 1),
    ("1 3 cat r1\n1.0 2.0\n", 2),
    ("1 2 cat r1\n1.0 abc\n", 2),
    ("2 2 cat r1\n1.0 2.0\n", 2),
])
def test_malformed_recordings_report_line(text, line):
    with pytest.raises(ParseError) as info:
        parse_recordings(text, "data.txt")
    assert info.value.line == line
    assert "data.txt" in str(info.value)


def test_labels_with_whitespace_cannot_be_written():
    with pytest.raises(FormatError):
        format_recording(EegRecording(np.zeros((1, 1)), "two words", "r"))


def test_embedding_line_round_trip():
    line = format_embedding_line("item1", "cat", [0.5, -1.25, 1e-300])
    item_id, label, vector = parse_embedding_line(line + "\n", 1, "e.tsv")
    assert (item_id, label) == ("item1", "cat")
    assert format_embedding_line(item_id, label, vector) == line


@pytest.mark.parametrize("line", ["a\tb\n", "a\tb\t1.0 x\n", "a\tb\t\n", "a\tb\tnan\n"])
def test_bad_embedding_lines(line):
    with pytest.raises(ParseError):
        parse_embedding_line(line, 3, "e.tsv")


def test_class_map_parsing():
    mapping = parse_class_map("# merged classes\nsiamese\tcat\ntabby\tcat  # inline\n\n")
    assert mapping == {"siamese": "cat", "tabby": "cat"}
    with pytest.raises(ParseError):
        parse_class_map("a\tb\na\tc\n")
    with pytest.raises(ParseError):
        parse_class_map("just-one-field\n")
