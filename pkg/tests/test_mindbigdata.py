import numpy as np
import pytest

from core.constants import CHANNEL_ORDER
from core.exceptions import ParseError
from integrations.dataset import load_recordings
from integrations.mindbigdata import MindBigDataSource, parse_eeg_source


def source_line(event, channel, code, values, record=1):
    data = ",".join(str(v) for v in values)
    return f"{record}\t{event}\tIN\t{channel}\t{code}\t{len(values)}\t{data}\n"


def write_events(path, events):
    lines = []
    for event, code, channels, size in events:
        for channel in channels:
            lines.append(source_line(event, channel, code, np.arange(size, dtype=float)))
    path.write_text("".join(lines))
    return path


def test_five_channel_lines_make_one_recording(tmp_path):
    path = write_events(tmp_path / "mbd.txt", [("ev1", "7", CHANNEL_ORDER, 360)])
    recordings = parse_eeg_source(path)
    assert len(recordings) == 1
    assert recordings[0].signal.shape == (5, 360)
    assert recordings[0].label == "7" and recordings[0].recording_id == "ev1"


def test_event_with_missing_channel_is_skipped(tmp_path):
    path = write_events(tmp_path / "mbd.txt", [
        ("ev1", "1", CHANNEL_ORDER, 360),
        ("ev2", "2", CHANNEL_ORDER[:4], 360),
    ])
    report = MindBigDataSource(path).read()
    assert [r.recording_id for r in report.recordings] == ["ev1"]
    assert report.skipped == 1
    assert report.skipped_events["ev2"] == ["Pz"]


def test_short_rows_are_zero_padded_and_long_rows_truncated(tmp_path):
    path = write_events(tmp_path / "mbd.txt", [("short", "1", CHANNEL_ORDER, 300),
                                               ("long", "1", CHANNEL_ORDER, 400)])
    short, long = parse_eeg_source(path)
    assert np.count_nonzero(short.signal[0, 300:]) == 0
    assert short.signal.shape == long.signal.shape == (5, 360)
    assert long.signal[0, -1] == 359.0


def test_unlisted_channels_are_ignored(tmp_path):
    path = tmp_path / "mbd.txt"
    write_events(path, [("ev1", "1", CHANNEL_ORDER, 10)])
    with open(path, "a") as handle:
        handle.write(source_line("ev1", "O1", "1", [1.0] * 10))
    report = MindBigDataSource(path, samples=10).read()
    assert report.ignored_lines == 1 and len(report.recordings) == 1


@pytest.mark.parametrize("line", [
    "1\tev\tIN\tAF3\t1\t3\n",
    "1\tev\tIN\tAF3\t1\t3\t1,2\n",
    "1\tev\tIN\tAF3\t1\tthree\t1,2,3\n",
])
def test_malformed_lines(tmp_path, line):
    path = tmp_path / "bad.txt"
    path.write_text(line)
    with pytest.raises(ParseError) as info:
        MindBigDataSource(path).read()
    assert info.value.line == 1


def test_load_recordings_detects_the_format(tmp_path):
    path = write_events(tmp_path / "mbd.txt", [("ev1", "3", CHANNEL_ORDER, 360)])
    assert load_recordings(path)[0].recording_id == "ev1"
    with pytest.raises(FileNotFoundError):
        load_recordings(tmp_path / "missing.txt")
