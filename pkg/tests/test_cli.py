import subprocess
import sys

import numpy as np
import pytest

from evframes.cli import main
from evframes.encoders import KIND_EVENT_COUNT, POLARITY_MERGED, EncodedFrame
from evframes.formats import read_frame_tensor, write_frame_tensor
from evframes.ingest import parse_text
from evframes.stream import SensorGeometry

from tests.test_ingest import HEADER, dvs128_record


def run(*argv):
    return main([str(a) for a in argv])


def write_events(path, lines):
    path.write_text("".join(line + "\n" for line in lines))


def intensity_tensor(path, values, dt_us=1000):
    """Write a 1-channel frame tensor whose pixel stacks are `values` (N,H,W)."""
    values = np.asarray(values, dtype=np.uint8)
    frames = [
        EncodedFrame(
            values[i][:, :, np.newaxis],
            KIND_EVENT_COUNT,
            POLARITY_MERGED,
            i * dt_us,
            (i + 1) * dt_us,
            False,
        )
        for i in range(len(values))
    ]
    path.write_bytes(write_frame_tensor(frames))


class TestEncode:
    def test_250ms_span_gives_four_default_windows(self, tmp_path):
        src = tmp_path / "ev.txt"
        write_events(src, ["0 1 1 1", "250000 2 2 -1"])
        out = tmp_path / "frames.evfr"
        assert run("encode", src, out, "--geometry", "16x16") == 0
        tensor = read_frame_tensor(out.read_bytes())
        assert len(tensor.frames) == 4
        assert (tensor.width, tensor.height, tensor.channels) == (16, 16, 3)

    @pytest.mark.parametrize("window_us,expected", [(20000, 13), (50000, 6), (80000, 4)])
    def test_window_length_flag(self, tmp_path, window_us, expected):
        src = tmp_path / "ev.txt"
        write_events(src, ["0 1 1 1", "250000 2 2 -1"])
        out = tmp_path / "frames.evfr"
        assert run("encode", src, out, "--geometry", "16x16", "--window-us", window_us) == 0
        assert len(read_frame_tensor(out.read_bytes()).frames) == expected

    def test_empty_input_gives_zero_frames(self, tmp_path):
        src = tmp_path / "ev.txt"
        src.write_text("")
        out = tmp_path / "frames.evfr"
        assert run("encode", src, out, "--geometry", "8x4") == 0
        tensor = read_frame_tensor(out.read_bytes())
        assert tensor.frames == []
        assert (tensor.width, tensor.height) == (8, 4)

    def test_polarity_ignore_writes_one_channel(self, tmp_path):
        src = tmp_path / "ev.txt"
        write_events(src, ["0 1 1 1", "10 1 1 -1"])
        out = tmp_path / "frames.evfr"
        assert run("encode", src, out, "--geometry", "4x4", "--polarity", "ignore") == 0
        assert read_frame_tensor(out.read_bytes()).channels == 1

    def test_count_kind_records_counts(self, tmp_path):
        src = tmp_path / "ev.txt"
        write_events(src, ["0 1 2 1", "10 1 2 1", "20 3 0 -1"])
        out = tmp_path / "frames.evfr"
        assert run("encode", src, out, "--geometry", "4x4", "--kind", "count") == 0
        frame = read_frame_tensor(out.read_bytes()).frames[0]
        # counts are jointly rescaled so the max count maps to 255
        assert frame.pixels[2, 1, 0] == 255
        assert frame.pixels[0, 3, 1] == 128

    def test_emit_images(self, tmp_path):
        src = tmp_path / "ev.txt"
        write_events(src, ["0 1 1 1", "250000 2 2 -1"])
        out = tmp_path / "frames.evfr"
        img_dir = tmp_path / "imgs"
        assert run("encode", src, out, "--geometry", "16x16", "--emit-images", img_dir) == 0
        files = sorted(p.name for p in img_dir.iterdir())
        assert files == [f"frame_{i:06d}.ppm" for i in range(4)]
        assert (img_dir / "frame_000000.ppm").read_bytes().startswith(b"P6\n16 16\n255\n")

    def test_emit_images_grayscale_for_single_channel(self, tmp_path):
        src = tmp_path / "ev.txt"
        write_events(src, ["0 1 1 1"])
        out = tmp_path / "frames.evfr"
        img_dir = tmp_path / "imgs"
        assert (
            run("encode", src, out, "--geometry", "4x4", "--polarity", "ignore",
                "--emit-images", img_dir) == 0
        )
        assert (img_dir / "frame_000000.pgm").read_bytes().startswith(b"P5\n4 4\n")

    def test_runs_are_deterministic_and_thread_count_neutral(self, tmp_path):
        rng = np.random.default_rng(17)
        t = np.sort(rng.integers(0, 400_000, size=500))
        lines = [
            f"{t[i]} {rng.integers(0, 32)} {rng.integers(0, 32)} {rng.choice([1, -1])}"
            for i in range(500)
        ]
        src = tmp_path / "ev.txt"
        write_events(src, lines)
        outputs = []
        for name, threads in [("a", 1), ("b", 1), ("c", 4)]:
            out = tmp_path / f"{name}.evfr"
            assert run("encode", src, out, "--geometry", "32x32", "--threads", threads) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]

    def test_aedat_input_autodetected(self, tmp_path):
        src = tmp_path / "rec.aedat"
        src.write_bytes(HEADER + dvs128_record(5, 6, 1, 100) + dvs128_record(7, 8, -1, 200))
        out = tmp_path / "frames.evfr"
        assert run("encode", src, out) == 0
        tensor = read_frame_tensor(out.read_bytes())
        assert (tensor.width, tensor.height) == (128, 128)
        assert len(tensor.frames) == 1


class TestChunk:
    def write_tensor(self, path, n, empty_mask=None):
        empty_mask = empty_mask or [False] * n
        frames = [
            EncodedFrame(
                np.zeros((2, 2, 3), dtype=np.uint8), None, None, i * 10, (i + 1) * 10, empty_mask[i]
            )
            for i in range(n)
        ]
        path.write_bytes(write_frame_tensor(frames, shape=(2, 2, 3)))

    def test_five_frames_manifest(self, tmp_path, capsys):
        path = tmp_path / "frames.evfr"
        self.write_tensor(path, 5)
        assert run("chunk", path) == 0
        assert capsys.readouterr().out == "0 1 2\n1 2 3\n2 3 4\n"

    def test_three_frames_one_line(self, tmp_path, capsys):
        path = tmp_path / "frames.evfr"
        self.write_tensor(path, 3)
        assert run("chunk", path) == 0
        assert capsys.readouterr().out == "0 1 2\n"

    def test_two_frames_empty_manifest(self, tmp_path, capsys):
        path = tmp_path / "frames.evfr"
        self.write_tensor(path, 2)
        assert run("chunk", path) == 0
        assert capsys.readouterr().out == ""

    def test_drop_policy(self, tmp_path, capsys):
        path = tmp_path / "frames.evfr"
        self.write_tensor(path, 5, empty_mask=[False, True, True, True, True])
        assert run("chunk", path, "--policy", "drop_all_empty_chunks") == 0
        assert capsys.readouterr().out == "0 1 2\n"

    def test_output_file(self, tmp_path):
        path = tmp_path / "frames.evfr"
        self.write_tensor(path, 4)
        manifest = tmp_path / "chunks.txt"
        assert run("chunk", path, "-o", manifest) == 0
        assert manifest.read_text() == "0 1 2\n1 2 3\n"


class TestAggregate:
    def test_two_chunk_mean(self, tmp_path, capsys):
        scores = tmp_path / "scores.txt"
        scores.write_text("# k=2\n0,0.2,0.8\n1,0.4,0.6\n")
        assert run("aggregate", scores) == 0
        out = capsys.readouterr().out.splitlines()
        values = [float(v) for v in out[0].split(":")[1].split()]
        np.testing.assert_allclose(values, [0.3, 0.7])
        assert out[1] == "label: 1"

    def test_class_names_reported(self, tmp_path, capsys):
        scores = tmp_path / "scores.txt"
        scores.write_text("# k=2 classes=walk,run\n0,0.9,0.1\n")
        assert run("aggregate", scores) == 0
        assert "label_name: walk" in capsys.readouterr().out

    def test_bad_score_file_is_data_error(self, tmp_path, capsys):
        scores = tmp_path / "scores.txt"
        scores.write_text("0,0.9,0.1\n")
        assert run("aggregate", scores) == 1
        assert "header" in capsys.readouterr().err


class TestSimulate:
    def test_constant_scene_gives_empty_stream(self, tmp_path):
        tensor = tmp_path / "in.evfr"
        intensity_tensor(tensor, np.full((3, 2, 2), 40))
        out = tmp_path / "events.txt"
        assert run("simulate", tensor, out) == 0
        assert out.read_text() == ""

    def test_two_frame_ramp(self, tmp_path):
        tensor = tmp_path / "in.evfr"
        v0, v1 = 0, 200  # log(201/1) spans many thresholds
        intensity_tensor(tensor, [[[v0]], [[v1]]], dt_us=1000)
        out = tmp_path / "events.txt"
        assert run("simulate", tensor, out, "--threshold", "1.0") == 0
        stream = parse_text(out.read_text(), SensorGeometry(1, 1))
        assert len(stream) == int(np.floor(np.log(201.0) / 1.0))
        assert np.all(stream.p == 1)

    def test_prescaled_pairs_match(self, tmp_path):
        # intensity 1+v: (v0,v1)=(0,1) and (1,3) both double the intensity,
        # so the emitted streams are identical
        out_a, out_b = tmp_path / "a.txt", tmp_path / "b.txt"
        for name, (v0, v1) in [(out_a, (0, 1)), (out_b, (1, 3))]:
            tensor = tmp_path / f"{name.stem}.evfr"
            intensity_tensor(tensor, [[[v0]], [[v1]]])
            assert run("simulate", tensor, name, "--threshold", "0.3") == 0
        assert out_a.read_text() == out_b.read_text()
        assert out_a.read_text() != ""

    def test_multichannel_input_is_data_error(self, tmp_path, capsys):
        tensor = tmp_path / "in.evfr"
        frames = [
            EncodedFrame(np.zeros((2, 2, 3), dtype=np.uint8), None, None, i * 10, (i + 1) * 10, False)
            for i in range(2)
        ]
        tensor.write_bytes(write_frame_tensor(frames))
        assert run("simulate", tensor, tmp_path / "out.txt") == 1
        assert "1-channel" in capsys.readouterr().err

    def test_single_frame_is_data_error(self, tmp_path, capsys):
        tensor = tmp_path / "in.evfr"
        intensity_tensor(tensor, np.zeros((1, 2, 2)))
        assert run("simulate", tensor, tmp_path / "out.txt") == 1
        assert "two frames" in capsys.readouterr().err


class TestTruncate:
    def test_full_ratio_round_trips(self, tmp_path):
        src = tmp_path / "ev.txt"
        lines = ["0 1 1 1", "100 2 2 -1", "900 3 3 1"]
        write_events(src, lines)
        out = tmp_path / "out.txt"
        assert run("truncate", src, out, "--geometry", "8x8", "--ratio", "1.0") == 0
        assert out.read_text() == "0 1 1 1\n100 2 2 -1\n900 3 3 1\n"

    def test_uniform_stream_keeps_leading_tenth(self, tmp_path):
        src = tmp_path / "ev.txt"
        write_events(src, [f"{t} 0 0 1" for t in range(1000)])
        out = tmp_path / "out.txt"
        assert run("truncate", src, out, "--geometry", "8x8", "--ratio", "0.1") == 0
        kept = out.read_text().splitlines()
        assert len(kept) == 100
        assert kept[-1].startswith("99 ")

    @pytest.mark.parametrize("ratio", ["1.5", "0", "-0.1"])
    def test_out_of_range_ratio_is_usage_error(self, tmp_path, ratio):
        src = tmp_path / "ev.txt"
        write_events(src, ["0 1 1 1"])
        with pytest.raises(SystemExit) as exc:
            run("truncate", src, tmp_path / "o.txt", "--geometry", "8x8", "--ratio", ratio)
        assert exc.value.code == 2


class TestInfo:
    def test_aedat_summary_with_stats(self, tmp_path, capsys):
        src = tmp_path / "rec.aedat"
        src.write_bytes(
            HEADER + dvs128_record(1, 2, 1, 100) + dvs128_record(3, 4, -1, 250)
        )
        assert run("info", src) == 0
        out = capsys.readouterr().out
        assert "geometry: 128x128" in out
        assert "events: 2" in out
        assert "duration_us: 150" in out
        assert "positive: 1" in out
        assert "negative: 1" in out
        assert "records: 2" in out
        assert "timestamp_wraps: 0" in out

    def test_empty_stream_zero_counts(self, tmp_path, capsys):
        src = tmp_path / "ev.txt"
        src.write_text("")
        assert run("info", src, "--geometry", "4x4") == 0
        out = capsys.readouterr().out
        assert "events: 0" in out
        assert "positive: 0" in out
        assert "negative: 0" in out
        assert "duration_us: 0" in out


class TestExitCodes:
    def test_missing_file_is_data_error(self, tmp_path, capsys):
        assert run("info", tmp_path / "nope.txt") == 1
        assert "evframes:" in capsys.readouterr().err

    def test_corrupt_input_is_data_error(self, tmp_path, capsys):
        src = tmp_path / "ev.txt"
        src.write_text("not an event line\n")
        assert run("info", src) == 1
        assert "line 1" in capsys.readouterr().err

    def test_unknown_command_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            run("frobnicate")
        assert exc.value.code == 2

    def test_bad_geometry_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run("info", tmp_path / "x.txt", "--geometry", "wide")
        assert exc.value.code == 2

    def test_console_script_installed(self, tmp_path):
        src = tmp_path / "ev.txt"
        src.write_text("0 1 1 1\n")
        proc = subprocess.run(
            [sys.executable, "-m", "evframes", "info", str(src), "--geometry", "4x4"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "events: 1" in proc.stdout
