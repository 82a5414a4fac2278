"""CLI behaviour, exercised in process through ``main``."""

import json

import numpy as np
import pytest

from mvrep.cli import main
from mvrep.io import parse_s3dis_room, read_manifest
from mvrep.synthetic import synthetic_room


@pytest.fixture(scope="module")
def room_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("rooms") / "Area_1_office_9.txt"
    room = synthetic_room(6_000, size=(4.0, 3.0, 2.5), seed=2, room_id="Area_1_office_9")
    lines = [
        f"{p[0]:.6f} {p[1]:.6f} {p[2]:.6f} {c[0]} {c[1]} {c[2]}"
        for p, c in zip(room.positions, room.colors)
    ]
    path.write_text("\n".join(lines) + "\n")
    return path


def run_generate(room_file, out, *extra):
    return main(
        [
            "generate",
            "--input",
            str(room_file),
            "--out",
            str(out),
            "--spacing",
            "2.0",
            "--min-points",
            "50",
            *extra,
        ]
    )


class TestGenerate:
    def test_writes_manifest_and_partials(self, room_file, tmp_path, capsys):
        out = tmp_path / "mv"
        assert run_generate(room_file, out) == 0
        manifest_path = out / "Area_1_office_9_manifest.json"
        manifest = read_manifest(manifest_path)
        assert manifest.room_id == "Area_1_office_9"
        assert len(manifest.entries) > 0
        assert manifest.source_path == str(room_file.resolve())
        for entry in manifest.entries:
            cloud = parse_s3dis_room(out / entry.file_path)
            assert len(cloud) == entry.point_count
        assert "kept" in capsys.readouterr().out

    def test_config_file_layering(self, room_file, tmp_path):
        # defaults < config file < explicit flag
        cfg = tmp_path / "gen.cfg"
        cfg.write_text("min-points = 10\nseed = 5  # comment\n\nspacing=2.0\n")
        out = tmp_path / "mv"
        code = main(
            [
                "generate",
                "--input",
                str(room_file),
                "--out",
                str(out),
                "--config",
                str(cfg),
                "--seed",
                "7",
            ]
        )
        assert code == 0
        manifest = read_manifest(out / "Area_1_office_9_manifest.json")
        assert manifest.seed == 7
        assert manifest.config["min_points"] == 10
        assert manifest.config["spacing"] == 2.0

    def test_config_via_environment(self, room_file, tmp_path, monkeypatch):
        cfg = tmp_path / "env.cfg"
        cfg.write_text("min_points=25\nspacing=2.0\n")
        monkeypatch.setenv("MVREP_CONFIG", str(cfg))
        out = tmp_path / "mv"
        assert main(["generate", "--input", str(room_file), "--out", str(out)]) == 0
        manifest = read_manifest(out / "Area_1_office_9_manifest.json")
        assert manifest.config["min_points"] == 25

    def test_unknown_config_key_is_config_error(self, room_file, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("not_a_knob=3\n")
        code = main(
            [
                "generate",
                "--input",
                str(room_file),
                "--out",
                str(tmp_path / "mv"),
                "--config",
                str(cfg),
            ]
        )
        assert code == 2
        assert "unknown key 'not_a_knob'" in capsys.readouterr().err

    def test_bad_flag_value_is_config_error(self, room_file, tmp_path, capsys):
        code = run_generate(room_file, tmp_path / "mv", "--hfov", "200")
        assert code == 2
        assert "hfov" in capsys.readouterr().err

    def test_missing_input_is_input_error(self, tmp_path, capsys):
        code = main(
            ["generate", "--input", str(tmp_path / "nope.txt"), "--out", str(tmp_path)]
        )
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_with_labels_round_trip(self, tmp_path):
        room = synthetic_room(
            5_000, size=(3.0, 3.0, 2.5), seed=4, room_id="Area_2_office_1"
        )
        src = tmp_path / "Area_2_office_1.txt"
        rows = [
            f"{p[0]:.6f} {p[1]:.6f} {p[2]:.6f} {c[0]} {c[1]} {c[2]} {l}"
            for p, c, l in zip(room.positions, room.colors, room.labels)
        ]
        src.write_text("\n".join(rows) + "\n")
        out = tmp_path / "mv"
        assert run_generate(src, out, "--with-labels") == 0
        manifest = read_manifest(out / "Area_2_office_1_manifest.json")
        first = parse_s3dis_room(out / manifest.entries[0].file_path, with_labels=True)
        assert first.labels is not None
        assert set(np.unique(first.labels)) <= set(np.unique(room.labels))


class TestHpr:
    def test_filters_and_writes(self, room_file, tmp_path, capsys):
        out = tmp_path / "vis.txt"
        code = main(
            ["hpr", "--input", str(room_file), "--viewpoint", "2,1.5,1.5", "--out", str(out)]
        )
        assert code == 0
        kept = parse_s3dis_room(out)
        total = parse_s3dis_room(room_file)
        assert 0 < len(kept) < len(total)
        assert f"{len(kept)} of {len(total)}" in capsys.readouterr().out

    def test_bad_viewpoint_is_config_error(self, room_file, tmp_path, capsys):
        code = main(
            ["hpr", "--input", str(room_file), "--viewpoint", "1,2", "--out", str(tmp_path / "v.txt")]
        )
        assert code == 2
        assert "--viewpoint" in capsys.readouterr().err

    def test_small_radius_factor_is_config_error(self, room_file, tmp_path):
        code = main(
            [
                "hpr",
                "--input",
                str(room_file),
                "--viewpoint",
                "2,1.5,1.5",
                "--radius-factor",
                "0.2",
                "--out",
                str(tmp_path / "v.txt"),
            ]
        )
        assert code == 2


@pytest.fixture(scope="module")
def manifest_dir(room_file, tmp_path_factory):
    out = tmp_path_factory.mktemp("manifests")
    assert run_generate(room_file, out / "Area_1_office_9") == 0
    return out


class TestFuse:
    def test_composes_training_list(self, manifest_dir, tmp_path, capsys):
        out = tmp_path / "train.txt"
        code = main(
            ["fuse", "--manifests", str(manifest_dir), "--partial-per-area", "2", "--out", str(out)]
        )
        assert code == 0
        files = out.read_text().splitlines()
        assert len(files) == 3  # the original plus two partial sets
        assert sum("_manifest" in f for f in files) == 0
        assert "wrote 3 training files" in capsys.readouterr().out

    def test_no_originals(self, manifest_dir, tmp_path):
        out = tmp_path / "train.txt"
        code = main(
            [
                "fuse",
                "--manifests",
                str(manifest_dir),
                "--partial-per-area",
                "1",
                "--no-originals",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert len(out.read_text().splitlines()) == 1

    def test_requesting_too_many_is_input_error(self, manifest_dir, tmp_path, capsys):
        code = main(
            [
                "fuse",
                "--manifests",
                str(manifest_dir),
                "--partial-per-area",
                "100000",
                "--out",
                str(tmp_path / "t.txt"),
            ]
        )
        assert code == 1
        assert "available" in capsys.readouterr().err

    def test_negative_request_is_config_error(self, manifest_dir, tmp_path):
        code = main(
            [
                "fuse",
                "--manifests",
                str(manifest_dir),
                "--partial-per-area",
                "-1",
                "--out",
                str(tmp_path / "t.txt"),
            ]
        )
        assert code == 2

    def test_empty_directory_is_input_error(self, tmp_path):
        code = main(
            [
                "fuse",
                "--manifests",
                str(tmp_path),
                "--partial-per-area",
                "0",
                "--out",
                str(tmp_path / "t.txt"),
            ]
        )
        assert code == 1


class TestCritical:
    def test_report_json(self, room_file, tmp_path, capsys):
        out = tmp_path / "crit.json"
        code = main(
            [
                "critical",
                "--input",
                str(room_file),
                "--k",
                "16",
                "--trials",
                "10",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["room_id"] == "Area_1_office_9"
        assert doc["critical"]["k"] == 16
        assert doc["critical"]["critical_size"] <= 16
        assert doc["invariance"]["passed"] is True
        assert "invariance ok" in capsys.readouterr().out

    def test_bad_k_is_config_error(self, room_file, tmp_path):
        code = main(
            ["critical", "--input", str(room_file), "--k", "0", "--out", str(tmp_path / "c.json")]
        )
        assert code == 2


class TestStats:
    def test_table_layout(self, room_file, tmp_path, capsys):
        out = tmp_path / "mv"
        assert run_generate(room_file, out) == 0
        capsys.readouterr()  # drop the generate progress line
        assert main(["stats", "--manifests", str(out)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].split() == ["Area", "Original", "MV"]
        assert lines[1].startswith("Area_1")
        assert lines[-1].startswith("Total")
        # column counts are integers and the total row reproduces them
        assert lines[1].split()[1:] == lines[-1].split()[1:]

    def test_missing_directory_is_input_error(self, tmp_path, capsys):
        assert main(["stats", "--manifests", str(tmp_path / "none")]) == 1
        assert "not a directory" in capsys.readouterr().err


class TestParser:
    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        assert "generate" in capsys.readouterr().out

    def test_no_arguments_is_usage_error(self, capsys):
        assert main([]) == 2
        capsys.readouterr()

    def test_unknown_command_is_usage_error(self, capsys):
        assert main(["frobnicate"]) == 2
        capsys.readouterr()
