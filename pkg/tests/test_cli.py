from __future__ import annotations

import json

import pytest

from chordblocks.cli import main
from chordblocks.content import building_to_doc, dump_canonical
from chordblocks.grammar import build
from chordblocks.theory import Key, parse_degree

from smf_reader import read_smf

C = Key.of("C")


def degs(text):
    return [parse_degree(t) for t in text.split()]


@pytest.fixture
def building_file(tmp_path):
    path = tmp_path / "song.json"
    doc = building_to_doc(build(C, degs("I IV V I")))
    path.write_text(dump_canonical(doc), encoding="utf-8")
    return path


@pytest.fixture
def broken_building_file(tmp_path):
    path = tmp_path / "bad.json"
    doc = {
        "key": "C",
        "base": [
            {"degree": "V", "tenon": ["dominant", "tonic"], "mortise": ["dominant"]},
            {"degree": "IV", "tenon": ["tonic", "subdominant", "dominant"],
             "mortise": ["subdominant"]},
        ],
        "prolongations": [],
    }
    path.write_text(dump_canonical(doc), encoding="utf-8")
    return path


class TestMatrix:
    def test_matrix_counts(self, capsys):
        assert main(["matrix"]) == 0
        out = capsys.readouterr().out
        assert "45 allowed, 4 forbidden" in out


class TestAnalyze:
    def test_analyze_ok(self, capsys):
        assert main(["analyze", "I", "IV", "I", "V", "I"]) == 0
        out = capsys.readouterr().out
        assert "base: I V I" in out
        assert "neighbor(IV) at base[0]" in out

    def test_analyze_unparseable_exits_one(self, capsys):
        assert main(["analyze", "I", "V", "IV"]) == 1
        assert "unparseable" in capsys.readouterr().out

    def test_analyze_unknown_degree_is_usage_error(self, capsys):
        assert main(["analyze", "I", "VIII"]) == 2

    def test_analyze_other_key(self, capsys):
        assert main(["analyze", "--key", "G", "I", "V", "I"]) == 0


class TestValidate:
    def test_valid_file(self, building_file, capsys):
        assert main(["validate", str(building_file)]) == 0
        assert "ok" in capsys.readouterr().out

    def test_invalid_building_exits_one(self, broken_building_file, capsys):
        assert main(["validate", str(broken_building_file)]) == 1
        assert "base_break" in capsys.readouterr().out

    def test_missing_file_is_usage_error(self, tmp_path, capsys):
        assert main(["validate", str(tmp_path / "nothing.json")]) == 2

    def test_schema_violation_exits_one(self, tmp_path, capsys):
        path = tmp_path / "weird.json"
        path.write_text(json.dumps({"key": "C"}), encoding="utf-8")
        assert main(["validate", str(path)]) == 1
        assert "schema violation" in capsys.readouterr().out


class TestRender:
    def test_render_writes_midi(self, building_file, tmp_path, capsys):
        out_path = tmp_path / "song.mid"
        assert main(["render", str(building_file), "-o", str(out_path)]) == 0
        data = out_path.read_bytes()
        assert data.startswith(b"MThd")
        parsed = read_smf(data)
        assert len([e for e in parsed.events if e.kind == "note_on"]) == 12

    def test_render_refuses_invalid(self, broken_building_file, tmp_path):
        assert main([
            "render", str(broken_building_file), "-o", str(tmp_path / "x.mid"),
        ]) == 1
        assert not (tmp_path / "x.mid").exists()


class TestLevelsCheck:
    def test_stock_content_passes(self, capsys):
        assert main(["levels", "check"]) == 0
        out = capsys.readouterr().out
        assert "ok: 7 levels valid" in out
        assert "level 3: teaches V" in out

    def test_bad_content_fails(self, tmp_path, capsys):
        import shutil

        from chordblocks.content import default_content_dir

        content = tmp_path / "content"
        shutil.copytree(default_content_dir(), content)
        (content / "level_05.json").unlink()
        assert main(["levels", "check", str(content)]) == 2  # missing file: I/O
        doc = json.loads((content / "level_04.json").read_text())
        doc["teaches"] = "vii"
        (content / "level_05.json").write_text(
            (content / "level_04.json").read_text(), encoding="utf-8"
        )
        (content / "level_04.json").write_text(json.dumps(doc), encoding="utf-8")
        assert main(["levels", "check", str(content)]) == 1


class TestUsage:
    def test_no_command_is_usage_error(self, capsys):
        assert main([]) == 2

    def test_unknown_command_is_usage_error(self, capsys):
        assert main(["sing"]) == 2
