import csv
import json
import re

from portrait_engine.dynmap import ProjPointK
from portrait_engine.report import generate_analysis_id, save_report_to_json, write_grid_csv
from portrait_engine.witness import portrait_grid


def test_analysis_id_is_filename_safe():
    analysis_id = generate_analysis_id("z^2 + t", "witness")
    assert re.fullmatch(r"z-2---t_witness_\d{14}", analysis_id)
    assert generate_analysis_id("^^", "grid").startswith("map_grid_")


def test_save_report_to_json(tmp_path):
    path = save_report_to_json({"divisor": "t+1", "note": "종결식"}, "report.json", str(tmp_path))
    with open(path, encoding="utf-8") as f:
        text = f.read()
    assert "종결식" in text
    assert json.loads(text) == {"divisor": "t+1", "note": "종결식"}


def test_save_report_defaults_to_configured_folder(tmp_path):
    path = save_report_to_json({"ok": True}, "default.json")
    assert path == str(tmp_path / "analysis_results" / "default.json")


def test_write_grid_csv(quadratic, tmp_path):
    grid = portrait_grid(quadratic, ProjPointK.of(0), 0, 3)
    path = write_grid_csv(grid, str(tmp_path / "out" / "grid.csv"))
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["m", "n", "status", "witness"]
    assert rows[1] == ["0", "1", "Realizable", "0"]
    assert rows[2] == ["0", "2", "Realizable", "-1"]
    assert len(rows) == 4
