# portrait_engine/report.py
import csv
import datetime
import json
import logging
import os
from typing import Optional

from portrait_engine.config import get_settings

logger = logging.getLogger(__name__)

GRID_CSV_COLUMNS = ("m", "n", "status", "witness")


def generate_analysis_id(subject: str, analysis_type: str) -> str:
    """
    Unique analysis ID from the subject, the analysis type and the current timestamp.
    """
    current_timestamp = datetime.datetime.now().strftime("%Y%m%d%H%M%S")
    safe_subject = "".join(ch if ch.isalnum() else "-" for ch in subject).strip("-") or "map"
    return f"{safe_subject}_{analysis_type}_{current_timestamp}"


def save_report_to_json(report: dict, filename: str, output_dir: Optional[str] = None) -> str:
    """
    Saves the report dictionary to ``output_dir/filename`` and returns the path.

    Args:
        report (dict): JSON-ready report, usually some ``to_dict()`` output.
        filename (str): File name including the extension.
        output_dir (str): Target folder; defaults to the configured output_dir.
    """
    output_dir = output_dir or get_settings().output_dir
    os.makedirs(output_dir, exist_ok=True)
    file_path = os.path.join(output_dir, filename)
    with open(file_path, "w", encoding="utf-8") as f:
        json.dump(report, f, ensure_ascii=False, indent=4)
    logger.info("report saved to %s", file_path)
    return file_path


def write_grid_csv(grid, path: str) -> str:
    """One row per cell with the columns m,n,status,witness."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(GRID_CSV_COLUMNS)
        for cell in grid.cells:
            writer.writerow([cell.m, cell.n, cell.report.status.value, cell.report.sample_witness or ""])
    logger.info("grid CSV written to %s", path)
    return path
