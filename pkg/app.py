import logging
import threading
import time
import traceback
import uuid
from typing import Optional

import requests
from flask import Flask, jsonify, request
from pydantic import BaseModel, Field, ValidationError

from portrait_engine.config import get_settings
from portrait_engine.dynmap import IterationContext, PlaceSet, Portrait, ProjPointK, parse_place_set
from portrait_engine.errors import ExpressionError, PreconditionError, ResourceLimitError
from portrait_engine.expression import parse_map_expression, parse_point_expression
from portrait_engine.report import save_report_to_json
from portrait_engine.witness import find_witness, portrait_grid

logger = logging.getLogger(__name__)

app = Flask(__name__)

# In-memory job store (+ lock)
analysis_status_map = {}
status_lock = threading.Lock()


class WitnessRequest(BaseModel):
    map: str
    alpha: str
    m: int = Field(ge=0)
    n: int = Field(ge=1)
    exclude: str = ""


class GridRequest(BaseModel):
    map: str
    alpha: str
    maxM: int = Field(ge=0)
    maxN: int = Field(ge=1)
    exclude: str = ""
    callbackUrl: Optional[str] = None


def set_status(analysis_id, status, **extra):
    with status_lock:
        entry = analysis_status_map.setdefault(analysis_id, {"analysisId": analysis_id})
        entry["status"] = status
        entry.update(extra)


def get_status(analysis_id):
    with status_lock:
        entry = analysis_status_map.get(analysis_id)
        return None if entry is None else dict(entry)


def notify_status(callback_url, payload, retries=None):
    """
    Callback POST with exponential backoff (payload is the finished dict).
    """
    retries = retries or get_settings().callback_retries
    delay = 1.0
    for attempt in range(1, retries + 1):
        try:
            res = requests.post(callback_url, json=payload, timeout=10)
            logger.info("POST %s -> %s", callback_url, res.status_code)
            if 200 <= res.status_code < 300:
                return True
        except requests.exceptions.RequestException as e:
            logger.warning("callback POST failed (attempt %d/%d): %s", attempt, retries, e)
        if attempt < retries:
            time.sleep(delay)
            delay *= 2
    return False


def _exclusions(text: str) -> PlaceSet:
    return parse_place_set(text) if text else PlaceSet()


def _inputs(body):
    phi = parse_map_expression(body.map).to_map()
    alpha = ProjPointK.from_expr(parse_point_expression(body.alpha))
    return phi, alpha, _exclusions(body.exclude)


def error_response(e):
    if isinstance(e, ValidationError):
        return jsonify({"error": e.errors(include_url=False, include_context=False)}), 400
    if isinstance(e, (ExpressionError, PreconditionError)):
        return jsonify({"error": str(e)}), 400
    if isinstance(e, ResourceLimitError):
        return jsonify({"error": str(e), "requested": e.requested, "cap": e.cap}), 413
    logger.exception("unexpected failure")
    return jsonify({"error": f"analysis failed: {e}"}), 500


@app.route('/analysis/witness', methods=['POST'])
def witness_api():
    try:
        body = WitnessRequest.model_validate(request.get_json(silent=True) or {})
        phi, alpha, places = _inputs(body)
        report = find_witness(phi, alpha, Portrait(body.m, body.n), places, IterationContext())
        return jsonify(report.to_dict())
    except Exception as e:
        return error_response(e)


def process_grid(body: GridRequest, analysis_id: str):
    """Run the grid in the background, record the outcome and send the callback."""
    set_status(analysis_id, "IN_PROGRESS")
    try:
        phi, alpha, places = _inputs(body)
        grid = portrait_grid(
            phi, alpha, body.maxM, body.maxN, places, workers=get_settings().grid_workers
        )
        result = grid.to_dict()
        save_report_to_json({"analysisId": analysis_id, **result}, f"{analysis_id}.json")
        payload = {"analysisId": analysis_id, "status": "COMPLETED", "result": result}
        set_status(analysis_id, "COMPLETED", result=result)
    except Exception as e:
        err_trace = traceback.format_exc()
        logger.error("grid %s failed: %s\n%s", analysis_id, e, err_trace)
        payload = {"analysisId": analysis_id, "status": "FAILED", "message": str(e)[:4000]}
        set_status(analysis_id, "FAILED", message=payload["message"])
    if body.callbackUrl:
        notify_status(body.callbackUrl, payload)


@app.route('/analysis/grid', methods=['POST'])
def grid_api():
    try:
        body = GridRequest.model_validate(request.get_json(silent=True) or {})
        # reject malformed input before a job is queued
        _inputs(body)
    except Exception as e:
        return error_response(e)

    analysis_id = f"grid-analysis-uuid-{uuid.uuid4()}"
    set_status(analysis_id, "PENDING")
    thread = threading.Thread(target=process_grid, args=(body, analysis_id), daemon=False)
    thread.start()
    return jsonify({"analysisId": analysis_id, "status": "PENDING"}), 202


@app.route('/analysis/<analysis_id>', methods=['GET'])
def status_api(analysis_id):
    entry = get_status(analysis_id)
    if entry is None:
        return jsonify({"error": f"unknown analysisId {analysis_id}"}), 404
    return jsonify(entry)


if __name__ == '__main__':
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    settings = get_settings()
    app.run(host=settings.server_host, port=settings.server_port)
