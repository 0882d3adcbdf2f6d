import json
import logging
import time

import click
import requests

logger = logging.getLogger(__name__)

# Flask server address and port.
SERVER_URL = "http://127.0.0.1:5000"

TERMINAL_STATES = ("COMPLETED", "FAILED")


def submit_grid(server_url, map_text, alpha, max_m, max_n, exclude=""):
    """POST a grid job and return its analysis id."""
    payload = {"map": map_text, "alpha": alpha, "maxM": max_m, "maxN": max_n, "exclude": exclude}
    response = requests.post(f"{server_url}/analysis/grid", json=payload, timeout=30)
    if response.status_code >= 400:
        raise click.ClickException(f"server rejected the job ({response.status_code}): {response.json().get('error')}")
    return response.json()["analysisId"]


def wait_for_result(server_url, analysis_id, interval=1.0, timeout=600.0):
    """Poll GET /analysis/<id> until the job completes or fails."""
    deadline = time.time() + timeout
    while time.time() < deadline:
        response = requests.get(f"{server_url}/analysis/{analysis_id}", timeout=10)
        response.raise_for_status()
        entry = response.json()
        logger.debug("%s -> %s", analysis_id, entry["status"])
        if entry["status"] in TERMINAL_STATES:
            return entry
        time.sleep(interval)
    raise click.ClickException(f"no result for {analysis_id} after {timeout:.0f}s")


@click.command()
@click.option("--server", default=SERVER_URL, show_default=True)
@click.option("--map", "map_text", default="z^2+t", show_default=True)
@click.option("--alpha", default="1", show_default=True)
@click.option("--max-m", type=int, default=3, show_default=True)
@click.option("--max-n", type=int, default=4, show_default=True)
@click.option("--exclude", default="")
@click.option("--interval", type=float, default=1.0, show_default=True)
def main(server, map_text, alpha, max_m, max_n, exclude, interval):
    """Submit a portrait grid to the service and print the finished report."""
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
    try:
        analysis_id = submit_grid(server, map_text, alpha, max_m, max_n, exclude)
        click.echo(f"submitted {analysis_id}", err=True)
        entry = wait_for_result(server, analysis_id, interval)
    except requests.exceptions.ConnectionError as e:
        raise click.ClickException(f"cannot reach {server}; is the server running? ({e})")
    except requests.exceptions.Timeout:
        raise click.ClickException("the request timed out")
    click.echo(json.dumps(entry, ensure_ascii=False, indent=2))
    if entry["status"] == "FAILED":
        raise SystemExit(1)


if __name__ == "__main__":
    main()
