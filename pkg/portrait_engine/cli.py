# portrait_engine/cli.py
import functools
import json
import logging
import sys
import time

import click
from tqdm import tqdm

from portrait_engine.abc_oracle import mason_stothers_check, zero_place_count_check
from portrait_engine.config import get_settings
from portrait_engine.constructor import realize_chain
from portrait_engine.dynatomic import detect_power_map_conjugacy, x_set, y_set
from portrait_engine.dynmap import (
    IterationContext,
    PlaceSet,
    Portrait,
    ProjPointK,
    parse_place_set,
    portrait_mod_place,
)
from portrait_engine.errors import ExpressionError, PreconditionError, ResourceLimitError
from portrait_engine.expression import (
    parse_expression,
    parse_map_expression,
    parse_point_expression,
    parse_polynomial_expression,
    parse_portrait_list,
    parse_rational,
    parse_rational_list,
)
from portrait_engine.heights import canonical_height, height_comparison_bound, weil_height
from portrait_engine.places import RatFuncT, parse_place
from portrait_engine.report import generate_analysis_id, save_report_to_json, write_grid_csv
from portrait_engine.witness import find_witness, portrait_grid, starting_point_sweep

logger = logging.getLogger(__name__)

EXIT_PRECONDITION = 2
EXIT_RESOURCE = 3
EXIT_PARSE = 4


def handle_errors(func):
    """Map engine errors to exit codes 2 (precondition), 3 (cap) and 4 (parse)."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ExpressionError as e:
            click.echo(f"parse error: {e}", err=True)
            sys.exit(EXIT_PARSE)
        except ResourceLimitError as e:
            click.echo(f"resource limit: {e}", err=True)
            sys.exit(EXIT_RESOURCE)
        except PreconditionError as e:
            click.echo(f"precondition violated: {e}", err=True)
            sys.exit(EXIT_PRECONDITION)

    return wrapper


def output_options(func):
    func = click.option("--json", "as_json", is_flag=True, help="Print the report as JSON.")(func)
    func = click.option("--save", is_flag=True, help="Also write the JSON report into the output folder.")(func)
    func = click.option("--degree-cap", type=int, default=None, help="Override the degree cap.")(func)
    return func


def emit(data: dict, as_json: bool, save: bool, subject: str, kind: str):
    if as_json:
        click.echo(json.dumps(data, ensure_ascii=False))
    else:
        for key, value in data.items():
            shown = value if isinstance(value, (str, int)) or value is None else json.dumps(value, ensure_ascii=False)
            click.echo(f"{key}: {shown}")
    if save:
        analysis_id = generate_analysis_id(subject, kind)
        save_report_to_json({"analysisId": analysis_id, **data}, f"{analysis_id}.json")


def load_map(text: str):
    return parse_map_expression(text).to_map()


def load_point(text: str) -> ProjPointK:
    return ProjPointK.from_expr(parse_point_expression(text))


def load_exclusions(text, trust: bool) -> PlaceSet:
    return parse_place_set(text, trust=trust) if text else PlaceSet()


@click.group()
@click.option("--verbose", is_flag=True, help="Log at DEBUG level.")
def cli(verbose):
    """Preperiodicity portraits of rational maps over Q(t)."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


@cli.command()
@click.option("--point", "point_text", required=True, help='Point of P^1(Q(t)), e.g. "(t^2+1)/t" or "inf".')
@output_options
@handle_errors
def height(point_text, as_json, save, degree_cap):
    """Weil height of a point."""
    point = load_point(point_text)
    emit({"point": str(point), "height": weil_height(point)}, as_json, save, point_text, "height")


@cli.command()
@click.option("--map", "map_text", required=True)
@click.option("--alpha", required=True)
@click.option("--epsilon", default="1/1024", show_default=True)
@output_options
@handle_errors
def canheight(map_text, alpha, epsilon, as_json, save, degree_cap):
    """Canonical height with a certified radius."""
    phi = load_map(map_text)
    estimate = canonical_height(phi, load_point(alpha), parse_rational(epsilon), IterationContext(degree_cap))
    data = {"map": str(phi), "alpha": alpha, "bound": height_comparison_bound(phi), **estimate.to_dict()}
    emit(data, as_json, save, map_text, "canheight")


@cli.command()
@click.option("--map", "map_text", required=True)
@click.option("--alpha", required=True)
@click.option("--place", "place_text", required=True, help='"t+1", "t^2+1" or "inf".')
@click.option("--bound", type=int, default=None, help="Iteration bound B (default from settings).")
@click.option("--trust-place", is_flag=True, help="Skip the irreducibility check of the place.")
@output_options
@handle_errors
def portrait(map_text, alpha, place_text, bound, trust_place, as_json, save, degree_cap):
    """Portrait of alpha modulo a place."""
    phi = load_map(map_text)
    place = parse_place(place_text, trust=trust_place)
    result = portrait_mod_place(phi, load_point(alpha), place, bound)
    data = {"map": str(phi), "alpha": alpha, "place": str(place), "portrait": None if result is None else result.to_list()}
    emit(data, as_json, save, map_text, "portrait")


@cli.command()
@click.option("--map", "map_text", required=True)
@click.option("--alpha", required=True)
@click.option("--m", "m", type=int, required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--exclude", default="", help='Extra places S, e.g. "t;t^2+1;inf".')
@click.option("--trust-place", is_flag=True)
@output_options
@handle_errors
def witness(map_text, alpha, m, n, exclude, trust_place, as_json, save, degree_cap):
    """Places where alpha has portrait (m,n)."""
    phi = load_map(map_text)
    report = find_witness(
        phi, load_point(alpha), Portrait(m, n), load_exclusions(exclude, trust_place), IterationContext(degree_cap)
    )
    emit(report.to_dict(), as_json, save, map_text, "witness")


@cli.command()
@click.option("--map", "map_text", required=True)
@click.option("--alpha", required=True)
@click.option("--max-m", type=int, required=True)
@click.option("--max-n", type=int, required=True)
@click.option("--exclude", default="")
@click.option("--trust-place", is_flag=True)
@click.option("--workers", type=int, default=None, help="Worker threads (default from settings).")
@click.option("--progress", is_flag=True, help="Show a progress bar on stderr.")
@click.option("--csv", "csv_path", default=None, help="Also write the grid as CSV.")
@output_options
@handle_errors
def grid(map_text, alpha, max_m, max_n, exclude, trust_place, workers, progress, csv_path, as_json, save, degree_cap):
    """
    find_witness over m = 0..max-m and n = 1..max-n.

    That is (max-m + 1) * max-n cells, so --max-m 3 --max-n 4 gives 16.
    """
    phi = load_map(map_text)
    workers = workers or get_settings().grid_workers
    start = time.time()
    with tqdm(total=(max_m + 1) * max_n, desc="grid", unit="cell", file=sys.stderr, disable=not progress) as pbar:
        report = portrait_grid(
            phi,
            load_point(alpha),
            max_m,
            max_n,
            load_exclusions(exclude, trust_place),
            degree_cap=degree_cap,
            workers=workers,
            progress=lambda cell: pbar.update(1),
        )
    logger.debug("grid took %.2fs", time.time() - start)
    if csv_path:
        write_grid_csv(report, csv_path)
    if as_json:
        emit(report.to_dict(), True, save, map_text, "grid")
        return
    click.echo(f"X(phi) = {report.to_dict()['x_set']}   Y(phi,alpha) = {report.to_dict()['y_set']}")
    for cell in report.cells:
        notes = ", ".join(cell.annotations)
        click.echo(f"({cell.m},{cell.n})  {cell.report.status.value:<28} {cell.report.sample_witness or '-':<12} {notes}")
    if save:
        analysis_id = generate_analysis_id(map_text, "grid")
        save_report_to_json({"analysisId": analysis_id, **report.to_dict()}, f"{analysis_id}.json")


@cli.command()
@click.option("--map", "map_text", required=True)
@click.option("--m", "m", type=int, required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--candidates", default="-3,-2,-1,0,1,2,3", show_default=True)
@click.option("--exclude", default="")
@click.option("--trust-place", is_flag=True)
@output_options
@handle_errors
def sweep(map_text, m, n, candidates, exclude, trust_place, as_json, save, degree_cap):
    """find_witness over constant starting points."""
    phi = load_map(map_text)
    report = starting_point_sweep(
        phi,
        Portrait(m, n),
        load_exclusions(exclude, trust_place),
        parse_rational_list(candidates),
        IterationContext(degree_cap),
    )
    emit(report.to_dict(), as_json, save, map_text, "sweep")


@cli.command()
@click.option("--map", "map_text", required=True)
@click.option("--max-n", type=int, required=True)
@output_options
@handle_errors
def xset(map_text, max_n, as_json, save, degree_cap):
    """Periods n <= max-n whose minimum-period points are all totally ramified."""
    phi = load_map(map_text)
    periods = x_set(phi, max_n, IterationContext(degree_cap))
    data = {"map": str(phi), "x_set": sorted(periods), "power_map_type": detect_power_map_conjugacy(phi).value}
    emit(data, as_json, save, map_text, "xset")


@cli.command()
@click.option("--map", "map_text", required=True)
@click.option("--alpha", required=True)
@click.option("--max-m", type=int, required=True)
@output_options
@handle_errors
def yset(map_text, alpha, max_m, as_json, save, degree_cap):
    """Preperiods m <= max-m with phi totally ramified over phi^m(alpha)."""
    phi = load_map(map_text)
    preperiods = y_set(phi, load_point(alpha), max_m, IterationContext(degree_cap))
    emit({"map": str(phi), "alpha": alpha, "y_set": sorted(preperiods)}, as_json, save, map_text, "yset")


@cli.command()
@click.option("--a", "a_text", default=None, help="Mason-Stothers: polynomial A in t.")
@click.option("--b", "b_text", default=None, help="Mason-Stothers: polynomial B in t.")
@click.option("--f", "f_text", default=None, help="Zero count: monic separable f in z.")
@click.option("--gamma", default=None, help="Zero count: nonconstant gamma in Q(t).")
@output_options
@handle_errors
def abc(a_text, b_text, f_text, gamma, as_json, save, degree_cap):
    """Mason-Stothers check (--a/--b) or zero-count check (--f/--gamma)."""
    if a_text and b_text:
        report = mason_stothers_check(parse_polynomial_expression(a_text), parse_polynomial_expression(b_text))
        subject = f"{a_text}_{b_text}"
    elif f_text and gamma:
        report = zero_place_count_check(
            parse_expression(f_text, ("z", "t")), RatFuncT.from_expr(parse_expression(gamma, ("t",)))
        )
        subject = f"{f_text}_{gamma}"
    else:
        raise PreconditionError("give either --a and --b, or --f and --gamma")
    emit(report.to_dict(), as_json, save, subject, "abc")


@cli.command()
@click.option("--degree", "d", type=int, required=True)
@click.option("--points", required=True, help='Distinct constants, e.g. "0,1".')
@click.option("--portraits", required=True, help='Portraits, e.g. "(0,1);(0,2)".')
@output_options
@handle_errors
def construct(d, points, portraits, as_json, save, degree_cap):
    """Normal-form coefficients (a_(d-2), ..., a_0) realizing the portraits."""
    report = realize_chain(d, parse_rational_list(points), parse_portrait_list(portraits))
    emit(report.to_dict(), as_json, save, f"deg{d}", "construct")
