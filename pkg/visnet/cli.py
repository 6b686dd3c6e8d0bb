"""
VisNet command line
visnet analyze | dfa | fit | smallworld | graph | synth
"""

from __future__ import annotations

import io
import json
import math
import time
from pathlib import Path

import click
import numpy as np
from pydantic import ValidationError

from . import __version__
from .config import settings
from .dfa import DfaConfig, DfaDirection, estimate_hurst
from .exceptions import VisnetError
from .logger import configure_logging, get_logger
from .metrics import degree_sequence, null_model_compare, small_world_scan
from .report import AnalysisConfig, SeriesInput, run_analysis, write_report
from .series import SyntheticKind, SyntheticSpec, export_csv, generate, load_columns, load_csv, slice_series, write_csv
from .tailfit import TailFamily, fit_tail, nested_loglik_ratio, with_bootstrap
from .utils.files import atomic_text_writer, write_table
from .visibility import CONSTRUCTORS, build_vg, read_edgelist, write_edgelist

logger = get_logger(__name__)

KIND_ALIASES = {
    "ramp": SyntheticKind.LINEAR_RAMP,
    "white-noise": SyntheticKind.WHITE_NOISE,
    "noise": SyntheticKind.WHITE_NOISE,
}
FAMILY_CHOICES = {
    "power_law": [TailFamily.POWER_LAW],
    "truncated": [TailFamily.TRUNCATED],
    "both": [TailFamily.POWER_LAW, TailFamily.TRUNCATED],
}


class VisnetGroup(click.Group):
    """Turns VisnetError into a one-line diagnostic and its exit code."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except VisnetError as e:
            click.echo(f"visnet: error: {e.message}", err=True)
            ctx.exit(e.exit_code)


class WindowLengths(click.ParamType):
    """`start:stop:count` (log-spaced unique integers) or `10,20,50`."""

    name = "lengths"

    def convert(self, value, param, ctx):
        if isinstance(value, list):
            return value
        text = str(value).strip()
        try:
            if ":" in text:
                start, stop, count = (int(p) for p in text.split(":"))
                if not 0 < start < stop or count < 1:
                    raise ValueError
                grid = np.logspace(math.log10(start), math.log10(stop), count)
                return np.unique(np.rint(grid).astype(np.int64)).tolist()
            lengths = sorted({int(p) for p in text.split(",") if p.strip()})
        except ValueError:
            self.fail(f"{value!r} is neither start:stop:count nor a comma list of integers", param, ctx)
        if not lengths:
            self.fail("no window lengths given", param, ctx)
        return lengths


class KMinType(click.ParamType):
    name = "k_min"

    def convert(self, value, param, ctx):
        if value == "auto" or isinstance(value, int):
            return value
        try:
            k_min = int(value)
        except ValueError:
            self.fail(f"{value!r} is not 'auto' or a positive integer", param, ctx)
        if k_min < 1:
            self.fail("k_min must be at least 1", param, ctx)
        return k_min


def input_options(fn):
    fn = click.option("--has-header/--no-header", default=True, show_default=True, help="First line names the columns")(fn)
    fn = click.option("--column", "-c", default="0", show_default=True, help="Column name or 0-based position")(fn)
    fn = click.option("--input", "-i", "input_path", required=True, type=click.Path(path_type=Path), help="Series CSV (.gz accepted)")(fn)
    return fn


def algo_option(fn):
    return click.option(
        "--algo",
        type=click.Choice(sorted(CONSTRUCTORS)),
        default="dc",
        show_default=True,
        help="Visibility graph constructor",
    )(fn)


def dfa_options(fn):
    fn = click.option(
        "--direction",
        type=click.Choice([d.value for d in DfaDirection]),
        default=DfaDirection.FORWARD_ONLY.value,
        show_default=True,
    )(fn)
    fn = click.option("--scale-count", type=int, default=None, help=f"Scales in the grid [default: {settings.dfa_scale_count}]")(fn)
    fn = click.option("--max-scale", type=int, default=None, help="Largest scale [default: N/4]")(fn)
    fn = click.option("--min-scale", type=int, default=None, help=f"Smallest scale [default: {settings.dfa_min_scale}]")(fn)
    return fn


def _dfa_config(min_scale, max_scale, scale_count, direction) -> DfaConfig:
    values = {"max_scale": max_scale, "direction": direction}
    if min_scale is not None:
        values["min_scale"] = min_scale
    if scale_count is not None:
        values["scale_count"] = scale_count
    try:
        return DfaConfig(**values)
    except ValidationError as e:
        raise click.UsageError(f"invalid DFA options: {_first_error(e)}") from e


def _first_error(e: ValidationError) -> str:
    err = e.errors()[0]
    where = ".".join(str(p) for p in err.get("loc", ()))
    return f"{where}: {err['msg']}" if where else err["msg"]


def _emit_json(payload: dict, out: Path | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out is None:
        click.echo(text, nl=False)
        return
    with atomic_text_writer(out) as sink:
        sink.write(text)


@click.group(cls=VisnetGroup)
@click.version_option(__version__, prog_name="visnet")
@click.option("-v", "--verbose", count=True, help="-v for progress, -vv for per-step detail")
def cli(verbose: int):
    """Visibility-graph analysis of financial time series."""
    level = {0: settings["log_level"], 1: "INFO"}.get(verbose, "DEBUG")
    configure_logging(level)


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

@cli.command()
@click.option("--input", "-i", "inputs", multiple=True, required=True, type=click.Path(path_type=Path), help="Series CSV; repeatable")
@click.option("--column", "-c", "columns", multiple=True, help="Column name or position; repeatable")
@click.option("--all-columns", is_flag=True, help="Analyse every numeric column")
@click.option("--has-header/--no-header", default=True, show_default=True)
@click.option("--out", "-o", "out_dir", type=click.Path(path_type=Path), default=Path("out"), show_default=True)
@algo_option
@click.option("--family", type=click.Choice(sorted(FAMILY_CHOICES)), default="both", show_default=True)
@click.option("--replicas", type=click.IntRange(min=100), default=None, help=f"Bootstrap replicas [default: {settings.replicas}]")
@click.option("--no-bootstrap", is_flag=True, help="Skip bootstrap p-values")
@click.option("--min-tail-fraction", type=click.FloatRange(min=0.0, max=1.0, max_open=True), default=None, help=f"Smallest tail share for automatic k_min [default: {settings.min_tail_fraction}]")
@click.option("--realizations", type=click.IntRange(min=1), default=None, help=f"G(N, M) realizations [default: {settings.realizations}]")
@click.option("--seed", type=click.IntRange(min=0, max=2**64 - 1), default=None, help=f"Run seed [default: {settings.seed}]")
@click.option("--lengths", type=WindowLengths(), default=None, help="Small-world window lengths")
@click.option("--skip-smallworld", is_flag=True)
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Worker cap [default: VISNET_WORKERS]")
@click.option("--reference", "references", multiple=True, help="LABEL=H reference Hurst exponent; repeatable")
@dfa_options
def analyze(
    inputs, columns, all_columns, has_header, out_dir, algo, family, replicas, no_bootstrap, min_tail_fraction,
    realizations, seed, lengths, skip_smallworld, workers, references,
    min_scale, max_scale, scale_count, direction,
):
    """Full pipeline: DFA, graph metrics, tail fits, small-world scan."""
    began = time.perf_counter()
    reference_hurst: dict[str, float] = {}
    for entry in references:
        label, _, value = entry.rpartition("=")
        try:
            reference_hurst[label] = float(value)
        except ValueError:
            raise click.BadParameter(f"{entry!r} is not LABEL=H", param_hint="--reference") from None

    overrides = {
        "algorithm": algo,
        "families": FAMILY_CHOICES[family],
        "bootstrap": not no_bootstrap,
        "smallworld": not skip_smallworld,
        "lengths": lengths,
        "dfa": _dfa_config(min_scale, max_scale, scale_count, direction),
        "reference_hurst": reference_hurst,
    }
    for key, value in (
        ("replicas", replicas),
        ("realizations", realizations),
        ("seed", seed),
        ("min_tail_fraction", min_tail_fraction),
    ):
        if value is not None:
            overrides[key] = value
    config = AnalysisConfig(**overrides)

    items: list[SeriesInput] = []
    for path in inputs:
        if all_columns:
            loaded = load_columns(path, has_header)
        else:
            loaded = [load_csv(path, c, has_header) for c in (columns or ("0",))]
        for series in loaded:
            items.append(SeriesInput(series=series, source=str(path), index=len(items)))

    report, figures = run_analysis(items, config, workers=workers)
    written = write_report(out_dir, report, figures, time.perf_counter() - began)
    click.echo(f"{len(report.series)} series analysed, {len(written)} files written to {out_dir}")


# ---------------------------------------------------------------------------
# single stages
# ---------------------------------------------------------------------------

@cli.command()
@input_options
@dfa_options
@click.option("--out", "-o", type=click.Path(path_type=Path), default=None, help="CSV of s,F points")
@click.option("--workers", type=click.IntRange(min=1), default=None)
@click.option("--reference", type=float, default=None, help="Reference H to compare against")
def dfa(input_path, column, has_header, min_scale, max_scale, scale_count, direction, out, workers, reference):
    """Hurst exponent by detrended fluctuation analysis."""
    series = load_csv(input_path, column, has_header)
    result = estimate_hurst(series, _dfa_config(min_scale, max_scale, scale_count, direction), workers=workers)
    if out is not None:
        write_table(out, ("s", "F"), (result.scales, result.fluctuations))
    summary = result.summary()
    if reference is not None:
        summary["reference"] = reference
        summary["deviation"] = result.hurst - reference
    _emit_json(summary, None)


@cli.command()
@click.option("--degrees-from", type=click.Path(path_type=Path), default=None, help="Edge list ('i j' lines)")
@click.option("--input", "-i", "input_path", type=click.Path(path_type=Path), default=None, help="Series CSV to build the graph from")
@click.option("--column", "-c", default="0", show_default=True)
@click.option("--has-header/--no-header", default=True, show_default=True)
@algo_option
@click.option("--family", type=click.Choice(sorted(FAMILY_CHOICES)), default="both", show_default=True)
@click.option("--k-min", type=KMinType(), default="auto", show_default=True)
@click.option("--min-tail-fraction", type=click.FloatRange(min=0.0, max=1.0, max_open=True), default=None, help="Smallest tail share for automatic k_min")
@click.option("--replicas", type=click.IntRange(min=100), default=None)
@click.option("--no-bootstrap", is_flag=True)
@click.option("--seed", type=click.IntRange(min=0, max=2**64 - 1), default=None)
@click.option("--workers", type=click.IntRange(min=1), default=None)
@click.option("--out", "-o", type=click.Path(path_type=Path), default=None, help="JSON output [default: stdout]")
def fit(degrees_from, input_path, column, has_header, algo, family, k_min, min_tail_fraction, replicas, no_bootstrap, seed, workers, out):
    """Power-law and truncated power-law fits of a degree distribution."""
    if (degrees_from is None) == (input_path is None):
        raise click.UsageError("give exactly one of --degrees-from or --input")
    if degrees_from is not None:
        graph = read_edgelist(degrees_from)
    else:
        graph = build_vg(load_csv(input_path, column, has_header), algo)
    degrees = degree_sequence(graph)

    replicas = settings.replicas if replicas is None else replicas
    seed = settings.seed if seed is None else seed
    fits = []
    for fam in FAMILY_CHOICES[family]:
        result = fit_tail(degrees, fam, k_min, min_tail_fraction=min_tail_fraction)
        if not no_bootstrap:
            result = with_bootstrap(degrees, result, replicas=replicas, seed=seed, workers=workers)
        fits.append(result)

    payload = {
        "series": graph.label,
        "fits": [f.model_dump(mode="json", by_alias=True) for f in fits],
        "table": [f.summary(graph.label) for f in fits],
    }
    if len(fits) == 2:
        payload["nested_loglik_ratio"] = nested_loglik_ratio(degrees, fits[1].k_min)
    _emit_json(payload, out)


@cli.command()
@input_options
@algo_option
@click.option("--lengths", type=WindowLengths(), default=None, help="start:stop:count or comma list")
@click.option("--out", "-o", type=click.Path(path_type=Path), default=None, help="CSV of N,L,windows")
@click.option("--null-realizations", type=click.IntRange(min=0), default=0, show_default=True, help="Also compare the full graph with G(N, M)")
@click.option("--seed", type=click.IntRange(min=0, max=2**64 - 1), default=None)
@click.option("--workers", type=click.IntRange(min=1), default=None)
def smallworld(input_path, column, has_header, algo, lengths, out, null_realizations, seed, workers):
    """Average shortest path length against window length."""
    series = load_csv(input_path, column, has_header)
    scan = small_world_scan(series, lengths, algorithm=algo, workers=workers)
    if out is not None:
        write_table(
            out,
            ("N", "L", "windows"),
            ([p.length for p in scan.points], [p.path_length for p in scan.points], [p.windows for p in scan.points]),
        )
    payload = {
        "fit_all": scan.fit_all.model_dump(mode="json") if scan.fit_all else None,
        "fit_small": scan.fit_small.model_dump(mode="json") if scan.fit_small else None,
        "small_cutoff": scan.small_cutoff,
        "lengths": len(scan.points),
    }
    if null_realizations:
        graph = build_vg(series, algo)
        null = null_model_compare(graph, realizations=null_realizations, seed=seed, workers=workers)
        payload["null_model"] = null.model_dump(mode="json")
    _emit_json(payload, None)


@cli.command()
@input_options
@algo_option
@click.option("--emit-edgelist", type=click.Path(path_type=Path), default=None, help="Write 'i j' lines here (.gz accepted)")
@click.option("--start", type=click.IntRange(min=0), default=0, show_default=True, help="First index of the window")
@click.option("--length", type=click.IntRange(min=2), default=None, help="Window length [default: to the end]")
def graph(input_path, column, has_header, algo, emit_edgelist, start, length):
    """Build a visibility graph and report its size."""
    series = load_csv(input_path, column, has_header)
    if start or length is not None:
        series = slice_series(series, start, len(series) - start if length is None else length)
    vg = build_vg(series, algo)
    if emit_edgelist is not None:
        write_edgelist(vg, emit_edgelist)
    click.echo(f"nodes {vg.node_count}")
    click.echo(f"edges {vg.edge_count}")


@cli.command()
@click.option(
    "--kind",
    type=click.Choice([k.value for k in SyntheticKind] + sorted(KIND_ALIASES)),
    required=True,
)
@click.option("--length", "-n", type=int, required=True)
@click.option("--hurst", type=float, default=None, help="Hurst exponent in (0, 1), fgn only")
@click.option("--seed", type=click.IntRange(min=0, max=2**64 - 1), default=0, show_default=True)
@click.option("--out", "-o", default="-", show_default=True, help="CSV path or '-' for stdout")
def synth(kind, length, hurst, seed, out):
    """Write a synthetic series as index,value CSV."""
    resolved = KIND_ALIASES.get(kind, kind)
    try:
        spec = SyntheticSpec(kind=resolved, length=length, hurst=hurst, seed=seed)
    except ValidationError as e:
        raise click.UsageError(f"invalid series spec: {_first_error(e)}") from e
    series = generate(spec)
    if out == "-":
        buffer = io.StringIO()
        export_csv(series, buffer)
        click.echo(buffer.getvalue(), nl=False)
    else:
        write_csv(series, out)
        logger.info("wrote %d points to %s", len(series), out)


if __name__ == "__main__":
    cli()
