"""Command-line entry point exposing the solvers, audits and experiment drivers.

Data goes to stdout or ``--out`` files; errors go to stderr as one JSON object
with a distinct exit code per failure class: 2 usage, 3 malformed input file,
4 constraint violation, 5 enumeration budget exceeded.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import sys
from pathlib import Path

import click

from .bestx import best_x, ratio_audit
from .errors import BudgetExceededError, InvalidInputError
from .fixed_span import assort_opt, solve_fixed_span
from .harness import BanditConfig, OfflineConfig, run_bandit_experiment, run_offline_benchmark
from .instance_io import load_instance
from .multi_purchase import solve_general_fixed_span
from .oracle import brute_force_general, brute_force_optimal
from .reports import (
    ranking_to_str,
    write_audit_csv,
    write_bandit_csv,
    write_bandit_regret_csv,
    write_bandit_summary,
    write_offline_csv,
    write_offline_summary,
)
from .special import geometric_rank, prefix_condition

EXIT_BAD_FILE = 3
EXIT_INVALID = 4
EXIT_BUDGET = 5


def _fail(code: int, exc: Exception) -> None:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    click.echo(json.dumps(payload), err=True)
    sys.exit(code)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except BudgetExceededError as exc:
            _fail(EXIT_BUDGET, exc)
        except InvalidInputError as exc:
            _fail(EXIT_INVALID, exc)
        except (json.JSONDecodeError, OSError, KeyError, TypeError) as exc:
            _fail(EXIT_BAD_FILE, exc)

    return wrapper


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else str(v) for v in row])
    return buf.getvalue()


def _emit_table(header, rows, fmt: str, out: str | None) -> None:
    if fmt == "csv":
        _emit(_rows_to_csv(header, rows), out)
    else:
        payload = [dict(zip(header, row)) for row in rows]
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", out)


def _load_span(instance, required: bool = True):
    if instance.span is None and required:
        raise InvalidInputError("this command needs a 'span' entry in the instance file")
    return instance.span


fmt_option = click.option(
    "--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True
)
out_option = click.option("--out", default=None, help="Write output to this file instead of stdout.")


@click.group()
def main() -> None:
    """Revenue-maximizing product ranking under cascade browsing."""


@main.command("solve-fixed")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--span", required=True, type=int)
@fmt_option
@out_option
@handle_errors
def cmd_solve_fixed(instance_path, span, fmt, out):
    """Optimal ranking for a fixed attention span."""
    inst = load_instance(instance_path)
    value, ranking = solve_fixed_span(inst.catalog, span)
    _emit_table(["span", "value", "ranking"], [(span, value, ranking_to_str(ranking))], fmt, out)


@main.command("assortopt")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--m", "capacity", type=int, default=None, help="Largest span; defaults to the instance span capacity or n.")
@fmt_option
@out_option
@handle_errors
def cmd_assortopt(instance_path, capacity, fmt, out):
    """Per-span optimal values and rankings for x = 1..M."""
    inst = load_instance(instance_path)
    n = len(inst.catalog)
    if capacity is None:
        capacity = min(inst.span.capacity, n) if inst.span is not None else n
    sol = assort_opt(inst.catalog, capacity)
    rows = [
        (x, sol.value_at(x), ranking_to_str(sol.ranking_at(x)))
        for x in range(1, sol.capacity + 1)
    ]
    _emit_table(["span", "value", "ranking"], rows, fmt, out)


@main.command("bestx")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--fill", is_flag=True, help="Greedy-fill the slate up to capacity.")
@fmt_option
@out_option
@handle_errors
def cmd_bestx(instance_path, fill, fmt, out):
    """Best-x approximation for the instance's span distribution."""
    inst = load_instance(instance_path)
    dist = _load_span(inst)
    res = best_x(inst.catalog, dist, fill=fill)
    rows = [
        (
            res.chosen_x,
            ranking_to_str(res.ranking),
            res.lower_bound,
            res.expected_revenue,
            res.clairvoyant,
            res.ratio,
        )
    ]
    _emit_table(
        ["chosen_x", "ranking", "lower_bound", "expected_revenue", "clairvoyant", "ratio"],
        rows,
        fmt,
        out,
    )


@main.command("geo")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--alpha", required=True, type=float)
@click.option("--m", "capacity", type=int, default=None)
@fmt_option
@out_option
@handle_errors
def cmd_geo(instance_path, alpha, capacity, fmt, out):
    """Exact optimal ranking under a geometric span distribution."""
    inst = load_instance(instance_path)
    n = len(inst.catalog)
    if capacity is None:
        capacity = min(inst.span.capacity, n) if inst.span is not None else n
    res = geometric_rank(inst.catalog, alpha, capacity)
    rows = [(alpha, res.value, ranking_to_str(res.ranking), int(res.tied_scores))]
    _emit_table(["alpha", "value", "ranking", "tied_scores"], rows, fmt, out)


@main.command("prefix-check")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--m", "capacity", type=int, default=None)
@fmt_option
@out_option
@handle_errors
def cmd_prefix_check(instance_path, capacity, fmt, out):
    """Check the prefix-ranking condition (top-M lambda*r indices increasing)."""
    inst = load_instance(instance_path)
    n = len(inst.catalog)
    if capacity is None:
        capacity = min(inst.span.capacity, n) if inst.span is not None else n
    holds, witness = prefix_condition(inst.catalog, capacity)
    rows = [(int(holds), "" if witness is None else f"{witness[0]} {witness[1]}")]
    _emit_table(["holds", "witness"], rows, fmt, out)


@main.command("multi")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--span", required=True, type=int)
@fmt_option
@out_option
@handle_errors
def cmd_multi(instance_path, span, fmt, out):
    """Fixed-span optimum in the multi-purchase model (needs cont_prob fields)."""
    inst = load_instance(instance_path)
    if inst.general is None:
        raise InvalidInputError("multi-purchase solving needs cont_prob on every product")
    value, ranking = solve_general_fixed_span(inst.general, span)
    _emit_table(["span", "value", "ranking"], [(span, value, ranking_to_str(ranking))], fmt, out)


@main.command("oracle")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--span", type=int, default=None)
@click.option("--general", is_flag=True)
@click.option("--max-len", type=int, default=None)
@fmt_option
@out_option
@handle_errors
def cmd_oracle(instance_path, span, general, max_len, fmt, out):
    """Brute-force optimum over every ranking (small instances only)."""
    inst = load_instance(instance_path)
    if general:
        if inst.general is None:
            raise InvalidInputError("--general needs cont_prob on every product")
        if span is None:
            raise InvalidInputError("--general needs --span")
        res = brute_force_general(inst.general, span, max_len=max_len)
    elif span is not None:
        res = brute_force_optimal(inst.catalog, span=span, max_len=max_len)
    else:
        dist = _load_span(inst)
        res = brute_force_optimal(inst.catalog, dist=dist, max_len=max_len)
    rows = [(res.value, len(res.optima), ranking_to_str(res.optima[0]), res.node_count)]
    _emit_table(["value", "optima_count", "lex_min_optimum", "nodes"], rows, fmt, out)


@main.command("audit")
@click.option("--corpus", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out", required=True)
@handle_errors
def cmd_audit(corpus, out):
    """Ratio audit of Best-x over every instance JSON in a directory."""
    paths = sorted(Path(corpus).glob("*.json"))
    if not paths:
        raise InvalidInputError(f"no *.json instances found in {corpus}")
    instances = []
    for p in paths:
        inst = load_instance(p)
        if inst.span is None:
            raise InvalidInputError(f"instance {p.name} has no span distribution")
        instances.append((p.stem, inst.catalog, inst.span))
    report = ratio_audit(instances)
    write_audit_csv(report, out)
    click.echo(json.dumps(report.summary(), indent=2, sort_keys=True))


@main.command("bench-offline")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True)
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--threads", type=int, default=None, help="Cap harness parallelism.")
@handle_errors
def cmd_bench_offline(config_path, out_dir, seed, threads):
    """Heuristic benchmark versus the clairvoyant over random instances."""
    data = json.loads(Path(config_path).read_text(encoding="utf-8"))
    if seed is not None:
        data["seed"] = seed
    if threads is not None:
        data["threads"] = threads
    config = OfflineConfig.from_dict(data)
    report = run_offline_benchmark(config)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_offline_csv(report, out / "ratios.csv")
    write_offline_summary(report, out / "summary.json")
    click.echo(json.dumps(report.summary(), indent=2, sort_keys=True))


@main.command("bench-bandit")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True)
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--threads", type=int, default=None, help="Cap harness parallelism.")
@handle_errors
def cmd_bench_bandit(config_path, out_dir, seed, threads):
    """RankUCB simulation against the informed Best-x benchmark."""
    data = json.loads(Path(config_path).read_text(encoding="utf-8"))
    if seed is not None:
        data["seed"] = seed
    if threads is not None:
        data["threads"] = threads
    config = BanditConfig.from_dict(data)
    report = run_bandit_experiment(config)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_bandit_csv(report, out / "online_data.csv")
    write_bandit_regret_csv(report, out / "regret.csv")
    write_bandit_summary(report, out / "summary.json")
    click.echo(
        json.dumps({"terminal_ratio_mean": float(report.ratio_mean[-1])}, sort_keys=True)
    )


if __name__ == "__main__":
    main()
