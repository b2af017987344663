"""
Command line entry point: run and grade devices, generate and validate tasks, replay the failure
corpus, serve the agent gateway over stdio, build reference solutions and print gap reports.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import TextIO

import sentry_sdk
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from redbench import __version__
from redbench.core.errors import RedbenchError
from redbench.core.metrics import start_metrics_server
from redbench.logging import logging_config, recent_lines, setup_logging, stop_logging
from redbench.packages.analytics.errors import CsvSchemaError, EmptyResultSetError
from redbench.packages.analytics.gaps import CONSOLIDATION_RATES, consolidation_delta, render_json, render_table
from redbench.packages.analytics.results import (
    BASELINE,
    WITH_HINT_SCIENTIST,
    Consolidation,
    RunResult,
    Setting,
    aggregate,
    breakdown,
    load_gap_reports,
    load_results,
    models,
    parse_assistance,
    render_breakdown,
    task_metrics,
)
from redbench.packages.contracts.checker import record_trace
from redbench.packages.contracts.models import Verdict
from redbench.packages.devices.constructors import build_for_task
from redbench.packages.devices.corpus import load_corpus, normalize_case_id, simulate_case
from redbench.packages.devices.errors import UnknownCaseError
from redbench.packages.devices.models import Device, FailureCategory
from redbench.packages.gateway.server import serve
from redbench.packages.gateway.session import apply_device, open_session, submit
from redbench.packages.tasks.generator import generate_task
from redbench.packages.tasks.loader import dump_task, load_task, serialize_task
from redbench.packages.tasks.models import Family
from redbench.settings import load_settings, settings, use_settings

log = logging.getLogger("redbench")


def _console(stream: TextIO | None = None) -> Console:
    return Console(file=stream or sys.stdout, highlight=False, soft_wrap=True)


def _print_verdict(console: Console, verdict: Verdict, metrics: dict[str, int] | None = None):
    status = "[green]PASS[/green]" if verdict.passed else "[red]FAIL[/red]"
    console.print(f"{status} {escape(verdict.diagnostics.splitlines()[-1] if verdict.diagnostics else '')}")
    for violation in verdict.violations:
        console.print(f"  [yellow]-[/yellow] {escape(str(violation))}")
    if metrics:
        console.print(", ".join(f"{k.replace('_', ' ')}: {v}" for k, v in metrics.items()))


def init_sentry():
    if settings.sentry_dsn:
        sentry_sdk.init(dsn=settings.sentry_dsn, environment=settings.sentry_env, release=__version__)
        log.info("Sentry initialized.")


def cmd_run(args: argparse.Namespace) -> int:
    spec = load_task(args.task)
    device = Device.load(args.device)
    session = open_session(spec)
    apply_device(session, device)

    events = None
    if args.events:
        graded = session.world.snapshot()
        start = len(graded.events)
        try:
            record_trace(graded, spec)
            events = graded.events[start:]
        except RedbenchError as e:
            log.warning(f"No event stream recorded: {e.error_message}")

    verdict, trace, metrics = submit(session)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    (args.out_dir / "verdict.json").write_text(
        json.dumps({**verdict.to_dict(), "metrics": metrics}, indent=2) + "\n", encoding="utf-8"
    )
    if trace is not None:
        (args.out_dir / "trace.csv").write_text(trace.to_csv(), encoding="utf-8")
    if events is not None:
        lines = [json.dumps(x.to_record(), sort_keys=True, separators=(",", ":")) for x in events]
        (args.out_dir / "events.jsonl").write_text("".join(f"{x}\n" for x in lines), encoding="utf-8")
    _print_verdict(_console(), verdict)
    return 0 if verdict.passed else 1


def _deltas(value: str) -> list[int]:
    try:
        return [int(x) for x in value.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("delays must be comma separated integers") from None


def _assistance(value: str):
    try:
        return parse_assistance(value)
    except CsvSchemaError as e:
        raise argparse.ArgumentTypeError(e.error_message) from None


def cmd_generate(args: argparse.Namespace) -> int:
    spec = generate_task(
        args.family, args.level, args.seed, n=args.n, tau=args.tau, deltas=args.deltas, max_reach=args.max_reach
    )
    if args.out is None:
        sys.stdout.write(serialize_task(spec))
    else:
        dump_task(spec, args.out)
        log.info(f"Wrote {spec.task_id} to {args.out}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    console = _console()
    failed = 0
    for path in args.files:
        try:
            spec = load_task(path)
        except RedbenchError as e:
            console.print(f"[red]✗[/red] {escape(str(path))}: {escape(e.error_message)}")
            failed += 1
        else:
            console.print(f"[green]✓[/green] {escape(str(path))}: {spec.task_id}, {spec.n} lamps")
    return 1 if failed else 0


def cmd_fixtures(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.corpus)
    if args.case:
        wanted = [normalize_case_id(x) for x in args.case]
        if unknown := [x for x in wanted if x not in corpus]:
            raise UnknownCaseError(", ".join(unknown))
        corpus = {k: v for k, v in corpus.items() if k in wanted}
    if args.category:
        corpus = {k: v for k, v in corpus.items() if v.category == args.category}
    if not corpus:
        _console(sys.stderr).print("[red]No corpus case to simulate.[/red]")
        return 1

    table = Table("case", "name", "category", "expected", "measured", "match")
    results = [simulate_case(key, device) for key, device in corpus.items()]
    for result in results:
        table.add_row(
            result.case_id,
            result.name,
            result.category.value if result.category else "-",
            f"{result.expected.lit_count}/{result.expected.total}",
            f"{result.lit}/{result.total}",
            "[green]yes[/green]" if result.matches else "[red]no[/red]",
        )
    console = _console()
    console.print(table)
    matched = sum(1 for x in results if x.matches)
    console.print(f"{matched}/{len(results)} cases match")
    return 0 if matched == len(results) else 1


def cmd_serve(args: argparse.Namespace) -> int:
    spec = load_task(args.task)
    if settings.prometheus_port:
        start_metrics_server(settings.prometheus_port, settings.prometheus_host)
    session = open_session(spec, args.budget)
    serve(session, sys.stdin, sys.stdout)
    verdict, _, metrics = submit(session)
    console = _console(sys.stderr)
    _print_verdict(console, verdict, metrics)
    if args.debug:
        for line in recent_lines():
            console.print(f"[dim]{escape(str(line))}[/dim]")
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    spec = load_task(args.task)
    device = build_for_task(spec)
    args.out.write_text(device.dumps(), encoding="utf-8")
    session = open_session(spec)
    apply_device(session, device)
    verdict, _, _ = submit(session)
    _print_verdict(_console(), verdict)
    return 0 if verdict.passed else 1


def _consolidation_lines(results: list[RunResult], model: str) -> list[str]:
    rates = {}
    for consolidation in Consolidation:
        try:
            rates[consolidation] = aggregate(
                results, model=model, assistance=WITH_HINT_SCIENTIST, consolidation=consolidation
            )
        except EmptyResultSetError:
            continue
    if len(rates) < 2:
        return []
    reference = rates.get(Consolidation.SELF_DETERMINED, next(iter(rates.values())))
    return [
        f"  {x}: {rate} (Δ{consolidation_delta(reference, rate)}, reference {CONSOLIDATION_RATES[x.value]})"
        for x, rate in rates.items()
    ]


def cmd_report(args: argparse.Namespace) -> int:
    if args.breakdown:
        results = load_results(args.csv)
        console = _console()
        for model in models(results) if args.model is None else [args.model]:
            grid = breakdown(results, model, args.assistance, args.setting)
            metrics = task_metrics(results, model=model, assistance=args.assistance, setting=args.setting)
            console.print(f"[bold]{escape(model)}[/bold]")
            sys.stdout.write(render_breakdown(grid))
            console.print(", ".join(f"{k}: {'-' if v is None else v}" for k, v in metrics.items()))
            for line in _consolidation_lines(results, model):
                console.print(escape(line))
        return 0

    reports = load_gap_reports(args.csv)
    if args.model is not None:
        reports = [x for x in reports if x.model == args.model]
    if not reports:
        raise EmptyResultSetError(f"model={args.model}")
    sys.stdout.write(render_json(reports) if args.format == "json" else render_table(reports))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="redbench", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, help="Path to the YAML configuration file")
    parser.add_argument("--debug", action="store_true", help="Enable debug logs")
    parser.add_argument("--disable-rich", action="store_true", help="Disable rich log format")
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    run = commands.add_parser("run", help="Grade a device against a task")
    run.add_argument("--task", type=Path, required=True, help="Task file")
    run.add_argument("--device", type=Path, required=True, help="Device JSON file")
    run.add_argument("--out-dir", type=Path, default=Path("result"), help="Where to write the verdict and trace")
    run.add_argument("--events", action="store_true", help="Also export the graded press events as JSON lines")
    run.set_defaults(func=cmd_run)

    generate = commands.add_parser("generate", help="Generate a task file")
    generate.add_argument("--family", type=Family, choices=list(Family), required=True)
    generate.add_argument("--level", required=True, help="Difficulty level, L1 to L5")
    generate.add_argument("--seed", type=int, default=0, help="Layout seed, used by family D")
    generate.add_argument("--n", type=int, help="Override the lamp count")
    generate.add_argument("--tau", type=int, help="Override the family E pulse width")
    generate.add_argument("--deltas", type=_deltas, help="Override the family C stage delays, such as 1,2,1")
    generate.add_argument("--max-reach", type=int, help="Override the family B reach limit")
    generate.add_argument("--out", type=Path, help="Output file, standard output by default")
    generate.set_defaults(func=cmd_generate)

    validate = commands.add_parser("validate", help="Check task files")
    validate.add_argument("files", type=Path, nargs="+")
    validate.set_defaults(func=cmd_validate)

    fixtures = commands.add_parser("fixtures", help="Replay the failure corpus")
    fixtures.add_argument("--case", action="append", help="Only this case, W or 1 to 12. Repeatable.")
    fixtures.add_argument("--category", type=FailureCategory, choices=list(FailureCategory))
    fixtures.add_argument("--corpus", type=Path, help="Corpus directory, the bundled corpus by default")
    fixtures.set_defaults(func=cmd_fixtures)

    serve_ = commands.add_parser("serve", help="Serve the agent tool protocol on standard input and output")
    serve_.add_argument("--task", type=Path, required=True)
    serve_.add_argument("--budget", type=int, help="Verification trials allowed")
    serve_.set_defaults(func=cmd_serve)

    solve = commands.add_parser("solve", help="Build and grade the reference device of a task")
    solve.add_argument("--task", type=Path, required=True)
    solve.add_argument("--out", type=Path, required=True, help="Device JSON file to write")
    solve.set_defaults(func=cmd_solve)

    report = commands.add_parser("report", help="Capacity gap report from run results")
    report.add_argument("--csv", type=Path, required=True, help="Results or rates CSV file")
    report.add_argument("--format", choices=("table", "json"), default="table")
    report.add_argument("--model", help="Only this model")
    report.add_argument("--breakdown", action="store_true", help="Level by family success rates")
    report.add_argument("--assistance", type=_assistance, default=BASELINE, help="For --breakdown")
    report.add_argument("--setting", type=Setting, choices=list(Setting), help="For --breakdown")
    report.set_defaults(func=cmd_report)
    return parser


def execute(argv: Sequence[str] | None = None) -> int:
    """
    Run one command and return its exit status. Usage errors exit with status 2.
    """
    args = build_parser().parse_args(argv)
    try:
        use_settings(load_settings(args.config))
    except RedbenchError as e:
        _console(sys.stderr).print(f"[red]{escape(e.error_message)}[/red]")
        return 1
    handler = setup_logging(
        logging_config(log_dir=settings.log_dir, debug=args.debug, disable_rich=args.disable_rich)
    )
    try:
        init_sentry()
        return args.func(args)
    except RedbenchError as e:
        _console(sys.stderr).print(f"[red]{escape(e.error_message)}[/red]")
        return 1
    except KeyboardInterrupt:
        return 130
    except Exception:
        log.critical("Unhandled exception.", exc_info=True)
        return 1
    finally:
        stop_logging(handler)


def main():
    sys.exit(execute())


if __name__ == "__main__":
    main()
