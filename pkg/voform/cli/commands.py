"""Command implementations for the voctl CLI."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Iterable, NoReturn, Optional, cast

import click
from rich.console import Console

from voform.config.manager import ConfigManager, VoformConfig
from voform.formation.runner import run_formation
from voform.scenario.loader import (
    DATA_DIR,
    ScenarioError,
    ScenarioSemanticError,
    ScenarioSyntaxError,
    bundled_scenario_path,
    emit_scenario,
    parse_scenario,
)
from voform.scenario.schema import ScenarioFile
from voform.scenario.trace import TraceError, check_trace, emit_trace, load_trace
from voform.society.society import validate_society
from voform.ui.formatter import RichFormatter
from voform.ui.theme import theme
from voform.utils.logger import get_logger

logger = get_logger(__name__)

formatter = RichFormatter()

EXIT_INPUT_ERROR = 1
EXIT_FORMATION_FAILED = 2
EXIT_TRACE_INVALID = 2


def set_formatter_console(console: Console, error_console: Optional[Console] = None) -> None:
    """Allow the CLI to reuse an externally managed Rich console."""
    formatter.set_console(console, error_console)


def abort_with_error(
    message: str,
    details: Optional[str] = None,
    *,
    title: Optional[str] = None,
    help_text: Optional[str] = None,
    tip: Optional[str] = None,
    suggestions: Optional[Iterable[str]] = None,
) -> NoReturn:
    """Display a formatted error with rich context and abort with exit status 1."""
    formatter.print_error(
        title or "Input Error",
        message,
        help_text=help_text or "Use the --help flag to review available options.",
        tip=tip,
        suggestions=suggestions or [
            "voctl --help",
            "voctl scenarios",
        ],
        details=details,
    )
    raise click.Abort()


def _get_config(ctx: click.Context) -> VoformConfig:
    ctx.ensure_object(dict)
    manager = cast(Dict[str, Any], ctx.obj).get('config')
    if manager is None:
        manager = ConfigManager()
        ctx.obj['config'] = manager
    return cast(ConfigManager, manager).get_config()


def resolve_scenario_path(scenario: str) -> Path:
    """A scenario argument is a file path or the name of a bundled scenario."""
    path = Path(scenario)
    if path.exists():
        return path
    try:
        return bundled_scenario_path(scenario)
    except ScenarioError:
        abort_with_error(
            f"Scenario not found: {scenario}",
            title="Unknown Scenario",
            help_text="Pass the path of a scenario JSON file or the name of a bundled scenario.",
            suggestions=["voctl scenarios"],
        )


def load_or_abort(scenario: str) -> ScenarioFile:
    path = resolve_scenario_path(scenario)
    try:
        return parse_scenario(path)
    except ScenarioSyntaxError as exc:
        abort_with_error(
            f"{path} is not valid JSON",
            str(exc),
            title="Scenario Syntax Error",
            tip=f"Check line {exc.line}, column {exc.column}.",
        )
    except ScenarioSemanticError as exc:
        abort_with_error(
            f"{path} has {len(exc.violations)} problem(s)",
            "\n".join(str(v) for v in exc.violations),
            title="Invalid Scenario",
            help_text="Each line names the offending field and the rule it breaks.",
            suggestions=[f"voctl validate {path}"],
        )
    except ScenarioError as exc:
        abort_with_error(str(exc), title="Scenario Error")


@click.command(name='run')
@click.argument('scenario')
@click.option('--trace', 'trace_path', type=click.Path(dir_okay=False, path_type=Path),
              help='Write the formation trace to this file')
@click.option('--seed', type=click.IntRange(min=0), default=None,
              help='Seed for drafted contract ids and seeded provider choice')
@click.option('--max-dialogue-steps', type=click.IntRange(min=1), default=None,
              help='Message limit for each negotiation dialogue')
@click.option('--quiet', '-q', is_flag=True, help='Only report the outcome')
@click.pass_context
def run_command(ctx: click.Context, scenario: str, trace_path: Optional[Path],
                seed: Optional[int], max_dialogue_steps: Optional[int], quiet: bool) -> None:
    """
    Form a virtual organisation from SCENARIO.

    Exit status is 0 when contracts are agreed, 2 when formation fails and
    1 on input errors.
    """
    config = _get_config(ctx)
    loaded = load_or_abort(scenario)
    settings = loaded.settings.resolved(config.formation, seed=seed, max_dialogue_steps=max_dialogue_steps)

    logger.info("Forming %s from %s (seed %d)", loaded.name, settings.initiator, settings.seed)
    trace = run_formation(loaded.society, loaded.registry, settings.initiator, settings=settings)

    if trace_path is not None:
        try:
            trace_path.parent.mkdir(parents=True, exist_ok=True)
            trace_path.write_text(
                emit_trace(loaded, trace, settings.seed, indent=config.output.trace_indent),
                encoding="utf-8",
            )
        except OSError as exc:
            abort_with_error(f"Cannot write trace to {trace_path}", str(exc), title="Trace Not Written")
        logger.debug("Trace written to %s", trace_path)

    if not quiet:
        formatter.print_header(f"Formation: {loaded.name}")
        formatter.print_trace_summary(trace)

    if trace.failure is not None:
        formatter.print_error(
            f"Formation Failed at {trace.failure.transition}",
            trace.failure.message,
            details=trace.failure.code,
            help_text="The trace records every transition completed before the failure.",
            suggestions=[f"voctl run {scenario} --trace failed.trace.json"] if trace_path is None else None,
        )
        ctx.exit(EXIT_FORMATION_FAILED)

    formatter.print_success(
        f"Organisation formed with {len(trace.final.agents)} agents and "
        f"{len(trace.final.contracts)} contracts"
    )


@click.command(name='validate')
@click.argument('scenario')
def validate_command(scenario: str) -> None:
    """Check that SCENARIO and its society are well formed."""
    loaded = load_or_abort(scenario)
    report = validate_society(loaded.society.agents, loaded.society.services)

    formatter.print_header(f"Scenario: {loaded.name}")
    formatter.print_check_report(report)
    formatter.print_success(
        f"{len(loaded.society.agents)} agents, {len(loaded.society.services)} services, "
        f"{len(loaded.registry)} registry entries"
    )


@click.command(name='check')
@click.argument('trace', type=click.Path(dir_okay=False, path_type=Path))
@click.option('--all', 'show_all', is_flag=True, help='List passing checks too')
@click.pass_context
def check_command(ctx: click.Context, trace: Path, show_all: bool) -> None:
    """
    Re-validate every transition recorded in TRACE.

    Exit status is 0 for a valid trace, 2 when a check fails and 1 when
    the file cannot be read.
    """
    try:
        report = check_trace(load_trace(trace))
    except TraceError as exc:
        abort_with_error(str(exc), title="Unreadable Trace")

    if show_all or not report.passed:
        formatter.print_check_report(report, failures_only=not show_all)

    if not report.passed:
        formatter.print_error(
            "Trace Rejected",
            f"{len(report.failures)} of {len(report.checks)} checks failed",
            details=", ".join(dict.fromkeys(report.failed_names())),
        )
        ctx.exit(EXIT_TRACE_INVALID)

    formatter.print_success(f"{trace}: all {len(report.checks)} checks passed")


@click.command(name='normalize')
@click.argument('scenario')
@click.option('--output', '-o', type=click.Path(dir_okay=False, path_type=Path),
              help='Write to this file instead of standard output')
def normalize_command(scenario: str, output: Optional[Path]) -> None:
    """Print SCENARIO in normalized form."""
    text = emit_scenario(load_or_abort(scenario))
    if output is None:
        click.echo(text, nl=False)
        return
    output.write_text(text, encoding="utf-8")
    formatter.print_success(f"Wrote {output}")


@click.command(name='scenarios')
def scenarios_command() -> None:
    """List the bundled scenarios."""
    table = formatter.table(headers=["Name", "Agents", "Services", "Initiator"])
    for path in sorted(DATA_DIR.glob("*.json")):
        try:
            loaded = parse_scenario(path)
        except ScenarioError as exc:
            logger.warning("Bundled scenario %s does not load: %s", path.name, exc)
            continue
        table.add_row(
            f"[{theme.colors.blue}]{path.stem}[/{theme.colors.blue}]",
            str(len(loaded.society.agents)),
            str(len(loaded.society.services)),
            loaded.settings.initiator,
        )
    formatter.console.print(table)
