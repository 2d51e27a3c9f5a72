"""
Main CLI entry point for vo-formation.

Provides the voctl command-line interface: run a formation scenario,
validate scenarios, check saved traces and manage configuration.
"""

import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, Optional

import click
from rich.console import Console

from voform import __version__
from voform.cli import commands, config_commands
from voform.config.manager import ConfigManager
from voform.utils.logger import get_logger, setup_logging

logger = get_logger(__name__)

console = Console()
error_console = Console(stderr=True)


@contextmanager
def _usage_errors_as_input_errors() -> Iterator[None]:
    try:
        yield
    except click.UsageError as exc:
        exc.exit_code = commands.EXIT_INPUT_ERROR
        raise


class VoctlGroup(click.Group):
    """Command group whose usage errors exit 1, leaving 2 for formation failures."""

    def make_context(self, *args: Any, **kwargs: Any) -> click.Context:
        with _usage_errors_as_input_errors():
            return super().make_context(*args, **kwargs)

    def invoke(self, ctx: click.Context) -> Any:
        with _usage_errors_as_input_errors():
            return super().invoke(ctx)


@click.group(cls=VoctlGroup)
@click.version_option(version=__version__, prog_name="voctl")
@click.option(
    "--verbose", "-v",
    is_flag=True,
    help="Enable verbose output"
)
@click.option(
    "--config", "-c",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Path to config file (default: ~/.voform/config.yaml)"
)
@click.pass_context
def cli(ctx: click.Context, verbose: bool, config: Optional[Path]) -> None:
    """
    vo-formation - form virtual organisations from agent societies.

    \b
    Quick Start:
      voctl validate earthobs                 # Check the bundled scenario
      voctl run earthobs --trace out.json     # Form the organisation
      voctl check out.json                    # Re-check the saved trace

    \b
    Exit status:
      0  organisation formed / trace valid
      1  input error (unreadable or invalid scenario or trace file)
      2  formation failed / trace rejected
    """
    ctx.ensure_object(dict)
    commands.set_formatter_console(console, error_console)

    try:
        config_manager = ConfigManager(config_path=config)
    except Exception as e:
        setup_logging(verbose=verbose)
        logger.error("Failed to load configuration: %s", e)
        if verbose:
            raise
        sys.exit(1)

    log_file = config_manager.get_config().output.log_file
    setup_logging(verbose=verbose, log_file=Path(log_file) if log_file else None)

    ctx.obj['config'] = config_manager
    ctx.obj['verbose'] = verbose


@cli.command()
def version() -> None:
    """Show version information."""
    commands.formatter.print_header("vo-formation Version")
    version_table = commands.formatter.table(headers=["Component", "Value"])
    version_table.add_row("voctl", __version__)
    version_table.add_row("Python", sys.version.split()[0])
    commands.formatter.console.print(version_table)


cli.add_command(commands.run_command)
cli.add_command(commands.validate_command)
cli.add_command(commands.check_command)
cli.add_command(commands.normalize_command)
cli.add_command(commands.scenarios_command)
cli.add_command(config_commands.config_group)


def main() -> None:
    """Console script entry point."""
    cli(obj={})


if __name__ == "__main__":
    main()
