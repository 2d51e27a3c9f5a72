"""
Configuration commands for the voctl CLI.
"""

from __future__ import annotations

from typing import Any, Dict, cast

import click
import yaml

from voform.cli.commands import abort_with_error, formatter
from voform.config.manager import ConfigManager
from voform.ui.theme import theme


def _get_config_manager(ctx: click.Context) -> ConfigManager:
    """Fetch a ConfigManager attached to the Click context."""
    ctx.ensure_object(dict)
    context_obj = cast(Dict[str, Any], ctx.obj)
    manager = context_obj.get("config")
    if manager is None:
        manager = ConfigManager()
        context_obj["config"] = manager
    return cast(ConfigManager, manager)


@click.group(name="config")
def config_group() -> None:
    """Configuration management commands."""


@config_group.command(name="show")
@click.option("--yaml", "as_yaml", is_flag=True, help="Print the effective configuration as YAML")
@click.pass_context
def show_config(ctx: click.Context, as_yaml: bool) -> None:
    """Display the effective configuration (defaults, file and environment)."""
    manager = _get_config_manager(ctx)
    config = manager.get_config()

    if as_yaml:
        click.echo(yaml.safe_dump(config.to_dict(), default_flow_style=False, sort_keys=False), nl=False)
        return

    formatter.print_header("vo-formation Configuration")
    formatter.print_subheader(str(manager.config_path))
    table = formatter.table(headers=["Setting", "Value"])
    for section, values in config.to_dict().items():
        for key, value in values.items():
            table.add_row(f"{section}.{key}", "<unset>" if value is None else str(value))
    formatter.console.print(table)
    formatter.print_bullet_list(
        [
            f"{ConfigManager.ENV_SEED}, {ConfigManager.ENV_MAX_DIALOGUE_STEPS} and "
            f"{ConfigManager.ENV_LOG_FILE} override the file",
            "Scenario formation settings override both; --seed and --max-dialogue-steps override everything",
        ],
        icon=theme.icons.arrow_right,
        style=theme.colors.blue,
    )


@config_group.command(name="validate")
@click.pass_context
def validate_config(ctx: click.Context) -> None:
    """Check the configuration values."""
    manager = _get_config_manager(ctx)
    is_valid, issues = manager.validate()
    if not is_valid:
        abort_with_error(
            "Configuration Validation Failed",
            "\n".join(issues),
            title="Configuration Validation Failed",
            help_text=f"Edit {manager.config_path} or unset the overriding environment variables.",
            suggestions=["voctl config show"],
        )
    formatter.print_success("Configuration is valid")


@config_group.command(name="init")
@click.option("--force", is_flag=True, help="Overwrite an existing config file")
@click.pass_context
def init_config(ctx: click.Context, force: bool) -> None:
    """Write the effective configuration to the config file."""
    manager = _get_config_manager(ctx)
    if manager.config_path.exists() and not force:
        abort_with_error(
            f"{manager.config_path} already exists",
            title="Configuration Exists",
            tip="Pass --force to overwrite it.",
            suggestions=["voctl config show", "voctl config init --force"],
        )
    try:
        manager.save_config()
    except OSError as exc:
        abort_with_error(
            "Error saving configuration",
            str(exc),
            title="Configuration Write Failed",
            help_text="Verify that the destination directory is writable.",
        )
    formatter.print_success_panel(
        f"Configuration saved to [bold]{manager.config_path}[/bold]",
        title="Configuration Saved",
    )
