"""Shared fixtures for the vo-formation test suite."""

from pathlib import Path

import pytest
from click.testing import CliRunner

from voform.config.manager import ConfigManager
from voform.core.syntax import parse_service
from voform.engines.protocol import Role
from voform.scenario.loader import bundled_scenario_path, parse_scenario
from tests.generators import PROVIDER_OPERATIONS, REQUESTER_OPERATIONS, schema


@pytest.fixture
def requester_schema() -> Role:
    """The buyer side of the request/accept/refuse protocol, unbound."""
    return schema("pc-requester", "requester(S)", REQUESTER_OPERATIONS)


@pytest.fixture
def provider_schema() -> Role:
    """The seller side of the request/accept/refuse protocol, unbound."""
    return schema("pc-provider", "provider(S)", PROVIDER_OPERATIONS)


@pytest.fixture
def sat_image():
    """A concrete satellite image service."""
    return parse_service("satImage([38.0,-9.4,1000,500,5,radar,3],ers1.data)")


@pytest.fixture
def earthobs():
    return parse_scenario(bundled_scenario_path("earthobs"))


@pytest.fixture
def contractx():
    return parse_scenario(bundled_scenario_path("contractx"))


@pytest.fixture
def earthobs_text() -> str:
    return bundled_scenario_path("earthobs").read_text(encoding="utf-8")


@pytest.fixture
def config_file(tmp_path, monkeypatch) -> Path:
    """Point the default config location into the temporary directory."""
    path = tmp_path / ".voform" / "config.yaml"
    monkeypatch.setattr(ConfigManager, "DEFAULT_CONFIG_FILE", path)
    for name in (ConfigManager.ENV_SEED, ConfigManager.ENV_MAX_DIALOGUE_STEPS, ConfigManager.ENV_LOG_FILE):
        monkeypatch.delenv(name, raising=False)
    return path


@pytest.fixture
def cli_runner(config_file) -> CliRunner:
    """CliRunner with no user configuration in effect."""
    return CliRunner()
