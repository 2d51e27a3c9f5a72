"""Configuration management for vo-formation.

Handles loading, saving, and validating configuration from YAML files and
environment variables. Settings here are defaults only: values given in a
scenario file override them, and command-line flags override both.
"""

import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

from voform.utils.logger import get_logger

logger = get_logger(__name__)


ROLE_CHOICES = ('first', 'strict')


@dataclass
class FormationDefaults:
    """Default formation parameters."""

    max_dialogue_steps: int = 16
    seed: int = 0
    exhaustive_negotiation: bool = False
    role_choice: str = "first"


@dataclass
class OutputSettings:
    """Trace and log output settings."""

    trace_indent: int = 2
    log_file: Optional[str] = None


@dataclass
class VoformConfig:
    """Main vo-formation configuration."""

    formation: FormationDefaults = field(default_factory=FormationDefaults)
    output: OutputSettings = field(default_factory=OutputSettings)

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary format."""
        return {
            'formation': asdict(self.formation),
            'output': asdict(self.output),
        }


class ConfigManager:
    """Manages vo-formation configuration."""

    DEFAULT_CONFIG_DIR = Path.home() / ".voform"
    DEFAULT_CONFIG_FILE = DEFAULT_CONFIG_DIR / "config.yaml"

    ENV_SEED = 'VOFORM_SEED'
    ENV_MAX_DIALOGUE_STEPS = 'VOFORM_MAX_DIALOGUE_STEPS'
    ENV_LOG_FILE = 'VOFORM_LOG_FILE'

    def __init__(self, config_path: Optional[Path] = None):
        """
        Initialize configuration manager.

        Args:
            config_path: Optional path to config file. If None, uses default location.
        """
        self.config_path = Path(config_path) if config_path else self.DEFAULT_CONFIG_FILE
        self.config = self._load_config()

    def _load_config(self) -> VoformConfig:
        """
        Load configuration from file and environment variables.

        Priority (highest to lowest):
        1. Environment variables
        2. Config file
        3. Defaults
        """
        config = VoformConfig()

        if self.config_path.exists():
            try:
                with open(self.config_path, 'r') as f:
                    file_config = yaml.safe_load(f)
                    if file_config:
                        config = self._merge_config(config, file_config)
                        logger.debug("Loaded configuration from %s", self.config_path)
            except (OSError, yaml.YAMLError) as e:
                logger.warning("Failed to load config file: %s", e)
        else:
            logger.debug("No config file found at %s, using defaults", self.config_path)

        return self._load_env_overrides(config)

    def _merge_config(self, base: VoformConfig, override: Dict) -> VoformConfig:
        """Merge configuration from dict into base config."""
        if not isinstance(override, dict):
            logger.warning("Ignoring config file: top level is not a mapping")
            return base

        for section_name in ('formation', 'output'):
            section = override.get(section_name)
            if not isinstance(section, dict):
                continue
            target = getattr(base, section_name)
            for key, value in section.items():
                if hasattr(target, key):
                    setattr(target, key, value)
                else:
                    logger.warning("Unknown config key %s.%s", section_name, key)

        return base

    def _load_env_overrides(self, config: VoformConfig) -> VoformConfig:
        """Load configuration overrides from environment variables."""
        seed = os.getenv(self.ENV_SEED)
        if seed:
            try:
                config.formation.seed = int(seed)
            except ValueError:
                logger.warning("Ignoring %s=%r: not an integer", self.ENV_SEED, seed)

        steps = os.getenv(self.ENV_MAX_DIALOGUE_STEPS)
        if steps:
            try:
                config.formation.max_dialogue_steps = int(steps)
            except ValueError:
                logger.warning("Ignoring %s=%r: not an integer", self.ENV_MAX_DIALOGUE_STEPS, steps)

        if os.getenv(self.ENV_LOG_FILE):
            config.output.log_file = os.getenv(self.ENV_LOG_FILE)

        return config

    def save_config(self):
        """Save current configuration to file."""
        self.config_path.parent.mkdir(parents=True, exist_ok=True)

        with open(self.config_path, 'w') as f:
            yaml.dump(self.config.to_dict(), f, default_flow_style=False, sort_keys=False)

        logger.info("Configuration saved to %s", self.config_path)

    def get_config(self) -> VoformConfig:
        """Get the current configuration."""
        return self.config

    def validate(self) -> Tuple[bool, List[str]]:
        """
        Validate the current configuration.

        Returns:
            Tuple of (is_valid, list_of_errors)
        """
        errors = []
        formation = self.config.formation

        if not isinstance(formation.max_dialogue_steps, int) or formation.max_dialogue_steps < 1:
            errors.append("max_dialogue_steps must be a positive integer")

        if not isinstance(formation.seed, int) or formation.seed < 0:
            errors.append("seed must be a non-negative integer")

        if formation.role_choice not in ROLE_CHOICES:
            errors.append(f"role_choice must be one of: {', '.join(ROLE_CHOICES)}")

        if not isinstance(self.config.output.trace_indent, int) or self.config.output.trace_indent < 0:
            errors.append("trace_indent must be a non-negative integer")

        return len(errors) == 0, errors
