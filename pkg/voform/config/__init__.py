"""Configuration management for vo-formation."""

from voform.config.manager import ConfigManager, FormationDefaults, OutputSettings, VoformConfig

__all__ = ['ConfigManager', 'FormationDefaults', 'OutputSettings', 'VoformConfig']
