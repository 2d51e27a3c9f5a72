"""Agent societies, agent specifications and the discovery registry."""

from voform.society.agents import AgentSpec, Decomposition, GoalPairing
from voform.society.registry import (
    AgentNotProvider,
    Registry,
    RegistryError,
    UnknownAgent,
    UnknownService,
    empty_registry,
    query_providers,
    register,
)
from voform.society.society import AgentSociety, SocietyValidationError, build_society, validate_society

__all__ = [
    'AgentNotProvider', 'AgentSociety', 'AgentSpec', 'Decomposition', 'GoalPairing',
    'Registry', 'RegistryError', 'SocietyValidationError', 'UnknownAgent',
    'UnknownService', 'build_society', 'empty_registry', 'query_providers',
    'register', 'validate_society',
]
