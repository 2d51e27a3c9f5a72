"""
Scenario loading and emission.

``parse_scenario`` reads a JSON scenario, checks every field and assembles
the society, registry and formation settings. All semantic problems are
collected and reported together, each with the path of the offending
field.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from voform.core.constraints import ConstraintAnnotation
from voform.core.errors import TermError
from voform.core.syntax import (
    parse_atom,
    parse_constraint,
    parse_formula,
    parse_operation,
    parse_role_label,
    parse_service,
)
from voform.engines.knowledge import KnowledgeBase
from voform.engines.protocol import ProtocolClause, Role
from voform.formation.settings import FormationSettings
from voform.scenario.schema import SCENARIO_KEYS, ScenarioFile
from voform.society.agents import AgentSpec, Decomposition, GoalPairing
from voform.society.registry import RegistryError, empty_registry, register
from voform.society.society import SocietyValidationError, build_society
from voform.utils.logger import get_logger

logger = get_logger(__name__)

DATA_DIR = Path(__file__).parent / "data"


class ScenarioError(Exception):
    """Base exception for scenario errors."""
    pass


class ScenarioSyntaxError(ScenarioError):
    """The file is not well-formed JSON."""

    def __init__(self, message: str, line: int, column: int, source: str = "<string>"):
        self.line = line
        self.column = column
        self.source = source
        super().__init__(f"{source}:{line}:{column}: {message}")


@dataclass(frozen=True)
class Violation:
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


class ScenarioSemanticError(ScenarioError):
    """The file parses but describes an invalid scenario."""

    def __init__(self, violations: List[Violation], source: str = "<string>"):
        self.violations = list(violations)
        self.source = source
        lines = '\n'.join(f"  {v}" for v in self.violations)
        super().__init__(f"{source}: {len(self.violations)} problem(s)\n{lines}")


class _Reader:
    """Walks the decoded document, collecting violations instead of stopping at the first."""

    def __init__(self):
        self.violations: List[Violation] = []

    def fail(self, path: str, message: str) -> None:
        self.violations.append(Violation(path, message))

    def typed(self, path: str, value: Any, kind: Union[type, Tuple[type, ...]], what: str) -> bool:
        if isinstance(value, kind) and not (kind is int and isinstance(value, bool)):
            return True
        self.fail(path, f"expected {what}")
        return False

    def text(self, path: str, value: Any, parser: Callable[[str], Any]):
        if not self.typed(path, value, str, "a string"):
            return None
        try:
            return parser(value)
        except TermError as exc:
            self.fail(path, str(exc))
            return None

    def texts(self, path: str, values: Any, parser: Callable[[str], Any]) -> List[Any]:
        if values is None:
            return []
        if not self.typed(path, values, list, "a list"):
            return []
        parsed = [self.text(f"{path}[{i}]", v, parser) for i, v in enumerate(values)]
        return [p for p in parsed if p is not None]

    def section(self, path: str, data: Dict[str, Any], key: str, kind: type, default=None):
        if key not in data:
            if default is None:
                self.fail(f"{path}{key}", "missing")
            return default
        value = data[key]
        return value if self.typed(f"{path}{key}", value, kind, f"a {kind.__name__}") else default


def _reject_duplicates(duplicates: List[str]):
    def hook(pairs):
        seen: Dict[str, Any] = {}
        for key, value in pairs:
            if key in seen:
                duplicates.append(key)
            seen[key] = value
        return seen
    return hook


def _read_protocols(reader: _Reader, data: Dict[str, Any]) -> Dict[str, Role]:
    protocols: Dict[str, Role] = {}
    for name, body in data.items():
        path = f"protocols.{name}"
        if not reader.typed(path, body, dict, "an object"):
            continue
        label = reader.text(f"{path}.label", body.get('label'), parse_role_label)
        operations = reader.texts(f"{path}.operations", body.get('operations'), parse_operation)
        if label is None or not operations:
            if label is not None:
                reader.fail(f"{path}.operations", "a protocol clause needs at least one operation")
            continue
        try:
            protocols[name] = Role(label, ProtocolClause(name, tuple(operations)))
        except TermError as exc:
            reader.fail(path, str(exc))
    return protocols


def _read_agent(reader: _Reader, path: str, data: Any, protocols: Dict[str, Role]) -> Optional[AgentSpec]:
    if not reader.typed(path, data, dict, "an object"):
        return None
    agent_id = data.get('id')
    if not reader.typed(f"{path}.id", agent_id, str, "a string"):
        return None

    roles = []
    for i, entry in enumerate(data.get('roles') or []):
        role_path = f"{path}.roles[{i}]"
        if not reader.typed(role_path, entry, dict, "an object"):
            continue
        schema = protocols.get(entry.get('protocol'))
        if schema is None:
            reader.fail(f"{role_path}.protocol", f"unknown protocol {entry.get('protocol')!r}")
            continue
        label = reader.text(f"{role_path}.label", entry.get('label', str(schema.label)), parse_role_label)
        if label is None:
            continue
        if label.name != schema.label.name or label.parameter is None:
            reader.fail(f"{role_path}.label", f"{label} does not instantiate {schema.label}")
            continue
        try:
            roles.append(schema.bind(label.parameter))
        except TermError as exc:
            reader.fail(f"{role_path}.label", str(exc))

    goals = reader.texts(f"{path}.goals", data.get('goals'), parse_atom)
    knowledge = reader.texts(f"{path}.knowledge", data.get('knowledge'), parse_atom)

    fulfilments = []
    for i, entry in enumerate(data.get('fulfilments') or []):
        entry_path = f"{path}.fulfilments[{i}]"
        if not reader.typed(entry_path, entry, dict, "an object"):
            continue
        goal = reader.text(f"{entry_path}.goal", entry.get('goal'), parse_atom)
        fulfilled_by = reader.text(f"{entry_path}.by", entry.get('by'), parse_formula)
        if goal is not None and fulfilled_by is not None:
            fulfilments.append(GoalPairing(goal, fulfilled_by))

    decompositions = []
    for i, entry in enumerate(data.get('decompositions') or []):
        entry_path = f"{path}.decompositions[{i}]"
        if not reader.typed(entry_path, entry, dict, "an object"):
            continue
        head = reader.text(f"{entry_path}.head", entry.get('head'), parse_atom)
        subgoals = reader.texts(f"{entry_path}.subgoals", entry.get('subgoals'), parse_atom)
        if head is not None:
            decompositions.append(Decomposition(head, tuple(subgoals)))

    agent = AgentSpec(
        agent_id=agent_id,
        roles=tuple(roles),
        goals=tuple(goals),
        knowledge=KnowledgeBase(tuple(knowledge)),
        fulfilments=tuple(fulfilments),
        decompositions=tuple(decompositions),
    )
    for goal in agent.goals:
        if agent.fulfilment_of(goal) is None:
            reader.fail(f"{path}.fulfilments", f"no fulfilment pairing for goal {goal}")
    return agent


def _read_settings(reader: _Reader, data: Dict[str, Any], society) -> Optional[FormationSettings]:
    path = "formation."
    initiator = data.get('initiator')
    if not reader.typed(f"{path}initiator", initiator, str, "a string"):
        return None
    if society is not None and society.agent(initiator) is None:
        reader.fail(f"{path}initiator", f"{initiator} is not an agent of the society")

    request = None
    if 'request' in data:
        request = reader.text(f"{path}request", data['request'], parse_atom)

    trust = reader.section(path, data, 'trust', dict, {})
    allow = trust.get('allow')
    if allow is not None and not reader.typed(f"{path}trust.allow", allow, list, "a list"):
        allow = None
    deny = trust.get('deny', [])
    if not reader.typed(f"{path}trust.deny", deny, list, "a list"):
        deny = []

    role_choice = data.get('role_choice')
    if role_choice is not None and role_choice not in ('first', 'strict'):
        reader.fail(f"{path}role_choice", "expected 'first' or 'strict'")
    provider_choice = data.get('provider_choice', 'first')
    if provider_choice not in ('first', 'seeded'):
        reader.fail(f"{path}provider_choice", "expected 'first' or 'seeded'")

    clause_choices = reader.section(path, data, 'clause_choices', dict, {})
    delegates = reader.section(path, data, 'delegates', dict, {})
    if society is not None:
        for service_name, agent_id in delegates.items():
            if society.agent(agent_id) is None:
                reader.fail(f"{path}delegates.{service_name}", f"unknown agent {agent_id}")

    templates = reader.texts(f"{path}templates", data.get('templates'), parse_service)
    constraints = reader.texts(f"{path}annotation", data.get('annotation'), parse_constraint)
    annotation = ConstraintAnnotation(tuple(constraints))
    if not annotation.satisfiable():
        reader.fail(f"{path}annotation", f"unsatisfiable annotation {annotation}")

    guarantees = []
    for service_name, formulas in reader.section(path, data, 'guarantees', dict, {}).items():
        parsed = reader.texts(f"{path}guarantees.{service_name}", formulas, parse_formula)
        guarantees.append((service_name, tuple(parsed)))

    numbers = {}
    for key in ('max_dialogue_steps', 'seed'):
        if key in data and reader.typed(f"{path}{key}", data[key], int, "an integer"):
            minimum = 1 if key == 'max_dialogue_steps' else 0
            if data[key] < minimum:
                reader.fail(f"{path}{key}", f"must be at least {minimum}")
            numbers[key] = data[key]
    exhaustive = data.get('exhaustive_negotiation')
    if exhaustive is not None and not reader.typed(
            f"{path}exhaustive_negotiation", exhaustive, bool, "true or false"):
        exhaustive = None

    return FormationSettings(
        initiator=initiator,
        request=request,
        allow=tuple(allow) if allow is not None else None,
        deny=tuple(deny),
        role_choice=role_choice,
        clause_choices=tuple(clause_choices.items()),
        delegates=tuple(delegates.items()),
        templates=tuple(templates),
        annotation=annotation,
        guarantees=tuple(guarantees),
        provider_choice=provider_choice,
        max_dialogue_steps=numbers.get('max_dialogue_steps'),
        seed=numbers.get('seed'),
        exhaustive_negotiation=exhaustive,
    )


def scenario_from_dict(data: Any, source: str = "<string>") -> ScenarioFile:
    """
    Validate a decoded scenario document and build it.

    Raises:
        ScenarioSemanticError: Listing every problem found
    """
    reader = _Reader()
    if not isinstance(data, dict):
        raise ScenarioSemanticError([Violation("<document>", "expected a JSON object")], source)

    for key in data:
        if key not in SCENARIO_KEYS:
            reader.fail(key, "unknown top-level key")

    name = reader.section("", data, 'name', str, "")
    protocols = _read_protocols(reader, reader.section("", data, 'protocols', dict, {}))

    society_data = reader.section("", data, 'society', dict, {})
    services = reader.texts("society.services", society_data.get('services'), parse_service)
    ontology = reader.texts("society.ontology", society_data.get('ontology'), parse_atom)

    agents = []
    raw_agents = society_data.get('agents', [])
    if reader.typed("society.agents", raw_agents, list, "a list"):
        for i, raw in enumerate(raw_agents):
            agent = _read_agent(reader, f"society.agents[{i}]", raw, protocols)
            if agent is not None:
                agents.append(agent)

    society = None
    if not reader.violations:
        try:
            society = build_society(agents, services, ontology)
        except SocietyValidationError as exc:
            for failure in exc.report.failures:
                where = f"society[{failure.subject}]" if failure.subject else "society"
                reader.fail(where, f"{failure.name}: {failure.detail}" if failure.detail else failure.name)

    registry = None
    if society is not None:
        registry = empty_registry(society)
        entries = reader.section("", data, 'registry', list, [])
        for i, entry in enumerate(entries):
            path = f"registry[{i}]"
            if not reader.typed(path, entry, dict, "an object"):
                continue
            service = reader.text(f"{path}.service", entry.get('service'), parse_service)
            agent_id = entry.get('agent')
            if service is None or not reader.typed(f"{path}.agent", agent_id, str, "a string"):
                continue
            try:
                registry = register(registry, agent_id, service)
            except RegistryError as exc:
                reader.fail(path, str(exc))

    formation = reader.section("", data, 'formation', dict, {})
    settings = _read_settings(reader, formation, society) if formation else None

    if reader.violations or society is None or registry is None or settings is None:
        for violation in reader.violations:
            logger.debug("Scenario problem: %s", violation)
        raise ScenarioSemanticError(reader.violations or [Violation("<document>", "incomplete")], source)

    return ScenarioFile(
        name=name,
        protocols=tuple(protocols.items()),
        society=society,
        registry=registry,
        settings=settings,
    )


def load_scenario_text(text: str, source: str = "<string>") -> ScenarioFile:
    """
    Parse scenario JSON text.

    Raises:
        ScenarioSyntaxError: If the text is not JSON or repeats a key
        ScenarioSemanticError: If the scenario is invalid
    """
    duplicates: List[str] = []
    try:
        data = json.loads(text, object_pairs_hook=_reject_duplicates(duplicates))
    except json.JSONDecodeError as exc:
        raise ScenarioSyntaxError(exc.msg, exc.lineno, exc.colno, source) from exc
    if duplicates:
        raise ScenarioSemanticError(
            [Violation("<document>", f"duplicate key {key!r}") for key in duplicates], source
        )
    return scenario_from_dict(data, source)


def parse_scenario(path: Union[str, Path]) -> ScenarioFile:
    """
    Load and validate a scenario file.

    Raises:
        ScenarioError: If the file cannot be read, parsed or validated
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"Cannot read {path}: {exc}") from exc
    scenario = load_scenario_text(text, str(path))
    logger.debug("Loaded scenario %s from %s", scenario.name, path)
    return scenario


def emit_scenario(scenario: ScenarioFile, indent: int = 2) -> str:
    """Serialize a scenario in normalized form."""
    return json.dumps(scenario.to_dict(), indent=indent, ensure_ascii=False) + "\n"


def bundled_scenario_path(name: str) -> Path:
    """Path of a scenario shipped with the package, e.g. ``earthobs``."""
    path = DATA_DIR / f"{name}.json"
    if not path.exists():
        available = ', '.join(sorted(p.stem for p in DATA_DIR.glob("*.json")))
        raise ScenarioError(f"No bundled scenario {name!r} (available: {available})")
    return path
