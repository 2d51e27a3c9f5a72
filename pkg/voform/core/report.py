"""Named pass/fail check reports shared by every validator."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class CheckResult:
    """Outcome of one named check."""
    name: str
    passed: bool
    detail: str = ""
    subject: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'passed': self.passed,
            'detail': self.detail,
            'subject': self.subject,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CheckResult':
        return cls(
            name=data['name'],
            passed=bool(data['passed']),
            detail=data.get('detail', ''),
            subject=data.get('subject'),
        )


@dataclass
class CheckReport:
    """Every check run against one subject, in the order they ran."""
    subject: str
    checks: List[CheckResult] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "", subject: Optional[str] = None) -> bool:
        self.checks.append(CheckResult(name, bool(passed), detail, subject))
        return bool(passed)

    def extend(self, other: 'CheckReport') -> None:
        self.checks.extend(other.checks)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def failed_names(self) -> List[str]:
        return [check.name for check in self.failures]

    def format_report(self) -> str:
        """Format the report for display."""
        lines = []

        lines.append("=" * 60)
        lines.append(f"CHECKS: {self.subject}")
        lines.append("=" * 60)

        for check in self.checks:
            mark = "✅" if check.passed else "❌"
            line = f"{mark} {check.name}"
            if check.subject:
                line += f" [{check.subject}]"
            if check.detail:
                line += f": {check.detail}"
            lines.append(line)

        lines.append("")
        if self.passed:
            lines.append(f"All {len(self.checks)} checks passed")
        else:
            lines.append(f"{len(self.failures)} of {len(self.checks)} checks failed")
        lines.append("=" * 60)

        return "\n".join(lines)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'subject': self.subject,
            'passed': self.passed,
            'checks': [check.to_dict() for check in self.checks],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CheckReport':
        return cls(
            subject=data['subject'],
            checks=[CheckResult.from_dict(c) for c in data.get('checks', [])],
        )
