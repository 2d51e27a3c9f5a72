"""
Rich formatter for voctl.

Renders headers, panels, check reports and formation summaries.
Error panels go to standard error so scripted callers can keep
standard output clean.
"""

from typing import Iterable, List, Optional, Sequence

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from voform.core.report import CheckReport
from voform.formation.partial_vo import PartialVO
from voform.formation.runner import FormationTrace
from voform.ui.theme import theme


class RichFormatter:
    """Formatter for Rich library output with the voctl theme."""

    def __init__(self, console: Optional[Console] = None, error_console: Optional[Console] = None):
        self.console = console or Console()
        self.error_console = error_console or Console(stderr=True)

    def set_console(self, console: Console, error_console: Optional[Console] = None) -> None:
        """Update the underlying console instances."""
        self.console = console
        if error_console is not None:
            self.error_console = error_console

    def print_header(self, text: str) -> None:
        self.console.print(f"\n[bold {theme.colors.blue}]{text}[/bold {theme.colors.blue}]")

    def print_subheader(self, text: str) -> None:
        self.console.print(f"[{theme.colors.text_secondary}]{text}[/{theme.colors.text_secondary}]")

    def print_success(self, text: str) -> None:
        icon = theme.icons.success
        self.console.print(f"[{theme.colors.success}]{icon}[/{theme.colors.success}] {text}")

    def _build_message_sections(
        self,
        message: Optional[str] = None,
        *,
        help_text: Optional[str] = None,
        tip: Optional[str] = None,
        suggestions: Optional[Iterable[str]] = None,
        details: Optional[str] = None,
    ) -> str:
        """Compose multiline message content for Rich panels."""
        sections: List[str] = []

        if message:
            sections.append(message)

        if details:
            sections.append(f"[{theme.colors.text_secondary}]{details}[/{theme.colors.text_secondary}]")

        if help_text:
            sections.append(
                f"[bold {theme.colors.info}]Help[/bold {theme.colors.info}]\n{help_text}"
            )

        if suggestions:
            suggestion_lines = "\n".join(
                f"[{theme.colors.text_secondary}]{theme.icons.arrow_right} {item}[/{theme.colors.text_secondary}]"
                for item in suggestions
            )
            sections.append(
                f"[bold {theme.colors.blue}]Suggested Commands[/bold {theme.colors.blue}]\n{suggestion_lines}"
            )

        if tip:
            sections.append(
                f"[{theme.colors.warning}]{theme.icons.warning} Tip:[/{theme.colors.warning}] {tip}"
            )

        return "\n\n".join(sections)

    def print_error(
        self,
        title: str,
        message: Optional[str] = None,
        *,
        help_text: Optional[str] = None,
        tip: Optional[str] = None,
        suggestions: Optional[Iterable[str]] = None,
        details: Optional[str] = None,
    ) -> None:
        """Print an error panel with helpful context to standard error."""
        if message is None:
            message = title
            title = "Command Error"

        content = self._build_message_sections(
            message,
            help_text=help_text,
            tip=tip,
            suggestions=suggestions,
            details=details,
        )
        self.error_console.print(
            self.panel(content, title=f"{theme.icons.error} {title}", border_color=theme.colors.error)
        )

    def panel(self, content: str, title: Optional[str] = None,
              border_color: Optional[str] = None) -> Panel:
        return Panel(
            content,
            title=title,
            border_style=border_color or theme.colors.blue,
            box=box.ROUNDED,
            padding=(1, 2)
        )

    def print_panel(self, content: str, title: Optional[str] = None,
                    border_color: Optional[str] = None) -> None:
        self.console.print(self.panel(content, title, border_color))

    def print_success_panel(self, content: str, title: str = "Success") -> None:
        icon = theme.icons.success
        self.print_panel(content, title=f"{icon} {title}", border_color=theme.colors.success)

    def print_bullet_list(self, items: Sequence[str], icon: str = "•", style: Optional[str] = None) -> None:
        for item in items:
            bullet = f"[{style}]{icon}[/{style}]" if style else icon
            self.console.print(f"  {bullet} {item}")

    def table(self, title: Optional[str] = None, headers: Optional[List[str]] = None) -> Table:
        """Create a table with the voctl styling."""
        table = Table(
            title=title,
            box=box.SIMPLE,
            border_style=theme.colors.text_secondary,
            header_style=f"bold {theme.colors.blue}",
            show_header=headers is not None,
            padding=(0, 1)
        )

        if headers:
            for header in headers:
                table.add_column(header)

        return table

    def check_table(self, report: CheckReport, failures_only: bool = False) -> Table:
        """One row per check: status icon, name, subject and detail."""
        table = self.table(title=report.subject, headers=["", "Check", "Subject", "Detail"])
        for check in report.checks:
            if failures_only and check.passed:
                continue
            status = "passed" if check.passed else "failed"
            color = theme.get_status_color(status)
            table.add_row(
                f"[{color}]{theme.get_status_icon(status)}[/{color}]",
                check.name,
                check.subject or "",
                check.detail,
            )
        return table

    def print_check_report(self, report: CheckReport, failures_only: bool = False) -> None:
        console = self.console if report.passed else self.error_console
        console.print(self.check_table(report, failures_only))

    def print_organisation(self, vo: PartialVO) -> None:
        """Summarize the members, workflow and contracts of a (partial) organisation."""
        members = self.table(headers=["Agent", "Roles", "Goals"])
        for agent in vo.agents:
            members.add_row(
                f"[{theme.colors.agent}]{agent.agent_id}[/{theme.colors.agent}]",
                "\n".join(str(r.label) for r in agent.roles),
                "\n".join(str(g) for g in agent.goals),
            )
        self.console.print(members)

        if vo.workflow is not None:
            self.print_subheader("Workflow")
            self.print_bullet_list(
                [f"[{theme.colors.service}]{s}[/{theme.colors.service}]" for s in vo.workflow.services],
                icon=theme.icons.arrow_right,
            )
            if vo.workflow.annotation:
                self.print_subheader(f"Annotation: {vo.workflow.annotation}")

        if vo.contracts:
            self.print_subheader("Contracts")
            self.print_bullet_list(
                [f"{c.cid}: " + ', '.join(str(s) for s in c.sdt.services) for c in vo.contracts],
                icon=theme.icons.contract,
            )

    def print_trace_summary(self, trace: FormationTrace) -> None:
        """One row per transition, then the failure or the formed organisation."""
        table = self.table(headers=["Transition", "Stage", "Agents", "Checks"])
        for step in trace.steps:
            color = theme.get_status_color("passed" if step.report.passed else "failed")
            table.add_row(
                step.name,
                f"[{theme.colors.stage}]{step.after.stage.value}[/{theme.colors.stage}]",
                ', '.join(step.after.ids),
                f"[{color}]{len(step.report.checks) - len(step.report.failures)}"
                f"/{len(step.report.checks)}[/{color}]",
            )
        if trace.failure is not None:
            table.add_row(
                trace.failure.transition,
                f"[{theme.colors.error}]{theme.icons.error} {trace.failure.code}[/{theme.colors.error}]",
                "",
                "",
            )
        self.console.print(table)

        if trace.succeeded:
            self.print_organisation(trace.final)


# Global formatter instance
formatter = RichFormatter()
