"""
Console theme for voctl.

Color Palette:
- Accent blue (headings/labels): #61AFEF
- Accent green (passed checks, formed organisations): #98C379
- Accent orange (warnings, skipped stages): #E5C07B
- Accent red (failed checks, formation errors): #E06C75
- Muted gray (secondary text): #5C6370
"""

from dataclasses import dataclass


@dataclass
class ColorPalette:
    """voctl color palette."""

    text_secondary: str = "#5C6370"

    blue: str = "#61AFEF"

    success: str = "#98C379"
    error: str = "#E06C75"
    warning: str = "#E5C07B"
    info: str = "#61AFEF"

    # Formation vocabulary
    agent: str = "#C678DD"
    service: str = "#56B6C2"
    stage: str = "#61AFEF"


@dataclass
class Icons:
    """Icon characters for console display."""

    success: str = "✓"
    error: str = "✗"
    warning: str = "⚠"
    info: str = "ℹ"
    pending: str = "○"

    arrow_right: str = "→"
    contract: str = "⚑"


class VoformTheme:
    """Colors and icons shared by every console view."""

    def __init__(self):
        self.colors = ColorPalette()
        self.icons = Icons()

    def get_status_color(self, status: str) -> str:
        """Get color for a status string."""
        status_lower = status.lower()
        if status_lower in ['passed', 'success', 'formed', 'ok']:
            return self.colors.success
        elif status_lower in ['failed', 'error']:
            return self.colors.error
        elif status_lower in ['pending', 'skipped']:
            return self.colors.warning
        else:
            return self.colors.text_secondary

    def get_status_icon(self, status: str) -> str:
        """Get icon for a status string."""
        status_lower = status.lower()
        if status_lower in ['passed', 'success', 'formed', 'ok']:
            return self.icons.success
        elif status_lower in ['failed', 'error']:
            return self.icons.error
        elif status_lower in ['pending', 'skipped']:
            return self.icons.pending
        elif status_lower in ['warning', 'warn']:
            return self.icons.warning
        else:
            return self.icons.info


# Global theme instance
theme = VoformTheme()
