"""
Console rendering for voctl.
"""

from voform.ui.formatter import RichFormatter
from voform.ui.theme import VoformTheme, theme

__all__ = [
    'RichFormatter',
    'VoformTheme',
    'theme',
]
