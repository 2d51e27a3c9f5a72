
"""Test suite for vo-formation."""

