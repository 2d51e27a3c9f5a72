"""Utility functions for vo-formation."""
