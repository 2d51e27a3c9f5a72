"""CLI package for vo-formation."""
