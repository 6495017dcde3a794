"""CLI commands module."""
