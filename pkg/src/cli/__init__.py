"""Command-line dispatch."""
