"""Tests for command dispatch."""
