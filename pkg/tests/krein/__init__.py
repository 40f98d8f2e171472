"""Tests for Krein classification and verdicts."""
