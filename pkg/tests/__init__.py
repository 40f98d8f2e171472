"""Tests for the Riccati inequality analyzer.

This package contains tests for all components of the system.
"""
