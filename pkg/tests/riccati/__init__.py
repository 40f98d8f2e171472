"""Tests for the Riccati solvers."""
