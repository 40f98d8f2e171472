"""Tests for perturbations and eigenvalue tracing."""
