"""Tests for the linear algebra kernels."""
