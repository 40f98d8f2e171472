"""Riccati equation and inequality solvers."""
