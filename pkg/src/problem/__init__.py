"""Riccati problems: model, validation, problem files and frequency checks."""
