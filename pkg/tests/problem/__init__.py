"""Tests for problem modelling, files and frequency checks."""
