"""Krein classification of imaginary-axis eigenvalues and solvability verdicts."""
