"""Riccati inequality analyzer.

This package decides solvability of the strict Riccati inequality from the
imaginary-axis spectrum of its Hamiltonian matrix, classifies axis eigenvalues
by Krein type and computes certified stabilizing solutions.
"""

__version__ = "0.1.0"
