"""Hamiltonian matrices and their spectra."""
