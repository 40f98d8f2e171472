"""Tests for Hamiltonian construction and spectra."""
