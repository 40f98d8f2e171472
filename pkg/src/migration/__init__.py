"""Rank-one Hamiltonian perturbations and eigenvalue tracing."""
