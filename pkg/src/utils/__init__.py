"""Utility functions for the Riccati inequality analyzer."""
