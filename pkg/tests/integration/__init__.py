"""Integration and acceptance tests for the Riccati inequality analyzer."""
