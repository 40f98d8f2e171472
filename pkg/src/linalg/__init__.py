"""Dense linear algebra kernels: Schur forms, invariant subspaces, ranks."""
