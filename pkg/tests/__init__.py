"""Two-ends kernels test suite."""
