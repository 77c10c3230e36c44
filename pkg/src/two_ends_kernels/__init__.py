"""Two Ends Kernels."""
