"""Test Two Ends Kernels."""

import two_ends_kernels


def test_import() -> None:
    """Test that the package can be imported."""
    assert isinstance(two_ends_kernels.__name__, str)
