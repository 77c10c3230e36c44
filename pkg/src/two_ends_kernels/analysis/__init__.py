"""Kernel bounds and real-analysis tools."""
