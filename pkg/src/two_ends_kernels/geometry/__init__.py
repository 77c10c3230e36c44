"""Discrete models of the manifold with two ends."""
