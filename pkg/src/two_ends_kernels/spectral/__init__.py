"""Operators, semigroups and functional calculus."""
