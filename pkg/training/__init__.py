"""Pair sampling, losses and the optimisation loop."""
