"""Radial Chern-Simons-Schrodinger energy: thresholds, solitons and ball minimization."""
