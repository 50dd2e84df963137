"""Certification toolkit for permanence of planar power-law dynamical systems.

Decides whether a two-dimensional polynomial/power-law system with bounded
time-varying coefficients admits a cone differential inclusion whose escape
directions are separated from the admissible velocity cones — a constructive
sufficient condition for permanence — and backs the verdict with verified
forward-invariant polygons and simulation stress tests.
"""

__version__ = "0.1.0"
