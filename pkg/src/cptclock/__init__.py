"""Simulation of CPT pseudoresonance spectroscopy in a Rb-87 vapor cell."""

__version__ = "0.1.0"
