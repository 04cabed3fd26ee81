"""Uniform random simple triangulations and quadrangulations via blossoming trees."""

__version__ = "0.1.0"
