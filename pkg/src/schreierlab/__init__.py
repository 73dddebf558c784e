"""Desk-scale exact-arithmetic workbench for transfinite Schreier families,
Tsirelson-type norms, block certificates and norming-measure separation."""

__version__ = "0.1.0"
