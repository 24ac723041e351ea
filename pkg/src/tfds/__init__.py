"""Torsion-free derived series ranks and homological completion tools for finitely presented groups."""

__version__ = "0.1.0"
