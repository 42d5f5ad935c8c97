"""Experimental geometry of nonorientable hyperbolic surfaces.

Holonomy of small benchmark surfaces, simple closed geodesics and their
intersection numbers, growth of Markoff-Hurwitz tuples and curve counts,
collar estimates, symbolic lamination models and Norbury volumes.
"""
from __future__ import annotations

__version__ = "0.1.0"
