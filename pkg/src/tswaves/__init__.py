"""Numerical construction of compressible Tollmien-Schlichting waves."""

__version__ = "0.1.0"
