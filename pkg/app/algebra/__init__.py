"""Exact fields, polynomials, series and formula parsing."""
