"""Surreal-valued numerosities, surreal integration and divergent series."""
