"""Fractional Voigt creep toolkit."""
