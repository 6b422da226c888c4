"""Rotating Bose gas in a flat disc trap."""
