"""Geometry of the upper half-space models."""
