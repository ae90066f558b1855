"""Mode-basis molecular dynamics for isolated molecules."""

__version__ = "0.1.0"
