"""Sequential, anytime-valid auditing of (epsilon, delta)-differential privacy."""

__version__ = "0.1.0"
