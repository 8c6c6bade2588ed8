"""Tabular model-based planning with small backups and prioritized sweeping."""

__version__ = "0.1.0"
