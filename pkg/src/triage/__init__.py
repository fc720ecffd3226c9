"""Disaster-relevant tweet triage: matching and learning classifiers, evaluation, sentiment."""

__version__ = "0.1.0"
