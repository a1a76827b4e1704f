"""Neural feature extraction front end for the event type pipeline."""

__version__ = "0.1.0"
