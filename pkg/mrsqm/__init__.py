"""MrSQM time series classification: symbolic representations, subword mining and a linear classifier."""

__version__ = "1.0.0"
