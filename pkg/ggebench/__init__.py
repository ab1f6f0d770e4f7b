"""ggebench - Greedy gradient ensemble de-bias training toolkit."""

__version__ = "0.1.0"
__author__ = "Embedded Dev Research Team"
