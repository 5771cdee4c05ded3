"""Rate, secret key and payoff tradeoffs for source coding secrecy under causal disclosure."""

__version__ = "0.1.0"
