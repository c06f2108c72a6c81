"""cptalloc - Lottery allocation of network throughput under prospect-theoretic preferences."""

__version__ = "1.0.0"
