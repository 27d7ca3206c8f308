"""Resilient adaptive spectral deferred correction with a fault-injection harness."""
__version__ = "0.1.0"
