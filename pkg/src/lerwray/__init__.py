"""Loop-erased random walk on finite graphs and the Rayleigh process."""

__version__ = "0.1.0"
