"""Universal Wyner-Ziv rate-distortion bounds and a random-binning code simulator."""

__version__ = "0.1.0"
