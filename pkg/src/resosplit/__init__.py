"""Split-step Fourier simulation of periodic Schroedinger equations at resonant time steps."""

__version__ = "0.1.0"
