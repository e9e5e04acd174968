"""Classical emulation and cost estimation for first-quantized plane-wave chemistry simulation."""

__version__ = "0.1.0"
