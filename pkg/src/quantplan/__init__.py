"""Per-client quantization planning for mixed-precision federated learning."""

__version__ = "0.1.0"
