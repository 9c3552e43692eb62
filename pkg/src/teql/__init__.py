"""Tensor-Efficient Q-Learning."""

__version__ = "0.1.0"
