"""Exact enumeration of every local minimum of a ridge-regularized one-hidden-layer
ReLU regression loss, via activation-region partitioning and computational algebra."""

__version__ = "0.1.0"
