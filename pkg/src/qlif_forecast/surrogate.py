"""Arctan surrogate for the spike threshold.

Forward passes use the hard Heaviside step; backward passes substitute the
derivative of the smooth arctan curve below.
"""

import numpy as np


def surrogate_value(u):
    """Smooth spike ``arctan(pi * u) / pi + 0.5``, strictly increasing in (0, 1)."""
    return np.arctan(np.pi * np.asarray(u, dtype=float)) / np.pi + 0.5


def surrogate_grad(u):
    """Derivative of :func:`surrogate_value`: ``1 / (1 + pi^2 u^2)``."""
    u = np.asarray(u, dtype=float)
    return 1.0 / (1.0 + (np.pi * u) ** 2)


def heaviside(u):
    return (np.asarray(u) >= 0).astype(float)
