"""Point sampling on boxes in the positive orthant.

Everything here works in log coordinates: random samples are log-uniform and
grids are geometric, so the positive orthant is covered without crowding the
large end of each axis.
"""

from __future__ import annotations

import numpy as np

from .families import validate_box

__all__ = ["box_center", "log_uniform", "log_grid", "grid_shape"]


def box_center(box) -> np.ndarray:
    """Arithmetic midpoint of each axis."""
    box = validate_box(box)
    return np.array([(lo + hi) / 2.0 for lo, hi in box])


def log_uniform(box, count: int, seed: int = 0) -> np.ndarray:
    """(count, n) array of independent log-uniform points in ``box``."""
    box = validate_box(box)
    rng = np.random.default_rng(seed)
    u = rng.random((int(count), len(box)))
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    return lo * (hi / lo) ** u


def grid_shape(n_axes: int, samples: int) -> int:
    """Points per axis so the full grid lands near ``samples`` total."""
    per = round(float(samples) ** (1.0 / n_axes))
    return max(2, int(per))


def log_grid(box, samples: int) -> np.ndarray:
    """Geometric grid over ``box`` with about ``samples`` points in total.

    Rows are ordered with the last axis varying fastest.
    """
    box = validate_box(box)
    per = grid_shape(len(box), samples)
    axes = [np.geomspace(lo, hi, per) for lo, hi in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)
