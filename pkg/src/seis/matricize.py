"""Spatially-aware matricization.

A (b, c, h, w) tensor becomes a (h*w, b*c) matrix: spatial cells are the
features (rows), batch x channel slices are the observations (columns).
This is the transpose of the usual channels-as-features layout, and it is
what lets a spatial transform act as a plain linear operator on the row
axis. The flattening order is pinned so independent implementations agree:
spatial cell (y, x) lands in row y*w + x, observation (batch i, channel j)
in column i*c + j.
"""

from typing import NamedTuple

import numpy as np

from .errors import DegenerateSampleError, ShapeError
from .tensor_io import validate_tensor


class CenteredMatrix(NamedTuple):
    data: np.ndarray       # (d, n), every row sums to ~0
    row_means: np.ndarray  # (d,)


def matricize(z) -> np.ndarray:
    """Reshape a (b, c, h, w) tensor into its (h*w, b*c) spatial matrix."""
    z = validate_tensor(z)
    b, c, h, w = z.shape
    return z.reshape(b * c, h * w).T.copy()


def dematricize(a, dims) -> np.ndarray:
    """Invert matricize; exact inverse for matching source dims."""
    b, c, h, w = dims
    a = np.asarray(a, dtype=np.float64)
    if a.shape != (h * w, b * c):
        raise ShapeError(f"matrix shape {a.shape} does not match dims {tuple(dims)}")
    return np.ascontiguousarray(a.T).reshape(b, c, h, w)


def center_rows(a) -> CenteredMatrix:
    """Subtract each row's mean over the observations.

    Centering happens here, before any SVD, so the truncated basis is a
    true principal subspace and the canonical variates downstream come out
    centered. Idempotent. Requires at least two observations.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={a.ndim}")
    if a.shape[1] < 2:
        raise DegenerateSampleError(
            f"centering needs at least 2 observations, got {a.shape[1]}"
        )
    means = a.mean(axis=1)
    return CenteredMatrix(data=a - means[:, None], row_means=means)
