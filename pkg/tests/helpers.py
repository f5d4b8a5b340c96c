"""Shared test utilities.

write_npy_independent is a from-scratch NPY v1.0 emitter used as the
oracle for the reader: it never touches numpy's own format module, so a
bug there cannot hide in both routes.
"""

import struct

import numpy as np
from scipy import ndimage

from seis.linalg import TruncatedSubspace, spatial_subspace
from seis.matricize import center_rows, matricize


def write_npy_independent(path, arr, fortran_order=False, descr="<f8"):
    """Hand-rolled NPY v1.0 writer (magic + padded ASCII header + payload)."""
    arr = np.asarray(arr)
    shape = ",".join(str(s) for s in arr.shape)
    if arr.ndim == 1:
        shape += ","
    header = (
        f"{{'descr': '{descr}', 'fortran_order': {fortran_order}, "
        f"'shape': ({shape}), }}"
    )
    # total header block (incl. 10 preamble bytes) padded to a multiple of 64
    unpadded = 10 + len(header) + 1
    pad = (64 - unpadded % 64) % 64
    header = header + " " * pad + "\n"
    payload = arr.astype(descr).tobytes(order="F" if fortran_order else "C")
    with open(path, "wb") as fh:
        fh.write(b"\x93NUMPY")
        fh.write(bytes([1, 0]))
        fh.write(struct.pack("<H", len(header)))
        fh.write(header.encode("latin1"))
        fh.write(payload)


def smooth_tensor(dims, sigma=1.5, seed=0):
    """Standardized smooth Gaussian field, independent of the harness code."""
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
    x = rng.standard_normal(dims)
    x = ndimage.gaussian_filter(x, sigma=(0.0, 0.0, sigma, sigma))
    mean = x.mean(axis=(2, 3), keepdims=True)
    std = x.std(axis=(2, 3), keepdims=True)
    return (x - mean) / std


def subspace_of_tensor(z) -> TruncatedSubspace:
    return spatial_subspace(center_rows(matricize(z)).data)


def subspace_of_matrix(m) -> TruncatedSubspace:
    """Truncated subspace of a raw matrix after row centering."""
    return spatial_subspace(center_rows(np.asarray(m, dtype=np.float64)).data)


def replace_projected(sub: TruncatedSubspace, projected) -> TruncatedSubspace:
    """Clone a subspace with different projected coordinates (CCA-level tests)."""
    return TruncatedSubspace(
        basis=sub.basis,
        singular_values=sub.singular_values,
        projected=np.asarray(projected, dtype=np.float64),
        retained_variance=sub.retained_variance,
        k=sub.k,
    )
