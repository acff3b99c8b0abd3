"""Exact GF(2) column reduction: the ground truth the circuits approximate."""

from __future__ import annotations

import numpy as np

__all__ = ["low_exact", "reduce_exact", "as_binary_matrix"]


def low_exact(v) -> int:
    """Largest index holding a 1; the all-zero n-vector maps to n - 1.

    The extension to the zero vector is safe for strictly upper
    triangular matrices: a nonzero column can never have its lowest 1 in
    the last row, so the sentinel never collides with a real low.
    """
    arr = np.asarray(v)
    nz = np.flatnonzero(arr)
    if nz.size == 0:
        return arr.shape[0] - 1
    return int(nz[-1])


def as_binary_matrix(matrix, *, require_strict_upper: bool = True) -> np.ndarray:
    """Coerce input to a square uint8 0/1 matrix, validating shape and range."""
    entries = getattr(matrix, "entries", matrix)
    arr = np.asarray(entries)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("matrix must be square")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("matrix entries must be 0 or 1")
    arr = arr.astype(np.uint8)
    if require_strict_upper and np.tril(arr).any():
        raise ValueError("matrix must be strictly upper triangular")
    return arr


def reduce_exact(matrix, *, return_transform: bool = False):
    """Textbook column reduction over GF(2).

    Repeatedly adds an earlier column with the same lowest 1 into column j
    until every nonzero column has a distinct lowest 1.  At any moment at
    most one finished column owns a given low, so the choice of donor is
    forced.  With ``return_transform`` also returns the accumulated
    invertible upper-triangular matrix V with R = matrix @ V over GF(2).
    """
    r = as_binary_matrix(matrix).copy()
    n = r.shape[0]
    v = np.eye(n, dtype=np.uint8) if return_transform else None
    owner: dict[int, int] = {}
    for j in range(n):
        while True:
            nz = np.flatnonzero(r[:, j])
            if nz.size == 0:
                break
            lw = int(nz[-1])
            donor = owner.get(lw)
            if donor is None:
                owner[lw] = j
                break
            r[:, j] ^= r[:, donor]
            if v is not None:
                v[:, j] ^= v[:, donor]
    if return_transform:
        return r, v
    return r
