"""Input validation helpers for path/symbol arrays."""

from __future__ import annotations

import numpy as np

from .errors import DomainError


def check_symbol_array(X, alphabet_size=None):
    """Validate an (n, m) integer symbol array and settle its alphabet size.

    Accepts anything array-like with integral values; returns a contiguous
    int64 array plus the alphabet size (inferred as max+1, floor 2, when
    not supplied).
    """
    arr = np.asarray(X)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DomainError(f"symbol array must be 2-D (n, m), got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        as_int = arr.astype(np.int64)
        if not np.array_equal(as_int, arr):
            raise DomainError("symbol array must contain integers")
        arr = as_int
    else:
        arr = arr.astype(np.int64)
    if arr.min() < 0:
        raise DomainError("symbols must be nonnegative")
    observed_max = int(arr.max())
    if alphabet_size is None:
        alphabet_size = max(2, observed_max + 1)
    else:
        alphabet_size = int(alphabet_size)
        if alphabet_size < 2:
            raise DomainError(f"alphabet size must be >= 2, got {alphabet_size}")
        if observed_max >= alphabet_size:
            raise DomainError(
                f"symbol {observed_max} out of range for alphabet of size {alphabet_size}"
            )
    return arr, alphabet_size
