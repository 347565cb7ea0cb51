"""Mixed-radix integer codes for joint symbol blocks.

A *block* is a window of ``width`` consecutive time steps over a set of
nodes.  Its slots are ordered canonically: node indices ascending, time
ascending within a node (node-major, time-minor).  A block is encoded as a
base-``alphabet_size`` integer whose first canonical slot is the most
significant digit, so the last slot (largest node, latest time) is the
least significant digit.  This ordering is shared by the empirical
counting kernel, the analytic stationary tables, and the model JSON
serialization, which makes their tables directly comparable.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, SizeGuardError

MAX_TABLE_ENTRIES = 1 << 24


def check_table_size(alphabet_size, num_slots):
    """Raise :class:`SizeGuardError` when a dense table would be too large."""
    if alphabet_size < 2:
        raise DomainError(f"alphabet size must be >= 2, got {alphabet_size}")
    entries = alphabet_size**num_slots
    if entries > MAX_TABLE_ENTRIES:
        raise SizeGuardError(
            f"table of {alphabet_size}^{num_slots} = {entries} entries exceeds "
            f"the exact-enumeration guard of {MAX_TABLE_ENTRIES}"
        )
    return entries


def canonical_slots(m, width):
    """All (node, time) slots of an m-node block in canonical order."""
    return tuple((j, t) for j in range(m) for t in range(width))


def slot_weights(num_slots, alphabet_size):
    """Digit weights for each canonical slot position (first = most significant)."""
    return alphabet_size ** np.arange(num_slots - 1, -1, -1, dtype=np.int64)


def encode_block(symbols, alphabet_size):
    """Encode symbols listed in canonical slot order into a single integer."""
    code = 0
    for s in symbols:
        code = code * alphabet_size + int(s)
    return code


def decode_block(code, num_slots, alphabet_size):
    """Inverse of :func:`encode_block`; returns a tuple of symbols."""
    digits = []
    for _ in range(num_slots):
        code, d = divmod(code, alphabet_size)
        digits.append(d)
    if code:
        raise DomainError(f"code out of range for {num_slots} base-{alphabet_size} slots")
    return tuple(reversed(digits))


def path_block_codes(symbols, width, alphabet_size):
    """Codes of all sliding windows of ``width`` steps over an (n, m) path.

    Returns an int64 array of length ``n - width + 1``; entry ``t`` encodes
    the block ``symbols[t : t + width]`` in canonical slot order.
    """
    symbols = np.asarray(symbols)
    n, m = symbols.shape
    if n < width:
        raise DomainError(f"path of length {n} has no window of width {width}")
    check_table_size(alphabet_size, m * width)
    num_windows = n - width + 1
    codes = np.zeros(num_windows, dtype=np.int64)
    node_radix = int(alphabet_size) ** width
    for j in range(m):
        wc = np.zeros(num_windows, dtype=np.int64)
        for i in range(width):
            wc *= alphabet_size
            wc += symbols[i : num_windows + i, j].astype(np.int64)
        codes = codes * node_radix + wc
    return codes


def marginalize_axes(table, m, width, keep, alphabet_size):
    """Sum a dense block table down to the kept (node, time) slots.

    ``table`` is a 1-D array over all ``alphabet_size**(m*width)`` block
    codes; ``keep`` is an iterable of (node, time) slots.  The result is a
    1-D array over the kept slots, which remain in canonical order.
    """
    slots = canonical_slots(m, width)
    keep = set(keep)
    if not keep:
        raise DomainError("cannot marginalize onto an empty slot set")
    unknown = keep - set(slots)
    if unknown:
        raise DomainError(f"invalid slots for an m={m}, width={width} block: {sorted(unknown)}")
    drop_axes = tuple(i for i, s in enumerate(slots) if s not in keep)
    shaped = np.asarray(table).reshape((alphabet_size,) * len(slots))
    if drop_axes:
        shaped = shaped.sum(axis=drop_axes)
    return shaped.reshape(-1)


def directed_info_slot_sets(m, k, i, j):
    """The four block-marginal slot sets behind I(i -> j | rest).

    Returns (full, no_target_now, others, others_past): the whole
    (k+1)-block, the block without the target's newest symbol, the block
    without the source node, and the block with both removals.  The
    conditional directed information of edge i -> j equals
    H(others) + H(no_target_now) - H(full) - H(others_past).
    """
    if i == j or not (0 <= i < m and 0 <= j < m):
        raise DomainError(f"edge ({i}, {j}) is not a valid ordered node pair for m={m}")
    full = frozenset(canonical_slots(m, k + 1))
    no_target_now = full - {(j, k)}
    others = frozenset(s for s in full if s[0] != i)
    others_past = others - {(j, k)}
    return full, no_target_now, others, others_past


def group_codes(code, group_sizes, alphabet_size):
    """Split mixed-radix code(s) into consecutive digit groups.

    ``group_sizes`` lists the number of slots per group, first group most
    significant.  Works elementwise on arrays.
    """
    code = np.asarray(code, dtype=np.int64)
    radices = [int(alphabet_size) ** g for g in group_sizes]
    out = []
    for r in reversed(radices):
        out.append(code % r)
        code = code // r
    return list(reversed(out))


def combine_codes(parts, group_sizes, alphabet_size):
    """Inverse of :func:`group_codes` (elementwise on arrays)."""
    code = np.zeros_like(np.asarray(parts[0], dtype=np.int64))
    for part, g in zip(parts, group_sizes):
        code = code * (int(alphabet_size) ** g) + np.asarray(part, dtype=np.int64)
    return code
