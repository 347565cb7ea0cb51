"""Sample-path generation with reproducible seeding and burn-in.

Each path owns a counter-based random stream derived from its seed, with a
fixed draw layout: draw 0 picks the initial joint k-block, and sampling
round ``q`` (burn-in rounds first) consumes draws ``1 + q*m + j`` for node
``j``.  Because draw values depend only on (seed, position), replica
batches produce bit-identical symbols whether generated one at a time, in
vectorized lockstep, or concurrently.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import encoding
from .errors import ConfigurationError, DomainError, SizeGuardError
from .model import stationary_distribution
from .rng import stream_state, uniform_at

DEFAULT_BURN_IN_PER_ORDER = 1000
_CHUNK_ENTRIES = 1 << 25


@dataclass(frozen=True)
class SamplePath:
    """n time steps of m symbols with the provenance needed to regenerate them."""

    symbols: np.ndarray  # (n, m) integers in [0, alphabet_size)
    k: int
    alphabet_size: int
    seed: int
    burn_in: int

    @property
    def n(self):
        return self.symbols.shape[0]

    @property
    def m(self):
        return self.symbols.shape[1]


def _stationary_state_cdf(model):
    """Cumulative stationary k-block law, or None when enumeration is too large."""
    try:
        dist = stationary_distribution(model)
    except SizeGuardError:
        return None
    return np.cumsum(dist.state_probs)


def _simulate_batch(model, n, burn_in, seeds):
    m, k, a = model.m, model.k, model.alphabet_size
    if a > np.iinfo(np.int16).max:
        raise DomainError(f"alphabet size {a} exceeds the simulator's symbol range")
    if n <= k:
        raise DomainError(f"path length must exceed the order: n={n}, k={k}")
    if burn_in < 0:
        raise DomainError(f"burn-in must be nonnegative, got {burn_in}")
    state_cdf = _stationary_state_cdf(model)
    if state_cdf is None and burn_in == 0:
        raise ConfigurationError(
            "model is too large for exact stationary initialization; "
            "a positive burn-in is required to approach stationarity"
        )
    n_states = a ** (m * k)
    if state_cdf is None and n_states > 1 << 62:
        raise DomainError("joint k-block state space exceeds the representable integer range")

    seeds = list(seeds)
    states0 = np.array([stream_state(s) for s in seeds], dtype=np.uint64)
    r = len(seeds)

    u0 = uniform_at(states0, 0)
    if state_cdf is None:
        init = np.minimum((u0 * n_states).astype(np.int64), n_states - 1)
    else:
        init = np.minimum(np.searchsorted(state_cdf, u0, side="right"), n_states - 1)
    codes = np.stack(encoding.group_codes(init, [k] * m, a), axis=1)  # (r, m) per-node windows

    sel = [model.conditioning_set(j) for j in range(m)]
    mults = [
        np.array([a ** (k * (len(s) - 1 - p)) for p in range(len(s))], dtype=np.int64)
        for s in sel
    ]
    sel = [np.array(s, dtype=np.int64) for s in sel]
    cums = []
    for t in model.conditionals:
        c = np.cumsum(t, axis=1)
        c[:, -1] = 1.0  # uniforms are < 1, so the summed comparison stays in range
        cums.append(c)

    out = np.empty((r, n, m), dtype=np.int16)
    drop = a ** (k - 1)
    nxt = np.empty((r, m), dtype=np.int64)
    total_rounds = burn_in + (n - k)
    block = max(1, min(total_rounds, (1 << 22) // max(1, r * m)))
    for block_start in range(0, total_rounds, block):
        block_rounds = min(block, total_rounds - block_start)
        # draw indices 1 + q*m + j for every round q and node j of this block
        idx = np.arange(
            1 + block_start * m, 1 + (block_start + block_rounds) * m, dtype=np.uint64
        )
        ublock = uniform_at(states0[:, None], idx[None, :]).reshape(r, block_rounds, m)
        for qi in range(block_rounds):
            q = block_start + qi
            if q == burn_in:
                for t in range(k):
                    out[:, t, :] = (codes // (a ** (k - 1 - t))) % a
            for j in range(m):
                s = sel[j]
                rows = codes[:, s[0]] if s.size == 1 else codes[:, s] @ mults[j]
                nxt[:, j] = (cums[j][rows] < ublock[:, qi, j, None]).sum(axis=1)
            codes[:] = (codes % drop) * a + nxt
            if q >= burn_in:
                out[:, k + (q - burn_in), :] = nxt
    return out


def default_burn_in(model):
    """Burn-in used when exact stationary initialization is unavailable."""
    if _stationary_state_cdf(model) is None:
        return DEFAULT_BURN_IN_PER_ORDER * model.k
    return 0


def simulate(model, n, burn_in=None, seed=0):
    """One sample path; identical arguments always yield identical symbols."""
    if burn_in is None:
        burn_in = default_burn_in(model)
    symbols = _simulate_batch(model, n, burn_in, [seed])[0]
    return SamplePath(
        symbols=symbols, k=model.k, alphabet_size=model.alphabet_size, seed=int(seed), burn_in=burn_in
    )


def simulate_replicas(model, n, burn_in=None, base_seed=0, count=1):
    """Paths seeded ``base_seed .. base_seed+count-1``; order/chunking invisible."""
    if count < 1:
        raise DomainError(f"replica count must be >= 1, got {count}")
    if burn_in is None:
        burn_in = default_burn_in(model)
    chunk = max(1, _CHUNK_ENTRIES // max(1, n * model.m))
    paths = []
    for start in range(0, count, chunk):
        seeds = [base_seed + i for i in range(start, min(start + chunk, count))]
        block = _simulate_batch(model, n, burn_in, seeds)
        for row, s in enumerate(seeds):
            paths.append(
                SamplePath(
                    symbols=block[row].copy(),
                    k=model.k,
                    alphabet_size=model.alphabet_size,
                    seed=int(s),
                    burn_in=burn_in,
                )
            )
    return paths


def write_path_csv(path, file_or_name):
    """CSV export: header ``t,node0,...,node{m-1}``, one row per time step."""

    def _write(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t"] + [f"node{j}" for j in range(path.m)])
        for t in range(path.n):
            writer.writerow([t] + [int(v) for v in path.symbols[t]])

    if hasattr(file_or_name, "write"):
        _write(file_or_name)
    else:
        with open(file_or_name, "w", encoding="utf-8", newline="") as fh:
            _write(fh)


def read_symbols_csv(file_or_name):
    """Parse a path CSV back into an (n, m) symbol array."""

    def _read(fh):
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "t":
            raise DomainError("path CSV must start with a 't,node0,...' header")
        rows = [[int(v) for v in row[1:]] for row in reader if row]
        if not rows:
            raise DomainError("path CSV contains no data rows")
        return np.asarray(rows, dtype=np.int64)

    if hasattr(file_or_name, "read"):
        return _read(file_or_name)
    with open(file_or_name, "r", encoding="utf-8", newline="") as fh:
        return _read(fh)
