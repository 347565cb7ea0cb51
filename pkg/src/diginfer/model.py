"""Jointly stationary order-k Markov models over m finite-alphabet processes.

Models are built *per node*: each node's next symbol is conditionally
independent of the other nodes' next symbols given the joint k-step past,
and node j's conditional depends only on the pasts of j and its parents.
Under that construction the joint transition factorizes exactly whenever
an edge is absent, the parent matrix is the exact ground truth of the
edge-existence criterion, and the required conditional-independence
assumptions hold for every pair simultaneously.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import encoding
from .errors import DomainError, ModelConstructionError
from .rng import Stream

ROW_SUM_TOL = 1e-12
STATIONARY_TOL = 1e-13
STATIONARY_MAX_ITER = 1_000_000
EDGE_EPS = 1e-9
DELTA_FLOOR = 0.01
DEFAULT_EPSILON = 0.02


@dataclass(frozen=True)
class DimensionSpec:
    """Index-set sizes of the full and factorized transition families.

    ``r`` parametrizes the unrestricted transition matrix, ``d`` and
    ``d_prime`` the two factors of the edge-absent factorization, and
    ``dof_null = r - d - d_prime`` is the chi-squared degree of freedom of
    the null log-likelihood-ratio statistic.
    """

    m: int
    k: int
    alphabet_size: int
    r: int
    d: int
    d_prime: int
    dof_null: int


def dimensions(m, k, alphabet_size):
    """Dimension bookkeeping for an m-node, order-k model on |X| symbols.

    ``d_prime`` counts the free parameters of the single-node factor
    P(next of j | own k-past, other-nodes (k+1)-pasts excluding the tested
    parent), i.e. |X|^((m-2)(k+1)+k) contexts with |X|-1 free entries each;
    for m = 3 this reduces to the familiar |X|^(2k+1)(|X|-1).
    """
    if m < 2 or k < 1 or alphabet_size < 2:
        raise DomainError(f"need m >= 2, k >= 1, |X| >= 2; got m={m}, k={k}, |X|={alphabet_size}")
    a = int(alphabet_size)
    if a ** (m * (k + 1)) > 1 << 62:
        raise DomainError(
            f"index-set sizes for m={m}, k={k}, |X|={a} exceed the representable integer range"
        )
    r = a ** (m * k) * (a**m - 1)
    d = a ** (m * k) * (a ** (m - 1) - 1)
    d_prime = a ** ((m - 2) * (k + 1) + k) * (a - 1)
    dof = r - d - d_prime
    if dof <= 0:
        raise DomainError(f"degenerate dimensions: r={r} <= d+d'={d + d_prime}")
    return DimensionSpec(m=m, k=k, alphabet_size=a, r=r, d=d, d_prime=d_prime, dof_null=dof)


@dataclass(frozen=True)
class StationaryBlockDistribution:
    """Exact stationary law over (k+1)-blocks plus its k-block marginal."""

    m: int
    k: int
    alphabet_size: int
    block_probs: np.ndarray  # over |X|^(m(k+1)) canonical block codes
    state_probs: np.ndarray  # over |X|^(mk) joint k-past codes
    residual_l1: float  # ||pi P - pi||_1 at convergence


@dataclass(eq=False)
class JointMarkovModel:
    """Order-k joint Markov law defined by per-node conditional tables.

    ``conditionals[j]`` is a row-stochastic table of shape
    (|X|^(k*|S_j|), |X|) where S_j is the sorted conditioning set
    {j} union parents(j); rows are indexed by the canonical code of the
    k-step joint past of S_j.  Treat instances as immutable once built.
    """

    m: int
    k: int
    alphabet_size: int
    epsilon: float
    parents: np.ndarray  # m x m booleans, parents[i, j]: i -> j; diagonal ignored
    conditionals: list
    seed: int | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.m < 2 or self.k < 1:
            raise DomainError(f"need m >= 2 and k >= 1, got m={self.m}, k={self.k}")
        if self.alphabet_size < 2:
            raise DomainError(f"alphabet size must be >= 2, got {self.alphabet_size}")
        if not (0.0 < self.epsilon and self.epsilon * self.alphabet_size <= 1.0):
            raise DomainError(f"epsilon must satisfy 0 < epsilon <= 1/|X|, got {self.epsilon}")
        self.parents = np.asarray(self.parents, dtype=bool).copy()
        if self.parents.shape != (self.m, self.m):
            raise DomainError(f"parents matrix must be {self.m}x{self.m}")
        np.fill_diagonal(self.parents, False)
        if len(self.conditionals) != self.m:
            raise DomainError("one conditional table per node is required")
        tables = []
        for j in range(self.m):
            rows = self.alphabet_size ** (self.k * len(self.conditioning_set(j)))
            table = np.asarray(self.conditionals[j], dtype=float)
            if table.shape != (rows, self.alphabet_size):
                raise DomainError(
                    f"node {j}: conditional table must have shape ({rows}, {self.alphabet_size})"
                )
            if np.any(table < self.epsilon):
                raise DomainError(f"node {j}: conditional entries below epsilon={self.epsilon}")
            if np.max(np.abs(table.sum(axis=1) - 1.0)) > ROW_SUM_TOL:
                raise DomainError(f"node {j}: conditional rows must sum to 1 within {ROW_SUM_TOL}")
            tables.append(table)
        self.conditionals = tables

    def conditioning_set(self, j):
        """Sorted node indices whose k-pasts feed node j's conditional."""
        return tuple(sorted({j} | {i for i in range(self.m) if self.parents[i, j]}))

    def context_rows(self, j):
        """Row index of node j's table for every joint k-past code."""
        key = ("rows", j)
        if key not in self._cache:
            a, k = self.alphabet_size, self.k
            states = np.arange(a ** (self.m * k), dtype=np.int64)
            per_node = encoding.group_codes(states, [k] * self.m, a)
            sel = self.conditioning_set(j)
            self._cache[key] = encoding.combine_codes(
                [per_node[i] for i in sel], [k] * len(sel), a
            )
        return self._cache[key]

    def transition_matrix(self):
        """Dense joint transition Q[s, a] over joint k-past s and next symbols a.

        Exact enumeration; subject to the dense-table size guard.
        """
        if "transition" not in self._cache:
            a, m = self.alphabet_size, self.m
            encoding.check_table_size(a, m * (self.k + 1))
            nexts = np.arange(a**m, dtype=np.int64)
            next_digits = encoding.group_codes(nexts, [1] * m, a)
            q = np.ones((a ** (m * self.k), a**m), dtype=float)
            for j in range(m):
                rows = self.context_rows(j)
                q *= self.conditionals[j][rows[:, None], next_digits[j][None, :]]
            self._cache["transition"] = q
        return self._cache["transition"]

    def dims(self):
        return dimensions(self.m, self.k, self.alphabet_size)


def _shifted_state_codes(m, k, alphabet_size):
    """next_state[s, a]: joint k-past code after appending next symbols a."""
    a = int(alphabet_size)
    states = np.arange(a ** (m * k), dtype=np.int64)
    nexts = np.arange(a**m, dtype=np.int64)
    per_node = encoding.group_codes(states, [k] * m, a)
    next_digits = encoding.group_codes(nexts, [1] * m, a)
    drop = a ** (k - 1)
    shifted = [(per_node[j] % drop)[:, None] * a + next_digits[j][None, :] for j in range(m)]
    return encoding.combine_codes(shifted, [k] * m, a)


def _block_codes_of_transitions(m, k, alphabet_size):
    """(k+1)-block code for every (joint k-past, next symbols) pair."""
    a = int(alphabet_size)
    states = np.arange(a ** (m * k), dtype=np.int64)
    nexts = np.arange(a**m, dtype=np.int64)
    per_node = encoding.group_codes(states, [k] * m, a)
    next_digits = encoding.group_codes(nexts, [1] * m, a)
    parts = [per_node[j][:, None] * a + next_digits[j][None, :] for j in range(m)]
    return encoding.combine_codes(parts, [k + 1] * m, a)


def stationary_distribution(model):
    """Unique stationary law of the lifted chain, extended to (k+1)-blocks.

    Positivity of the joint transition guarantees a unique fixed point and
    geometric convergence of power iteration, which is run to an l1
    tolerance of 1e-13 (cap 1e6 sweeps).
    """
    if "stationary" in model._cache:
        return model._cache["stationary"]
    m, k, a = model.m, model.k, model.alphabet_size
    q = model.transition_matrix()
    nxt = _shifted_state_codes(m, k, a)
    n_states = q.shape[0]
    pi = np.full(n_states, 1.0 / n_states)
    flat_next = nxt.ravel()
    residual = math.inf
    for _ in range(STATIONARY_MAX_ITER):
        pi_new = np.bincount(flat_next, weights=(pi[:, None] * q).ravel(), minlength=n_states)
        residual = float(np.abs(pi_new - pi).sum())
        pi = pi_new
        if residual <= STATIONARY_TOL:
            break
    pi = pi / pi.sum()
    blocks = np.zeros(a ** (m * (k + 1)), dtype=float)
    bcodes = _block_codes_of_transitions(m, k, a)
    blocks[bcodes.ravel()] = (pi[:, None] * q).ravel()
    dist = StationaryBlockDistribution(
        m=m, k=k, alphabet_size=a, block_probs=blocks, state_probs=pi, residual_l1=residual
    )
    model._cache["stationary"] = dist
    return dist


def _entropy(probs):
    p = probs[probs > 0]
    return float(-(p * np.log(p)).sum())


def exact_directed_info(model, i, j):
    """Exact conditional directed information of edge i -> j in nats.

    Computed by full enumeration over the stationary (k+1)-block law:
    I = H(B) + H(C) - H(A) - H(D) with A the full block, B the block
    without the target's newest symbol, C the block without the source
    node, and D both removals at once.
    """
    key = ("di", i, j)
    if key in model._cache:
        return model._cache[key]
    full, no_now, others, others_past = encoding.directed_info_slot_sets(model.m, model.k, i, j)
    dist = stationary_distribution(model)
    a = model.alphabet_size

    def h(keep):
        return _entropy(encoding.marginalize_axes(dist.block_probs, model.m, model.k + 1, keep, a))

    value = h(others) + h(no_now) - h(full) - h(others_past)
    value = max(0.0, value)
    model._cache[key] = value
    return value


def true_adjacency(model, threshold=EDGE_EPS):
    """Ground-truth adjacency: edge i -> j iff exact directed information > threshold."""
    adj = np.zeros((model.m, model.m), dtype=bool)
    for i in range(model.m):
        for j in range(model.m):
            if i != j:
                adj[i, j] = exact_directed_info(model, i, j) > threshold
    return adj


def _random_row_block(seed, node, attempt, rows, alphabet_size, epsilon):
    """Row-stochastic table with entries in [epsilon, 1], drawn from a named stream."""
    stream = Stream(seed, node, attempt)
    u = stream.uniforms(rows * alphabet_size).reshape(rows, alphabet_size)
    w = -np.log1p(-u)
    sums = w.sum(axis=1, keepdims=True)
    flat = sums[:, 0] <= 0
    if np.any(flat):
        w[flat] = 1.0
        sums = w.sum(axis=1, keepdims=True)
    return epsilon + (1.0 - alphabet_size * epsilon) * (w / sums)


def build_random_model(
    m,
    k,
    alphabet_size,
    adjacency,
    epsilon=DEFAULT_EPSILON,
    seed=0,
    delta_floor=DELTA_FLOOR,
    max_retries=100,
):
    """Random model realizing a prescribed adjacency with recoverable edges.

    Each node's table comes from its own (seed, node, attempt) stream, so
    changing one node's parent set leaves the other tables untouched.
    Nodes whose incoming true edges fall below ``delta_floor`` nats of
    exact directed information are redrawn, up to ``max_retries`` rounds.
    """
    if epsilon <= 0 or epsilon * alphabet_size > 1.0:
        raise DomainError(f"epsilon must satisfy 0 < epsilon <= 1/|X|, got {epsilon}")
    # edge recoverability is certified by exact enumeration, so the guard applies
    encoding.check_table_size(alphabet_size, m * (k + 1))
    adjacency = np.asarray(adjacency, dtype=bool)
    if adjacency.shape != (m, m):
        raise DomainError(f"adjacency must be {m}x{m}")
    parents = adjacency.copy()
    np.fill_diagonal(parents, False)
    edges = [(i, j) for i in range(m) for j in range(m) if parents[i, j]]
    attempts = [0] * m

    def draw(j):
        rows = alphabet_size ** (k * (1 + int(parents[:, j].sum())))
        return _random_row_block(seed, j, attempts[j], rows, alphabet_size, epsilon)

    tables = [draw(j) for j in range(m)]
    for _ in range(max_retries + 1):
        model = JointMarkovModel(
            m=m,
            k=k,
            alphabet_size=alphabet_size,
            epsilon=epsilon,
            parents=parents,
            conditionals=tables,
            seed=seed,
        )
        weak = {j for (i, j) in edges if exact_directed_info(model, i, j) < delta_floor}
        if not weak:
            return model
        for j in weak:
            attempts[j] += 1
            tables[j] = draw(j)
    raise ModelConstructionError(
        f"could not reach directed information >= {delta_floor} on all "
        f"{len(edges)} edges within {max_retries} retries"
    )


def uniform_independent_model(m, k, alphabet_size):
    """All nodes i.i.d. uniform: no edges, stationary law uniform over blocks."""
    a = int(alphabet_size)
    tables = [np.full((a**k, a), 1.0 / a) for _ in range(m)]
    return JointMarkovModel(
        m=m,
        k=k,
        alphabet_size=a,
        epsilon=1.0 / a,
        parents=np.zeros((m, m), dtype=bool),
        conditionals=tables,
    )


def copy_channel_model(flip=0.1):
    """Three binary nodes: node 1 copies node 0's previous symbol with flip noise.

    Node 0 and node 2 are i.i.d. uniform, so the only edge is 0 -> 1 and
    its exact directed information is ln 2 - H_b(flip) nats.
    """
    if not 0.0 < flip < 0.5:
        raise DomainError(f"flip probability must be in (0, 0.5), got {flip}")
    uniform = np.full((2, 2), 0.5)
    # context code of node 1's table: (node0 past, node1 past) -> x*2 + y
    copy_table = np.zeros((4, 2))
    for x in range(2):
        for y in range(2):
            copy_table[x * 2 + y, x] = 1.0 - flip
            copy_table[x * 2 + y, 1 - x] = flip
    parents = np.zeros((3, 3), dtype=bool)
    parents[0, 1] = True
    return JointMarkovModel(
        m=3,
        k=1,
        alphabet_size=2,
        epsilon=min(flip, 0.5),
        parents=parents,
        conditionals=[uniform, copy_table, uniform.copy()],
    )


def model_to_dict(model):
    """JSON-ready dict; float values keep their shortest round-trip repr."""
    return {
        "m": model.m,
        "k": model.k,
        "alphabet_size": model.alphabet_size,
        "epsilon": model.epsilon,
        "seed": model.seed,
        "adjacency": model.parents.astype(int).tolist(),
        "conditionals": [t.reshape(-1).tolist() for t in model.conditionals],
    }


def model_from_dict(data):
    m = int(data["m"])
    a = int(data["alphabet_size"])
    parents = np.asarray(data["adjacency"], dtype=bool)
    np.fill_diagonal(parents, False)
    k = int(data["k"])
    tables = []
    for j in range(m):
        cond_size = 1 + int(parents[:, j].sum())
        rows = a ** (k * cond_size)
        tables.append(np.asarray(data["conditionals"][j], dtype=float).reshape(rows, a))
    return JointMarkovModel(
        m=m,
        k=k,
        alphabet_size=a,
        epsilon=float(data["epsilon"]),
        parents=parents,
        conditionals=tables,
        seed=None if data.get("seed") is None else int(data["seed"]),
    )


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
