"""Random d-regular graph models.

Samplers for the matching, permutation, configuration and uniform models,
plus an exact enumerator of small simple regular graphs used as an oracle
by the invariance tests.  Graphs are stored as dense symmetric integer
adjacency matrices; a loop contributes two to its diagonal entry.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import BudgetExceededError, InvalidParametersError

__all__ = [
    "ModelKind",
    "MultiGraph",
    "Matching",
    "Permutation",
    "random_matching",
    "random_permutation",
    "matching_matrix",
    "permutation_pair_matrix",
    "sample_matching_model",
    "sample_permutation_model",
    "sample_configuration_model",
    "sample_uniform",
    "enumerate_simple_regular",
    "to_edgelist",
    "from_edgelist",
]


class ModelKind(str, Enum):
    UNIFORM = "uniform"
    PERMUTATION = "permutation"
    MATCHING = "matching"
    CONFIGURATION = "configuration"

    def check_parity(self, n: int, d: int) -> None:
        """Raise if (n, d) violates the model's parity constraint."""
        if n <= 0 or d < 0:
            raise InvalidParametersError(f"need n > 0 and d >= 0, got n={n} d={d}")
        if self is ModelKind.UNIFORM and (n * d) % 2:
            raise InvalidParametersError("uniform model needs n*d even")
        if self is ModelKind.PERMUTATION and d % 2:
            raise InvalidParametersError("permutation model needs d even")
        if self is ModelKind.MATCHING and n % 2:
            raise InvalidParametersError("matching model needs n even")
        if self is ModelKind.CONFIGURATION and (n * d) % 2:
            raise InvalidParametersError("configuration model needs n*d even")


@dataclass(frozen=True)
class MultiGraph:
    """A d-regular multigraph on n vertices.

    Attributes
    ----------
    n : vertex count
    deg : the common degree d (stored, never silently recomputed)
    adj : (n, n) symmetric nonnegative integer matrix; adj[i][i] is even,
        twice the loop count at i; every row sums to deg
    """

    n: int
    deg: int
    adj: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        a = np.asarray(self.adj, dtype=np.int64)
        if a.shape != (self.n, self.n):
            raise InvalidParametersError(f"adjacency shape {a.shape} != ({self.n}, {self.n})")
        if (a < 0).any():
            raise InvalidParametersError("adjacency entries must be nonnegative")
        if not np.array_equal(a, a.T):
            raise InvalidParametersError("adjacency must be symmetric")
        if (np.diag(a) % 2).any():
            raise InvalidParametersError("diagonal entries must be even (loops count two)")
        rows = a.sum(axis=1)
        if not np.all(rows == self.deg):
            raise InvalidParametersError(
                f"not {self.deg}-regular: row sums range "
                f"[{rows.min()}, {rows.max()}]"
            )
        a.flags.writeable = False
        object.__setattr__(self, "adj", a)

    @property
    def simple(self) -> bool:
        """True when there are no loops and no multi-edges."""
        return bool(np.diag(self.adj).max(initial=0) == 0 and self.adj.max(initial=0) <= 1)

    def edges(self) -> list[tuple[int, int, int]]:
        """Distinct edges as (i, j, multiplicity) with i <= j; a loop's
        multiplicity is its loop count (diagonal / 2)."""
        out = []
        for i in range(self.n):
            if self.adj[i, i]:
                out.append((i, i, int(self.adj[i, i]) // 2))
            for j in range(i + 1, self.n):
                if self.adj[i, j]:
                    out.append((i, j, int(self.adj[i, j])))
        return out

    def edge_key(self) -> tuple:
        """Hashable identity of the labeled multigraph."""
        return (self.n, self.deg, self.adj.tobytes())


@dataclass(frozen=True)
class Matching:
    """A perfect matching on [0, n), stored as a fixed-point-free
    involution: pairing[pairing[i]] == i and pairing[i] != i."""

    pairing: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        p = np.asarray(self.pairing, dtype=np.int64)
        n = p.shape[0]
        if n % 2:
            raise InvalidParametersError("matching needs an even vertex count")
        if not np.array_equal(p[p], np.arange(n)) or (p == np.arange(n)).any():
            raise InvalidParametersError("pairing must be a fixed-point-free involution")
        p.flags.writeable = False
        object.__setattr__(self, "pairing", p)

    @property
    def n(self) -> int:
        return int(self.pairing.shape[0])

    def pairs(self) -> tuple[tuple[int, int], ...]:
        """Edges as sorted pairs, sorted lexicographically."""
        return tuple(
            (i, int(self.pairing[i])) for i in range(self.n) if i < self.pairing[i]
        )


@dataclass(frozen=True)
class Permutation:
    """A bijection on [0, n)."""

    mapping: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        p = np.asarray(self.mapping, dtype=np.int64)
        n = p.shape[0]
        if not np.array_equal(np.sort(p), np.arange(n)):
            raise InvalidParametersError("mapping must be a bijection on [0, n)")
        p.flags.writeable = False
        object.__setattr__(self, "mapping", p)

    @property
    def n(self) -> int:
        return int(self.mapping.shape[0])

    def inverse(self) -> "Permutation":
        inv = np.empty_like(self.mapping)
        inv[self.mapping] = np.arange(self.n)
        return Permutation(inv)


def random_matching(n: int, rng: np.random.Generator) -> Matching:
    """Uniform perfect matching on [0, n)."""
    if n % 2:
        raise InvalidParametersError("perfect matching needs n even")
    order = rng.permutation(n)
    pairing = np.empty(n, dtype=np.int64)
    pairing[order[0::2]] = order[1::2]
    pairing[order[1::2]] = order[0::2]
    return Matching(pairing)


def random_permutation(n: int, rng: np.random.Generator) -> Permutation:
    return Permutation(rng.permutation(n))


def matching_matrix(m: Matching) -> np.ndarray:
    """Adjacency matrix of a perfect matching (a symmetric 0/1 permutation
    matrix with zero diagonal)."""
    a = np.zeros((m.n, m.n), dtype=np.int64)
    a[np.arange(m.n), m.pairing] = 1
    return a


def permutation_pair_matrix(sigma: Permutation) -> np.ndarray:
    """Adjacency contribution of one permutation: entry (i, j) counts
    j == sigma(i) plus i == sigma(j), so every vertex gains degree 2 and a
    fixed point becomes a loop (diagonal 2)."""
    n = sigma.n
    a = np.zeros((n, n), dtype=np.int64)
    idx = np.arange(n)
    np.add.at(a, (idx, sigma.mapping), 1)
    np.add.at(a, (sigma.mapping, idx), 1)
    return a


def sample_matching_model(n: int, d: int, rng: np.random.Generator) -> MultiGraph:
    """Sum of d independent uniform perfect matchings.  No loops; multi-edges
    allowed."""
    ModelKind.MATCHING.check_parity(n, d)
    if d < 1:
        raise InvalidParametersError("matching model needs d >= 1")
    a = np.zeros((n, n), dtype=np.int64)
    for _ in range(d):
        a += matching_matrix(random_matching(n, rng))
    return MultiGraph(n, d, a)


def sample_permutation_model(n: int, d: int, rng: np.random.Generator) -> MultiGraph:
    """Sum of d/2 independent uniform permutations, each contributing an
    in-edge and an out-edge per vertex.  Loops and multi-edges allowed."""
    ModelKind.PERMUTATION.check_parity(n, d)
    a = np.zeros((n, n), dtype=np.int64)
    for _ in range(d // 2):
        a += permutation_pair_matrix(random_permutation(n, rng))
    return MultiGraph(n, d, a)


def sample_configuration_model(n: int, d: int, rng: np.random.Generator) -> MultiGraph:
    """Uniform pairing of the n*d half-edges, projected to a multigraph."""
    ModelKind.CONFIGURATION.check_parity(n, d)
    stubs = np.repeat(np.arange(n), d)
    rng.shuffle(stubs)
    u, v = stubs[0::2], stubs[1::2]
    a = np.zeros((n, n), dtype=np.int64)
    np.add.at(a, (u, v), 1)
    np.add.at(a, (v, u), 1)
    return MultiGraph(n, d, a)


def _circulant_simple(n: int, d: int) -> np.ndarray:
    """Deterministic simple d-regular start for the switching chain:
    offsets +-1..+-(d//2), plus the antipode when d is odd."""
    if d >= n:
        raise InvalidParametersError("simple graph needs d < n")
    a = np.zeros((n, n), dtype=np.int64)
    half = d // 2
    if d % 2 and n % 2:
        raise InvalidParametersError("odd d needs n even")
    if half >= (n + 1) // 2:
        # offsets would collide with themselves; fall back to near-complete
        if d == n - 1:
            return np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64)
        raise InvalidParametersError(f"no circulant start for n={n}, d={d}")
    for k in range(1, half + 1):
        for i in range(n):
            j = (i + k) % n
            a[i, j] += 1
            a[j, i] += 1
    if d % 2:
        for i in range(n // 2):
            j = i + n // 2
            a[i, j] += 1
            a[j, i] += 1
    return a


def _chain_burn_in(a: np.ndarray, n: int, d: int, rng: np.random.Generator,
                   moves: int) -> np.ndarray:
    """Random double-switching walk on simple d-regular graphs.  Moves that
    would create a loop or multi-edge are rejected, which keeps the chain
    inside the simple graphs."""
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if a[i, j]]
    m = len(edges)
    for _ in range(moves):
        e1, e2, e3 = rng.choice(m, size=3, replace=False)
        r, rb = edges[e1]
        if rng.integers(2):
            r, rb = rb, r
        aa, ab = edges[e2]
        if rng.integers(2):
            aa, ab = ab, aa
        b, bb = edges[e3]
        if rng.integers(2):
            b, bb = bb, b
        verts = {r, rb, aa, ab, b, bb}
        if len(verts) < 6:
            continue
        # new edges: {rb, aa}, {ab, b}, {bb, r}; require all currently absent
        if a[rb, aa] or a[ab, b] or a[bb, r]:
            continue
        for (x, y) in ((r, rb), (aa, ab), (b, bb)):
            a[x, y] -= 1
            a[y, x] -= 1
        for (x, y) in ((rb, aa), (ab, b), (bb, r)):
            a[x, y] += 1
            a[y, x] += 1
        edges[e1] = (min(rb, aa), max(rb, aa))
        edges[e2] = (min(ab, b), max(ab, b))
        edges[e3] = (min(bb, r), max(bb, r))
    return a


def sample_uniform(n: int, d: int, rng: np.random.Generator,
                   method: str = "auto", max_tries: int = 100000) -> MultiGraph:
    """Sample a simple d-regular graph.

    method="rejection" resamples the configuration model until the result
    is simple (exactly uniform).  method="switching-chain" runs 10*n*d
    double-switching moves from a deterministic circulant start and is only
    approximately uniform.  method="auto" picks rejection for d <= 2 ln n.
    """
    ModelKind.UNIFORM.check_parity(n, d)
    if d >= n:
        raise InvalidParametersError("simple graph needs d < n")
    if method == "auto":
        method = "rejection" if d <= 2 * math.log(n) else "switching-chain"
    if method == "rejection":
        for _ in range(max_tries):
            g = sample_configuration_model(n, d, rng)
            if g.simple:
                return g
        raise BudgetExceededError(
            f"rejection sampler: no simple graph in {max_tries} tries "
            f"(n={n}, d={d}); try method='switching-chain'"
        )
    if method == "switching-chain":
        a = _circulant_simple(n, d)
        a = _chain_burn_in(a, n, d, rng, moves=10 * n * d)
        return MultiGraph(n, d, a)
    raise InvalidParametersError(f"unknown method {method!r}")


def enumerate_simple_regular(n: int, d: int) -> list[MultiGraph]:
    """All labeled simple d-regular graphs on n vertices, each exactly once.

    Canonical lexicographic backtracking over edge sets: the smallest vertex
    with missing degree is completed first, choosing its remaining partners
    among strictly larger vertices, so every edge set is produced in exactly
    one order.  Independent of the sampler code paths.
    """
    if n > 10:
        raise BudgetExceededError(f"enumeration limited to n <= 10, got {n}")
    if n <= 0 or d < 0:
        raise InvalidParametersError(f"need n > 0, d >= 0, got n={n} d={d}")
    if (n * d) % 2 or d >= n:
        return []
    results: list[MultiGraph] = []
    rem = [d] * n
    adj = np.zeros((n, n), dtype=np.int64)

    def rec() -> None:
        u = next((v for v in range(n) if rem[v] > 0), None)
        if u is None:
            results.append(MultiGraph(n, d, adj.copy()))
            return
        need = rem[u]
        cands = [v for v in range(u + 1, n) if rem[v] > 0]
        if len(cands) < need:
            return
        for combo in itertools.combinations(cands, need):
            rem[u] = 0
            for v in combo:
                rem[v] -= 1
                adj[u, v] = adj[v, u] = 1
            rec()
            rem[u] = need
            for v in combo:
                rem[v] += 1
                adj[u, v] = adj[v, u] = 0

    rec()
    return results


# ---------------------------------------------------------------------------
# Edge-list serialization: header "n d model seed", one line "i j mult" per
# distinct edge; loops appear once with multiplicity diagonal/2.

def to_edgelist(g: MultiGraph, model: str | ModelKind, seed: int) -> str:
    lines = [f"{g.n} {g.deg} {ModelKind(model).value} {seed}"]
    lines.extend(f"{i} {j} {m}" for i, j, m in g.edges())
    return "\n".join(lines) + "\n"


def from_edgelist(text: str) -> tuple[MultiGraph, dict]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InvalidParametersError("empty edge-list text")
    head = lines[0].split()
    if len(head) != 4:
        raise InvalidParametersError(f"bad header {lines[0]!r}")
    n, d = int(head[0]), int(head[1])
    header = {"n": n, "d": d, "model": head[2], "seed": int(head[3])}
    a = np.zeros((n, n), dtype=np.int64)
    for ln in lines[1:]:
        i, j, m = (int(x) for x in ln.split())
        if i == j:
            a[i, i] += 2 * m
        else:
            a[i, j] += m
            a[j, i] += m
    return MultiGraph(n, d, a), header


def sample_model(model: str | ModelKind, n: int, d: int,
                 rng: np.random.Generator, **kwargs) -> MultiGraph:
    """Dispatch on ModelKind."""
    kind = ModelKind(model)
    if kind is ModelKind.MATCHING:
        return sample_matching_model(n, d, rng)
    if kind is ModelKind.PERMUTATION:
        return sample_permutation_model(n, d, rng)
    if kind is ModelKind.CONFIGURATION:
        return sample_configuration_model(n, d, rng)
    return sample_uniform(n, d, rng, **kwargs)


__all__.append("sample_model")
