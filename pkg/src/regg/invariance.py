"""Exact verification that the local resampling maps preserve their models.

The three resampling lemmas are exact distributional statements, so at
enumerable sizes they are checked with exact integer counts over the full
input space: every (state, randomness) pair is applied once and the counts
of resulting states are compared, with no floating point and no sampling.

The simple-graph check at n = 6, d = 3 enumerates 70 * 15^3 * 8^3 outcomes;
to keep that fast, 6-vertex simple graphs are encoded as 15-bit edge masks
and every switch becomes an XOR mask, so the whole outcome space reduces to
vectorized integer XORs and one bincount per source graph.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidParametersError
from .graphs import Matching, MultiGraph, Permutation, enumerate_simple_regular
from .switchings import (mm_switch, switch_pair_table, triple_space, um_resample,
                         um_switchable)

__all__ = [
    "InvarianceReport",
    "all_matchings",
    "mm_exact_invariance",
    "mm_pivot_conditional_tv",
    "um_exact_invariance",
    "pm_exact_uniformity",
    "mc_pivot_tv",
    "um_alpha_match_rate",
]


@dataclass(frozen=True)
class InvarianceReport:
    """Outcome of one exact enumeration check."""

    model: str
    n: int
    d: int
    total_inputs: int
    states: int
    exact_equal: bool
    counts: dict
    detailed_balance: bool | None = None

    def summary(self) -> dict:
        return {
            "model": self.model,
            "n": self.n,
            "d": self.d,
            "method": "exact",
            "total_inputs": self.total_inputs,
            "states": self.states,
            "exact_equal": self.exact_equal,
            "detailed_balance": self.detailed_balance,
        }


def all_matchings(n: int) -> list[Matching]:
    """All perfect matchings on [0, n), enumerated recursively by always
    pairing the smallest unmatched point first."""
    if n % 2:
        raise InvalidParametersError("perfect matchings need n even")
    out: list[Matching] = []
    pairing = np.full(n, -1, dtype=np.int64)

    def rec() -> None:
        free = [i for i in range(n) if pairing[i] < 0]
        if not free:
            out.append(Matching(pairing.copy()))
            return
        i = free[0]
        for j in free[1:]:
            pairing[i], pairing[j] = j, i
            rec()
            pairing[i] = pairing[j] = -1

    rec()
    return out


def mm_exact_invariance(n: int) -> InvarianceReport:
    """Apply the pivot resampling to every (matching, a, b) input and count
    the resulting matchings: starting from the uniform distribution, one
    step must be exactly uniform again."""
    matchings = all_matchings(n)
    counts: dict[tuple, int] = {tuple(m.pairing): 0 for m in matchings}
    total = 0
    for m in matchings:
        for a in range(1, n):
            for b in range(1, n):
                res = mm_switch(m, 0, a, b)
                counts[tuple(res.pairing)] += 1
                total += 1
    values = set(counts.values())
    return InvarianceReport(
        model="matching", n=n, d=1, total_inputs=total, states=len(matchings),
        exact_equal=(len(values) == 1 and total == len(matchings) * (n - 1) ** 2),
        counts={"per_state": sorted(values), "expected": total // len(matchings)},
    )


def mm_pivot_conditional_tv(n: int) -> Fraction:
    """Exact total variation distance between the conditional law of the
    pivot's new partner (for a fixed matching) and the uniform law on the
    other n-1 points.  Decays with n; reported, never asserted against a
    constant."""
    pairing = np.arange(n, dtype=np.int64)
    pairing[0::2] += 1
    pairing[1::2] -= 1
    m = Matching(pairing)
    hits = {v: 0 for v in range(1, n)}
    for a in range(1, n):
        for b in range(1, n):
            res = mm_switch(m, 0, a, b)
            hits[int(res.pairing[0])] += 1
    total = (n - 1) ** 2
    uniform = Fraction(1, n - 1)
    return sum(abs(Fraction(c, total) - uniform) for c in hits.values()) / 2


# ---------------------------------------------------------------------------
# Simple-graph model, exhaustive at n = 6, d = 3

def _edge_index(n: int) -> dict[tuple[int, int], int]:
    return {e: k for k, e in enumerate(itertools.combinations(range(n), 2))}


def _graph_bits(g: MultiGraph, eidx: dict) -> int:
    bits = 0
    for i, j, _ in g.edges():
        bits |= 1 << eidx[(i, j)]
    return bits


def um_exact_invariance(n: int = 6, d: int = 3) -> InvarianceReport:
    """Exhaustive invariance and detailed-balance check for the simultaneous
    switching at an enumerable size.

    For every labeled simple d-regular graph and every admissible choice of
    triples and switch indices, the resulting graph is counted once.  The
    aggregated counts must be identical across all graphs, and the
    transition count from E1 to E2 must equal the one from E2 to E1.
    """
    if d != 3 or n > 6:
        raise InvalidParametersError(
            "exhaustive check implemented for d == 3 and n <= 6")
    graphs = enumerate_simple_regular(n, d)
    if not graphs:
        raise InvalidParametersError(f"no simple {d}-regular graphs on {n} vertices")
    eidx = _edge_index(n)
    nbits = len(eidx)
    codes = np.array([_graph_bits(g, eidx) for g in graphs], dtype=np.int64)

    per_source = np.zeros((len(graphs), 1 << nbits), dtype=np.int64)
    total_per_source = None
    for gi, g in enumerate(graphs):
        space = triple_space(g)
        if len(space) != d:
            raise InvalidParametersError("pivot degree mismatch")
        switch_ok, vmasks, xors = [], [], []
        for triples in space:
            ok = np.array([um_switchable(g, t) for t in triples], dtype=bool)
            vm = np.array(
                [sum(1 << v for e in t for v in e) for t in triples],
                dtype=np.int64)
            xo = np.zeros((len(triples), 8), dtype=np.int64)
            for ti, t in enumerate(triples):
                if not ok[ti]:
                    # never applied; mask stays zero
                    continue
                removed = sum(1 << eidx[e] for e in t)
                (z, r) = t[0]
                assert z == 0
                for si, ((a, abar), (b, bbar)) in enumerate(switch_pair_table(t)):
                    added = (1 << eidx[(0, a)]
                             | 1 << eidx[(min(abar, b), max(abar, b))]
                             | 1 << eidx[(min(bbar, r), max(bbar, r))])
                    xo[ti, si] = removed ^ added
            switch_ok.append(ok)
            vmasks.append(vm)
            xors.append(xo)
        c01 = (vmasks[0][:, None] & vmasks[1][None, :]) == 1
        c02 = (vmasks[0][:, None] & vmasks[2][None, :]) == 1
        c12 = (vmasks[1][:, None] & vmasks[2][None, :]) == 1
        act0 = switch_ok[0][:, None, None] & c01[:, :, None] & c02[:, None, :]
        act1 = switch_ok[1][None, :, None] & c01[:, :, None] & c12[None, :, :]
        act2 = switch_ok[2][None, None, :] & c02[:, None, :] & c12[None, :, :]
        y0 = np.where(act0[..., None], xors[0][:, None, None, :], 0)
        y1 = np.where(act1[..., None], xors[1][None, :, None, :], 0)
        y2 = np.where(act2[..., None], xors[2][None, None, :, :], 0)
        res = (codes[gi]
               ^ y0[:, :, :, :, None, None]
               ^ y1[:, :, :, None, :, None]
               ^ y2[:, :, :, None, None, :])
        per_source[gi] = np.bincount(res.ravel(), minlength=1 << nbits)
        if total_per_source is None:
            total_per_source = res.size
        assert per_source[gi].sum() == total_per_source

    aggregated = per_source.sum(axis=0)
    on_states = aggregated[codes]
    off_states = aggregated.sum() - on_states.sum()
    exact_equal = bool(off_states == 0 and np.all(on_states == on_states[0]))

    transition = per_source[:, codes]
    balanced = bool(np.array_equal(transition, transition.T))

    return InvarianceReport(
        model="uniform", n=n, d=d,
        total_inputs=int(total_per_source) * len(graphs),
        states=len(graphs), exact_equal=exact_equal,
        counts={
            "per_state": [int(on_states.min()), int(on_states.max())],
            "expected": int(total_per_source),
            "off_state_mass": int(off_states),
        },
        detailed_balance=balanced,
    )


# ---------------------------------------------------------------------------
# Permutation model

def _embedded_pivot_permutations(n: int) -> list[Permutation]:
    """All permutations with the pivot 2-cycle fixed: pi(0)=1, pi(1)=0."""
    rest = list(range(2, n))
    out = []
    for tail in itertools.permutations(rest):
        mapping = np.array([1, 0, *tail], dtype=np.int64)
        out.append(Permutation(mapping))
    return out


def pm_exact_uniformity(n: int = 4) -> InvarianceReport:
    """Enumerate every (pi, a+, a-, b+, b-) input of the permutation move and
    count the resulting permutations: the output law must be exactly uniform
    on all n! permutations."""
    from .switchings import pm_switch

    inputs = _embedded_pivot_permutations(n)
    counts: dict[tuple, int] = {}
    total = 0
    for pi in inputs:
        for a_plus in range(n):
            for a_minus in range(1, n):
                for b_plus in range(1, n):
                    for b_minus in range(1, n):
                        res = pm_switch(pi, a_plus, a_minus, b_plus, b_minus)
                        key = tuple(res.mapping)
                        counts[key] = counts.get(key, 0) + 1
                        total += 1
    import math
    values = set(counts.values())
    exact = (len(counts) == math.factorial(n) and len(values) == 1)
    return InvarianceReport(
        model="permutation", n=n, d=2, total_inputs=total,
        states=len(counts), exact_equal=exact,
        counts={"per_state": sorted(values),
                "expected": total // math.factorial(n)},
    )


# ---------------------------------------------------------------------------
# Monte-Carlo reports (no exactness available)

def mc_pivot_tv(model: str, n: int, d: int, seed: int, samples: int) -> float:
    """Empirical TV distance between the law of the pivot's first neighbour
    after one resampling step and the uniform law on the other vertices."""
    from .graphs import random_matching, sample_uniform
    from .rng import stream
    from .switchings import mm_resample

    hits = np.zeros(n, dtype=np.int64)
    for t in range(samples):
        rng = stream(seed, t)
        if model == "matching":
            m = random_matching(n, rng)
            res, _, _ = mm_resample(m, rng)
            hits[int(res.pairing[0])] += 1
        elif model == "uniform":
            g = sample_uniform(n, d, rng)
            out = um_resample(g, rng)
            hits[out.alpha[0]] += 1
        else:
            raise InvalidParametersError(
                f"no Monte-Carlo pivot report for model {model!r}")
    probs = hits[1:] / samples
    return float(np.abs(probs - 1.0 / (n - 1)).sum() / 2)


def um_alpha_match_rate(n: int, d: int, seed: int, trials: int) -> float:
    """Fraction of (trial, mu) pairs where the realized neighbour equals the
    targeted one, i.e. the triple actually switched."""
    from .graphs import sample_uniform
    from .rng import stream

    hit = 0
    tot = 0
    for t in range(trials):
        rng = stream(seed, t)
        g = sample_uniform(n, d, rng, method="switching-chain")
        out = um_resample(g, rng)
        hit += sum(1 for a, al in zip(out.a, out.alpha) if a == al)
        tot += len(out.a)
    return hit / tot
