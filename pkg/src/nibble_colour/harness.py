"""Instance generators, brute-force oracle, and statistical diagnostics.

The brute-force colourer and the exact expectation enumerator are written
against the definitions module only (no shared logic with the nibble or
finisher solvers) so they can serve as independent checks on those
solvers' outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import rng
from .core import (
    EdgeCorrespondence,
    LinearHypergraph,
    PreconditionError,
    WeightedListAssignment,
    colour_neighbours,
)
from .nibble import NibbleParams, RoundStructure, apply_procedure, equalizing_probability


class GenerationError(ValueError):
    """Inadmissible generator parameters."""


@dataclass(frozen=True)
class GeneratorSpec:
    """What to generate.

    kind: 'regular-graph' (n, d), 'bipartite' (n, n2, p),
    'random-graph' (n, p), or 'linear-k-uniform' (n, k, m).
    """

    kind: str
    n: int
    seed: int = 0
    d: int | None = None
    p: float | None = None
    m: int | None = None
    n2: int | None = None
    k: int = 2


def generate(spec: GeneratorSpec) -> LinearHypergraph:
    """Deterministic per seed; every output passes validate_instance."""
    if spec.kind == "regular-graph":
        return _regular_graph(spec)
    if spec.kind == "bipartite":
        return _bipartite_graph(spec)
    if spec.kind == "random-graph":
        return _random_graph(spec)
    if spec.kind == "linear-k-uniform":
        return _linear_uniform(spec)
    raise GenerationError(f"unknown generator kind {spec.kind!r}")


def _regular_graph(spec: GeneratorSpec) -> LinearHypergraph:
    import networkx as nx

    n, d = spec.n, spec.d
    if d is None:
        raise GenerationError("regular-graph requires a degree d")
    if n * d % 2 != 0:
        raise GenerationError(f"n*d must be even for a d-regular graph (n={n}, d={d})")
    if not (0 <= d < n):
        raise GenerationError(f"need 0 <= d < n (n={n}, d={d})")
    g = nx.random_regular_graph(d, n, seed=rng.derive_seed(spec.seed, rng.KIND_GENERATE, n, d))
    edges = sorted(tuple(sorted(e)) for e in g.edges())
    return LinearHypergraph.build(n, edges, k=2)


def _bipartite_graph(spec: GeneratorSpec) -> LinearHypergraph:
    n1, n2, p = spec.n, spec.n2, spec.p
    if n2 is None or p is None:
        raise GenerationError("bipartite requires n2 and an edge probability p")
    edges = []
    for u in range(n1):
        for j in range(n2):
            v = n1 + j
            if rng.uniform(spec.seed, rng.KIND_GENERATE, u, v) < p:
                edges.append((u, v))
    return LinearHypergraph.build(n1 + n2, edges, k=2)


def _random_graph(spec: GeneratorSpec) -> LinearHypergraph:
    n, p = spec.n, spec.p
    if p is None:
        raise GenerationError("random-graph requires an edge probability p")
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.uniform(spec.seed, rng.KIND_GENERATE, u, v) < p:
                edges.append((u, v))
    return LinearHypergraph.build(n, edges, k=2)


def _linear_uniform(spec: GeneratorSpec) -> LinearHypergraph:
    n, k, m = spec.n, spec.k, spec.m
    if m is None or k < 2:
        raise GenerationError("linear-k-uniform requires k >= 2 and a target edge count m")
    if m * k * (k - 1) // 2 > n * (n - 1) // 2:
        raise GenerationError(f"{m} edges of size {k} cannot be pairwise near-disjoint on {n} vertices")
    used_pairs: set[tuple[int, int]] = set()
    edges: list[tuple[int, ...]] = []
    attempts, max_attempts = 0, 500 * m + 100
    while len(edges) < m and attempts < max_attempts:
        proposal = tuple(int(v) for v in rng.subset(spec.seed, rng.KIND_GENERATE, n, k, attempts))
        attempts += 1
        pairs = [(proposal[i], proposal[j]) for i in range(k) for j in range(i + 1, k)]
        if any(pair in used_pairs for pair in pairs):
            continue  # would share >= 2 vertices with an accepted edge
        used_pairs.update(pairs)
        edges.append(proposal)
    if len(edges) < m:
        raise GenerationError(f"could only place {len(edges)} of {m} edges after {attempts} attempts")
    return LinearHypergraph.build(n, edges, k=k)


def build_local_lists(
    graph: LinearHypergraph,
    eps: float,
    universe_size: int,
    mode: str = "unit-weight",
    seed: int = 0,
) -> WeightedListAssignment:
    """Random local lists: L(e) is a uniform ceil((1+eps) maxdeg(e))-subset
    of {0..universe_size-1}, where maxdeg(e) is the largest degree among
    e's vertices.  Degree-weighted mode sets mu(e,c) = 1/maxdeg(e), which
    makes every weighted list size at least 1+eps and keeps the per-vertex
    per-colour weight sums at most 1."""
    if mode not in ("unit-weight", "degree-weighted"):
        raise GenerationError(f"unknown list mode {mode!r}")
    lists: dict[int, list[int]] = {}
    weights: dict[tuple[int, int], float] = {}
    for e, edge in enumerate(graph.edges):
        maxdeg = max(graph.degree(v) for v in edge)
        size = math.ceil((1.0 + eps) * maxdeg)
        if size > universe_size:
            raise GenerationError(
                f"edge {e} needs a list of {size} colours but the universe has {universe_size}"
            )
        colours = [int(c) for c in rng.subset(seed, rng.KIND_LISTS, universe_size, size, e)]
        lists[e] = colours
        mu = 1.0 if mode == "unit-weight" else 1.0 / maxdeg
        for c in colours:
            weights[(e, c)] = mu
    return WeightedListAssignment.build(lists, weights)


# ---------------------------------------------------------------------------
# Brute-force oracle.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BruteResult:
    status: str  # 'found' | 'proven-unsatisfiable' | 'cap-exceeded'
    colouring: dict[int, int] | None
    nodes: int


def brute_force_colour(
    graph: LinearHypergraph,
    lists: WeightedListAssignment,
    sigma: EdgeCorrespondence,
    node_cap: int = 1_000_000,
) -> BruteResult:
    """Exhaustive backtracking over edges, most-constrained-first.

    Sound and complete within node_cap search nodes; cap exhaustion is a
    value, not an error.  Uses only the definitions module, so it is an
    independent oracle for the randomized pipeline.
    """
    edge_ids = list(lists.edge_ids())
    colours: dict[int, int] = {}
    nodes = 0

    def candidates(e: int) -> list[int]:
        out = []
        for c in lists.colours(e):
            ok = True
            for f in graph.adjacent_edges(e):
                cf = colours.get(f)
                if cf is not None and sigma.blocks(f, cf, e, c):
                    ok = False
                    break
            if ok:
                out.append(c)
        return out

    class _Cap(Exception):
        pass

    def search() -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_cap:
            raise _Cap
        remaining = [e for e in edge_ids if e not in colours]
        if not remaining:
            return True
        cand = {e: candidates(e) for e in remaining}
        e = min(remaining, key=lambda e: (len(cand[e]), e))
        for c in cand[e]:
            colours[e] = c
            if search():
                return True
            del colours[e]
        return False

    try:
        found = search()
    except _Cap:
        return BruteResult(status="cap-exceeded", colouring=None, nodes=nodes)
    if found:
        return BruteResult(status="found", colouring=dict(colours), nodes=nodes)
    return BruteResult(status="proven-unsatisfiable", colouring=None, nodes=nodes)


# ---------------------------------------------------------------------------
# Expectation diagnostics.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeDiagnostic:
    edge: int
    theoretical: float  # |L(e)|_mu * K^k
    empirical_mean: float
    empirical_var: float
    std_err: float
    z: float
    exact: float | None = None


@dataclass
class DiagnosticsReport:
    trials: int
    eps: float
    k: int
    L: float
    N: float
    K: float
    edges: list[EdgeDiagnostic] = field(default_factory=list)
    exact_available: bool = False
    samples: dict[int, np.ndarray] | None = None  # per-edge raw trial weights

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "params": {"eps": self.eps, "k": self.k, "L": self.L, "N": self.N, "K": self.K},
            "exact_available": self.exact_available,
            "edges": [
                {
                    "edge": d.edge,
                    "theoretical": d.theoretical,
                    "empirical_mean": d.empirical_mean,
                    "empirical_var": d.empirical_var,
                    "std_err": d.std_err,
                    "z": d.z,
                    "exact": d.exact,
                }
                for d in self.edges
            ],
        }


def bernoulli_trial_count(lists: WeightedListAssignment, k: int) -> int:
    """Activations (one per pair) plus flips (k per pair)."""
    return (1 + k) * sum(len(lists.colours(e)) for e in lists.edge_ids())


def exact_expectations(
    graph: LinearHypergraph,
    lists: WeightedListAssignment,
    sigma: EdgeCorrespondence,
    params: NibbleParams,
    trial_limit: int = 20,
) -> dict[int, float]:
    """Exact E[|L'(e)|_mu] by exhaustive enumeration of every activation
    and coin-flip outcome of steps (I)-(III), weighted by probability.

    Implemented from the definitions module (colour neighbourhoods) rather
    than the round engine, so it is an independent check of the engine's
    survival rule.  Requires at most `trial_limit` Bernoulli trials.
    """
    pairs = [(e, c) for e in lists.edge_ids() for c in lists.colours(e)]
    k = graph.k
    T = (1 + k) * len(pairs)
    if T > trial_limit:
        raise PreconditionError(f"{T} Bernoulli trials exceed the enumeration limit {trial_limit}")
    if T == 0:
        return {e: 0.0 for e in lists.edge_ids()}

    act_index = {pc: t for t, pc in enumerate(pairs)}
    flip_probs: list[float] = []
    flip_index: dict[tuple[int, int, int], int] = {}
    t = len(pairs)
    for e, c in pairs:
        for v in graph.edges[e]:
            flip_index[(e, c, v)] = t
            flip_probs.append(equalizing_probability(graph, lists, sigma, params, e, v, c))
            t += 1

    scale = params.activation_scale
    trial_probs = [lists.weight(e, c) / scale for e, c in pairs] + flip_probs

    idx = np.arange(1 << T, dtype=np.int64)
    prob = np.ones(1 << T, dtype=np.float64)
    bits = []
    for t, p_t in enumerate(trial_probs):
        bit = ((idx >> t) & 1).astype(bool)
        bits.append(bit)
        prob *= np.where(bit, p_t, 1.0 - p_t)

    expectations = {e: 0.0 for e in lists.edge_ids()}
    for e, c in pairs:
        survive = np.ones(1 << T, dtype=bool)
        for v in graph.edges[e]:
            for f, c_other in colour_neighbours(graph, lists, sigma, e, v, c):
                survive &= ~bits[act_index[(f, c_other)]]
            survive &= bits[flip_index[(e, c, v)]]
        expectations[e] += lists.weight(e, c) * float(prob[survive].sum())
    return expectations


def expectation_diagnostic(
    graph: LinearHypergraph,
    lists: WeightedListAssignment,
    sigma: EdgeCorrespondence,
    params: NibbleParams,
    trials: int,
    seed: int = 0,
    exact_limit: int = 20,
    collect_samples: bool = False,
) -> DiagnosticsReport:
    """Monte-Carlo estimate of the surviving weighted list size per edge
    over independent runs of steps (I)-(III) without truncation, compared
    to the closed form |L(e)|_mu * K^k; when the instance has at most
    `exact_limit` Bernoulli trials, the exact expectation by exhaustive
    enumeration is included as well.  `collect_samples` keeps the raw
    per-trial weights on the report."""
    if trials < 1:
        raise PreconditionError(f"trials must be >= 1, got {trials}")
    struct = RoundStructure.build(graph, lists, sigma)
    P, k = struct.pair_count, struct.k
    t_keys = np.arange(trials, dtype=np.int64)

    u_act = rng.uniforms(
        seed, rng.KIND_ACTIVATION, t_keys[:, None], 0, struct.edge_of[None, :], struct.colour_of[None, :]
    )
    activated = u_act < struct.mu / params.activation_scale

    eq, _ = struct.equalizing(params)
    u_flip = rng.uniforms(
        seed,
        rng.KIND_FLIP,
        t_keys[:, None, None],
        0,
        struct.edge_of[None, :, None],
        struct.colour_of[None, :, None],
        struct.vertex_of[None, :, :],
    )
    flips_ok = u_flip < eq[None, :, :]

    survive, _, _ = apply_procedure(struct, activated, flips_ok)

    exact = None
    if bernoulli_trial_count(lists, k) <= exact_limit:
        exact = exact_expectations(graph, lists, sigma, params, trial_limit=exact_limit)

    report = DiagnosticsReport(trials=trials, eps=params.eps, k=k, L=params.L, N=params.N, K=params.K)
    report.exact_available = exact is not None
    if collect_samples:
        report.samples = {}
    Kk = params.K**k
    for e in struct.edges:
        a, b = struct.edge_slices.get(e, (0, 0))
        samples = survive[:, a:b].astype(np.float64) @ struct.mu[a:b] if b > a else np.zeros(trials)
        if collect_samples:
            report.samples[e] = samples
        mean = float(samples.mean())
        var = float(samples.var(ddof=1)) if trials > 1 else 0.0
        se = math.sqrt(var / trials) if trials > 0 else 0.0
        theo = float(struct.mu[a:b].sum()) * Kk
        if se > 0:
            z = (mean - theo) / se
        else:
            z = 0.0 if abs(mean - theo) < 1e-12 else math.inf
        report.edges.append(
            EdgeDiagnostic(
                edge=e,
                theoretical=theo,
                empirical_mean=mean,
                empirical_var=var,
                std_err=se,
                z=z,
                exact=None if exact is None else exact[e],
            )
        )
    return report


# ---------------------------------------------------------------------------
# Audits and matchings.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AuditReport:
    max_neighbourhood: float
    max_neighbourhood_witness: tuple[int, int, int] | None  # (edge, vertex, colour)
    min_list_weight: float
    min_list_edge: int | None
    max_colour_sum: float
    max_colour_sum_witness: tuple[int, int] | None  # (vertex, colour)
    colour_sums: dict[tuple[int, int], float]

    def to_dict(self) -> dict:
        return {
            "max_neighbourhood": self.max_neighbourhood,
            "max_neighbourhood_witness": list(self.max_neighbourhood_witness)
            if self.max_neighbourhood_witness
            else None,
            "min_list_weight": self.min_list_weight,
            "min_list_edge": self.min_list_edge,
            "max_colour_sum": self.max_colour_sum,
            "max_colour_sum_witness": list(self.max_colour_sum_witness)
            if self.max_colour_sum_witness
            else None,
        }


def neighbourhood_audit(
    graph: LinearHypergraph,
    lists: WeightedListAssignment,
    sigma: EdgeCorrespondence,
) -> AuditReport:
    """Exact extrema of the quantities the colouring theorems condition on:
    the largest weighted colour neighbourhood (with its witness), the
    smallest weighted list, and the per-vertex per-colour weight sums."""
    max_n, max_w = 0.0, None
    for e in lists.edge_ids():
        for v in graph.edges[e]:
            for c in lists.colours(e):
                w = sum(lists.weight(f, c2) for f, c2 in colour_neighbours(graph, lists, sigma, e, v, c))
                if w > max_n:
                    max_n, max_w = w, (e, v, c)
    min_l, min_e = math.inf, None
    for e in lists.edge_ids():
        w = lists.list_weight(e)
        if w < min_l:
            min_l, min_e = w, e
    sums: dict[tuple[int, int], float] = {}
    for e in lists.edge_ids():
        for v in graph.edges[e]:
            for c in lists.colours(e):
                key = (v, c)
                sums[key] = sums.get(key, 0.0) + lists.weight(e, c)
    if sums:
        max_key = max(sorted(sums), key=lambda kv: sums[kv])
        max_sum = sums[max_key]
    else:
        max_key, max_sum = None, 0.0
    return AuditReport(
        max_neighbourhood=max_n,
        max_neighbourhood_witness=max_w,
        min_list_weight=min_l if min_e is not None else 0.0,
        min_list_edge=min_e,
        max_colour_sum=max_sum,
        max_colour_sum_witness=max_key,
        colour_sums=sums,
    )


def enumerate_matchings(graph: LinearHypergraph) -> Iterator[tuple[int, ...]]:
    """All matchings of a graph (k = 2), the empty matching included."""
    if graph.k != 2:
        raise PreconditionError("matchings defined for graphs (k=2)")
    m = graph.edge_count

    def rec(i: int, used: set[int], chosen: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        if i == m:
            yield chosen
            return
        yield from rec(i + 1, used, chosen)
        u, v = graph.edges[i]
        if u not in used and v not in used:
            yield from rec(i + 1, used | {u, v}, chosen + (i,))

    yield from rec(0, set(), ())
