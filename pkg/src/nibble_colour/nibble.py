"""The random colouring procedure and its parameter schedule.

One round of the procedure, given parameters (eps, k, L, N):

  (I)   every pair (e, c) with c in L(e) is activated independently with
        probability mu(e,c) / (L ln N);
  (II)  for each edge e, vertex v in e and colour c in L(e), if any pair in
        the colour neighbourhood N(e,v,c) was activated, (e,c) is removed
        from the surviving list and unassigned (removal is wasteful: it
        happens whether or not e itself was activated with c);
  (III) an independent coin flip per (e,v,c) succeeds with the equalizing
        probability Eq(e,v,c); any failure removes (e,c) likewise.

An edge that retains at least one activated colour after (III) becomes
coloured with its lowest retained colour.  Step (II) acts on the snapshot
of step (I) assignments, so rounds are bulk-synchronous and the outcome is
a pure function of the draws.  The equalizing flip makes every pair's
survival probability exactly K^k, where

    K = 1 - (N/L) * (1 + eps/8) / ln N.

Surviving lists of uncoloured edges are then truncated and rescaled to hit
the next list-weight target exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .core import (
    EdgeCorrespondence,
    LinearHypergraph,
    PreconditionError,
    WeightedListAssignment,
)

E_SQUARED = math.e**2

SCHEDULE_MODES = ("eps8", "eps2", "exp51")


class ParameterDomainError(ValueError):
    """Parameters outside the domain where the procedure is defined."""


class DegenerateWeightError(ValueError):
    """A factor of an equalizing product is not positive."""


class ScheduleCollapseError(RuntimeError):
    """The parameter recursion left its domain (N too small for the regime)."""

    def __init__(self, message: str, round_index: int):
        super().__init__(message)
        self.round_index = round_index


class CannotTruncateError(ValueError):
    """A surviving list is below the truncation target."""

    def __init__(self, message: str, edge: int):
        super().__init__(message)
        self.edge = edge


class NibbleFailureError(RuntimeError):
    """A round kept violating its empirical bounds for every retry."""

    def __init__(self, message: str, round_index: int, diagnostics: dict):
        super().__init__(message)
        self.round_index = round_index
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class NibbleParams:
    """Round parameters (eps, k, L, N) and the derived keep probability K.

    Requires N > e^2 (so ln N > 2) and a positive K; the ratio bounds
    1 + eps < L/N < 3ek are round-entry conditions checked by the driver,
    not here, because diagnostics legitimately evaluate the procedure
    outside that regime.
    """

    eps: float
    k: int
    L: float
    N: float
    mode: str = "eps8"

    def __post_init__(self):
        if not (0.0 < self.eps <= 0.25):
            raise ParameterDomainError(f"eps must lie in (0, 1/4], got {self.eps}")
        if self.k < 2 or int(self.k) != self.k:
            raise ParameterDomainError(f"k must be an integer >= 2, got {self.k}")
        if self.L <= 0.0 or self.N <= 0.0:
            raise ParameterDomainError("L and N must be positive")
        if self.N <= E_SQUARED:
            raise ParameterDomainError(f"N must exceed e^2 = {E_SQUARED:.4f}, got {self.N}")
        if self.mode not in SCHEDULE_MODES:
            raise ParameterDomainError(f"unknown schedule mode {self.mode!r}")
        if self.K <= 0.0:
            raise ParameterDomainError(
                f"keep probability K = {self.K:.6g} is not positive (N/L too large for ln N)"
            )

    @property
    def K(self) -> float:
        return 1.0 - (self.N / self.L) * (1.0 + self.eps / 8.0) / math.log(self.N)

    @property
    def ratio(self) -> float:
        return self.L / self.N

    @property
    def activation_scale(self) -> float:
        """Denominator L * ln N of the activation probabilities."""
        return self.L * math.log(self.N)


def keep_probability(params: NibbleParams) -> float:
    """K = 1 - (N/L)(1 + eps/8)/ln N, the uniform per-vertex keep rate."""
    return params.K


def schedule_step(L: float, N: float, K: float, k: int, eps: float, mode: str = "eps8") -> tuple[float, float]:
    """One step of the parameter recursion; pure in all arguments."""
    lnN = math.log(N)
    L_next = L * K**k - N ** (2.0 / 3.0)
    if mode == "eps8":
        shrink = (1.0 - eps / 8.0) / lnN * K**k
    elif mode == "eps2":
        shrink = (1.0 - eps / 2.0) / lnN * K**k
    elif mode == "exp51":
        shrink = K**k / lnN * (1.0 + 1.0 / lnN)
    else:
        raise ParameterDomainError(f"unknown schedule mode {mode!r}")
    N_next = N * K ** (k - 1) * (1.0 - shrink) + N ** (2.0 / 3.0)
    return L_next, N_next


def next_params(params: NibbleParams) -> tuple[float, float]:
    """(L', N') for the next round; raises ScheduleCollapseError if L' <= 0."""
    L_next, N_next = schedule_step(params.L, params.N, params.K, params.k, params.eps, params.mode)
    if L_next <= 0.0:
        raise ScheduleCollapseError(
            f"schedule collapse: L' = {L_next:.6g} <= 0 at L={params.L:.6g}, N={params.N:.6g} "
            "(N too small for the asymptotic regime)",
            round_index=0,
        )
    return L_next, N_next


@dataclass(frozen=True)
class ScheduleRow:
    round: int
    L: float
    N: float
    ratio: float


def simulate_schedule(eps: float, k: int, delta: float, mode: str = "eps8") -> list[ScheduleRow]:
    """Deterministic trajectory (i, L_i, N_i, ratio_i) starting from
    L_0 = (1+eps) delta, N_0 = delta, iterating until the ratio reaches
    3ek or the iteration cap ceil(100 k ln(delta) / eps)."""
    if delta <= E_SQUARED:
        raise ParameterDomainError(f"delta must exceed e^2, got {delta}")
    target = 3.0 * math.e * k
    cap = math.ceil(100.0 / eps * k * math.log(delta))
    L, N = (1.0 + eps) * delta, float(delta)
    rows = [ScheduleRow(0, L, N, L / N)]
    for i in range(cap):
        if L / N >= target:
            break
        try:
            params = NibbleParams(eps=eps, k=k, L=L, N=N, mode=mode)
            L, N = next_params(params)
        except (ParameterDomainError, ScheduleCollapseError) as exc:
            raise ScheduleCollapseError(f"schedule collapsed at round {i}: {exc}", round_index=i) from exc
        rows.append(ScheduleRow(i + 1, L, N, L / N))
    return rows


# ---------------------------------------------------------------------------
# Round structure: flattened (edge, colour) pairs and their neighbourhoods.
# ---------------------------------------------------------------------------


@dataclass
class RoundStructure:
    """Immutable per-round view of an instance.

    Pairs (e, c) are flattened in ascending order; `nbrs[p][j]` holds the
    pair indices of N(e, v_j, c) where v_j is the j-th vertex of e in
    ascending order.  By linearity these neighbourhoods are disjoint
    across vertex slots, and by bijectivity across colours of one edge.
    """

    pairs: list[tuple[int, int]]
    pair_pos: dict[tuple[int, int], int]
    mu: np.ndarray
    edge_of: np.ndarray
    colour_of: np.ndarray
    vertex_of: np.ndarray  # (P, k) vertex ids
    nbrs: list[list[np.ndarray]]
    edge_slices: dict[int, tuple[int, int]]
    edges: tuple[int, ...]
    k: int

    @classmethod
    def build(
        cls,
        graph: LinearHypergraph,
        lists: WeightedListAssignment,
        sigma: EdgeCorrespondence,
        active: set[int] | None = None,
    ) -> "RoundStructure":
        if active is None:
            active = set(lists.edge_ids())
        edges = tuple(sorted(active))
        pairs: list[tuple[int, int]] = []
        for e in edges:
            for c in lists.colours(e):
                pairs.append((e, c))
        pair_pos = {pc: i for i, pc in enumerate(pairs)}
        P = len(pairs)
        mu = np.array([lists.weight(e, c) for e, c in pairs], dtype=np.float64)
        edge_of = np.array([e for e, _ in pairs], dtype=np.int64)
        colour_of = np.array([c for _, c in pairs], dtype=np.int64)
        k = graph.k
        vertex_of = np.zeros((P, k), dtype=np.int64)
        nbrs: list[list[np.ndarray]] = [[] for _ in range(P)]

        trivial = sigma.is_trivial
        bucket: dict[tuple[int, int], list[int]] = {}
        if trivial:
            # Identity correspondence: N(e, v, c) is simply the other pairs
            # with colour c at v, so bucket pairs by (vertex, colour) once.
            for p, (e, c) in enumerate(pairs):
                for v in graph.edges[e]:
                    bucket.setdefault((v, c), []).append(p)

        for p, (e, c) in enumerate(pairs):
            everts = graph.edges[e]
            for j, v in enumerate(everts):
                vertex_of[p, j] = v
                if trivial:
                    near = [q for q in bucket.get((v, c), ()) if q != p]
                else:
                    near = []
                    for f in graph.edges_at(v):
                        if f == e or f not in active:
                            continue
                        c_other = sigma.image(e, f, c)
                        if c_other is not None and (f, c_other) in pair_pos:
                            near.append(pair_pos[(f, c_other)])
                nbrs[p].append(np.array(sorted(near), dtype=np.int64))

        edge_slices: dict[int, tuple[int, int]] = {}
        start = 0
        for i in range(P + 1):
            if i == P or (i > 0 and pairs[i][0] != pairs[i - 1][0]):
                if i > start:
                    edge_slices[pairs[start][0]] = (start, i)
                start = i
        return cls(
            pairs=pairs,
            pair_pos=pair_pos,
            mu=mu,
            edge_of=edge_of,
            colour_of=colour_of,
            vertex_of=vertex_of,
            nbrs=nbrs,
            edge_slices=edge_slices,
            edges=edges,
            k=k,
        )

    @property
    def pair_count(self) -> int:
        return len(self.pairs)

    def neighbourhood_weight(self, p: int, j: int) -> float:
        idx = self.nbrs[p][j]
        return float(self.mu[idx].sum()) if idx.size else 0.0

    def max_neighbourhood(self) -> tuple[float, tuple[int, int, int] | None, int]:
        """(max weighted size, witnessing (e, v, c), max cardinality)."""
        best, witness, best_card = 0.0, None, 0
        for p, (e, c) in enumerate(self.pairs):
            for j in range(self.k):
                w = self.neighbourhood_weight(p, j)
                best_card = max(best_card, int(self.nbrs[p][j].size))
                if w > best:
                    best, witness = w, (e, int(self.vertex_of[p, j]), c)
        return best, witness, best_card

    def list_weights(self) -> dict[int, float]:
        out = {e: 0.0 for e in self.edges}
        for e, (a, b) in self.edge_slices.items():
            out[e] = float(self.mu[a:b].sum())
        return out

    def min_list_size(self) -> int:
        sizes = {e: 0 for e in self.edges}
        for e, (a, b) in self.edge_slices.items():
            sizes[e] = b - a
        return min(sizes.values(), default=0)

    def equalizing(self, params: NibbleParams) -> tuple[np.ndarray, int]:
        """Eq values per (pair, vertex slot), clamped to <= 1; returns the
        number of clamped entries (hypothesis |N(e,v,c)|_mu <= N failed)."""
        scale = params.activation_scale
        K = params.K
        eq = np.empty((self.pair_count, self.k), dtype=np.float64)
        clamped = 0
        for p in range(self.pair_count):
            for j in range(self.k):
                idx = self.nbrs[p][j]
                if idx.size:
                    factors = 1.0 - self.mu[idx] / scale
                    if np.any(factors <= 0.0):
                        raise DegenerateWeightError(
                            f"equalizing factor <= 0 for pair {self.pairs[p]} at slot {j}"
                        )
                    denom = float(np.prod(factors))
                else:
                    denom = 1.0
                value = K / denom
                if value > 1.0:
                    value = 1.0
                    clamped += 1
                eq[p, j] = value
        return eq, clamped


def equalizing_probability(
    graph: LinearHypergraph,
    lists: WeightedListAssignment,
    sigma: EdgeCorrespondence,
    params: NibbleParams,
    e: int,
    v: int,
    c: int,
) -> float:
    """Eq(e,v,c) = K / prod over N(e,v,c) of (1 - mu(f,c')/(L ln N)),
    clamped to [0, 1].  Requires v in e and c in L(e)."""
    from .core import colour_neighbours

    scale = params.activation_scale
    denom = 1.0
    for f, c_other in colour_neighbours(graph, lists, sigma, e, v, c):
        factor = 1.0 - lists.weight(f, c_other) / scale
        if factor <= 0.0:
            raise DegenerateWeightError(f"equalizing factor <= 0 for neighbour ({f},{c_other})")
        denom *= factor
    return min(params.K / denom, 1.0)


# ---------------------------------------------------------------------------
# Truncation and rescaling.
# ---------------------------------------------------------------------------


def truncate_edge(
    colours: tuple[int, ...],
    weights: dict[int, float],
    l_target: float,
    edge: int = -1,
) -> tuple[tuple[int, ...], dict[int, float]]:
    """Delete colours (ascending weight, ties by colour id) while the
    remaining weighted size stays >= l_target, then rescale so the size is
    exactly l_target.  Raises CannotTruncateError if the list is deficient.
    """
    if l_target <= 0.0:
        raise PreconditionError(f"truncation target must be positive, got {l_target}")
    total = sum(weights[c] for c in colours)
    if total < l_target:
        raise CannotTruncateError(
            f"edge {edge}: weighted list size {total:.6g} below target {l_target:.6g}", edge=edge
        )
    kept = list(colours)
    for c in sorted(colours, key=lambda c: (weights[c], c)):
        if total - weights[c] >= l_target:
            total -= weights[c]
            kept.remove(c)
    factor = l_target / total
    return tuple(sorted(kept)), {c: weights[c] * factor for c in kept}


def truncate_and_rescale(lists: WeightedListAssignment, l_target: float) -> WeightedListAssignment:
    """Apply :func:`truncate_edge` to every edge of an assignment."""
    new_lists: dict[int, tuple[int, ...]] = {}
    new_weights: dict[tuple[int, int], float] = {}
    for e in lists.edge_ids():
        colours = lists.colours(e)
        kept, scaled = truncate_edge(colours, {c: lists.weight(e, c) for c in colours}, l_target, edge=e)
        new_lists[e] = kept
        for c in kept:
            new_weights[(e, c)] = scaled[c]
    return WeightedListAssignment(lists=new_lists, weights=new_weights)


# ---------------------------------------------------------------------------
# One round.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RoundStats:
    pairs: int
    assignments: int
    conflict_removals: int
    flips_failed: int
    eq_clamped: int


@dataclass(frozen=True)
class RoundOutcome:
    coloured: dict[int, int]
    survivors: WeightedListAssignment  # raw surviving lists, original weights
    truncated: WeightedListAssignment  # after truncate-and-rescale
    deficient: tuple[int, ...]  # edges that could not reach the target
    empty: tuple[int, ...]  # uncoloured edges whose whole list died
    l_target: float
    n_theory: float
    stats: RoundStats


def apply_procedure(
    struct: RoundStructure,
    activated: np.ndarray,
    flips_ok: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Steps (II)-(III) on a snapshot of step (I) draws.

    `activated` has shape (..., P), `flips_ok` shape (..., P, k); leading
    axes are independent trials.  Returns (survive, retained, removed_ii)
    of shape (..., P): survive marks pairs still in L'(e), retained marks
    pairs whose colour stays assigned to the edge, removed_ii marks pairs
    removed by conflict resolution.
    """
    removed2 = np.zeros(activated.shape, dtype=bool)
    for p in range(struct.pair_count):
        idx = np.concatenate(struct.nbrs[p])
        if idx.size:
            removed2[..., p] = activated[..., idx].any(axis=-1)
    removed3 = ~flips_ok.all(axis=-1)
    survive = ~removed2 & ~removed3
    retained = activated & survive
    return survive, retained, removed2


def run_round(
    graph: LinearHypergraph,
    lists: WeightedListAssignment,
    sigma: EdgeCorrespondence,
    params: NibbleParams,
    seed: int,
    round_index: int = 0,
    attempt: int = 0,
    l_target: float | None = None,
    struct: RoundStructure | None = None,
    active: set[int] | None = None,
) -> RoundOutcome:
    """One full round: draw, apply the procedure, colour, truncate.

    Deterministic in (seed, round_index, attempt); every Bernoulli draw
    comes from a counter stream keyed by (kind, round, attempt, edge,
    colour, vertex), so the outcome does not depend on iteration order or
    worker count.
    """
    if struct is None:
        struct = RoundStructure.build(graph, lists, sigma, active)
    if l_target is None:
        l_target, n_theory = next_params(params)
    else:
        _, n_theory = schedule_step(params.L, params.N, params.K, params.k, params.eps, params.mode)

    u_act = rng.uniforms(seed, rng.KIND_ACTIVATION, round_index, attempt, struct.edge_of, struct.colour_of)
    activated = u_act < struct.mu / params.activation_scale

    eq, clamped = struct.equalizing(params)
    e_keys = np.repeat(struct.edge_of[:, None], struct.k, axis=1)
    c_keys = np.repeat(struct.colour_of[:, None], struct.k, axis=1)
    u_flip = rng.uniforms(seed, rng.KIND_FLIP, round_index, attempt, e_keys, c_keys, struct.vertex_of)
    flips_ok = u_flip < eq

    survive, retained, removed_ii = apply_procedure(struct, activated, flips_ok)

    coloured: dict[int, int] = {}
    for e, (a, b) in struct.edge_slices.items():
        kept = np.nonzero(retained[a:b])[0]
        if kept.size:
            coloured[e] = int(struct.colour_of[a + kept[0]])  # pairs sorted, so lowest colour

    surv_lists: dict[int, tuple[int, ...]] = {}
    surv_weights: dict[tuple[int, int], float] = {}
    trunc_lists: dict[int, tuple[int, ...]] = {}
    trunc_weights: dict[tuple[int, int], float] = {}
    deficient: list[int] = []
    empty: list[int] = []
    for e in struct.edges:
        if e in coloured:
            continue
        a, b = struct.edge_slices.get(e, (0, 0))
        kept_colours = tuple(int(c) for c in struct.colour_of[a:b][survive[a:b]])
        wmap = {c: lists.weight(e, c) for c in kept_colours}
        surv_lists[e] = kept_colours
        surv_weights.update({(e, c): w for c, w in wmap.items()})
        if not kept_colours:
            empty.append(e)
            trunc_lists[e] = ()
            continue
        try:
            kept, scaled = truncate_edge(kept_colours, wmap, l_target, edge=e)
        except CannotTruncateError:
            deficient.append(e)
            kept, scaled = kept_colours, wmap  # keep raw survivors, unscaled
        trunc_lists[e] = kept
        trunc_weights.update({(e, c): w for c, w in scaled.items()})

    stats = RoundStats(
        pairs=struct.pair_count,
        assignments=int(activated.sum()),
        conflict_removals=int(removed_ii.sum()),
        flips_failed=int((~flips_ok).sum()),
        eq_clamped=clamped,
    )
    return RoundOutcome(
        coloured=coloured,
        survivors=WeightedListAssignment(lists=surv_lists, weights=surv_weights),
        truncated=WeightedListAssignment(lists=trunc_lists, weights=trunc_weights),
        deficient=tuple(deficient),
        empty=tuple(empty),
        l_target=l_target,
        n_theory=n_theory,
        stats=stats,
    )


# ---------------------------------------------------------------------------
# The driver.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DriveRow:
    round: int
    L: float
    N: float
    ratio: float
    edges_coloured: int
    edges_remaining: int
    retries: int
    min_list_size: int
    max_neighbourhood_size: int


@dataclass
class DriveResult:
    colouring: dict[int, int]
    lists: WeightedListAssignment
    L: float
    N: float
    trace: list[DriveRow] = field(default_factory=list)
    stop_reason: str = ""
    deficient_history: list[tuple[int, int]] = field(default_factory=list)

    @property
    def remaining_edges(self) -> tuple[int, ...]:
        return self.lists.edge_ids()


def drive(
    graph: LinearHypergraph,
    lists: WeightedListAssignment,
    sigma: EdgeCorrespondence,
    eps: float,
    seed: int = 0,
    retry_cap: int = 10,
    deficiency_tolerance: float = 0.25,
    initial_L: float | None = None,
    initial_N: float | None = None,
    max_rounds: int | None = None,
    mode: str = "eps8",
) -> DriveResult:
    """Iterate rounds until the list/neighbourhood ratio supports the
    finisher (L/N >= 3ek) or the regime runs out.

    Parameters entering round i are the truncation target of round i-1
    (every clean list has exactly that weighted size) and the measured
    maximum neighbourhood weight, which is the tightest valid N for the
    surviving instance; the theoretical N' of the recursion is a high
    probability upper bound for it.  A round is retried with a fresh
    stream when a surviving list dies entirely or more than
    `deficiency_tolerance` of the lists miss the truncation target; the
    asymptotic guarantees do not hold at desk scale, so isolated deficient
    edges are tolerated and simply carry shorter lists.

    Desk-scale regime guards (each recorded as the stop reason): N must
    exceed e^2, the ratio must lie strictly between 1 + eps and 3ek, the
    schedule must not collapse, and the truncation target must keep at
    least half of the expected surviving weight L K^k.
    """
    k = graph.k
    target_ratio = 3.0 * math.e * k
    colouring: dict[int, int] = {}
    cur_lists = lists
    active = set(lists.edge_ids())
    result = DriveResult(colouring=colouring, lists=cur_lists, L=0.0, N=0.0)

    struct = RoundStructure.build(graph, cur_lists, sigma, active)
    weights_by_edge = struct.list_weights()
    L = initial_L if initial_L is not None else (min(weights_by_edge.values()) if weights_by_edge else 0.0)
    N_emp, _, max_card = struct.max_neighbourhood()
    N = initial_N if initial_N is not None else N_emp
    result.L, result.N = L, N

    if max_rounds is None:
        max_rounds = math.ceil(100.0 / eps * k * math.log(N)) if N > 1.0 else 0

    i = 0
    while True:
        if not active:
            result.stop_reason = "all-coloured"
            return result
        ratio = L / N if N > 0 else math.inf
        if ratio >= target_ratio:
            result.stop_reason = "ratio-reached"
            return result
        if N <= E_SQUARED:
            result.stop_reason = "n-below-domain"
            return result
        if ratio <= 1.0 + eps:
            result.stop_reason = "ratio-below"
            return result
        if i >= max_rounds:
            break
        params = NibbleParams(eps=eps, k=k, L=L, N=N, mode=mode)
        try:
            l_target, n_theory = next_params(params)
        except ScheduleCollapseError:
            result.stop_reason = "schedule-collapse"
            return result
        if l_target < 0.5 * L * params.K**k:
            result.stop_reason = "truncation-guard"
            return result

        entering_min_size = struct.min_list_size()
        outcome = None
        attempts = 0
        for attempt in range(retry_cap + 1):
            attempts = attempt
            candidate = run_round(
                graph, cur_lists, sigma, params, seed,
                round_index=i, attempt=attempt, l_target=l_target, struct=struct,
            )
            uncoloured = len(active) - len(candidate.coloured)
            frac_deficient = len(candidate.deficient) / uncoloured if uncoloured else 0.0
            if not candidate.empty and frac_deficient <= deficiency_tolerance:
                outcome = candidate
                break
        if outcome is None:
            raise NibbleFailureError(
                f"round {i} violated its bounds for {retry_cap + 1} attempts",
                round_index=i,
                diagnostics={
                    "round": i,
                    "attempts": retry_cap + 1,
                    "empty_lists": list(candidate.empty),
                    "deficient_edges": list(candidate.deficient)[:20],
                    "l_target": l_target,
                },
            )

        colouring.update(outcome.coloured)
        active -= set(outcome.coloured)
        cur_lists = outcome.truncated
        result.trace.append(
            DriveRow(
                round=i,
                L=L,
                N=N,
                ratio=ratio,
                edges_coloured=len(outcome.coloured),
                edges_remaining=len(active),
                retries=attempts,
                min_list_size=entering_min_size,
                max_neighbourhood_size=max_card,
            )
        )
        result.deficient_history.append((i, len(outcome.deficient)))
        result.lists = cur_lists
        if not active:
            result.L, result.N = l_target, 0.0
            result.stop_reason = "all-coloured"
            return result
        struct = RoundStructure.build(graph, cur_lists, sigma, active)
        N_emp, _, max_card = struct.max_neighbourhood()
        L, N = l_target, N_emp
        result.L, result.N = L, N
        i += 1

    result.stop_reason = "cap-reached"
    return result
