"""Instance representation: linear hypergraphs, edge correspondences,
weighted colour lists, colour neighbourhoods and colouring validation.

Conventions used throughout the package:

* A graph is a 2-uniform hypergraph; there is no separate graph type.
* Edges are stored as sorted tuples of vertex ids `0..vertex_count-1` and
  addressed by their index in the edge list.
* Colours are nonnegative integers from a finite universe declared per
  instance.
* `(e, c)` blocks `(f, c')` when the correspondence maps c on e to c' on f.
  A valid colouring contains no blocking pair between incident edges.
* All structures are immutable after construction; operations that modify
  lists return new values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping


class InstanceError(ValueError):
    """Structurally invalid instance data."""


class MissingWeightError(KeyError):
    """A (edge, colour) pair is absent from a weighted list assignment."""


class PreconditionError(ValueError):
    """An operation was called outside its contract."""


@dataclass(frozen=True)
class Violation:
    """One validity defect; `kind` is machine-readable, `detail` human."""

    kind: str
    subject: tuple
    detail: str

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return f"[{self.kind}] {self.detail}"


@dataclass(frozen=True)
class LinearHypergraph:
    """A k-uniform linear hypergraph.

    Invariants (checked by :func:`validate_instance`): every edge has
    exactly k distinct vertices, and two distinct edges share at most one
    vertex.
    """

    vertex_count: int
    edges: tuple[tuple[int, ...], ...]
    k: int

    @classmethod
    def build(cls, vertex_count: int, edges: Iterable[Iterable[int]], k: int | None = None) -> "LinearHypergraph":
        normalised = tuple(tuple(sorted(e)) for e in edges)
        if k is None:
            if not normalised:
                raise InstanceError("cannot infer uniformity from an empty edge list")
            k = len(normalised[0])
        return cls(vertex_count=vertex_count, edges=normalised, k=k)

    @cached_property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        """Per-vertex tuple of incident edge ids, ascending."""
        table: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for eid, edge in enumerate(self.edges):
            for v in edge:
                if 0 <= v < self.vertex_count:
                    table[v].append(eid)
        return tuple(tuple(row) for row in table)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edges_at(self, v: int) -> tuple[int, ...]:
        return self.incidence[v]

    def degree(self, v: int) -> int:
        return len(self.incidence[v])

    def shared_vertex(self, e: int, f: int) -> int | None:
        """The (by linearity unique) common vertex of two edges, or None."""
        common = set(self.edges[e]) & set(self.edges[f])
        return min(common) if common else None

    def adjacent_edges(self, e: int) -> tuple[int, ...]:
        out: set[int] = set()
        for v in self.edges[e]:
            out.update(self.edges_at(v))
        out.discard(e)
        return tuple(sorted(out))


@dataclass(frozen=True)
class EdgeCorrespondence:
    """Colour bijections between incident edges.

    `maps[(e, f)] = {c: c'}` declares that colour c on e corresponds to
    (mutually excludes) colour c' on f.  Pairs with no stored map default
    to the identity, so plain list colouring needs no configuration.  For
    a stored pair, colours outside the map's domain correspond to nothing:
    extending a partial map by the identity would in general break
    injectivity (e.g. {1: 7} plus 7 -> 7).
    """

    maps: Mapping[tuple[int, int], Mapping[int, int]] = field(default_factory=dict)

    @cached_property
    def _inverses(self) -> dict[tuple[int, int], dict[int, int]]:
        return {(f, e): {c2: c1 for c1, c2 in m.items()} for (e, f), m in self.maps.items()}

    @property
    def is_trivial(self) -> bool:
        return not self.maps

    def image(self, e: int, f: int, c: int) -> int | None:
        """sigma_{e,f}(c), or None when the stored partial map leaves c free."""
        m = self.maps.get((e, f))
        if m is not None:
            return m.get(c)
        m = self._inverses.get((e, f))  # pair stored in the other direction
        if m is not None:
            return m.get(c)
        return c  # identity default

    def blocks(self, e: int, c: int, f: int, c_other: int) -> bool:
        """Does (e, c) block (f, c_other)?"""
        return self.image(e, f, c) == c_other


@dataclass(frozen=True)
class WeightedListAssignment:
    """Per-edge colour lists with weights mu(e, c) in (0, 1].

    The weighted size |A|_mu of a set A of (edge, colour) pairs is the sum
    of the member weights, accumulated in ascending (edge, colour) order
    for reproducibility.
    """

    lists: Mapping[int, tuple[int, ...]]
    weights: Mapping[tuple[int, int], float]

    @classmethod
    def build(cls, lists: Mapping[int, Iterable[int]], weights: Mapping[tuple[int, int], float] | None = None) -> "WeightedListAssignment":
        norm = {e: tuple(sorted(set(cs))) for e, cs in lists.items()}
        if weights is None:
            weights = {(e, c): 1.0 for e, cs in norm.items() for c in cs}
        else:
            weights = dict(weights)
        return cls(lists=norm, weights=weights)

    @classmethod
    def unit(cls, lists: Mapping[int, Iterable[int]]) -> "WeightedListAssignment":
        return cls.build(lists)

    def colours(self, e: int) -> tuple[int, ...]:
        return self.lists.get(e, ())

    def has(self, e: int, c: int) -> bool:
        return (e, c) in self.weights

    def weight(self, e: int, c: int) -> float:
        try:
            return self.weights[(e, c)]
        except KeyError:
            raise MissingWeightError(f"no weight for edge {e}, colour {c}") from None

    def list_weight(self, e: int) -> float:
        return sum(self.weights[(e, c)] for c in self.colours(e))

    def edge_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.lists))

    def replace_edge(self, e: int, colours: Iterable[int], weights: Mapping[int, float]) -> "WeightedListAssignment":
        new_lists = dict(self.lists)
        new_weights = {k: v for k, v in self.weights.items() if k[0] != e}
        cs = tuple(sorted(colours))
        new_lists[e] = cs
        for c in cs:
            new_weights[(e, c)] = weights[c]
        return WeightedListAssignment(lists=new_lists, weights=new_weights)

    def restrict_to_edges(self, edge_ids: Iterable[int]) -> "WeightedListAssignment":
        keep = set(edge_ids)
        return WeightedListAssignment(
            lists={e: cs for e, cs in self.lists.items() if e in keep},
            weights={(e, c): w for (e, c), w in self.weights.items() if e in keep},
        )


@dataclass(frozen=True)
class PartialColouring:
    """Partial map from edge ids to colours.

    Validity (each colour from its list, no blocking pair) is a contract
    checked by :func:`validate_colouring`, not enforced on construction.
    """

    colours: Mapping[int, int] = field(default_factory=dict)

    def get(self, e: int) -> int | None:
        return self.colours.get(e)

    def domain(self) -> tuple[int, ...]:
        return tuple(sorted(self.colours))

    def items(self) -> list[tuple[int, int]]:
        return sorted(self.colours.items())

    def merged(self, other: Mapping[int, int]) -> "PartialColouring":
        merged = dict(self.colours)
        merged.update(other)
        return PartialColouring(merged)

    def __len__(self) -> int:
        return len(self.colours)


def weighted_size(pairs: Iterable[tuple[int, int]], lists: WeightedListAssignment) -> float:
    """Sum of mu over the given (edge, colour) pairs.

    Accumulation runs in ascending (edge id, colour id) order so the float
    result does not depend on input order.  Raises MissingWeightError for
    pairs absent from the assignment.
    """
    total = 0.0
    for e, c in sorted(set(pairs)):
        total += lists.weight(e, c)
    return total


def colour_neighbours(
    graph: LinearHypergraph,
    lists: WeightedListAssignment,
    sigma: EdgeCorrespondence,
    e: int,
    v: int,
    c: int,
) -> tuple[tuple[int, int], ...]:
    """All pairs (f, c') at vertex v whose selection would block (e, c).

    That is: f != e incident to v, c' in L(f), and sigma_{f,e}(c') = c.
    Requires v in e and c in L(e).
    """
    if v not in graph.edges[e]:
        raise PreconditionError(f"vertex {v} not in edge {e}")
    if not lists.has(e, c):
        raise PreconditionError(f"colour {c} not in the list of edge {e}")
    out = []
    for f in graph.edges_at(v):
        if f == e:
            continue
        c_other = sigma.image(e, f, c)  # sigma_{f,e}(c') = c  <=>  c' = sigma_{e,f}(c)
        if c_other is not None and lists.has(f, c_other):
            out.append((f, c_other))
    return tuple(sorted(out))


def validate_colouring(
    graph: LinearHypergraph,
    lists: WeightedListAssignment,
    sigma: EdgeCorrespondence,
    colouring: PartialColouring | Mapping[int, int],
) -> list[Violation]:
    """Empty iff every coloured edge uses a listed colour and no coloured
    pair blocks another coloured pair.  Total: never raises."""
    colours = colouring.colours if isinstance(colouring, PartialColouring) else colouring
    violations: list[Violation] = []
    for e, c in sorted(colours.items()):
        if e < 0 or e >= graph.edge_count:
            violations.append(Violation("unknown-edge", (e,), f"edge {e} not in instance"))
            continue
        if not lists.has(e, c):
            violations.append(Violation("list", (e, c), f"edge {e} coloured {c} which is not in its list"))
    seen: set[tuple[int, int]] = set()
    for e, c in sorted(colours.items()):
        if e < 0 or e >= graph.edge_count:
            continue
        for f in graph.adjacent_edges(e):
            if f not in colours or (min(e, f), max(e, f)) in seen:
                continue
            seen.add((min(e, f), max(e, f)))
            if sigma.blocks(e, c, f, colours[f]):
                violations.append(
                    Violation(
                        "blocking",
                        (e, f, c, colours[f]),
                        f"({e},{c}) blocks ({f},{colours[f]})",
                    )
                )
    return violations


def restrict_lists(
    graph: LinearHypergraph,
    lists: WeightedListAssignment,
    sigma: EdgeCorrespondence,
    colouring: PartialColouring | Mapping[int, int],
) -> WeightedListAssignment:
    """Lists for the uncoloured edges after removing every colour blocked
    by a coloured neighbour; weights unchanged on survivors.

    The removal is of *blocked* colours: for each coloured f adjacent to e,
    the colour sigma_{f,e}(gamma(f)) leaves L(e).  Requires the colouring
    to be valid on its domain.
    """
    colours = colouring.colours if isinstance(colouring, PartialColouring) else colouring
    # List membership is only checkable for edges still carrying a list:
    # colourings produced by earlier rounds refer to lists already dropped.
    problems = [
        v
        for v in validate_colouring(graph, lists, sigma, colours)
        if not (v.kind == "list" and v.subject[0] not in lists.lists)
    ]
    if problems:
        raise PreconditionError(f"colouring invalid: {problems[0]}")
    new_lists: dict[int, tuple[int, ...]] = {}
    new_weights: dict[tuple[int, int], float] = {}
    for e in lists.edge_ids():
        if e in colours:
            continue
        blocked: set[int] = set()
        for f in graph.adjacent_edges(e):
            cf = colours.get(f)
            if cf is None:
                continue
            image = sigma.image(f, e, cf)
            if image is not None:
                blocked.add(image)
        kept = tuple(c for c in lists.colours(e) if c not in blocked)
        new_lists[e] = kept
        for c in kept:
            new_weights[(e, c)] = lists.weight(e, c)
    return WeightedListAssignment(lists=new_lists, weights=new_weights)


def validate_instance(
    graph: LinearHypergraph,
    sigma: EdgeCorrespondence,
    lists: WeightedListAssignment,
    universe: tuple[int, int] | None = None,
) -> list[Violation]:
    """Structural report: uniformity, linearity, correspondence consistency,
    weight range, universe membership.  Total: never raises."""
    violations: list[Violation] = []
    for eid, edge in enumerate(graph.edges):
        if len(set(edge)) != graph.k:
            violations.append(
                Violation("uniformity", (eid,), f"edge {eid} has {len(set(edge))} distinct vertices, expected {graph.k}")
            )
        for v in edge:
            if not (0 <= v < graph.vertex_count):
                violations.append(Violation("vertex-range", (eid, v), f"edge {eid} uses out-of-range vertex {v}"))
    # Linearity: an unordered edge pair may share at most one vertex, so it
    # may appear at most once across the per-vertex incidence lists.
    seen_pairs: set[tuple[int, int]] = set()
    reported: set[tuple[int, int]] = set()
    for v in range(graph.vertex_count):
        at_v = graph.edges_at(v)
        for i, e in enumerate(at_v):
            for f in at_v[i + 1 :]:
                pair = (e, f)
                if pair in seen_pairs:
                    if pair not in reported:
                        reported.add(pair)
                        violations.append(
                            Violation("linearity", pair, f"edges {e} and {f} share more than one vertex")
                        )
                else:
                    seen_pairs.add(pair)
    for (e, f), m in sorted(sigma.maps.items()):
        if e == f:
            violations.append(Violation("sigma-self", (e, f), f"correspondence stored for edge {e} with itself"))
            continue
        if e >= graph.edge_count or f >= graph.edge_count or graph.shared_vertex(e, f) is None:
            violations.append(Violation("sigma-adjacency", (e, f), f"correspondence for non-incident pair ({e},{f})"))
        values = list(m.values())
        if len(set(values)) != len(values):
            violations.append(Violation("sigma-injective", (e, f), f"correspondence ({e},{f}) is not injective"))
        if (f, e) in sigma.maps:
            inverse = sigma.maps[(f, e)]
            agreed = all(inverse.get(c2) == c1 for c1, c2 in m.items()) and all(
                m.get(c2) == c1 for c1, c2 in inverse.items()
            )
            if not agreed:
                violations.append(
                    Violation("sigma-inverse", (e, f), f"stored maps for ({e},{f}) and ({f},{e}) are not mutual inverses")
                )
        if universe is not None:
            lo, hi = universe
            for c1, c2 in m.items():
                if not (lo <= c1 <= hi and lo <= c2 <= hi):
                    violations.append(
                        Violation("sigma-universe", (e, f, c1, c2), f"correspondence entry ({c1},{c2}) outside colour universe")
                    )
    for e in lists.edge_ids():
        for c in lists.colours(e):
            w = lists.weight(e, c)
            if not (0.0 < w <= 1.0):
                violations.append(Violation("weight-range", (e, c), f"weight {w} for edge {e} colour {c} outside (0,1]"))
            if universe is not None and not (universe[0] <= c <= universe[1]):
                violations.append(Violation("colour-universe", (e, c), f"colour {c} on edge {e} outside declared universe"))
    return violations
