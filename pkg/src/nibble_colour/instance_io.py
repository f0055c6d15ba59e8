"""JSON serialisation of instances and colourings.

Instance format::

    {
      "k": 2,
      "vertex_count": 4,
      "edges": [[0, 1], [1, 2]],
      "colour_universe": [0, 9],
      "lists": {"0": [{"colour": 1, "weight": 0.5}, {"colour": 2}]},
      "sigma": [{"e": 0, "f": 1, "map": [[1, 7]]}]
    }

Weights omitted from a list entry default to 1.0.  `sigma` entries are
ordered pairs; pairs not mentioned use the identity correspondence.

Colouring format::

    {"complete": true, "colours": {"0": 1, "1": 2}}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .core import (
    EdgeCorrespondence,
    InstanceError,
    LinearHypergraph,
    PartialColouring,
    WeightedListAssignment,
)


@dataclass(frozen=True)
class Instance:
    """A hypergraph together with its lists, correspondence and universe."""

    graph: LinearHypergraph
    lists: WeightedListAssignment
    sigma: EdgeCorrespondence
    universe: tuple[int, int]


def instance_to_dict(inst: Instance) -> dict:
    lists_json: dict[str, list] = {}
    for e in inst.lists.edge_ids():
        entries = []
        for c in inst.lists.colours(e):
            w = inst.lists.weight(e, c)
            entries.append({"colour": c} if w == 1.0 else {"colour": c, "weight": w})
        lists_json[str(e)] = entries
    sigma_json = [
        {"e": e, "f": f, "map": [[c1, c2] for c1, c2 in sorted(m.items())]}
        for (e, f), m in sorted(inst.sigma.maps.items())
    ]
    return {
        "k": inst.graph.k,
        "vertex_count": inst.graph.vertex_count,
        "edges": [list(edge) for edge in inst.graph.edges],
        "colour_universe": list(inst.universe),
        "lists": lists_json,
        "sigma": sigma_json,
    }


def instance_from_dict(data: Mapping) -> Instance:
    try:
        k = int(data["k"])
        vertex_count = int(data["vertex_count"])
        edges = [tuple(int(v) for v in edge) for edge in data["edges"]]
        lo, hi = (int(x) for x in data.get("colour_universe", (0, 0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"malformed instance: {exc}") from exc
    graph = LinearHypergraph.build(vertex_count, edges, k=k)
    lists: dict[int, list[int]] = {e: [] for e in range(len(edges))}
    weights: dict[tuple[int, int], float] = {}
    for key, entries in data.get("lists", {}).items():
        e = int(key)
        if not (0 <= e < len(edges)):
            raise InstanceError(f"list declared for unknown edge {e}")
        for entry in entries:
            if isinstance(entry, Mapping):
                c = int(entry["colour"])
                w = float(entry.get("weight", 1.0))
            else:  # bare colour id
                c, w = int(entry), 1.0
            lists[e].append(c)
            weights[(e, c)] = w
    maps: dict[tuple[int, int], dict[int, int]] = {}
    for item in data.get("sigma", []):
        e, f = int(item["e"]), int(item["f"])
        maps[(e, f)] = {int(c1): int(c2) for c1, c2 in item.get("map", [])}
    return Instance(
        graph=graph,
        lists=WeightedListAssignment.build(lists, weights),
        sigma=EdgeCorrespondence(maps=maps),
        universe=(lo, hi),
    )


def dump_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst), indent=2, sort_keys=True) + "\n")


def load_instance(path: str | Path) -> Instance:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InstanceError(f"cannot read instance {path}: {exc}") from exc
    return instance_from_dict(data)


def colouring_to_dict(colouring: PartialColouring | Mapping[int, int], complete: bool) -> dict:
    colours = colouring.colours if isinstance(colouring, PartialColouring) else colouring
    return {"complete": bool(complete), "colours": {str(e): int(c) for e, c in sorted(colours.items())}}


def dump_colouring(colouring, complete: bool, path: str | Path) -> None:
    Path(path).write_text(json.dumps(colouring_to_dict(colouring, complete), indent=2, sort_keys=True) + "\n")


def load_colouring(path: str | Path) -> tuple[PartialColouring, bool]:
    try:
        data = json.loads(Path(path).read_text())
        colours = {int(e): int(c) for e, c in data["colours"].items()}
        complete = bool(data.get("complete", False))
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"cannot read colouring {path}: {exc}") from exc
    return PartialColouring(colours), complete
