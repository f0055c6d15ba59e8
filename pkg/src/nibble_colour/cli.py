"""Command-line interface.

Commands: gen, colour, verify, schedule, polytope, diag, brute.  Every
run is a pure function of (inputs, flags, seed); a JSON manifest echoing
the full parameter set accompanies file outputs so runs can be reproduced
byte-identically (the manifest's duration field excepted).

Exit codes: 0 success, 1 verification failure (or proven-unsatisfiable),
2 input error, 3 cap or regime failure, 4 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from pathlib import Path

from . import __version__
from .core import InstanceError, validate_colouring, validate_instance
from .finisher import finish, to_link_instance
from .harness import (
    GenerationError,
    GeneratorSpec,
    brute_force_colour,
    build_local_lists,
    expectation_diagnostic,
    generate,
    neighbourhood_audit,
)
from .instance_io import (
    Instance,
    dump_colouring,
    dump_instance,
    load_colouring,
    load_instance,
)
from .nibble import (
    NibbleFailureError,
    ParameterDomainError,
    NibbleParams,
    ScheduleCollapseError,
    drive,
    simulate_schedule,
)
from .polytope import EnumerationLimitError, UnsupportedInstanceError, edmonds_membership

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_CAP = 3
EXIT_RESOURCE = 4

THREADS_ENV = "NIBBLE_COLOUR_THREADS"


def _threads_default() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _write_manifest(path: Path, command: str, params: dict, seed: int | None,
                    inputs: list[str], outputs: list[str], started: float) -> None:
    manifest = {
        "artifact_version": __version__,
        "command": command,
        "parameters": params,
        "seed": seed,
        "inputs": sorted(inputs),
        "outputs": sorted(outputs),
        "duration_s": round(time.monotonic() - started, 6),
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _trace_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([
        "round", "L", "N", "ratio", "edges_coloured", "edges_remaining",
        "retries", "min_list_size", "max_neighbourhood_size",
    ])
    for r in rows:
        writer.writerow([
            r.round, repr(r.L), repr(r.N), repr(r.ratio), r.edges_coloured,
            r.edges_remaining, r.retries, r.min_list_size, r.max_neighbourhood_size,
        ])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------


_KIND_MAP = {
    "regular": "regular-graph",
    "bipartite": "bipartite",
    "random": "random-graph",
    "linear": "linear-k-uniform",
}


def cmd_gen(args) -> int:
    started = time.monotonic()
    try:
        spec = GeneratorSpec(
            kind=_KIND_MAP[args.kind], n=args.n, seed=args.seed, d=args.d, p=args.p,
            m=args.m, n2=args.n2, k=args.k,
        )
        graph = generate(spec)
        if graph.edge_count == 0:
            raise GenerationError("generated graph has no edges; adjust the parameters")
        max_size = max(
            math.ceil((1.0 + args.eps) * max(graph.degree(v) for v in edge)) for edge in graph.edges
        )
        universe = args.universe if args.universe is not None else 4 * max_size
        mode = "unit-weight" if args.weights == "unit" else "degree-weighted"
        lists = build_local_lists(graph, args.eps, universe, mode=mode, seed=args.seed)
    except GenerationError as exc:
        _err(f"generation error: {exc}")
        return EXIT_INPUT
    from .core import EdgeCorrespondence

    inst = Instance(graph=graph, lists=lists, sigma=EdgeCorrespondence(), universe=(0, universe - 1))
    problems = validate_instance(inst.graph, inst.sigma, inst.lists, inst.universe)
    if problems:  # generator contract: never happens
        _err(f"internal error: generated instance invalid: {problems[0]}")
        return EXIT_INPUT
    out = Path(args.out)
    dump_instance(inst, out)
    _write_manifest(
        Path(str(out) + ".manifest.json"), "gen",
        {
            "kind": args.kind, "n": args.n, "d": args.d, "p": args.p, "m": args.m,
            "n2": args.n2, "k": args.k, "eps": args.eps, "universe": universe,
            "weights": args.weights, "threads": args.threads,
        },
        args.seed, [], [str(out)], started,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# colour / brute
# ---------------------------------------------------------------------------


def _auto_eps(inst: Instance) -> float:
    audit = neighbourhood_audit(inst.graph, inst.lists, inst.sigma)
    if audit.max_neighbourhood <= 0:
        return 0.25
    ratio = audit.min_list_weight / audit.max_neighbourhood
    return min(0.25, max(0.01, (ratio - 1.0) / 2.0))


def cmd_colour(args) -> int:
    started = time.monotonic()
    try:
        inst = load_instance(args.instance)
    except InstanceError as exc:
        _err(f"input error: {exc}")
        return EXIT_INPUT
    problems = validate_instance(inst.graph, inst.sigma, inst.lists, inst.universe)
    if problems:
        for p in problems[:10]:
            _err(str(p))
        return EXIT_INPUT

    prefix = Path(args.out_prefix)
    outputs: list[str] = []
    trace_rows = []
    finish_log = None
    colours: dict[int, int] = {}
    status = EXIT_OK

    if args.mode == "brute":
        result = brute_force_colour(inst.graph, inst.lists, inst.sigma, node_cap=args.node_cap)
        if result.status == "found":
            colours = result.colouring
        elif result.status == "proven-unsatisfiable":
            _err("brute force: proven unsatisfiable")
            status = EXIT_VERIFY
        else:
            _err(f"brute force: node cap {args.node_cap} exceeded")
            status = EXIT_CAP
    else:
        eps = args.eps if args.eps is not None else _auto_eps(inst)
        if args.mode == "nibble+finish":
            try:
                result = drive(
                    inst.graph, inst.lists, inst.sigma, eps=eps, seed=args.seed,
                    retry_cap=args.retry_cap,
                )
            except NibbleFailureError as exc:
                _err(f"nibble failure: {exc}; diagnostics: {exc.diagnostics}")
                return EXIT_CAP
            colours.update(result.colouring)
            trace_rows = result.trace
            remaining = set(result.remaining_edges)
            lists_left = result.lists
        else:  # finish-only
            remaining = set(inst.lists.edge_ids())
            lists_left = inst.lists
        if remaining:
            cap = args.iteration_cap if args.iteration_cap is not None else 100 * len(remaining)
            try:
                link = to_link_instance(inst.graph, lists_left, inst.sigma, active=remaining)
                finish_colours, finish_log = finish(link, seed=args.seed, iteration_cap=cap)
            except Exception as exc:  # empty lists and similar dead ends
                _err(f"finisher failed: {exc}")
                return EXIT_CAP
            if finish_log.outcome != "success":
                _err(f"finisher exhausted its iteration cap ({cap})")
                status = EXIT_CAP
            else:
                colours.update(finish_colours)

    complete = len(colours) == inst.graph.edge_count
    violations = validate_colouring(inst.graph, inst.lists, inst.sigma, colours)
    if violations:  # solver contract: should not happen
        for v in violations[:10]:
            _err(str(v))
        status = EXIT_VERIFY

    colouring_path = Path(str(prefix) + ".colouring.json")
    dump_colouring(colours, complete and not violations, colouring_path)
    outputs.append(str(colouring_path))
    trace_path = Path(str(prefix) + ".trace.csv")
    trace_path.write_text(_trace_csv(trace_rows))
    outputs.append(str(trace_path))
    if finish_log is not None:
        log_path = Path(str(prefix) + ".finish.json")
        log_path.write_text(json.dumps(finish_log.to_dict(), indent=2, sort_keys=True) + "\n")
        outputs.append(str(log_path))
    _write_manifest(
        Path(str(prefix) + ".manifest.json"), "colour",
        {
            "mode": args.mode, "retry_cap": args.retry_cap, "iteration_cap": args.iteration_cap,
            "eps": args.eps, "node_cap": args.node_cap, "threads": args.threads,
            "instance": str(args.instance),
        },
        args.seed, [str(args.instance)], outputs, started,
    )
    if status != EXIT_OK:
        return status
    return EXIT_OK if complete else EXIT_CAP


def cmd_brute(args) -> int:
    try:
        inst = load_instance(args.instance)
    except InstanceError as exc:
        _err(f"input error: {exc}")
        return EXIT_INPUT
    result = brute_force_colour(inst.graph, inst.lists, inst.sigma, node_cap=args.node_cap)
    payload = {"status": result.status, "nodes": result.nodes}
    if result.colouring is not None:
        payload["colours"] = {str(e): c for e, c in sorted(result.colouring.items())}
    print(json.dumps(payload, indent=2, sort_keys=True))
    if result.status == "found":
        return EXIT_OK
    if result.status == "proven-unsatisfiable":
        return EXIT_VERIFY
    return EXIT_CAP


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    try:
        inst = load_instance(args.instance)
        colouring, _ = load_colouring(args.colouring)
    except InstanceError as exc:
        _err(f"input error: {exc}")
        return EXIT_INPUT
    violations = validate_colouring(inst.graph, inst.lists, inst.sigma, colouring)
    if any(v.kind == "unknown-edge" for v in violations):
        for v in violations:
            _err(str(v))
        return EXIT_INPUT
    if violations:
        for v in violations:
            _err(str(v))
        return EXIT_VERIFY
    return EXIT_OK


# ---------------------------------------------------------------------------
# schedule
# ---------------------------------------------------------------------------


def cmd_schedule(args) -> int:
    started = time.monotonic()
    try:
        rows = simulate_schedule(args.eps, args.k, args.delta, mode=args.mode)
    except ScheduleCollapseError as exc:
        _err(f"schedule collapse at round {exc.round_index}: {exc}")
        return EXIT_CAP
    except ParameterDomainError as exc:
        _err(f"input error: {exc}")
        return EXIT_INPUT
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["round", "L", "N", "ratio"])
    for r in rows:
        writer.writerow([r.round, repr(r.L), repr(r.N), repr(r.ratio)])
    text = buf.getvalue()
    if args.out:
        out = Path(args.out)
        out.write_text(text)
        _write_manifest(
            Path(str(out) + ".manifest.json"), "schedule",
            {"eps": args.eps, "k": args.k, "delta": args.delta, "mode": args.mode, "threads": args.threads},
            None, [], [str(out)], started,
        )
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# polytope
# ---------------------------------------------------------------------------


def cmd_polytope(args) -> int:
    try:
        inst = load_instance(args.graph)
        vector_raw = json.loads(Path(args.vector).read_text())
        x = {int(e): float(v) for e, v in vector_raw.items()}
    except (InstanceError, OSError, json.JSONDecodeError, ValueError) as exc:
        _err(f"input error: {exc}")
        return EXIT_INPUT
    try:
        verdict = edmonds_membership(inst.graph, x, shrink=args.shrink, vertex_limit=args.limit)
    except EnumerationLimitError as exc:
        _err(f"resource limit: {exc}")
        return EXIT_RESOURCE
    except (UnsupportedInstanceError, ValueError) as exc:
        _err(f"input error: {exc}")
        return EXIT_INPUT
    print(json.dumps(verdict.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# diag
# ---------------------------------------------------------------------------


def cmd_diag(args) -> int:
    started = time.monotonic()
    if args.trials < 1:
        _err("usage error: --trials must be >= 1")
        return EXIT_INPUT
    try:
        inst = load_instance(args.instance)
    except InstanceError as exc:
        _err(f"input error: {exc}")
        return EXIT_INPUT
    audit = neighbourhood_audit(inst.graph, inst.lists, inst.sigma)
    L = args.L if args.L is not None else audit.min_list_weight
    N = args.N if args.N is not None else max(audit.max_neighbourhood, 8.0)
    try:
        params = NibbleParams(eps=args.eps, k=inst.graph.k, L=L, N=N)
    except ParameterDomainError as exc:
        _err(f"input error: derived parameters invalid ({exc}); pass --L and --N explicitly")
        return EXIT_INPUT
    report = expectation_diagnostic(
        inst.graph, inst.lists, inst.sigma, params, trials=args.trials, seed=args.seed,
        collect_samples=args.csv is not None,
    )
    if args.csv:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["trial", "edge", "surviving_weight"])
        for e in sorted(report.samples):
            for t, w in enumerate(report.samples[e]):
                writer.writerow([t, e, repr(float(w))])
        Path(args.csv).write_text(buf.getvalue())
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        _write_manifest(
            Path(str(args.out) + ".manifest.json"), "diag",
            {"trials": args.trials, "eps": args.eps, "L": L, "N": N, "threads": args.threads,
             "instance": str(args.instance)},
            args.seed, [str(args.instance)], [args.out], started,
        )
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nibble-colour",
        description="List and correspondence edge colouring of linear uniform "
        "hypergraphs via an iterated nibble and a resampling finisher.",
    )
    parser.add_argument("--threads", type=int, default=None,
                        help=f"worker bound (default ${THREADS_ENV} or 1); outputs do not depend on it")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("--kind", choices=["regular", "bipartite", "random", "linear"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--n2", type=int, default=None)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--universe", type=int, default=None)
    p.add_argument("--weights", choices=["unit", "degree"], default="unit")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("colour", help="colour an instance")
    p.add_argument("instance")
    p.add_argument("--mode", choices=["nibble+finish", "finish-only", "brute"], default="nibble+finish")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--retry-cap", type=int, default=10)
    p.add_argument("--iteration-cap", type=int, default=None)
    p.add_argument("--node-cap", type=int, default=1_000_000)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--out-prefix", default="colour-run")
    p.set_defaults(func=cmd_colour)

    p = sub.add_parser("verify", help="check a colouring file against an instance")
    p.add_argument("instance")
    p.add_argument("colouring")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("schedule", help="simulate the parameter recursion")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--mode", choices=["eps8", "eps2"], default="eps8")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("polytope", help="matching-polytope membership of a fractional vector")
    p.add_argument("graph")
    p.add_argument("vector")
    p.add_argument("--shrink", type=float, default=0.0)
    p.add_argument("--limit", type=int, default=20)
    p.set_defaults(func=cmd_polytope)

    p = sub.add_parser("diag", help="expectation diagnostics for the colouring procedure")
    p.add_argument("instance")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--L", type=float, default=None)
    p.add_argument("--N", type=float, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--csv", default=None, help="also write raw per-trial weights")
    p.set_defaults(func=cmd_diag)

    p = sub.add_parser("brute", help="exhaustive backtracking oracle")
    p.add_argument("instance")
    p.add_argument("--node-cap", type=int, default=1_000_000)
    p.set_defaults(func=cmd_brute)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is None:
        args.threads = _threads_default()
    if args.threads < 1:
        _err("usage error: --threads must be >= 1")
        return EXIT_INPUT
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
