"""Command-line surface: topology/circuit generation, compilation,
verification, and the benchmark harness."""

from __future__ import annotations

import argparse
import json
import random
import sys

from .bench import BenchConfig, gen_hardest_fanin, gen_random_cz_circuit, run_bench
from .circuit import Circuit, Placement
from .flow import compile_circuit_flow
from .netmodel import GENERATORS, QuotientGraph
from .stabsim import channel_equivalent
from .steiner import compile_circuit_steiner, cz_to_dense_fanin
from .telegate import ExtendedCircuit


def _write_json(path: str, doc: dict) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, separators=(",", ":"))
        fh.write("\n")


def _read_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def cmd_gen_topology(args) -> int:
    graph = GENERATORS[args.kind](args.g)
    _write_json(args.out, graph.to_json())
    print(f"{args.kind} g={args.g}: {graph.node_count} nodes, {graph.edge_count} edges -> {args.out}")
    return 0


def cmd_gen_circuit(args) -> int:
    if args.type == "random-cz":
        rng = random.Random(args.seed)
        circuit = gen_random_cz_circuit(args.qubits, args.gates, rng)
    else:
        circuit = gen_hardest_fanin(args.qubits)
    _write_json(args.out, circuit.to_json())
    print(f"{args.type}: {args.qubits} qubits, {len(circuit.all_gates())} gates -> {args.out}")
    return 0


def cmd_compile(args) -> int:
    circuit = Circuit.from_json(_read_json(args.circuit))
    graph = QuotientGraph.from_json(_read_json(args.topology))
    if args.placement:
        placement = Placement.from_json(_read_json(args.placement))
    else:
        placement = Placement.round_robin(circuit.num_qubits, graph.node_count)
    if args.backend == "steiner":
        source = circuit
        if args.densify:
            source = cz_to_dense_fanin(circuit, cancel_pairs=args.cancel_pairs).to_circuit()
        extended, sched = compile_circuit_steiner(source, placement, graph)
        e_depth, e_count = sched.horizon, extended.e_count
        sched_doc = sched.to_json()
    else:
        mode = "exact" if args.backend == "flow-exact" else "greedy"
        extended, sched, _cs = compile_circuit_flow(circuit, placement, graph, mode)
        from .flow import metrics

        m = metrics(sched)
        e_depth, e_count = m.e_depth, m.e_count
        sched_doc = sched.to_json()
    if args.out:
        _write_json(args.out, sched_doc)
    if args.extended_out:
        _write_json(args.extended_out, extended.to_json())
    print(f"backend={args.backend} e_depth={e_depth} e_count={e_count}")
    return 0


def cmd_verify(args) -> int:
    extended = ExtendedCircuit.from_json(_read_json(args.extended))
    logical = Circuit.from_json(_read_json(args.logical))
    rng = random.Random(args.seed)
    ok = channel_equivalent(
        extended, logical, trials=args.trials, branches=args.branches, rng=rng
    )
    print("equivalent" if ok else "NOT equivalent")
    return 0 if ok else 1


def cmd_bench(args) -> int:
    cfg = BenchConfig(
        topologies=tuple(args.topologies.split(",")),
        g_values=tuple(int(x) for x in args.g.split(",")),
        sizes=tuple(int(x) for x in args.sizes.split(",")),
        samples=args.samples,
        backends=tuple(args.backends.split(",")),
        seed=args.seed,
        out=args.out,
        timing=not args.no_timing,
        workers=args.workers,
    )
    records = run_bench(cfg)
    print(f"{len(records)} rows -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distqc",
        description="Compile layered circuits onto distributed quantum architectures",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-topology", help="generate a benchmark topology")
    p.add_argument("--kind", choices=sorted(GENERATORS), required=True)
    p.add_argument("--g", type=int, required=True, help="generator factor")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_topology)

    p = sub.add_parser("gen-circuit", help="generate a benchmark circuit")
    p.add_argument("--type", choices=["random-cz", "hardest-fanin"], required=True)
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--gates", type=int, default=0, help="gate count for random-cz")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_circuit)

    p = sub.add_parser("compile", help="schedule and expand a circuit")
    p.add_argument("--circuit", required=True)
    p.add_argument("--topology", required=True)
    p.add_argument("--placement", help="placement JSON; default round-robin")
    p.add_argument("--backend", choices=["flow-exact", "flow-greedy", "steiner"], required=True)
    p.add_argument("--densify", action="store_true", help="reduce a CZ-only circuit to fan-in layers first")
    p.add_argument("--cancel-pairs", action="store_true", help="drop repeated CZ pairs modulo 2 while densifying")
    p.add_argument("--out", help="schedule JSON output")
    p.add_argument("--extended-out", help="extended circuit JSON output")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("verify", help="check a compiled circuit against its source")
    p.add_argument("--extended", required=True)
    p.add_argument("--logical", required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--branches", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="run the benchmark matrix")
    p.add_argument("--topologies", default="rect-low,hex")
    p.add_argument("--g", default="2,3")
    p.add_argument("--sizes", default="64")
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--backends", default="flow-greedy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument(
        "--no-timing",
        action="store_true",
        help="write zero wall times so repeated runs are byte-identical",
    )
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
