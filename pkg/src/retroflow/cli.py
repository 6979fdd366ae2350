"""Command-line front end: scenario runs, validation, enumeration, replay.

Exit codes: 0 success, 1 no requested solver produced a feasible result
(or a validated solution is infeasible), 2 malformed inputs or arguments.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import domains as dm
from . import protocol
from .experiment import (ALGORITHMS, QueueModel, emit_report, load_diagnostics,
                         make_world, run_scenario, sweep_summary)
from .geo import load_topology_file
from .oscm import OscmInstance, Solution, validate
from .solvers import BudgetExhausted, SolverBudget


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="retroflow",
        description="Switch-to-controller recovery under SDN controller failures",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run failure scenarios and report metrics")
    run.add_argument("--topology", required=True, help="topology document (JSON)")
    run.add_argument("--placement", required=True, help="placement document (JSON)")
    run.add_argument("--failures", required=True,
                     help="failure cardinality K, or explicit controller ids 'a,b'")
    run.add_argument("--q-fraction", type=float, default=1.0,
                     help="required fraction of recoverable flows (default 1.0)")
    run.add_argument("--algorithms", default="exact,retroflow,nearest",
                     help="comma-separated subset of exact,retroflow,nearest")
    run.add_argument("--queue-penalty", type=float, default=0.1,
                     help="queueing penalty in ms per excess flow (default 0.1)")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--out", help="write the report here instead of stdout")
    run.add_argument("--control-delay", choices=("routed", "geodesic"), default="routed")
    run.add_argument("--flow-pairs", choices=("ordered", "unordered"), default="ordered")
    run.add_argument("--time-limit", type=float, default=120.0,
                     help="exact-solver time limit in seconds per scenario")
    run.add_argument("--seed", type=int, default=None,
                     help="seed for randomized components (the core pipeline uses none)")

    val = sub.add_parser("validate", help="check a solution file against an instance file")
    val.add_argument("--instance", required=True)
    val.add_argument("--solution", required=True)

    enum = sub.add_parser("enumerate", help="print failure scenarios")
    enum.add_argument("--topology", required=True)
    enum.add_argument("--placement", required=True)
    enum.add_argument("--failures", required=True, type=int)

    trace = sub.add_parser("protocol-trace", help="replay a routing-mode event script")
    trace.add_argument("--script", required=True)

    return parser


def _parse_scenarios(spec: str, placement: dm.Placement) -> list[dm.FailureScenario]:
    if "," in spec:
        ids = frozenset(int(tok) for tok in spec.split(",") if tok.strip())
        scenario = dm.FailureScenario(ids)
        dm.validate_scenario(placement, scenario)
        return [scenario]
    k = int(spec)
    if k == 0:
        raise dm.PlacementError("failure cardinality must be at least 1")
    if 1 <= k < len(placement.controller_ids):
        return dm.enumerate_failure_scenarios(placement, k)
    # a bare id: treat as a single-controller scenario
    scenario = dm.FailureScenario(frozenset({k}))
    dm.validate_scenario(placement, scenario)
    return [scenario]


def _cmd_run(args) -> int:
    if args.seed is not None:
        random.seed(args.seed)
    topo = load_topology_file(args.topology)
    placement = dm.load_placement_file(args.placement, topo)
    scenarios = _parse_scenarios(args.failures, placement)
    algorithms = tuple(a.strip() for a in args.algorithms.split(",") if a.strip())
    for a in algorithms:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    qm = QueueModel(penalty_ms_per_excess_flow=args.queue_penalty)
    budget = SolverBudget(time_limit_ms=args.time_limit * 1000.0)

    world = make_world(topo, placement, pairs=args.flow_pairs)
    reports = [
        run_scenario(world, s, args.q_fraction, algorithms=algorithms, qm=qm,
                     budget=budget, control_delay=args.control_delay)
        for s in scenarios
    ]
    document = emit_report(reports, format=args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(document)
        out = sys.stdout
    else:
        sys.stdout.write(document)
        out = sys.stderr
    summary = dict(topo.summary())
    diag = load_diagnostics(world)
    summary["computed_flow_total"] = diag["computed_total"]
    summary["fixture_flow_total"] = diag["fixture_total"]
    summary.update(sweep_summary(reports))
    for key, value in sorted(summary.items()):
        print(f"{key}: {value}", file=out)

    any_feasible = any(
        o.status in ("ok", "not_proven")
        for rep in reports for o in rep.outcomes
    )
    return 0 if any_feasible else 1


def _cmd_validate(args) -> int:
    inst = OscmInstance.from_file(args.instance)
    sol = Solution.from_file(args.solution)
    report = validate(inst, sol)
    for line in report.lines():
        print(line)
    print(f"feasible: {report.feasible}")
    return 0 if report.feasible else 1


def _cmd_enumerate(args) -> int:
    topo = load_topology_file(args.topology)
    placement = dm.load_placement_file(args.placement, topo)
    for s in dm.enumerate_failure_scenarios(placement, args.failures):
        print(s.label())
    return 0


def _cmd_protocol_trace(args) -> int:
    with open(args.script) as fh:
        doc = json.load(fh)
    session = protocol.SwitchSession(
        switch_id=int(doc["switch"]),
        mode=protocol.SDN,
        master=int(doc["master"]),
        backups=tuple(int(b) for b in doc["backups"]),
    )
    events = [
        protocol.Event(rec["kind"], rec.get("controller"))
        for rec in doc["events"]
    ]
    session, log = protocol.run_script(session, events)
    for line in log:
        print(line)
    print(f"final: mode={session.mode} phase={session.phase} master={session.master}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "validate": _cmd_validate,
        "enumerate": _cmd_enumerate,
        "protocol-trace": _cmd_protocol_trace,
    }
    try:
        return handlers[args.command](args)
    except (OSError, ValueError, KeyError, json.JSONDecodeError, BudgetExhausted) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
