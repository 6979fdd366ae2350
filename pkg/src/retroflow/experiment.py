"""Failure-scenario harness: run solvers, score them, emit reports.

Overhead is scored twice per algorithm: raw (propagation only) and
adjusted, where every pull served by an overloaded controller pays a
linear queueing penalty per excess flow. Metrics are also normalized to
the Nearest baseline, matching how the evaluation plots are read.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from . import domains as dm
from .flows import BetaMatrix, FlowSet, compute_beta, generate_flows
from .geo import Topology
from .oscm import OscmInstance, Solution, build_instance, validate
from .solvers import SolverBudget, solve_exact, solve_nearest, solve_retroflow

ALGORITHMS = ("exact", "retroflow", "nearest")


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class QueueModel:
    penalty_ms_per_excess_flow: float = 0.1
    enabled: bool = True

    def __post_init__(self):
        if self.penalty_ms_per_excess_flow < 0:
            raise ValueError("queue penalty must be nonnegative")


def queueing_penalty_ms(load: int, ability: int, m: QueueModel) -> float:
    """Extra per-pull latency at a controller handling `load` flows with
    processing ability `ability`; zero at or under ability."""
    if ability < 0:
        raise ValueError("ability must be nonnegative")
    if not m.enabled or load <= ability:
        return 0.0
    return m.penalty_ms_per_excess_flow * (load - ability)


@dataclass(frozen=True)
class World:
    """Everything a scenario run needs besides the failure itself."""
    topology: Topology
    flows: FlowSet
    beta: BetaMatrix
    placement: dm.Placement

    def loads(self) -> dict[int, int]:
        if self.placement.flow_counts is not None:
            return dict(self.placement.flow_counts)
        return self.beta.loads()


def make_world(topology: Topology, placement: dm.Placement,
               pairs: str = "ordered", alt_path: str = "edge_disjoint") -> World:
    flows = generate_flows(topology, pairs=pairs)
    beta = compute_beta(flows, topology, alt_path=alt_path)
    return World(topology, flows, beta, placement)


def load_diagnostics(world: World) -> dict:
    """Computed per-switch loads next to any fixture-supplied counts.
    Path tie-breaking differs between implementations, so the deltas are
    reported rather than asserted anywhere."""
    computed = world.beta.loads()
    fixture = world.placement.flow_counts
    per_switch = {
        i: {
            "computed": computed[i],
            "fixture": None if fixture is None else fixture.get(i),
        }
        for i in sorted(computed)
    }
    return {
        "per_switch": per_switch,
        "computed_total": sum(computed.values()),
        "fixture_total": None if fixture is None else sum(fixture.values()),
    }


@dataclass(frozen=True)
class AlgorithmOutcome:
    algorithm: str
    status: str  # ok | quota_unmet | infeasible | not_proven
    solution: Solution | None
    programmable_flow_fraction: float | None
    recovered_switch_count: int | None
    raw_overhead: float | None
    adjusted_overhead: float | None
    controller_load: dict[int, int] = field(default_factory=dict)
    controller_ability: dict[int, int] = field(default_factory=dict)
    overloaded: tuple[int, ...] = ()


@dataclass(frozen=True)
class ScenarioReport:
    scenario: dm.FailureScenario
    q_fraction: float
    n_flows: int
    quota: int
    outcomes: tuple[AlgorithmOutcome, ...]

    def outcome(self, algorithm: str) -> AlgorithmOutcome:
        for o in self.outcomes:
            if o.algorithm == algorithm:
                return o
        raise KeyError(algorithm)

    def normalized(self, algorithm: str, metric: str) -> float | None:
        """Metric divided by Nearest's value for the same scenario; None
        when Nearest is absent, zero, or the metric is null."""
        try:
            base = getattr(self.outcome("nearest"), metric)
        except KeyError:
            return None
        value = getattr(self.outcome(algorithm), metric)
        if base is None or value is None or base == 0:
            return None
        return value / base


def run_scenario(world: World, s: dm.FailureScenario, q_fraction: float,
                 algorithms=ALGORITHMS, qm: QueueModel | None = None,
                 budget: SolverBudget | None = None,
                 control_delay: str = "routed") -> ScenarioReport:
    """Build the instance once, run each requested solver, and score it."""
    if not algorithms:
        raise ReportError("at least one algorithm required")
    qm = qm or QueueModel()
    loads = world.loads()
    inst = build_instance(world.topology, world.beta, world.placement, s,
                          q_fraction, loads=loads, control_delay=control_delay)

    own_load = {
        j: sum(loads[sw] for sw in world.placement.domain(j))
        for j in inst.active_controllers
    }
    ability = {j: world.placement.capacity[j] for j in inst.active_controllers}

    outcomes = []
    for name in algorithms:
        if name == "exact":
            result = solve_exact(inst, budget)
            if result.solution is None:
                outcomes.append(AlgorithmOutcome(
                    algorithm=name, status="infeasible", solution=None,
                    programmable_flow_fraction=None, recovered_switch_count=None,
                    raw_overhead=None, adjusted_overhead=None,
                ))
                continue
            sol = result.solution
            status = "ok" if result.status == "optimal" else "not_proven"
        elif name == "retroflow":
            sol = solve_retroflow(inst)
            status = "ok" if sol.quota_met else "quota_unmet"
        elif name == "nearest":
            sol = solve_nearest(inst)
            status = "ok" if sol.quota_met else "quota_unmet"
        else:
            raise ReportError(f"unknown algorithm {name!r}")
        outcomes.append(_score(inst, name, status, sol, own_load, ability, qm))

    return ScenarioReport(
        scenario=s,
        q_fraction=q_fraction,
        n_flows=inst.n_flows,
        quota=inst.q_required,
        outcomes=tuple(outcomes),
    )


def _score(inst: OscmInstance, name: str, status: str, sol: Solution,
           own_load: dict[int, int], ability: dict[int, int], qm: QueueModel) -> AlgorithmOutcome:
    load = dict(own_load)
    for i, j in sol.assigned.items():
        load[j] += inst.g[i]
    overloaded = tuple(j for j in inst.active_controllers if load[j] > ability[j])

    adjusted = 0.0
    for i, j in sol.assigned.items():
        penalty = queueing_penalty_ms(load[j], ability[j], qm)
        adjusted += inst.g[i] * (inst.delay[(i, j)] + penalty)

    fraction = len(sol.y) / inst.n_flows if inst.n_flows else 1.0
    return AlgorithmOutcome(
        algorithm=name,
        status=status,
        solution=sol,
        programmable_flow_fraction=fraction,
        recovered_switch_count=sol.recovered_switches(),
        raw_overhead=sol.objective,
        adjusted_overhead=adjusted,
        controller_load=load,
        controller_ability=dict(ability),
        overloaded=overloaded,
    )


_NORMALIZED_METRICS = (
    "programmable_flow_fraction",
    "recovered_switch_count",
    "raw_overhead",
    "adjusted_overhead",
)

_CSV_COLUMNS = (
    "scenario", "q_fraction", "n_flows", "quota", "algorithm", "status",
    "programmable_flow_fraction", "recovered_switch_count",
    "raw_overhead", "adjusted_overhead",
    "norm_programmable_flow_fraction", "norm_recovered_switch_count",
    "norm_raw_overhead", "norm_adjusted_overhead",
    "overloaded_controllers", "controller_load",
)


def _rows(reports) -> list[dict]:
    rows = []
    for rep in reports:
        for o in rep.outcomes:
            row = {
                "scenario": rep.scenario.label(),
                "q_fraction": rep.q_fraction,
                "n_flows": rep.n_flows,
                "quota": rep.quota,
                "algorithm": o.algorithm,
                "status": o.status,
                "programmable_flow_fraction": o.programmable_flow_fraction,
                "recovered_switch_count": o.recovered_switch_count,
                "raw_overhead": o.raw_overhead,
                "adjusted_overhead": o.adjusted_overhead,
                "overloaded_controllers": ";".join(str(j) for j in o.overloaded),
                "controller_load": ";".join(
                    f"{j}:{o.controller_load[j]}/{o.controller_ability[j]}"
                    for j in sorted(o.controller_load)
                ),
            }
            for metric in _NORMALIZED_METRICS:
                row[f"norm_{metric}"] = rep.normalized(o.algorithm, metric)
            rows.append(row)
    return rows


def emit_report(reports, format: str = "csv") -> str:
    """Render scenario reports as a CSV table or a JSON document, one
    record per (scenario, algorithm), deterministic column order."""
    reports = list(reports)
    if not reports:
        raise ReportError("no scenario reports to emit")
    rows = _rows(reports)
    if format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=_CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
        return buf.getvalue()
    if format == "json":
        doc = {"records": rows, "summary": sweep_summary(reports)}
        return json.dumps(doc, indent=2, sort_keys=True)
    raise ReportError(f"unknown report format {format!r}")


def sweep_summary(reports) -> dict:
    """Aggregates read against the baseline across a sweep, including the
    best overhead reduction each algorithm achieved versus Nearest."""
    summary: dict = {"scenarios": len(reports)}
    for name in ("exact", "retroflow"):
        reductions = []
        feasible = 0
        for rep in reports:
            try:
                o = rep.outcome(name)
                base = rep.outcome("nearest")
            except KeyError:
                continue
            if o.status in ("ok", "not_proven"):
                feasible += 1
            if (o.adjusted_overhead is not None and base.adjusted_overhead
                    and base.adjusted_overhead > 0):
                reductions.append(1.0 - o.adjusted_overhead / base.adjusted_overhead)
        summary[f"{name}_feasible_scenarios"] = feasible
        summary[f"{name}_max_overhead_reduction_vs_nearest"] = (
            max(reductions) if reductions else None
        )
    return summary
