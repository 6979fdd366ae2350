"""Acceptance suite: one test per criterion, one printed verdict line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines.
"""

import random
import time
from pathlib import Path

from retroflow import fixtures
from retroflow.cli import main
from retroflow.domains import enumerate_failure_scenarios
from retroflow.experiment import run_scenario, sweep_summary
from retroflow.oscm import validate
from retroflow.protocol import (LEGACY, MASTER_CONNECTION_LOST, REPLY_ACCEPT,
                                REPLY_REJECT_LEGACY, ADOPT, SDN, STABLE, Event,
                                SwitchSession, reachable_states, run_script)
from retroflow.solvers import (gap_bruteforce, reduce_to_gap, solve_exact,
                               solve_retroflow)

from _oracles import (enumerate_oscm, random_instance,
                      random_gap_special_instance)

GOLDEN_TRACE = Path(__file__).parent / "data" / "toy_recovery_greedy_trace.txt"


def _report(criterion, ok, detail=""):
    verdict = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {criterion}: {verdict} {detail}".rstrip())
    assert ok, f"criterion {criterion}: {detail}"


def test_criterion_1_exact_solver_oracle_equivalence():
    rng = random.Random(2001)
    start = time.monotonic()
    for k in range(200):
        inst = random_instance(rng, n_max=6, m_max=3, g_max=9)
        expected, _ = enumerate_oscm(inst)
        result = solve_exact(inst)
        if expected is None:
            assert result.status == "infeasible", f"instance {k}: expected infeasible"
        else:
            assert result.status == "optimal", f"instance {k}: not proven"
            assert result.solution.objective == expected, (
                f"instance {k}: {result.solution.objective} != {expected}"
            )
    elapsed = time.monotonic() - start
    _report("1 exact-vs-enumeration", elapsed < 30.0,
            f"(200 instances, {elapsed:.2f}s)")


def test_criterion_2_gap_reduction_equivalence():
    rng = random.Random(2002)
    start = time.monotonic()
    for k in range(100):
        inst = random_gap_special_instance(rng, n_max=6, m_max=3)
        gap = reduce_to_gap(inst)
        assert gap is not None, f"instance {k}: reduction refused"
        expected = gap_bruteforce(gap)
        result = solve_exact(inst)
        if expected is None:
            assert result.status == "infeasible", f"instance {k}"
        else:
            assert result.solution.objective == expected, f"instance {k}"
    elapsed = time.monotonic() - start
    _report("2 gap-reduction", elapsed < 10.0, f"(100 instances, {elapsed:.2f}s)")


def test_criterion_3_greedy_trace_fidelity():
    inst = fixtures.toy_recovery_instance()
    trace = []
    solve_retroflow(inst, trace=trace)
    golden = GOLDEN_TRACE.read_text().strip().split("\n")
    assert len(trace) == len(golden), f"{len(trace)} lines vs {len(golden)}"
    for got, want in zip(trace, golden):
        assert got == want, f"trace line {got!r} != golden {want!r}"
    _report("3 greedy-trace", True, f"({len(golden)} lines match)")


def test_criterion_4_feasibility_soundness(att_world):
    placement = att_world.placement
    scenarios = (enumerate_failure_scenarios(placement, 1)
                 + enumerate_failure_scenarios(placement, 2))
    assert len(scenarios) == 21
    checked = 0
    for q in (1.0, 0.9):
        for s in scenarios:
            rep = run_scenario(att_world, s, q)
            for name in ("exact", "retroflow"):
                o = rep.outcome(name)
                if o.solution is None:
                    continue  # infeasible verdicts carry no solution to check
                report = validate(_instance_for(att_world, s, q), o.solution)
                assert report.check("mapping").passed, (s.label(), name)
                assert report.check("capacity").passed, (s.label(), name)
                assert report.check("programmability").passed, (s.label(), name)
                if o.solution.quota_met:
                    assert report.check("quota").passed, (s.label(), name)
                for j, load in o.controller_load.items():
                    assert load <= 500, (s.label(), name, j, load)
                checked += 1
    _report("4 feasibility-soundness", True,
            f"({checked} solutions across 21 scenarios x 2 quotas)")


def _instance_for(world, s, q):
    from retroflow.oscm import build_instance
    return build_instance(world.topology, world.beta, world.placement, s, q)


def test_criterion_5_single_failure_recovery(att_world):
    overloads = []
    for s in enumerate_failure_scenarios(att_world.placement, 1):
        rep = run_scenario(att_world, s, 1.0)
        assert rep.outcome("exact").programmable_flow_fraction == 1.0, s.label()
        assert rep.outcome("retroflow").programmable_flow_fraction == 1.0, s.label()
        assert rep.outcome("nearest").overloaded, f"{s.label()}: no overload"
        overloads.append(rep.outcome("nearest").overloaded)
    _report("5 single-failure-recovery", True,
            f"(6 scenarios; nearest overloads {[list(o) for o in overloads]})")


def test_criterion_6_double_failure_infeasibility(att_world):
    placement = att_world.placement
    scenarios = enumerate_failure_scenarios(placement, 2)

    witness = None
    feasible_at_full = 0
    for s in scenarios:
        rep = run_scenario(att_world, s, 1.0)
        exact = rep.outcome("exact")
        greedy = rep.outcome("retroflow")
        if exact.status in ("ok", "not_proven"):
            feasible_at_full += 1
        elif greedy.solution is not None and 0 < len(greedy.solution.y) < rep.quota:
            witness = witness or s.label()
    assert witness is not None, "no scenario with infeasible exact + partial greedy"

    feasible_at_90 = 0
    for s in scenarios:
        rep = run_scenario(att_world, s, 0.9)
        if rep.outcome("exact").status in ("ok", "not_proven"):
            feasible_at_90 += 1
    assert feasible_at_90 > feasible_at_full, (feasible_at_90, feasible_at_full)
    _report("6 double-failure-infeasibility", True,
            f"(witness {witness}; feasible {feasible_at_full}/15 at q=1.0, "
            f"{feasible_at_90}/15 at q=0.9; published run reports 12/15)")


def test_criterion_7_overhead_dominance(att_world):
    placement = att_world.placement
    compared = 0
    for q in (1.0, 0.9):
        reports = []
        for k in (1, 2):
            for s in enumerate_failure_scenarios(placement, k):
                rep = run_scenario(att_world, s, q)
                reports.append(rep)
                exact = rep.outcome("exact")
                greedy = rep.outcome("retroflow")
                nearest = rep.outcome("nearest")
                if exact.solution is None or not greedy.solution.quota_met:
                    continue
                compared += 1
                assert exact.raw_overhead <= greedy.raw_overhead, (s.label(), q)
                if nearest.overloaded:
                    assert greedy.raw_overhead <= nearest.adjusted_overhead, (s.label(), q)
        summary = sweep_summary(reports)
        print(f"  sweep q={q}: max overhead reduction vs nearest: "
              f"exact {summary['exact_max_overhead_reduction_vs_nearest']:.3f}, "
              f"retroflow {summary['retroflow_max_overhead_reduction_vs_nearest']:.3f}")
    _report("7 overhead-dominance", compared > 0, f"({compared} comparisons)")


def test_criterion_8_protocol_safety():
    start = time.monotonic()
    initial = SwitchSession(switch_id=1, mode=SDN, master=1, backups=(2, 3))
    alphabet = [
        Event(MASTER_CONNECTION_LOST),
        Event(REPLY_REJECT_LEGACY, 2), Event(REPLY_REJECT_LEGACY, 3),
        Event(REPLY_ACCEPT, 2), Event(REPLY_ACCEPT, 3),
        Event(ADOPT, 1), Event(ADOPT, 2), Event(ADOPT, 3),
    ]
    states = reachable_states(initial, alphabet, max_depth=6)
    for s in states:
        s.check_invariants()

    script = fixtures.master_loss_script()
    session = SwitchSession(switch_id=script["switch"], mode=SDN,
                            master=script["master"],
                            backups=tuple(script["backups"]))
    events = [Event(e["kind"], e.get("controller")) for e in script["events"]]
    final, _ = run_script(session, events)
    assert final.mode == LEGACY and final.phase == STABLE
    elapsed = time.monotonic() - start
    _report("8 protocol-safety", elapsed < 1.0,
            f"({len(states)} states, walkthrough ends legacy, {elapsed:.3f}s)")


def test_criterion_9_run_determinism(tmp_path):
    topo = fixtures.data_path("att25.json")
    placement = fixtures.data_path("att_table2.json")
    outputs = []
    for name in ("first.csv", "second.csv"):
        out = tmp_path / name
        code = main(["run", "--topology", topo, "--placement", placement,
                     "--failures", "2", "--q-fraction", "0.9",
                     "--format", "csv", "--out", str(out)])
        assert code == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    _report("9 determinism", True, f"({len(outputs[0])} byte reports identical)")
