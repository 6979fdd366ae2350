import math

import pytest

from retroflow.domains import (FailureScenario, Placement, PlacementError,
                               enumerate_failure_scenarios, load_placement,
                               residual_capacity)


class TestLoadPlacement:
    def test_table_fixture(self, att_placement):
        assert att_placement.controller_ids == (2, 5, 6, 13, 20, 22)
        assert att_placement.domain_of[9] == 2
        assert all(cap == 500 for cap in att_placement.capacity.values())
        assert att_placement.flow_counts[13] == 225

    def test_missing_switch(self, att_topology):
        doc = {
            "capacity": 10,
            "controllers": [
                {"node": 2, "switches": [i for i in range(25) if i != 7]},
            ],
        }
        with pytest.raises(PlacementError, match="switch 7 unassigned"):
            load_placement(doc, att_topology)

    def test_single_controller_covers_all(self, att_topology):
        doc = {
            "capacity": 10_000,
            "controllers": [{"node": 0, "switches": list(range(25))}],
        }
        p = load_placement(doc, att_topology)
        assert p.controller_ids == (0,)
        assert p.domain(0) == tuple(range(25))

    def test_duplicate_assignment(self, att_topology):
        doc = {
            "capacity": 10,
            "controllers": [
                {"node": 0, "switches": list(range(25))},
                {"node": 1, "switches": [3]},
            ],
        }
        with pytest.raises(PlacementError, match="assigned twice"):
            load_placement(doc, att_topology)

    def test_unknown_node(self, att_topology):
        doc = {"capacity": 10, "controllers": [{"node": 99, "switches": [0]}]}
        with pytest.raises(PlacementError, match="not in topology"):
            load_placement(doc, att_topology)


class TestResidualCapacity:
    def test_published_residual_for_c2(self, att_placement):
        scenario = FailureScenario(frozenset({20}))
        rest = residual_capacity(att_placement, att_placement.flow_counts, scenario)
        # 500 - (127 + 71 + 121 + 57)
        assert rest.a_rest[2] == 124

    def test_empty_domain(self):
        p = Placement([(0, 500), (1, 500)], {0: 0, 1: 0}, {0: 10, 1: 20})
        rest = residual_capacity(p, p.flow_counts, FailureScenario(frozenset({0})))
        assert rest.a_rest[1] == 500

    def test_c13_uses_computed_arithmetic(self, att_placement):
        # the narrative quotes 23 for this controller; Table-2 arithmetic
        # gives 13 and the harness sticks to the computed value
        scenario = FailureScenario(frozenset({20}))
        rest = residual_capacity(att_placement, att_placement.flow_counts, scenario)
        assert rest.a_rest[13] == 500 - 487 == 13
        assert rest.a_rest[22] == 34

    def test_overfull_domain_rejected(self):
        p = Placement([(0, 5), (1, 500)], {0: 0, 2: 0, 1: 1}, {0: 3, 1: 0, 2: 4})
        with pytest.raises(PlacementError, match="exceeds capacity"):
            residual_capacity(p, p.flow_counts, FailureScenario(frozenset({1})))

    def test_consumed_equals_surviving_domain_load(self, att_placement):
        loads = att_placement.flow_counts
        for k in (1, 2):
            for s in enumerate_failure_scenarios(att_placement, k):
                rest = residual_capacity(att_placement, loads, s)
                consumed = sum(
                    att_placement.capacity[j] - rest.a_rest[j] for j in rest.a_rest
                )
                surviving = sum(
                    loads[sw] for sw, cid in att_placement.domain_of.items()
                    if cid not in s.failed
                )
                assert consumed == surviving


class TestEnumerateScenarios:
    def test_single_failures(self, att_placement):
        scenarios = enumerate_failure_scenarios(att_placement, 1)
        assert len(scenarios) == 6
        assert scenarios[0].failed == frozenset({2})

    def test_double_failures(self, att_placement):
        assert len(enumerate_failure_scenarios(att_placement, 2)) == 15

    def test_all_fail_rejected(self, att_placement):
        with pytest.raises(PlacementError, match="out of range"):
            enumerate_failure_scenarios(att_placement, 6)

    def test_binomial_counts_exhaustive(self):
        for m in range(2, 9):
            p = Placement([(i, 1) for i in range(m)], {i: i for i in range(m)})
            for k in range(1, m):
                got = enumerate_failure_scenarios(p, k)
                assert len(got) == math.comb(m, k)
                assert len(set(s.failed for s in got)) == len(got)

    def test_lexicographic_order(self, att_placement):
        labels = [s.label() for s in enumerate_failure_scenarios(att_placement, 2)]
        assert labels[:3] == ["C2+C5", "C2+C6", "C2+C13"]
        assert labels == sorted(labels, key=lambda x: [int(c[1:]) for c in x.split("+")])
