"""Flow population and per-switch programmability.

A switch can reprogram a flow when it sits on the flow's path, is not the
flow's destination, and keeps an alternative route to that destination.
Per-switch load counts exactly those reprogrammable flows.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .geo import Path, Topology, has_alternative_path, shortest_path


@dataclass(frozen=True)
class Flow:
    flow_id: int
    src: int
    dst: int
    path: Path

    def __post_init__(self):
        if self.src == self.dst:
            raise ValueError(f"flow {self.flow_id}: src equals dst")
        if self.path.node_ids[0] != self.src or self.path.node_ids[-1] != self.dst:
            raise ValueError(f"flow {self.flow_id}: path does not join src to dst")


class FlowSet:
    def __init__(self, flows):
        self.flows: tuple[Flow, ...] = tuple(flows)
        self._by_id = {f.flow_id: f for f in self.flows}
        if len(self._by_id) != len(self.flows):
            raise ValueError("duplicate flow ids")

    def __len__(self):
        return len(self.flows)

    def __iter__(self):
        return iter(self.flows)

    def flow(self, flow_id: int) -> Flow:
        return self._by_id[flow_id]


class BetaMatrix:
    """Programmability indicators and the per-switch loads they induce."""

    def __init__(self, rows: dict[int, frozenset[int]], switch_ids):
        self._rows = {i: frozenset(rows.get(i, frozenset())) for i in switch_ids}

    def beta(self, switch_id: int, flow_id: int) -> int:
        return 1 if flow_id in self.flows_at(switch_id) else 0

    def flows_at(self, switch_id: int) -> frozenset[int]:
        try:
            return self._rows[switch_id]
        except KeyError:
            raise KeyError(f"unknown switch {switch_id}") from None

    def load(self, switch_id: int) -> int:
        return len(self.flows_at(switch_id))

    def switch_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self._rows))

    def loads(self) -> dict[int, int]:
        return {i: len(fls) for i, fls in self._rows.items()}


def generate_flows(t: Topology, pairs: str = "ordered", metric: str = "delay") -> FlowSet:
    """One flow per node pair on its shortest path.

    pairs='ordered' (default) builds src->dst for every ordered pair, so a
    topology with n nodes yields n*(n-1) flows; 'unordered' keeps only
    src < dst. Flow ids follow (src, dst) lexicographic order from 0.
    """
    if pairs not in ("ordered", "unordered"):
        raise ValueError(f"unknown pair mode {pairs!r}")
    ids = t.node_ids()
    flows = []
    fid = 0
    for src in ids:
        for dst in ids:
            if src == dst or (pairs == "unordered" and src > dst):
                continue
            flows.append(Flow(fid, src, dst, shortest_path(t, src, dst, metric=metric)))
            fid += 1
    return FlowSet(flows)


def compute_beta(flows: FlowSet, t: Topology, alt_path: str = "edge_disjoint") -> BetaMatrix:
    """Indicator per (switch, flow): on the path, not the destination, and
    with an alternative route to the destination."""
    alt_cache: dict[tuple[int, int], bool] = {}

    def alt(i: int, dst: int) -> bool:
        key = (i, dst)
        if key not in alt_cache:
            alt_cache[key] = has_alternative_path(t, i, dst, mode=alt_path)
        return alt_cache[key]

    rows: dict[int, set[int]] = {i: set() for i in t.node_ids()}
    for f in flows:
        for i in f.path.node_ids[:-1]:
            if alt(i, f.dst):
                rows[i].add(f.flow_id)
    return BetaMatrix({i: frozenset(s) for i, s in rows.items()}, t.node_ids())


def switch_flow_load(b: BetaMatrix, switch_id: int) -> int:
    return b.load(switch_id)


def flows_to_csv(flows: FlowSet) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["flow_id", "src", "dst", "path"])
    for f in flows:
        writer.writerow([f.flow_id, f.src, f.dst, " ".join(str(n) for n in f.path.node_ids)])
    return buf.getvalue()


def beta_to_csv(b: BetaMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["switch_id", "flow_id"])
    for i in b.switch_ids():
        for l in sorted(b.flows_at(i)):
            writer.writerow([i, l])
    return buf.getvalue()
