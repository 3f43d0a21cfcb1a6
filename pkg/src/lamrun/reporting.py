"""Trace events, run reports, and the shared run loop driving every machine."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .syntax import path_str, pretty, resolve
from .tokens import SpaceFootprint


@dataclass(frozen=True)
class Next:
    label: str
    state: object
    cost: int = 1


@dataclass(frozen=True)
class Final:
    pass


@dataclass(frozen=True)
class Stuck:
    reason: str


FINAL = Final()


class StuckError(Exception):
    pass


class FuelExhausted(Exception):
    def __init__(self, fuel: int):
        super().__init__(f"machine did not reach a final state within {fuel} steps")
        self.fuel = fuel


@dataclass(frozen=True)
class TraceEvent:
    step: int
    machine: str
    label: str
    dir: str
    subterm_path: str
    subterm_pretty: str
    token: dict
    cost: int
    footprint: SpaceFootprint

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "machine": self.machine,
            "label": self.label,
            "dir": self.dir,
            "path": self.subterm_path,
            "subterm": self.subterm_pretty,
            "token": self.token,
            "cost": self.cost,
            "footprint": {
                "lp": self.footprint.lp_count,
                "markers": self.footprint.marker_count,
                "deepCells": self.footprint.deep_cells,
            },
        }


@dataclass
class RunReport:
    machine: str
    term: str
    outcome: str  # "final" or "fuel"
    length: int
    per_label: dict
    var_cost_sum: int
    ram_cost_bound: int
    peak: SpaceFootprint
    peak_marker_lp: int
    beta_count: Optional[int] = None
    up_length: Optional[int] = None
    events: Optional[tuple] = None
    final_state: object = None

    def to_json(self) -> dict:
        out = {
            "machine": self.machine,
            "term": self.term,
            "outcome": self.outcome,
            "length": self.length,
            "perLabel": dict(self.per_label),
            "varCostSum": self.var_cost_sum,
            "ramCostBound": self.ram_cost_bound,
            "peakFootprint": {
                "lp": self.peak.lp_count,
                "markers": self.peak.marker_count,
                "deepCells": self.peak.deep_cells,
            },
            "peakMarkerLp": self.peak_marker_lp,
        }
        if self.beta_count is not None:
            out["betaCount"] = self.beta_count
        if self.up_length is not None:
            out["upLength"] = self.up_length
        return out


def drive(
    machine: str,
    index,
    state,
    step_fn: Callable,
    snapshot_fn: Callable,
    footprint_fn: Callable,
    state_dir_fn: Callable,
    state_pos_fn: Callable,
    fuel: int,
    trace: bool = False,
    check_fn: Optional[Callable] = None,
    var_labels=("var",),
):
    """Iterate ``step_fn`` from ``state``; aggregate counters, peaks, optional trace.

    Returns the report in all cases; ``outcome`` says whether a final state was
    reached.  ``check_fn`` (debug mode) is called on every reached state and may
    raise.  The footprint is sampled at every state, including the initial one,
    since peaks occur mid-run.
    """
    per_label: dict = {}
    events: Optional[list] = [] if trace else None
    var_cost = 0
    peak_lp = peak_markers = peak_cells = 0
    peak_marker_lp = 0
    steps = 0

    def sample(s):
        nonlocal peak_lp, peak_markers, peak_cells, peak_marker_lp
        fp = footprint_fn(s)
        peak_lp = max(peak_lp, fp.lp_count)
        peak_cells = max(peak_cells, fp.deep_cells)
        if fp.marker_count > peak_markers:
            peak_markers = fp.marker_count
            peak_marker_lp = fp.lp_count
        elif fp.marker_count == peak_markers:
            peak_marker_lp = max(peak_marker_lp, fp.lp_count)
        return fp

    def record(label, cost, s, fp):
        pos = state_pos_fn(s)
        events.append(
            TraceEvent(
                step=len(events),
                machine=machine,
                label=label,
                dir=state_dir_fn(s),
                subterm_path=path_str(pos),
                subterm_pretty=pretty(resolve(index.root, pos)[0]),
                token=snapshot_fn(index, s),
                cost=cost,
                footprint=fp,
            )
        )

    if check_fn is not None:
        check_fn(state, steps, per_label)
    fp = sample(state)
    if trace:
        record("init", 0, state, fp)

    outcome = "fuel"
    while True:
        result = step_fn(index, state)
        if isinstance(result, Final):
            outcome = "final"
            break
        if isinstance(result, Stuck):
            raise StuckError(f"{machine} stuck: {result.reason}")
        if steps >= fuel:
            break
        state = result.state
        steps += 1
        per_label[result.label] = per_label.get(result.label, 0) + 1
        if result.label in var_labels:
            var_cost += result.cost
        if check_fn is not None:
            check_fn(state, steps, per_label)
        fp = sample(state)
        if trace:
            record(result.label, result.cost, state, fp)

    var_count = sum(per_label.get(lbl, 0) for lbl in var_labels)
    return RunReport(
        machine=machine,
        term=pretty(index.root),
        outcome=outcome,
        length=steps,
        per_label=per_label,
        var_cost_sum=var_cost,
        ram_cost_bound=(steps - var_count) + var_count * index.size,
        peak=SpaceFootprint(peak_lp, peak_markers, peak_cells),
        peak_marker_lp=peak_marker_lp,
        events=tuple(events) if trace else None,
        final_state=state,
    )
