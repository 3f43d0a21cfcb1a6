"""Jumping abstract machine: the interaction machine with jumps instead of backtracking.

Logged positions are global here: they record the absolute variable position
and share the whole log (extending a log never copies it, so saving one is a
pointer copy).  A jump restores position and log from the head log entry in a
single transition, replacing an entire backtracking phase.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import tokens as tk
from .liam import DOWN, UP
from .reporting import FINAL, FuelExhausted, Next, Stuck, StuckError, drive
from .syntax import ARG, BODY, FUN, DEFAULT_FUEL, App, Lam, TermIndex

MACHINE = "jam"

UP_LABELS = ("p3", "p4", "arg", "jmp")


@dataclass(frozen=True, eq=False)
class JamState:
    pos: tuple
    tape: Optional[tk.Cell]
    log: Optional[tk.Cell]
    dir: str


def initial(index: TermIndex) -> JamState:
    return JamState((), tk.nil, tk.nil, DOWN)


def step(index: TermIndex, s: JamState):
    if s.dir == DOWN:
        node = index.node_at[s.pos]
        if isinstance(node, App):
            return Next("p1", JamState(s.pos + (FUN,), tk.cons(tk.MARKER, s.tape), s.log, DOWN))
        if isinstance(node, Lam):
            if s.tape is None:
                return FINAL
            if isinstance(s.tape.head, tk.Marker):
                return Next("p2", JamState(s.pos + (BODY,), s.tape.tail, s.log, DOWN))
            return Stuck("down state with a logged position on the tape")
        binder, inner = index.binder_at[s.pos]
        lp = tk.LoggedPosition(s.pos, (), tk.GLOBAL, s.log)  # shares the whole log
        return Next(
            "var",
            JamState(binder, tk.cons(lp, s.tape), tk.drop(s.log, inner), UP),
            cost=inner,
        )
    if not s.pos:
        return Stuck("up state at the root of a closed term")
    parent = s.pos[:-1]
    last = s.pos[-1]
    if last == FUN:
        if s.tape is None:
            return Stuck("up state in function position with empty tape")
        item = s.tape.head
        if isinstance(item, tk.Marker):
            return Next("p3", JamState(parent, s.tape.tail, s.log, UP))
        return Next("arg", JamState(parent + (ARG,), s.tape.tail, tk.cons(item, s.log), DOWN))
    if last == BODY:
        return Next("p4", JamState(parent, tk.cons(tk.MARKER, s.tape), s.log, UP))
    if s.log is None:
        return Stuck("up state in argument position with empty log")
    p = s.log.head
    return Next("jmp", JamState(p.var_path, s.tape, p.log, UP))


def depth_of(item) -> int:
    """Depth of a tape, log, or logged position: nesting of the head entry."""
    if item is None:
        return 0
    if isinstance(item, tk.Cell):
        for x in tk.iterate(item):
            if not isinstance(x, tk.Marker):
                return depth_of(x)
        return 0
    return 1 + depth_of(item.log)


def depth(s: JamState) -> int:
    return depth_of(s.tape) if s.dir == UP else depth_of(s.log)


def snapshot(index: TermIndex, s: JamState) -> dict:
    return {"tape": tk.tape_to_json(s.tape), "log": tk.log_to_json(s.log)}


def state_footprint(s: JamState) -> tk.SpaceFootprint:
    return tk.footprint(s.log, s.tape)


def state_key(index: TermIndex, s: JamState):
    return (s.pos, s.dir, str(tk.tape_to_json(s.tape)), str(tk.log_to_json(s.log)))


def state_eq(a: JamState, b: JamState, memo: dict) -> bool:
    return (
        a.pos == b.pos
        and a.dir == b.dir
        and tk.tape_equal(a.tape, b.tape, memo)
        and tk.log_equal(a.log, b.log, memo)
    )


def _check_lp(index: TermIndex, lp: tk.LoggedPosition, verified: set):
    if lp in verified:
        return
    assert lp.flavor == tk.GLOBAL, "jumping machine carries global logged positions"
    assert lp.scope_path == (), "global logged positions are rooted at the top"
    assert tk.length(lp.log) == index.level_at[lp.var_path], (
        "global logged position stores a log shorter than its level"
    )
    for nested in tk.iterate(lp.log):
        _check_lp(index, nested, verified)
    verified.add(lp)


def _depth_memo(item, memo: dict) -> int:
    """depth_of with sharing-aware caching; logs nest deeply but are DAGs."""
    if item is None:
        return 0
    if isinstance(item, tk.Cell):
        for x in tk.iterate(item):
            if not isinstance(x, tk.Marker):
                return _depth_memo(x, memo)
        return 0
    hit = memo.get(item)
    if hit is None:
        hit = 1 + _depth_memo(item.log, memo)
        memo[item] = hit
    return hit


def check_invariants(index: TermIndex, s: JamState, per_label=None, ctx: dict = None):
    if ctx is None:
        ctx = {"verified": set(), "depths": {}}
    verified = ctx["verified"]
    depths = ctx["depths"]
    assert tk.length(s.log) == index.level_at[s.pos], "log length differs from context level"
    lp_on_tape = sum(1 for item in tk.iterate(s.tape) if not isinstance(item, tk.Marker))
    if s.dir == DOWN:
        assert lp_on_tape == 0, "down state with logged positions on the tape"
    else:
        assert lp_on_tape == 1, "up state without exactly one logged position on the tape"
    for item in tk.iterate(s.tape):
        if not isinstance(item, tk.Marker):
            _check_lp(index, item, verified)
    for lp in tk.iterate(s.log):
        _check_lp(index, lp, verified)
    if per_label is not None:
        var_count = per_label.get("var", 0)
        d = _depth_memo(s.tape if s.dir == UP else s.log, depths)
        assert d == var_count, "state depth differs from the var-transition count"
        for item in tk.iterate(s.tape):
            if not isinstance(item, tk.Marker):
                assert d >= _depth_memo(item, depths)
        for lp in tk.iterate(s.log):
            assert d >= _depth_memo(lp, depths)


def run(term_or_index, fuel: int = DEFAULT_FUEL, trace: bool = False, debug: bool = False,
        allow_fuel: bool = False):
    index = term_or_index if isinstance(term_or_index, TermIndex) else TermIndex(term_or_index)
    if debug:
        ctx = {"verified": set(), "depths": {}}
        check = lambda s, n, c: check_invariants(index, s, c, ctx)  # noqa: E731
    else:
        check = None
    report = drive(
        MACHINE,
        index,
        initial(index),
        step,
        snapshot,
        state_footprint,
        lambda s: s.dir,
        lambda s: s.pos,
        fuel,
        trace=trace,
        check_fn=check,
    )
    if report.outcome == "fuel" and not allow_fuel:
        raise FuelExhausted(fuel)
    report.up_length = sum(report.per_label.get(lbl, 0) for lbl in UP_LABELS)
    return report


def trajectory(index: TermIndex, fuel: int = DEFAULT_FUEL):
    s = initial(index)
    yield None, s
    for _ in range(fuel):
        result = step(index, s)
        if isinstance(result, Stuck):
            raise StuckError(result.reason)
        if not isinstance(result, Next):
            return
        s = result.state
        yield result.label, s
    result = step(index, s)
    if isinstance(result, Next):
        raise FuelExhausted(fuel)
