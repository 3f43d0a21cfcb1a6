"""Interaction abstract machine on lambda terms: a bi-deterministic token machine.

The token is a log (one logged position per enclosing argument) plus a tape of
markers and logged positions.  Down states query the head variable of the
focused subterm, up states query the argument of an abstraction.  Backtracking
(bt1 .. bt2) re-finds the variable occurrence a subterm was virtually
substituted for; it is flagged ``bt`` in snapshots for readability only.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import tokens as tk
from .reporting import FINAL, FuelExhausted, Next, Stuck, StuckError, drive
from .syntax import ARG, BODY, FUN, DEFAULT_FUEL, App, Lam, TermIndex, Var

DOWN = "down"
UP = "up"

MACHINE = "iam"


@dataclass(frozen=True, eq=False)
class IamState:
    pos: tuple
    tape: Optional[tk.Cell]
    log: Optional[tk.Cell]
    dir: str


def initial(index: TermIndex) -> IamState:
    return IamState((), tk.nil, tk.nil, DOWN)


def step(index: TermIndex, s: IamState):
    if s.dir == DOWN:
        node = index.node_at[s.pos]
        if isinstance(node, App):
            return Next("p1", IamState(s.pos + (FUN,), tk.cons(tk.MARKER, s.tape), s.log, DOWN))
        if isinstance(node, Lam):
            if s.tape is None:
                return FINAL
            item = s.tape.head
            if isinstance(item, tk.Marker):
                return Next("p2", IamState(s.pos + (BODY,), s.tape.tail, s.log, DOWN))
            if item.scope_path == s.pos:
                return Next(
                    "bt2",
                    IamState(item.var_path, s.tape.tail, tk.concat(item.log, s.log), UP),
                )
            return Stuck("logged position on tape does not match the focused abstraction")
        binder, inner = index.binder_at[s.pos]
        lp = tk.LoggedPosition(s.pos, binder, tk.LOCAL, tk.take(s.log, inner))
        return Next(
            "var",
            IamState(binder, tk.cons(lp, s.tape), tk.drop(s.log, inner), UP),
            cost=inner,
        )
    # up phase
    if not s.pos:
        return Stuck("up state at the root of a closed term")
    parent = s.pos[:-1]
    last = s.pos[-1]
    if last == FUN:
        if s.tape is None:
            return Stuck("up state in function position with empty tape")
        item = s.tape.head
        if isinstance(item, tk.Marker):
            return Next("p3", IamState(parent, s.tape.tail, s.log, UP))
        return Next("arg", IamState(parent + (ARG,), s.tape.tail, tk.cons(item, s.log), DOWN))
    if last == BODY:
        return Next("p4", IamState(parent, tk.cons(tk.MARKER, s.tape), s.log, UP))
    # argument position: backtrack to the logged position on top of the log
    if s.log is None:
        return Stuck("up state in argument position with empty log")
    p = s.log.head
    return Next("bt1", IamState(parent + (FUN,), tk.cons(p, s.tape), s.log.tail, DOWN))


def step_back(index: TermIndex, s: IamState):
    """Inverse transition; defined exactly on non-initial reachable states."""
    if s.dir == DOWN:
        if not s.pos:
            return None  # initial state
        parent = s.pos[:-1]
        last = s.pos[-1]
        if last == FUN:
            if s.tape is None:
                return None
            item = s.tape.head
            if isinstance(item, tk.Marker):
                return "p1", IamState(parent, s.tape.tail, s.log, DOWN)
            return "bt1", IamState(parent + (ARG,), s.tape.tail, tk.cons(item, s.log), UP)
        if last == BODY:
            return "p2", IamState(parent, tk.cons(tk.MARKER, s.tape), s.log, DOWN)
        if s.log is None:
            return None
        return "arg", IamState(parent + (FUN,), tk.cons(s.log.head, s.tape), s.log.tail, UP)
    node = index.node_at[s.pos]
    if isinstance(node, Lam):
        if s.tape is None:
            return None
        item = s.tape.head
        if isinstance(item, tk.Marker):
            return "p4", IamState(s.pos + (BODY,), s.tape.tail, s.log, UP)
        if item.scope_path == s.pos:
            return "var", IamState(
                item.var_path, s.tape.tail, tk.concat(item.log, s.log), DOWN
            )
        return None
    if isinstance(node, Var):
        binder, inner = index.binder_at[s.pos]
        lp = tk.LoggedPosition(s.pos, binder, tk.LOCAL, tk.take(s.log, inner))
        return "bt2", IamState(binder, tk.cons(lp, s.tape), tk.drop(s.log, inner), DOWN)
    if isinstance(node, App):
        return "p3", IamState(s.pos + (FUN,), tk.cons(tk.MARKER, s.tape), s.log, UP)
    return None


def is_backtracking(s: IamState) -> bool:
    return s.dir == DOWN and s.tape is not None and not isinstance(s.tape.head, tk.Marker)


def snapshot(index: TermIndex, s: IamState) -> dict:
    return {
        "tape": tk.tape_to_json(s.tape),
        "log": tk.log_to_json(s.log),
        "bt": is_backtracking(s),
    }


def state_footprint(s: IamState) -> tk.SpaceFootprint:
    return tk.footprint(s.log, s.tape)


def state_key(index: TermIndex, s: IamState):
    return (s.pos, s.dir, str(tk.tape_to_json(s.tape)), str(tk.log_to_json(s.log)))


def state_eq(a: IamState, b: IamState, memo: dict) -> bool:
    return (
        a.pos == b.pos
        and a.dir == b.dir
        and tk.tape_equal(a.tape, b.tape, memo)
        and tk.log_equal(a.log, b.log, memo)
    )


def _check_lp(index: TermIndex, lp: tk.LoggedPosition, verified: set):
    if lp in verified:  # immutable, so one check per object suffices
        return
    assert lp.flavor == tk.LOCAL, "interaction machine carries local logged positions"
    binder, inner = index.binder_at[lp.var_path]
    assert binder == lp.scope_path, "logged position scope is not the binder"
    assert tk.length(lp.log) == inner, "logged position log length differs from its inner level"
    for nested in tk.iterate(lp.log):
        _check_lp(index, nested, verified)
    verified.add(lp)


def check_invariants(index: TermIndex, s: IamState, verified: set = None):
    """Position-and-log plus tape-and-direction invariants, checked recursively."""
    if verified is None:
        verified = set()
    assert tk.length(s.log) == index.level_at[s.pos], "log length differs from context level"
    lp_on_tape = sum(1 for item in tk.iterate(s.tape) if not isinstance(item, tk.Marker))
    expected = DOWN if lp_on_tape % 2 == 0 else UP
    assert s.dir == expected, "direction does not match tape parity"
    for item in tk.iterate(s.tape):
        if not isinstance(item, tk.Marker):
            _check_lp(index, item, verified)
    for lp in tk.iterate(s.log):
        _check_lp(index, lp, verified)


def run(term_or_index, fuel: int = DEFAULT_FUEL, trace: bool = False, debug: bool = False,
        allow_fuel: bool = False):
    index = term_or_index if isinstance(term_or_index, TermIndex) else TermIndex(term_or_index)
    if debug:
        verified: set = set()
        check = lambda s, n, c: check_invariants(index, s, verified)  # noqa: E731
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
    return report


def trajectory(index: TermIndex, fuel: int = DEFAULT_FUEL):
    """Yield ``(label, state)`` pairs starting with ``(None, initial)``; ends at final."""
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
