"""Hopping abstract machine: the jumping machine and the Krivine machine entangled.

Every marker of the jumping machine is upgraded to a logged closure (argument
position + environment + log) and every logged position to a closed position
(position + log + environment), so a single state carries both machines' data.
The variable transition is resolved by a run-wide mode: J queries the argument
through an up phase, K hops straight to it through the environment.  Mixed
modes are rejected; no theorem covers them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import tokens as tk
from .liam import DOWN, UP
from .reporting import FINAL, FuelExhausted, Next, Stuck, StuckError, drive
from .syntax import ARG, BODY, FUN, DEFAULT_FUEL, App, Lam, TermIndex, path_str

J_MODE = "j"
K_MODE = "k"

UP_LABELS = ("p3", "p4", "arg", "jmp")


@dataclass(frozen=True, eq=False)
class LoggedClosure:
    pos: tuple
    env: Optional[tk.Cell]  # list of LoggedClosure
    log: Optional[tk.Cell]  # list of ClosedPosition


@dataclass(frozen=True, eq=False)
class ClosedPosition:
    pos: tuple
    log: Optional[tk.Cell]
    env: Optional[tk.Cell]


@dataclass(frozen=True, eq=False)
class HamState:
    pos: tuple
    log: Optional[tk.Cell]
    env: Optional[tk.Cell]
    tape: Optional[tk.Cell]  # LoggedClosure / ClosedPosition items
    dir: str


def initial(index: TermIndex) -> HamState:
    return HamState((), tk.nil, tk.nil, tk.nil, DOWN)


def step_mode(index: TermIndex, s: HamState, mode: str):
    if s.dir == DOWN:
        node = index.node_at[s.pos]
        if isinstance(node, App):
            lc = LoggedClosure(s.pos + (ARG,), s.env, s.log)
            return Next("p1_app", HamState(s.pos + (FUN,), s.log, s.env,
                                           tk.cons(lc, s.tape), DOWN))
        if isinstance(node, Lam):
            if s.tape is None:
                return FINAL
            item = s.tape.head
            if isinstance(item, LoggedClosure):
                return Next("p2_abs", HamState(s.pos + (BODY,), s.log,
                                               tk.cons(item, s.env), s.tape.tail, DOWN))
            return Stuck("down state with a closed position on the tape")
        i = node.index
        if tk.length(s.env) <= i:
            return Stuck("environment does not close the focused variable")
        if mode == J_MODE:
            binder, inner = index.binder_at[s.pos]
            cp = ClosedPosition(s.pos, s.log, s.env)
            return Next(
                "var_j",
                HamState(binder, tk.drop(s.log, inner), tk.drop(s.env, i + 1),
                         tk.cons(cp, s.tape), UP),
                cost=inner,
            )
        lc = tk.nth(s.env, i)
        cp = ClosedPosition(s.pos, s.log, s.env)
        return Next(
            "var_k",
            HamState(lc.pos, tk.cons(cp, lc.log), lc.env, s.tape, DOWN),
            cost=i + 1,
        )
    if not s.pos:
        return Stuck("up state at the root of a closed term")
    parent = s.pos[:-1]
    last = s.pos[-1]
    if last == FUN:
        if s.tape is None:
            return Stuck("up state in function position with empty tape")
        item = s.tape.head
        if isinstance(item, LoggedClosure):
            return Next("p3", HamState(parent, s.log, s.env, s.tape.tail, UP))
        return Next("arg", HamState(parent + (ARG,), tk.cons(item, s.log), s.env,
                                    s.tape.tail, DOWN))
    if last == BODY:
        if s.env is None:
            return Stuck("up state leaving a body with an empty environment")
        return Next("p4", HamState(parent, s.log, s.env.tail,
                                   tk.cons(s.env.head, s.tape), UP))
    if s.log is None:
        return Stuck("up state in argument position with empty log")
    cp = s.log.head
    return Next("jmp", HamState(cp.pos, cp.log, cp.env, s.tape, UP))


def lc_to_json(lc: LoggedClosure) -> dict:
    return {
        "kind": "lc",
        "pos": path_str(lc.pos),
        "env": [lc_to_json(e) for e in tk.iterate(lc.env)],
        "log": [cp_to_json(p) for p in tk.iterate(lc.log)],
    }


def cp_to_json(cp: ClosedPosition) -> dict:
    return {
        "kind": "cp",
        "pos": path_str(cp.pos),
        "log": [cp_to_json(p) for p in tk.iterate(cp.log)],
        "env": [lc_to_json(e) for e in tk.iterate(cp.env)],
    }


def make_snapshot(mode: str):
    def snapshot(index: TermIndex, s: HamState) -> dict:
        return {
            "mode": mode,
            "log": [cp_to_json(p) for p in tk.iterate(s.log)],
            "env": [lc_to_json(e) for e in tk.iterate(s.env)],
            "tape": [
                lc_to_json(it) if isinstance(it, LoggedClosure) else cp_to_json(it)
                for it in tk.iterate(s.tape)
            ],
        }

    return snapshot


def state_footprint(s: HamState) -> tk.SpaceFootprint:
    seen = set()
    stack = [s.log, s.env, s.tape]
    while stack:
        x = stack.pop()
        if isinstance(x, tk.Cell):
            if id(x) in seen:
                continue
            seen.add(id(x))
            stack.append(x.tail)
            stack.append(x.head)
        elif isinstance(x, (LoggedClosure, ClosedPosition)):
            stack.append(x.log)
            stack.append(x.env)
    top = tk.length(s.log) + tk.length(s.tape)
    return tk.SpaceFootprint(top, 0, len(seen))


def check_invariants(index: TermIndex, s: HamState, ctx: dict = None):
    if ctx is None:
        ctx = {"visited": set(), "verified": set()}
    visited, verified = ctx["visited"], ctx["verified"]
    visited.add(_shape_key(s.pos, s.log, s.env))
    assert tk.length(s.log) == index.level_at[s.pos], "log length differs from context level"
    cps = sum(1 for item in tk.iterate(s.tape) if isinstance(item, ClosedPosition))
    if s.dir == DOWN:
        assert cps == 0, "down state with closed positions on the tape"
    else:
        assert cps == 1, "up state without exactly one closed position on the tape"

    def walk_lc(lc: LoggedClosure):
        if lc in verified:
            return
        assert index.level_at[lc.pos] == tk.length(lc.log) + 1
        sibling = lc.pos[:-1] + (FUN,)
        assert _shape_key(sibling, lc.log, lc.env) in visited, (
            "logged closure does not record a visited state"
        )
        for cp in tk.iterate(lc.log):
            walk_cp(cp)
        for inner in tk.iterate(lc.env):
            walk_lc(inner)
        verified.add(lc)

    def walk_cp(cp: ClosedPosition):
        if cp in verified:
            return
        assert index.level_at[cp.pos] == tk.length(cp.log)
        assert _shape_key(cp.pos, cp.log, cp.env) in visited, (
            "closed position does not record a visited state"
        )
        for inner in tk.iterate(cp.log):
            walk_cp(inner)
        for lc in tk.iterate(cp.env):
            walk_lc(lc)
        verified.add(cp)

    for item in tk.iterate(s.tape):
        (walk_lc if isinstance(item, LoggedClosure) else walk_cp)(item)
    for cp in tk.iterate(s.log):
        walk_cp(cp)
    for lc in tk.iterate(s.env):
        walk_lc(lc)


def _shape_key(pos, log, env):
    return (pos, tk.length(log), tk.length(env))


def run(term_or_index, mode: str, fuel: int = DEFAULT_FUEL, trace: bool = False,
        debug: bool = False, allow_fuel: bool = False):
    if mode not in (J_MODE, K_MODE):
        raise ValueError(f"mode must be {J_MODE!r} or {K_MODE!r}")
    index = term_or_index if isinstance(term_or_index, TermIndex) else TermIndex(term_or_index)
    if debug:
        ctx = {"visited": set(), "verified": set()}
        check = lambda s, n, c: check_invariants(index, s, ctx)  # noqa: E731
    else:
        check = None
    report = drive(
        f"ham-{mode}",
        index,
        initial(index),
        lambda idx, s: step_mode(idx, s, mode),
        make_snapshot(mode),
        state_footprint,
        lambda s: s.dir,
        lambda s: s.pos,
        fuel,
        trace=trace,
        check_fn=check,
        var_labels=("var_j", "var_k"),
    )
    if report.outcome == "fuel" and not allow_fuel:
        raise FuelExhausted(fuel)
    if mode == J_MODE:
        report.up_length = sum(report.per_label.get(lbl, 0) for lbl in UP_LABELS)
    return report


def trajectory(index: TermIndex, mode: str, fuel: int = DEFAULT_FUEL):
    s = initial(index)
    yield None, s
    for _ in range(fuel):
        result = step_mode(index, s, mode)
        if isinstance(result, Stuck):
            raise StuckError(result.reason)
        if not isinstance(result, Next):
            return
        s = result.state
        yield result.label, s
    result = step_mode(index, s, mode)
    if isinstance(result, Next):
        raise FuelExhausted(fuel)
