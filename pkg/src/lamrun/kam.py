"""Krivine abstract machine with explicit positions.

Environments are de Bruijn-indexed persistent lists of closures (entry 0 is
the innermost binder), so capturing an environment in a closure is a pointer
copy and the name search of textbook presentations becomes positional lookup.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import tokens as tk
from .reporting import FINAL, FuelExhausted, Next, Stuck, StuckError, drive
from .syntax import ARG, BODY, FUN, DEFAULT_FUEL, App, Lam, TermIndex, Var, path_str

MACHINE = "kam"


@dataclass(frozen=True, eq=False)
class Closure:
    pos: tuple
    env: Optional[tk.Cell]  # list of Closure


@dataclass(frozen=True, eq=False)
class KamState:
    pos: tuple
    env: Optional[tk.Cell]
    stack: Optional[tk.Cell]


def initial(index: TermIndex) -> KamState:
    return KamState((), tk.nil, tk.nil)


def step(index: TermIndex, s: KamState):
    node = index.node_at[s.pos]
    if isinstance(node, App):
        clo = Closure(s.pos + (ARG,), s.env)
        return Next("app", KamState(s.pos + (FUN,), s.env, tk.cons(clo, s.stack)))
    if isinstance(node, Lam):
        if s.stack is None:
            return FINAL
        return Next("abs", KamState(s.pos + (BODY,), tk.cons(s.stack.head, s.env), s.stack.tail))
    if tk.length(s.env) <= node.index:
        return Stuck("environment does not close the focused variable")
    clo = tk.nth(s.env, node.index)
    return Next("var", KamState(clo.pos, clo.env, s.stack), cost=node.index + 1)


def closure_to_json(c: Closure) -> dict:
    return {"pos": path_str(c.pos), "env": [closure_to_json(e) for e in tk.iterate(c.env)]}


def snapshot(index: TermIndex, s: KamState) -> dict:
    return {
        "env": [closure_to_json(c) for c in tk.iterate(s.env)],
        "stack": [closure_to_json(c) for c in tk.iterate(s.stack)],
    }


def state_footprint(s: KamState) -> tk.SpaceFootprint:
    # top-level entries of both structures; closures have no markers
    seen = set()
    stack = [s.env, s.stack]
    while stack:
        x = stack.pop()
        if isinstance(x, tk.Cell):
            if id(x) in seen:
                continue
            seen.add(id(x))
            stack.append(x.tail)
            stack.append(x.head)
        elif isinstance(x, Closure):
            stack.append(x.env)
    return tk.SpaceFootprint(tk.length(s.env) + tk.length(s.stack), 0, len(seen))


def state_key(index: TermIndex, s: KamState):
    return (s.pos, str(snapshot(index, s)))


def closure_equal(a: Closure, b: Closure, memo: dict) -> bool:
    if a is b:
        return True
    key = (a, b)
    hit = memo.get(key)
    if hit is not None:
        return hit
    out = a.pos == b.pos and tk.list_equal(a.env, b.env, closure_equal, memo)
    memo[key] = out
    return out


def state_eq(a: KamState, b: KamState, memo: dict) -> bool:
    return (
        a.pos == b.pos
        and tk.list_equal(a.env, b.env, closure_equal, memo)
        and tk.list_equal(a.stack, b.stack, closure_equal, memo)
    )


def _check_closure(index: TermIndex, c: Closure, verified: set):
    if c in verified:
        return
    assert _env_closes(index, c.pos, c.env), "closure environment does not close its subterm"
    for inner in tk.iterate(c.env):
        _check_closure(index, inner, verified)
    verified.add(c)


def _env_closes(index: TermIndex, pos, env) -> bool:
    return tk.length(env) >= _max_free(index.node_at[pos]) + 1


def _max_free(node, depth: int = 0) -> int:
    if isinstance(node, Var):
        return node.index - depth
    if isinstance(node, Lam):
        return _max_free(node.body, depth + 1)
    return max(_max_free(node.fun, depth), _max_free(node.arg, depth))


def check_invariants(index: TermIndex, s: KamState, verified: set = None):
    if verified is None:
        verified = set()
    assert _env_closes(index, s.pos, s.env), "state environment does not close the focus"
    for c in tk.iterate(s.stack):
        _check_closure(index, c, verified)
    for c in tk.iterate(s.env):
        _check_closure(index, c, verified)


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
        lambda s: "down",
        lambda s: s.pos,
        fuel,
        trace=trace,
        check_fn=check,
    )
    if report.outcome == "fuel" and not allow_fuel:
        raise FuelExhausted(fuel)
    report.beta_count = report.per_label.get("abs", 0)
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
