"""Pointer abstract machine: jumping via a monolithic history of indexed positions.

The history is an append-only sequence of (variable position, index) pairs,
1-based, oldest first; an entry's index always points strictly below it.  The
lookup chain ``phi`` recovers, one hop per enclosing argument, what the
jumping machine keeps in its distributed logs.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import tokens as tk
from .liam import DOWN, UP
from .reporting import FINAL, FuelExhausted, Next, Stuck, StuckError, drive
from .syntax import ARG, BODY, FUN, DEFAULT_FUEL, App, Lam, TermIndex, path_str

MACHINE = "pam"

UP_LABELS = ("p3", "p4", "arg", "jmp")


class UndefinedLookup(Exception):
    pass


class History:
    """Persistent append-only history; cells shared between versions."""

    __slots__ = ("cells",)

    def __init__(self, cells: Optional[tk.Cell] = None):
        self.cells = cells  # newest first

    def __len__(self) -> int:
        return tk.length(self.cells)

    def append(self, pos, idx) -> "History":
        return History(tk.cons((pos, idx), self.cells))

    def entry(self, k: int):
        """1-based; entry 1 is the oldest."""
        n = len(self)
        if k < 1 or k > n:
            raise UndefinedLookup(f"history entry {k} of {n}")
        return tk.nth(self.cells, n - k)

    def entries(self) -> list:
        """Oldest first."""
        return list(reversed(tk.to_list(self.cells)))

    def to_json(self) -> list:
        return [{"pos": path_str(p), "idx": i} for (p, i) in self.entries()]


def phi(h: History, k: int) -> int:
    if k < 1:
        raise UndefinedLookup("phi is undefined on 0")
    return h.entry(k)[1]


def phi_pow(h: History, i: int, n: int) -> int:
    """n-fold lookup chain; cost n.  Raises UndefinedLookup on a broken chain."""
    k = i
    for _ in range(n):
        k = phi(h, k)
    return k


def history_depth_at(h: History, i: int, n: int) -> bool:
    """True when the first n iterates of phi at i stay strictly positive."""
    k = i
    for _ in range(n):
        if k <= 0:
            return False
        k = phi(h, k)
    return True


@dataclass(frozen=True, eq=False)
class PamState:
    pos: tuple
    history: History
    index: int
    tape: Optional[tk.Cell]  # markers and plain positions (paths)
    dir: str


def initial(index: TermIndex) -> PamState:
    return PamState((), History(), 0, tk.nil, DOWN)


def step(index: TermIndex, s: PamState):
    if s.dir == DOWN:
        node = index.node_at[s.pos]
        if isinstance(node, App):
            return Next("p1", PamState(s.pos + (FUN,), s.history, s.index,
                                       tk.cons(tk.MARKER, s.tape), DOWN))
        if isinstance(node, Lam):
            if s.tape is None:
                return FINAL
            if isinstance(s.tape.head, tk.Marker):
                return Next("p2", PamState(s.pos + (BODY,), s.history, s.index,
                                           s.tape.tail, DOWN))
            return Stuck("down state with a position on the tape")
        binder, inner = index.binder_at[s.pos]
        new_index = phi_pow(s.history, s.index, inner)
        return Next(
            "var",
            PamState(binder, s.history, new_index, tk.cons(s.pos, s.tape), UP),
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
            return Next("p3", PamState(parent, s.history, s.index, s.tape.tail, UP))
        new_hist = s.history.append(item, s.index)
        return Next("arg", PamState(parent + (ARG,), new_hist, len(s.history) + 1,
                                    s.tape.tail, DOWN))
    if last == BODY:
        return Next("p4", PamState(parent, s.history, s.index, tk.cons(tk.MARKER, s.tape), UP))
    pos, _ = s.history.entry(s.index)
    return Next("jmp", PamState(pos, s.history, s.index - 1, s.tape, UP))


def snapshot(index: TermIndex, s: PamState) -> dict:
    tape = []
    for item in tk.iterate(s.tape):
        tape.append("p" if isinstance(item, tk.Marker) else {"pos": path_str(item)})
    return {"history": s.history.to_json(), "index": s.index, "tape": tape}


def state_footprint(s: PamState) -> tk.SpaceFootprint:
    markers = positions = 0
    for item in tk.iterate(s.tape):
        if isinstance(item, tk.Marker):
            markers += 1
        else:
            positions += 1
    seen = set()
    cell = s.history.cells
    while cell is not None and id(cell) not in seen:
        seen.add(id(cell))
        cell = cell.tail
    cell = s.tape
    while cell is not None and id(cell) not in seen:
        seen.add(id(cell))
        cell = cell.tail
    return tk.SpaceFootprint(positions + len(s.history), markers, len(seen))


def state_key(index: TermIndex, s: PamState):
    return (s.pos, s.dir, s.index, str(snapshot(index, s)))


def check_invariants(index: TermIndex, s: PamState, ctx: dict = None):
    if ctx is None:
        ctx = {"entries": []}
    entries = ctx["entries"]  # history entries, oldest first; append-only cache
    new = len(s.history) - len(entries)
    if new:
        fresh = []
        cell = s.history.cells
        for _ in range(new):
            fresh.append(cell.head)
            cell = cell.tail
        entries.extend(reversed(fresh))

    def depth_ok(i: int, m: int) -> bool:
        k = i
        for _ in range(m):
            if k <= 0:
                return False
            k = entries[k - 1][1]
        return True

    n = index.level_at[s.pos]
    assert depth_ok(s.index, n), "history depth is below the context level"
    for k in range(len(entries) - new + 1, len(entries) + 1):
        pos, j = entries[k - 1]
        assert j < k, "history entry index does not point strictly below it"
        m = index.level_at[pos]
        assert depth_ok(k - 1, m), (
            "history depth below an indexed position is smaller than its level"
        )
    positions = sum(1 for item in tk.iterate(s.tape) if not isinstance(item, tk.Marker))
    if s.dir == DOWN:
        assert s.index == len(s.history), "down state index differs from history length"
        assert positions == 0, "down state with positions on the tape"
    else:
        assert positions == 1, "up state without exactly one position on the tape"


def run(term_or_index, fuel: int = DEFAULT_FUEL, trace: bool = False, debug: bool = False,
        allow_fuel: bool = False):
    index = term_or_index if isinstance(term_or_index, TermIndex) else TermIndex(term_or_index)
    if debug:
        ctx = {"entries": []}
        check = lambda s, n, c: check_invariants(index, s, ctx)  # noqa: E731
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
