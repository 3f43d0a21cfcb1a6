"""Persistent token structures shared by the interaction machines.

Logs and tapes are cons lists: extending one never copies it, so captured
logs stay valid and sharing is observable (``deep_cells`` counts each cell
once).  A logged position is a variable occurrence plus the log that led
there; the ``local`` flavor stores the binder-rooted view, the ``global``
flavor stores the absolute position with the whole log.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterator, Optional

from .syntax import Path, path_str


class Cell:
    __slots__ = ("head", "tail", "length")

    def __init__(self, head, tail: Optional["Cell"]):
        self.head = head
        self.tail = tail
        self.length = 1 + (tail.length if tail is not None else 0)

    def __iter__(self):
        cell = self
        while cell is not None:
            yield cell.head
            cell = cell.tail

    def __repr__(self):
        return "List(" + ", ".join(repr(x) for x in self) + ")"


nil = None


def cons(head, tail: Optional[Cell]) -> Cell:
    return Cell(head, tail)


def length(xs: Optional[Cell]) -> int:
    return 0 if xs is None else xs.length


def head(xs: Optional[Cell]):
    if xs is None:
        raise IndexError("empty list")
    return xs.head


def tail(xs: Optional[Cell]) -> Optional[Cell]:
    if xs is None:
        raise IndexError("empty list")
    return xs.tail


def iterate(xs: Optional[Cell]) -> Iterator:
    cell = xs
    while cell is not None:
        yield cell.head
        cell = cell.tail


def take(xs: Optional[Cell], n: int) -> Optional[Cell]:
    if n == 0:
        return None
    items = []
    cell = xs
    for _ in range(n):
        if cell is None:
            raise IndexError("take past end of list")
        items.append(cell.head)
        cell = cell.tail
    out = None
    for item in reversed(items):
        out = Cell(item, out)
    return out


def drop(xs: Optional[Cell], n: int) -> Optional[Cell]:
    cell = xs
    for _ in range(n):
        if cell is None:
            raise IndexError("drop past end of list")
        cell = cell.tail
    return cell


def concat(xs: Optional[Cell], ys: Optional[Cell]) -> Optional[Cell]:
    if xs is None:
        return ys
    return Cell(xs.head, concat(xs.tail, ys))


def from_list(items) -> Optional[Cell]:
    out = None
    for item in reversed(list(items)):
        out = Cell(item, out)
    return out


def to_list(xs: Optional[Cell]) -> list:
    return list(iterate(xs))


def nth(xs: Optional[Cell], n: int):
    cell = xs
    for _ in range(n):
        if cell is None:
            raise IndexError("nth past end of list")
        cell = cell.tail
    if cell is None:
        raise IndexError("nth past end of list")
    return cell.head


@dataclass(frozen=True)
class Marker:
    def __repr__(self):
        return "p"


MARKER = Marker()

LOCAL = "local"
GLOBAL = "global"


@dataclass(frozen=True, eq=False)
class LoggedPosition:
    var_path: Path
    scope_path: Path  # binder path (local) or the root path (global)
    flavor: str
    log: Optional[Cell]


@dataclass(frozen=True)
class SpaceFootprint:
    lp_count: int
    marker_count: int
    deep_cells: int


def _deep_cells(roots) -> int:
    seen = set()
    stack = list(roots)
    while stack:
        x = stack.pop()
        if x is None:
            continue
        if isinstance(x, Cell):
            if id(x) in seen:
                continue
            seen.add(id(x))
            stack.append(x.tail)
            stack.append(x.head)
        else:
            for attr in ("log", "env"):
                inner = getattr(x, attr, None)
                if isinstance(inner, Cell):
                    stack.append(inner)
    return len(seen)


def footprint(log: Optional[Cell], tape: Optional[Cell]) -> SpaceFootprint:
    """Top-level size of a token: each logged position counts 1, nesting aside."""
    lp = length(log)
    markers = 0
    for item in iterate(tape):
        if isinstance(item, Marker):
            markers += 1
        else:
            lp += 1
    return SpaceFootprint(lp, markers, _deep_cells([log, tape]))


# ---------------------------------------------------------------------------
# Structural equality with sharing
#
# Tokens are DAGs: logs are shared wholesale, so naive structural comparison
# (or serialization) unfolds them exponentially.  These helpers memoize on
# object pairs; identity semantics of the frozen eq=False dataclasses make the
# pairs themselves usable as dictionary keys.


def list_equal(a: Optional[Cell], b: Optional[Cell], item_eq, memo: dict) -> bool:
    pending = []
    result = True
    while True:
        if a is b:
            break
        if a is None or b is None or a.length != b.length:
            result = False
            break
        hit = memo.get((a, b))
        if hit is not None:
            result = hit
            break
        pending.append((a, b))
        if not item_eq(a.head, b.head, memo):
            result = False
            break
        a, b = a.tail, b.tail
    for key in pending:
        memo[key] = result
    return result


def lp_equal(a, b, memo: dict) -> bool:
    if a is b:
        return True
    key = (a, b)
    hit = memo.get(key)
    if hit is not None:
        return hit
    out = (
        a.var_path == b.var_path
        and a.scope_path == b.scope_path
        and a.flavor == b.flavor
        and list_equal(a.log, b.log, lp_equal, memo)
    )
    memo[key] = out
    return out


def tape_item_equal(a, b, memo: dict) -> bool:
    am, bm = isinstance(a, Marker), isinstance(b, Marker)
    if am or bm:
        return am and bm
    return lp_equal(a, b, memo)


def tape_equal(a: Optional[Cell], b: Optional[Cell], memo: dict) -> bool:
    return list_equal(a, b, tape_item_equal, memo)


def log_equal(a: Optional[Cell], b: Optional[Cell], memo: dict) -> bool:
    return list_equal(a, b, lp_equal, memo)


# ---------------------------------------------------------------------------
# Serialization (the stable trace interface)


def lp_to_json(lp: LoggedPosition) -> dict:
    return {
        "var": path_str(lp.var_path),
        "scope": path_str(lp.scope_path),
        "flavor": lp.flavor,
        "log": log_to_json(lp.log),
    }


def log_to_json(log: Optional[Cell]) -> list:
    return [lp_to_json(lp) for lp in iterate(log)]


def tape_to_json(tape: Optional[Cell]) -> list:
    out: list[Any] = []
    for item in iterate(tape):
        if isinstance(item, Marker):
            out.append("p")
        else:
            out.append(lp_to_json(item))
    return out
