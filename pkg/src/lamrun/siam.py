"""Sequence-type interaction machine: walks a fixed ``t : ★`` derivation.

A state is a judgement occurrence plus a type path isolating one ★ occurrence
in its right-hand type, with a direction: ``up`` moves toward the premises,
``down`` toward the conclusion.  Derivations are upside-down with respect to
terms, so ``up`` here corresponds to the interaction machine's down phase.
The run is a Hamiltonian path over ★ occurrences: single initial state,
bi-determinism, and acyclicity leave no other option.
"""
from __future__ import annotations

from dataclasses import dataclass

from .multitypes import DApp, DLam, DVar, Derivation, Star, star_count
from .reporting import FINAL, FuelExhausted, Next, Stuck, StuckError, drive
from .syntax import DEFAULT_FUEL, Term, term_size

TO_LEAVES = "up"
TO_ROOT = "down"

MACHINE = "siam"

TARGET = 0  # type-path step into an arrow target; positive i enters domain entry i


class DerivationIndex:
    """Parent links, binder-axiom numbering, and the subject term for one derivation."""

    def __init__(self, deriv: Derivation, subject: Term):
        self.deriv = deriv
        self.root = subject
        self.size = term_size(subject)
        self.parent: dict = {}
        self.axioms: dict = {}  # id(DLam) -> list of DVar, leaf order
        self.binder: dict = {}  # id(DVar) -> (DLam, 1-based ordinal)
        self.ordinal: dict = {}
        self.nodes: list = []
        stack = [(deriv, ())]
        while stack:
            node, lams = stack.pop()
            self.ordinal[id(node)] = len(self.nodes)
            self.nodes.append(node)
            if isinstance(node, DVar):
                binder = lams[-(node.db_index + 1)]
                entries = self.axioms.setdefault(id(binder), [])
                entries.append(node)
                self.binder[id(node)] = (binder, len(entries))
            elif isinstance(node, DLam):
                self.parent[id(node.body)] = (node, ("body", 0))
                stack.append((node.body, lams + (node,)))
            elif isinstance(node, DApp):
                self.parent[id(node.left)] = (node, ("left", 0))
                for i, r in enumerate(node.rights):
                    self.parent[id(r)] = (node, ("right", i + 1))
                for child in reversed(node.rights):
                    stack.append((child, lams))
                stack.append((node.left, lams))
        self.stars = star_count(deriv)


@dataclass(frozen=True, eq=False)
class SiamState:
    node: Derivation
    tpath: tuple
    dir: str


def resolve_tpath(ty, tpath):
    for step in tpath:
        if step == TARGET:
            ty = ty.target
        else:
            ty = ty.domain[step - 1]
    return ty


def tpath_str(tpath) -> str:
    return "/".join("T" if s == TARGET else f"E{s}" for s in tpath) or "·"


def initial(index: DerivationIndex) -> SiamState:
    if not isinstance(index.deriv.rh_type, Star):
        raise NotStarDerivationError("the machine starts on a derivation of type ★")
    return SiamState(index.deriv, (), TO_LEAVES)


class NotStarDerivationError(Exception):
    pass


def step(index: DerivationIndex, s: SiamState):
    n = s.node
    if s.dir == TO_LEAVES:
        if isinstance(n, DApp):
            return Next("p1", SiamState(n.left, (TARGET,) + s.tpath, TO_LEAVES))
        if isinstance(n, DLam):
            if s.tpath and s.tpath[0] == TARGET:
                return Next("p2", SiamState(n.body, s.tpath[1:], TO_LEAVES))
            if s.tpath:
                i = s.tpath[0]
                axiom = index.axioms[id(n)][i - 1]
                return Next("bt2", SiamState(axiom, s.tpath[1:], TO_ROOT))
            return Stuck("leafward state at an abstraction with an empty type path")
        if isinstance(n, DVar):
            binder, i = index.binder[id(n)]
            return Next("var", SiamState(binder, (i,) + s.tpath, TO_ROOT))
        if s.tpath:
            return Stuck("star abstraction with a non-empty type path")
        return FINAL
    info = index.parent.get(id(n))
    if info is None:
        return Stuck("rootward state at the final judgement")
    parent, (slot, i) = info
    if slot == "body":
        return Next("p4", SiamState(parent, (TARGET,) + s.tpath, TO_ROOT))
    if slot == "left":
        if s.tpath and s.tpath[0] == TARGET:
            return Next("p3", SiamState(parent, s.tpath[1:], TO_ROOT))
        if s.tpath:
            j = s.tpath[0]
            return Next("arg", SiamState(parent.rights[j - 1], s.tpath[1:], TO_LEAVES))
        return Stuck("rootward state at a left premise with an empty type path")
    return Next("bt1", SiamState(parent.left, (i,) + s.tpath, TO_LEAVES))


def step_back(index: DerivationIndex, s: SiamState):
    """Inverse transition; None exactly on the initial state."""
    n = s.node
    if s.dir == TO_LEAVES:
        info = index.parent.get(id(n))
        if info is None:
            return None  # initial state
        parent, (slot, i) = info
        if slot == "left":
            if s.tpath and s.tpath[0] == TARGET:
                return "p1", SiamState(parent, s.tpath[1:], TO_LEAVES)
            if s.tpath:
                j = s.tpath[0]
                return "bt1", SiamState(parent.rights[j - 1], s.tpath[1:], TO_ROOT)
            return None
        if slot == "body":
            return "p2", SiamState(parent, (TARGET,) + s.tpath, TO_LEAVES)
        return "arg", SiamState(parent.left, (i,) + s.tpath, TO_ROOT)
    if isinstance(n, DLam):
        if s.tpath and s.tpath[0] == TARGET:
            return "p4", SiamState(n.body, s.tpath[1:], TO_ROOT)
        if s.tpath:
            i = s.tpath[0]
            axiom = index.axioms[id(n)][i - 1]
            return "var", SiamState(axiom, s.tpath[1:], TO_LEAVES)
        return None
    if isinstance(n, DApp):
        return "p3", SiamState(n.left, (TARGET,) + s.tpath, TO_ROOT)
    if isinstance(n, DVar):
        binder, i = index.binder[id(n)]
        return "bt2", SiamState(binder, (i,) + s.tpath, TO_LEAVES)
    return None


def observable(s: SiamState):
    """Project to the focused subterm and the term-side direction."""
    return s.node.term_pos, ("down" if s.dir == TO_LEAVES else "up")


def occurrence(index: DerivationIndex, s: SiamState):
    return (index.ordinal[id(s.node)], s.tpath)


def snapshot(index: DerivationIndex, s: SiamState) -> dict:
    return {"node": index.ordinal[id(s.node)], "tpath": tpath_str(s.tpath)}


def check_state(index: DerivationIndex, s: SiamState):
    ty = resolve_tpath(s.node.rh_type, s.tpath)
    assert isinstance(ty, Star), "type path does not isolate a ★ occurrence"


@dataclass
class CoverageReport:
    stars: int
    visited: int
    repeated: int
    length: int

    @property
    def hamiltonian(self) -> bool:
        return self.repeated == 0 and self.visited == self.stars


def run(deriv_or_index, subject: Term = None, fuel: int = DEFAULT_FUEL, trace: bool = False,
        debug: bool = False, allow_fuel: bool = False):
    """Run to the final judgement; returns ``(RunReport, CoverageReport)``."""
    if isinstance(deriv_or_index, DerivationIndex):
        index = deriv_or_index
    else:
        index = DerivationIndex(deriv_or_index, subject)
    seen: set = set()
    repeated = 0

    def check(s, steps, per_label):
        nonlocal repeated
        if debug:
            check_state(index, s)
        occ = occurrence(index, s)
        if occ in seen:
            repeated += 1
        seen.add(occ)

    from .tokens import SpaceFootprint

    report = drive(
        MACHINE,
        index,
        initial(index),
        step,
        snapshot,
        lambda s: SpaceFootprint(0, 0, 0),
        lambda s: observable(s)[1],
        lambda s: s.node.term_pos,
        fuel,
        trace=trace,
        check_fn=check,
    )
    if report.outcome == "fuel" and not allow_fuel:
        raise FuelExhausted(fuel)
    coverage = CoverageReport(
        stars=index.stars, visited=len(seen), repeated=repeated, length=report.length
    )
    return report, coverage


def trajectory(index: DerivationIndex, fuel: int = DEFAULT_FUEL):
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
