"""Lambda-term syntax: named surface parser, de Bruijn core, positions, weak head reduction.

Terms are immutable trees with de Bruijn indices; the names carried by ``Var``
and ``Lam`` are presentation-only.  Machines never rewrite the term: they move
over a fixed root, so subterm occurrences are addressed by root-relative paths
(``Fun``/``Arg``/``Body`` steps).  The level of a path is its number of ``Arg``
steps, i.e. the number of arguments the occurrence is buried under.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Union

FUN = "Fun"
ARG = "Arg"
BODY = "Body"

Path = tuple  # tuple of FUN/ARG/BODY steps

DEFAULT_FUEL = 10_000_000


class LamError(Exception):
    pass


class LamSyntaxError(LamError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class UnboundIdentifier(LamError):
    def __init__(self, name: str):
        super().__init__(f"unbound identifier: {name!r}")
        self.name = name


class DefinitionCycle(LamError):
    def __init__(self, names):
        super().__init__("definition cycle: " + " -> ".join(names))
        self.names = tuple(names)


class NotClosed(LamError):
    pass


class InvalidPath(LamError):
    pass


class Diverged(LamError):
    def __init__(self, fuel: int):
        super().__init__(f"no weak head normal form within {fuel} steps")
        self.fuel = fuel


@dataclass(frozen=True)
class Var:
    index: int
    name: str


@dataclass(frozen=True)
class Lam:
    name: str
    body: "Term"


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


Term = Union[Var, Lam, App]


# ---------------------------------------------------------------------------
# Parsing


_TOKEN_RE = re.compile(r"\s*(?:(\\|λ)|(\.)|(\()|(\))|([A-Za-z][A-Za-z0-9_']*))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos and not text[pos:].strip():
            break
        if m is None:
            raise LamSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastindex is None:
            break
        kind = m.lastindex
        if kind == 1:
            tokens.append(("lambda", m.group(1), m.start(1)))
        elif kind == 2:
            tokens.append(("dot", ".", m.start(2)))
        elif kind == 3:
            tokens.append(("lparen", "(", m.start(3)))
        elif kind == 4:
            tokens.append(("rparen", ")", m.start(4)))
        else:
            tokens.append(("ident", m.group(5), m.start(5)))
        pos = m.end()
    rest = text[pos:].strip()
    if rest:
        raise LamSyntaxError(f"unexpected character {rest[0]!r}", pos + text[pos:].index(rest[0]))
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise LamSyntaxError(f"expected {kind}, found {tok[1]!r}", tok[2])
        return tok

    def parse_term(self):
        if self.peek()[0] == "lambda":
            return self.parse_lambda()
        return self.parse_app()

    def parse_lambda(self):
        self.expect("lambda")
        names = []
        while self.peek()[0] == "ident":
            names.append(self.next()[1])
        if not names:
            tok = self.peek()
            raise LamSyntaxError("expected at least one binder after lambda", tok[2])
        self.expect("dot")
        body = self.parse_term()
        for name in reversed(names):
            body = ("lam", name, body)
        return body

    def parse_app(self):
        atoms = [self.parse_atom()]
        while self.peek()[0] in ("ident", "lparen", "lambda"):
            if self.peek()[0] == "lambda":
                # a lambda extends to the end of the enclosing group
                atoms.append(self.parse_lambda())
                break
            atoms.append(self.parse_atom())
        term = atoms[0]
        for a in atoms[1:]:
            term = ("app", term, a)
        return term

    def parse_atom(self):
        tok = self.next()
        if tok[0] == "ident":
            return ("var", tok[1])
        if tok[0] == "lparen":
            t = self.parse_term()
            self.expect("rparen")
            return t
        raise LamSyntaxError(f"unexpected token {tok[1]!r}", tok[2])


def _parse_named(text: str):
    parser = _Parser(_tokenize(text))
    term = parser.parse_term()
    parser.expect("eof")
    return term


def parse(text: str, definitions: Optional[Mapping[str, str]] = None) -> Term:
    """Parse ``text`` to a closed de Bruijn term, expanding named definitions.

    Definitions are expanded before de Bruijn conversion, so a defined name
    behaves exactly like its expansion; lambda binders shadow definitions.
    """
    defs = dict(definitions or {})
    named_cache: dict = {}

    def named_def(name, stack):
        if name in stack:
            raise DefinitionCycle(list(stack) + [name])
        if name not in named_cache:
            named_cache[name] = _parse_named(defs[name])
        return named_cache[name]

    def convert(node, bound, stack):
        kind = node[0]
        if kind == "var":
            name = node[1]
            for i, b in enumerate(reversed(bound)):
                if b == name:
                    return Var(i, name)
            if name in defs:
                return convert(named_def(name, stack), (), stack + (name,))
            raise UnboundIdentifier(name)
        if kind == "lam":
            return Lam(node[1], convert(node[2], bound + (node[1],), stack))
        return App(convert(node[1], bound, stack), convert(node[2], bound, stack))

    return convert(_parse_named(text), (), ())


def load_definitions(text: str) -> dict:
    """Parse a definitions file: lines of ``name = term;`` (``#`` comments allowed)."""
    defs: dict = {}
    stripped = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
    for chunk in stripped.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise LamSyntaxError(f"definition without '=': {chunk!r}", 0)
        name, body = chunk.split("=", 1)
        name = name.strip()
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_']*", name):
            raise LamSyntaxError(f"bad definition name {name!r}", 0)
        defs[name] = body.strip()
    return defs


# ---------------------------------------------------------------------------
# Printing


def pretty(term: Term) -> str:
    """Display printer using the carried names (may shadow; for traces only)."""

    def go(t, ctx):
        if isinstance(t, Var):
            return t.name
        if isinstance(t, Lam):
            s = "λ" + t.name + "." + go(t.body, "top")
            return "(" + s + ")" if ctx in ("fun", "arg") else s
        s = go(t.fun, "fun") + " " + go(t.arg, "arg")
        return "(" + s + ")" if ctx == "arg" else s

    return go(term, "top")


def pretty_with_hole(root: Term, hole: Path) -> str:
    """Print ``root`` with the subterm at ``hole`` replaced by ⟨·⟩."""

    def go(t, path, ctx):
        if path == hole:
            return "⟨·⟩"
        if isinstance(t, Var):
            return t.name
        if isinstance(t, Lam):
            s = "λ" + t.name + "." + go(t.body, path + (BODY,), "top")
            return "(" + s + ")" if ctx in ("fun", "arg") else s
        s = go(t.fun, path + (FUN,), "fun") + " " + go(t.arg, path + (ARG,), "arg")
        return "(" + s + ")" if ctx == "arg" else s

    return go(root, (), "top")


def canonical_pretty(term: Term) -> str:
    """Collision-free printer (binders renamed by depth); reparses to the same skeleton."""

    def go(t, depth, ctx):
        if isinstance(t, Var):
            return f"v{depth - 1 - t.index}"
        if isinstance(t, Lam):
            s = "\\" + f"v{depth}" + "." + go(t.body, depth + 1, "top")
            return "(" + s + ")" if ctx in ("fun", "arg") else s
        s = go(t.fun, depth, "fun") + " " + go(t.arg, depth, "arg")
        return "(" + s + ")" if ctx == "arg" else s

    return go(term, 0, "top")


def path_str(path: Path) -> str:
    return "/".join(path)


def parse_path(text: str) -> Path:
    if not text:
        return ()
    steps = tuple(text.split("/"))
    for s in steps:
        if s not in (FUN, ARG, BODY):
            raise InvalidPath(f"bad path step {s!r}")
    return steps


# ---------------------------------------------------------------------------
# Structure


def term_size(term: Term) -> int:
    if isinstance(term, Var):
        return 1
    if isinstance(term, Lam):
        return 1 + term_size(term.body)
    return 1 + term_size(term.fun) + term_size(term.arg)


def skeleton(term: Term) -> tuple:
    """Name-erased shape; equal skeletons mean alpha-equivalent terms."""
    if isinstance(term, Var):
        return ("v", term.index)
    if isinstance(term, Lam):
        return ("l", skeleton(term.body))
    return ("a", skeleton(term.fun), skeleton(term.arg))


def is_closed(term: Term, depth: int = 0) -> bool:
    if isinstance(term, Var):
        return term.index < depth
    if isinstance(term, Lam):
        return is_closed(term.body, depth + 1)
    return is_closed(term.fun, depth) and is_closed(term.arg, depth)


def positions(term: Term) -> Iterator[tuple]:
    stack = [((), term)]
    while stack:
        path, t = stack.pop()
        yield path, t
        if isinstance(t, Lam):
            stack.append((path + (BODY,), t.body))
        elif isinstance(t, App):
            stack.append((path + (ARG,), t.arg))
            stack.append((path + (FUN,), t.fun))


def resolve(root: Term, path: Path):
    """Return ``(subterm, level)`` for the occurrence at ``path``."""
    t = root
    level = 0
    for step in path:
        if step == FUN and isinstance(t, App):
            t = t.fun
        elif step == ARG and isinstance(t, App):
            t = t.arg
            level += 1
        elif step == BODY and isinstance(t, Lam):
            t = t.body
        else:
            raise InvalidPath(f"step {step} does not match node at {path_str(path)}")
    return t, level


def binder_of(root: Term, var_path: Path):
    """Locate the binder of the variable occurrence at ``var_path``.

    Returns ``(binder_path, inner_level)`` where ``inner_level`` counts the
    ``Arg`` steps strictly between the binder and the occurrence.
    """
    var, _ = resolve(root, var_path)
    if not isinstance(var, Var):
        raise InvalidPath("binder_of expects a variable occurrence")
    crossed = 0
    for i in range(len(var_path) - 1, -1, -1):
        if var_path[i] == BODY:
            if crossed == var.index:
                binder_path = var_path[:i]
                inner_level = sum(1 for s in var_path[i + 1 :] if s == ARG)
                return binder_path, inner_level
            crossed += 1
    raise NotClosed(f"variable at {path_str(var_path)} has no binder")


class TermIndex:
    """Per-term cache of node shapes, levels, and binder links for machine steps."""

    __slots__ = ("root", "size", "node_at", "level_at", "binder_at")

    def __init__(self, root: Term):
        if not is_closed(root):
            raise NotClosed("machines run on closed terms only")
        self.root = root
        self.size = term_size(root)
        self.node_at = {}
        self.level_at = {}
        self.binder_at = {}
        stack = [((), root, 0, ())]  # path, node, level, enclosing lambda paths
        while stack:
            path, node, level, lams = stack.pop()
            self.node_at[path] = node
            self.level_at[path] = level
            if isinstance(node, Var):
                binder_path = lams[-(node.index + 1)]
                inner = sum(1 for s in path[len(binder_path) + 1 :] if s == ARG)
                self.binder_at[path] = (binder_path, inner)
            elif isinstance(node, Lam):
                stack.append((path + (BODY,), node.body, level, lams + (path,)))
            else:
                stack.append((path + (FUN,), node.fun, level, lams))
                stack.append((path + (ARG,), node.arg, level + 1, lams))


# ---------------------------------------------------------------------------
# Weak head reduction


@dataclass(frozen=True)
class ReductionStep:
    before: Term
    after: Term
    redex_path: Path
    substituted_occurrences: tuple  # paths in `after` holding copies of the argument


def substitute_closed(body: Term, arg: Term) -> Term:
    """Substitute closed ``arg`` for the outermost bound variable of ``body``."""

    def go(t, depth):
        if isinstance(t, Var):
            if t.index == depth:
                return arg
            if t.index > depth:
                return Var(t.index - 1, t.name)
            return t
        if isinstance(t, Lam):
            return Lam(t.name, go(t.body, depth + 1))
        return App(go(t.fun, depth), go(t.arg, depth))

    return go(body, 0)


def bound_var_paths(body: Term) -> list:
    """Paths in ``body`` of the occurrences bound by the abstraction around it."""
    out = []

    def go(t, path, depth):
        if isinstance(t, Var):
            if t.index == depth:
                out.append(path)
        elif isinstance(t, Lam):
            go(t.body, path + (BODY,), depth + 1)
        else:
            go(t.fun, path + (FUN,), depth)
            go(t.arg, path + (ARG,), depth)

    go(body, (), 0)
    return out


def whnf_step(t: Term) -> Optional[ReductionStep]:
    if not isinstance(t, App):
        return None
    spine = []
    node = t
    while isinstance(node.fun, App):
        spine.append(node)
        node = node.fun
    if not isinstance(node.fun, Lam):
        raise NotClosed("head variable reached the top level; term is open")
    h = len(spine)
    redex: App = node
    lam: Lam = node.fun
    new_head = substitute_closed(lam.body, redex.arg)
    after = new_head
    for app in reversed(spine):
        after = App(after, app.arg)
    prefix = (FUN,) * h
    occ = tuple(prefix + p for p in bound_var_paths(lam.body))
    return ReductionStep(before=t, after=after, redex_path=(), substituted_occurrences=occ)


def whnf_trace(t: Term, fuel: int = DEFAULT_FUEL):
    """Maximal weak head reduction sequence; raises :class:`Diverged` on fuel exhaustion."""
    steps = []
    current = t
    for _ in range(fuel):
        step = whnf_step(current)
        if step is None:
            return steps
        steps.append(step)
        current = step.after
    if whnf_step(current) is None:
        return steps
    raise Diverged(fuel)


def beta_count(t: Term, fuel: int = DEFAULT_FUEL) -> int:
    return len(whnf_trace(t, fuel))
