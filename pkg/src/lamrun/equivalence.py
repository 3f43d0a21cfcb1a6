"""Cross-machine bisimulation and relationship checkers.

Each checker runs two machines in lockstep (or one machine against an oracle)
and reports the first divergence with a reproducible counterexample.  Fuel
mismatches are reported as inconclusive rather than failures: the statements
being checked relate complete runs only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import ham, kam, liam, ljam, lpam, multitypes as mt, siam, tokens as tk
from .reporting import FuelExhausted
from .syntax import DEFAULT_FUEL, Diverged, Term, TermIndex, pretty, whnf_trace


@dataclass
class CheckReport:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    inconclusive: bool = False

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "inconclusive": self.inconclusive,
            "details": self.details,
        }


def _inconclusive(name: str, term: Term, fuel: int) -> CheckReport:
    return CheckReport(
        name,
        passed=True,
        inconclusive=True,
        details={"term": pretty(term), "reason": f"fuel {fuel} exhausted before completion"},
    )


# ---------------------------------------------------------------------------
# Jumping machine -> interaction machine projection


def project_lp(index: TermIndex, lp: tk.LoggedPosition, memo: Optional[dict] = None):
    """Truncate a global logged position to its binder-rooted, local form."""
    if memo is None:
        memo = {}
    hit = memo.get(id(lp))
    if hit is not None:
        return hit
    binder, inner = index.binder_at[lp.var_path]
    entries = [project_lp(index, p, memo) for p in tk.iterate(tk.take(lp.log, inner))]
    out = tk.LoggedPosition(lp.var_path, binder, tk.LOCAL, tk.from_list(entries))
    memo[id(lp)] = out
    return out


def project_jam_to_iam(index: TermIndex, s: ljam.JamState, memo: Optional[dict] = None):
    if memo is None:
        memo = {}

    def item(x):
        return x if isinstance(x, tk.Marker) else project_lp(index, x, memo)

    tape = tk.from_list([item(x) for x in tk.iterate(s.tape)])
    log = tk.from_list([project_lp(index, p, memo) for p in tk.iterate(s.log)])
    return liam.IamState(s.pos, tape, log, s.dir)


def check_iam_jam(term: Term, fuel: int = DEFAULT_FUEL) -> CheckReport:
    """Trace alignment: the interaction run is the projected jumping run with each
    jump expanded into a bt1 .. bt2 backtracking block."""
    name = "iam-jam"
    index = TermIndex(term)
    memo: dict = {}
    details: dict = {"term": pretty(term)}
    it_i = liam.trajectory(index, fuel)
    it_j = ljam.trajectory(index, fuel)
    eq_memo: dict = {}
    try:
        _, s_i = next(it_i)
        _, s_j = next(it_j)
        iam_steps = 0
        iam_vars = 0
        jam_steps = 0
        jam_vars = 0
        while True:
            if not liam.state_eq(s_i, project_jam_to_iam(index, s_j, memo), eq_memo):
                return CheckReport(name, False, {
                    **details, "step": jam_steps,
                    "reason": "interaction state differs from projected jumping state"})
            nxt_j = next(it_j, None)
            if nxt_j is None:
                if next(it_i, None) is not None:
                    return CheckReport(name, False, {
                        **details, "step": jam_steps,
                        "reason": "jumping machine finished first"})
                break
            label_j, s_j = nxt_j
            jam_steps += 1
            jam_vars += label_j == "var"
            if label_j != "jmp":
                nxt_i = next(it_i, None)
                if nxt_i is None or nxt_i[0] != label_j:
                    return CheckReport(name, False, {
                        **details, "step": jam_steps, "expected": label_j,
                        "actual": None if nxt_i is None else nxt_i[0]})
                s_i = nxt_i[1]
                iam_steps += 1
                iam_vars += label_j == "var"
            else:
                depth = 0
                first = True
                while True:
                    nxt_i = next(it_i, None)
                    if nxt_i is None:
                        return CheckReport(name, False, {
                            **details, "step": jam_steps,
                            "reason": "interaction run ended inside a jump expansion"})
                    label_i, s_i = nxt_i
                    iam_steps += 1
                    iam_vars += label_i == "var"
                    if first and label_i != "bt1":
                        return CheckReport(name, False, {
                            **details, "step": jam_steps,
                            "reason": f"jump expansion started with {label_i}"})
                    first = False
                    if label_i == "bt1":
                        depth += 1
                    elif label_i == "bt2":
                        depth -= 1
                        if depth == 0:
                            break
    except FuelExhausted:
        return _inconclusive(name, term, fuel)
    if not (jam_steps <= iam_steps and jam_vars <= iam_vars):
        return CheckReport(name, False, {
            **details, "reason": "length or var-count inequality violated",
            "jam": jam_steps, "iam": iam_steps})
    details.update(iam_length=iam_steps, jam_length=jam_steps,
                   iam_vars=iam_vars, jam_vars=jam_vars)
    return CheckReport(name, True, details)


# ---------------------------------------------------------------------------
# Jumping machine <-> pointer machine strong bisimulation


def log_matches_history(log, hist: lpam.History, i: int, memo: dict) -> bool:
    key = (id(log), i)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if log is None:
        out = i == 0
    elif i < 1 or i > len(hist):
        out = False
    else:
        lp = log.head
        pos, j = hist.entry(i)
        out = (
            lp.var_path == pos
            and log_matches_history(log.tail, hist, j, memo)
            and log_matches_history(lp.log, hist, i - 1, memo)
        )
    memo[key] = out
    return out


def _tapes_match(jam_tape, pam_tape) -> bool:
    a, b = jam_tape, pam_tape
    while a is not None and b is not None:
        x, y = a.head, b.head
        if isinstance(x, tk.Marker) != isinstance(y, tk.Marker):
            return False
        if not isinstance(x, tk.Marker) and x.var_path != y:
            return False
        a, b = a.tail, b.tail
    return a is None and b is None


def check_jam_pam(term: Term, fuel: int = DEFAULT_FUEL) -> CheckReport:
    name = "jam-pam"
    index = TermIndex(term)
    details: dict = {"term": pretty(term)}
    memo: dict = {}
    it_j = ljam.trajectory(index, fuel)
    it_p = lpam.trajectory(index, fuel)
    step_no = 0
    try:
        while True:
            nxt_j = next(it_j, None)
            nxt_p = next(it_p, None)
            if (nxt_j is None) != (nxt_p is None):
                return CheckReport(name, False, {
                    **details, "step": step_no, "reason": "one machine finished first"})
            if nxt_j is None:
                break
            label_j, s_j = nxt_j
            label_p, s_p = nxt_p
            if label_j != label_p:
                return CheckReport(name, False, {
                    **details, "step": step_no,
                    "jam": label_j, "pam": label_p})
            if s_j.pos != s_p.pos or s_j.dir != s_p.dir:
                return CheckReport(name, False, {
                    **details, "step": step_no, "reason": "positions or directions differ"})
            if not _tapes_match(s_j.tape, s_p.tape):
                return CheckReport(name, False, {
                    **details, "step": step_no, "reason": "tapes differ"})
            if not log_matches_history(s_j.log, s_p.history, s_p.index, memo):
                return CheckReport(name, False, {
                    **details, "step": step_no, "reason": "log/history relation fails"})
            if s_j.dir == ljam.UP:
                lp = next(
                    (x for x in tk.iterate(s_j.tape) if not isinstance(x, tk.Marker)), None
                )
                if lp is not None and not log_matches_history(
                    lp.log, s_p.history, len(s_p.history), memo
                ):
                    return CheckReport(name, False, {
                        **details, "step": step_no,
                        "reason": "tape position log does not match full history"})
            step_no += 1
    except FuelExhausted:
        return _inconclusive(name, term, fuel)
    details["length"] = step_no - 1
    return CheckReport(name, True, details)


# ---------------------------------------------------------------------------
# Entangled machine against its two projections


def ham_cp_to_lp(cp: ham.ClosedPosition, memo: dict) -> tk.LoggedPosition:
    hit = memo.get(id(cp))
    if hit is not None:
        return hit
    entries = [ham_cp_to_lp(p, memo) for p in tk.iterate(cp.log)]
    out = tk.LoggedPosition(cp.pos, (), tk.GLOBAL, tk.from_list(entries))
    memo[id(cp)] = out
    return out


def ham_to_jam_state(s: ham.HamState, memo: dict) -> ljam.JamState:
    def item(x):
        return tk.MARKER if isinstance(x, ham.LoggedClosure) else ham_cp_to_lp(x, memo)

    tape = tk.from_list([item(x) for x in tk.iterate(s.tape)])
    log = tk.from_list([ham_cp_to_lp(p, memo) for p in tk.iterate(s.log)])
    return ljam.JamState(s.pos, tape, log, s.dir)


def ham_lc_to_closure(lc: ham.LoggedClosure, memo: dict) -> kam.Closure:
    hit = memo.get(id(lc))
    if hit is not None:
        return hit
    entries = [ham_lc_to_closure(e, memo) for e in tk.iterate(lc.env)]
    out = kam.Closure(lc.pos, tk.from_list(entries))
    memo[id(lc)] = out
    return out


def ham_to_kam_state(s: ham.HamState, memo: dict) -> kam.KamState:
    env = tk.from_list([ham_lc_to_closure(e, memo) for e in tk.iterate(s.env)])
    stack = tk.from_list(
        [ham_lc_to_closure(x, memo) for x in tk.iterate(s.tape)]
    )
    return kam.KamState(s.pos, env, stack)


_J_LABELS = {"p1_app": "p1", "p2_abs": "p2", "var_j": "var",
             "p3": "p3", "p4": "p4", "arg": "arg", "jmp": "jmp"}
_K_LABELS = {"p1_app": "app", "p2_abs": "abs", "var_k": "var"}


def check_ham_jk(term: Term, fuel: int = DEFAULT_FUEL) -> CheckReport:
    name = "ham-jk"
    index = TermIndex(term)
    details: dict = {"term": pretty(term)}
    memo_j: dict = {}
    memo_k: dict = {}
    eq_j: dict = {}
    eq_k: dict = {}
    try:
        # J mode against the jumping machine, step for step
        it_h = ham.trajectory(index, ham.J_MODE, fuel)
        it_j = ljam.trajectory(index, fuel)
        hj_len = hj_up = hj_var = 0
        step_no = 0
        while True:
            nxt_h = next(it_h, None)
            nxt_j = next(it_j, None)
            if (nxt_h is None) != (nxt_j is None):
                return CheckReport(name, False, {
                    **details, "step": step_no, "reason": "J mode ended out of sync"})
            if nxt_h is None:
                break
            label_h, s_h = nxt_h
            label_j, s_j = nxt_j
            if label_h is not None:
                hj_len += 1
                hj_up += label_h in ham.UP_LABELS
                hj_var += label_h == "var_j"
                if _J_LABELS[label_h] != label_j:
                    return CheckReport(name, False, {
                        **details, "step": step_no, "ham": label_h, "jam": label_j})
            if not ljam.state_eq(ham_to_jam_state(s_h, memo_j), s_j, eq_j):
                return CheckReport(name, False, {
                    **details, "step": step_no,
                    "reason": "J-mode state does not erase to the jumping state"})
            step_no += 1
        # K mode against the Krivine machine, step for step
        it_h = ham.trajectory(index, ham.K_MODE, fuel)
        it_k = kam.trajectory(index, fuel)
        hk_len = hk_var = 0
        step_no = 0
        while True:
            nxt_h = next(it_h, None)
            nxt_k = next(it_k, None)
            if (nxt_h is None) != (nxt_k is None):
                return CheckReport(name, False, {
                    **details, "step": step_no, "reason": "K mode ended out of sync"})
            if nxt_h is None:
                break
            label_h, s_h = nxt_h
            label_k, s_k = nxt_k
            if label_h is not None:
                hk_len += 1
                hk_var += label_h == "var_k"
                if _K_LABELS[label_h] != label_k:
                    return CheckReport(name, False, {
                        **details, "step": step_no, "ham": label_h, "kam": label_k})
            if not kam.state_eq(ham_to_kam_state(s_h, memo_k), s_k, eq_k):
                return CheckReport(name, False, {
                    **details, "step": step_no,
                    "reason": "K-mode state does not erase to the Krivine state"})
            step_no += 1
    except FuelExhausted:
        return _inconclusive(name, term, fuel)
    if hj_len != hk_len + hj_up:
        return CheckReport(name, False, {
            **details, "reason": "length equation violated",
            "jam": hj_len, "kam": hk_len, "up": hj_up})
    if hj_var != hk_var:
        return CheckReport(name, False, {
            **details, "reason": "var counts differ", "jam": hj_var, "kam": hk_var})
    details.update(jam_length=hj_len, kam_length=hk_len, up_length=hj_up, var_count=hj_var)
    return CheckReport(name, True, details)


# ---------------------------------------------------------------------------
# Weights against run lengths; derivation machine against the interaction machine


def check_iam_siam(term: Term, fuel: int = DEFAULT_FUEL) -> CheckReport:
    """Observable bisimulation: same label and (subterm, direction) sequences."""
    name = "iam-siam"
    details: dict = {"term": pretty(term)}
    try:
        deriv = mt.infer_star_derivation(term, fuel)
    except Diverged:
        return _inconclusive(name, term, fuel)
    index = TermIndex(term)
    dindex = siam.DerivationIndex(deriv, term)
    it_i = liam.trajectory(index, fuel)
    it_s = siam.trajectory(dindex, fuel)
    step_no = 0
    try:
        while True:
            nxt_i = next(it_i, None)
            nxt_s = next(it_s, None)
            if (nxt_i is None) != (nxt_s is None):
                return CheckReport(name, False, {
                    **details, "step": step_no, "reason": "runs ended out of sync"})
            if nxt_i is None:
                break
            label_i, s_i = nxt_i
            label_s, s_s = nxt_s
            if label_i != label_s:
                return CheckReport(name, False, {
                    **details, "step": step_no, "iam": label_i, "siam": label_s})
            pos_s, dir_s = siam.observable(s_s)
            if (s_i.pos, s_i.dir) != (pos_s, dir_s):
                return CheckReport(name, False, {
                    **details, "step": step_no, "reason": "observables differ"})
            step_no += 1
    except FuelExhausted:
        return _inconclusive(name, term, fuel)
    details["length"] = step_no - 1
    return CheckReport(name, True, details)


def check_weights(term: Term, fuel: int = DEFAULT_FUEL) -> CheckReport:
    name = "weights"
    details: dict = {"term": pretty(term)}
    try:
        deriv = mt.infer_star_derivation(term, fuel)
        problems = mt.validate(deriv, term)
        if problems:
            return CheckReport(name, False, {**details, "invalid": problems[:5]})
        kam_report = kam.run(term, fuel)
        iam_report = liam.run(term, fuel)
        _, coverage = siam.run(deriv, term, fuel)
    except (Diverged, FuelExhausted):
        return _inconclusive(name, term, fuel)
    w_kam = mt.weight_kam(deriv)
    w_iam = mt.weight_iam(deriv)
    stars = mt.star_count(deriv)
    ok = (
        w_kam == kam_report.length
        and w_iam == iam_report.length
        and coverage.hamiltonian
        and coverage.length == stars - 1
        and w_iam == stars - 1
    )
    details.update(
        w_kam=w_kam, kam_length=kam_report.length,
        w_iam=w_iam, iam_length=iam_report.length,
        stars=stars, siam_length=coverage.length,
        coverage=f"{coverage.visited}/{coverage.stars}",
    )
    return CheckReport(name, ok, details)


def check_quadratic_bound(terms, fuel: int = DEFAULT_FUEL) -> CheckReport:
    """Pointwise |K| <= |J| <= |K| + vars(J)^2 * |t| over a corpus."""
    name = "quadratic"
    rows = []
    for term in terms:
        try:
            j = ljam.run(term, fuel)
            k = kam.run(term, fuel)
        except FuelExhausted:
            continue
        size = TermIndex(term).size
        vars_j = j.per_label.get("var", 0)
        if not (k.length <= j.length <= k.length + vars_j * vars_j * size):
            return CheckReport(name, False, {
                "term": pretty(term), "kam": k.length, "jam": j.length,
                "vars": vars_j, "size": size})
        rows.append((k.length, j.length))
    return CheckReport(name, True, {"checked": len(rows)})


# ---------------------------------------------------------------------------
# Per-machine invariant sweep (debug mode plus run-level identities)


def check_backtracking_brackets(term: Term, fuel: int = DEFAULT_FUEL) -> CheckReport:
    name = "bt-brackets"
    index = TermIndex(term)
    stack: list = []
    prev = None
    try:
        for label, state in liam.trajectory(index, fuel):
            if label == "bt1":
                stack.append(id(state.tape.head))
            elif label == "bt2":
                if not stack or stack[-1] != id(prev.tape.head):
                    return CheckReport(name, False, {
                        "term": pretty(term),
                        "reason": "bt2 does not exhaust the innermost pending bt1"})
                stack.pop()
            prev = state
    except FuelExhausted:
        return _inconclusive(name, term, fuel)
    if stack:
        return CheckReport(name, False, {
            "term": pretty(term), "reason": "unmatched bt1 at the end of the run"})
    return CheckReport(name, True, {"term": pretty(term)})


def check_jam_up_phases(term: Term, fuel: int = DEFAULT_FUEL) -> CheckReport:
    name = "jam-up-phases"
    index = TermIndex(term)
    size = index.size
    phase_len = 0
    phase_bound = None
    total_up = 0
    var_count = 0
    prev_dir = None
    prev_state = None
    try:
        for label, state in ljam.trajectory(index, fuel):
            if label is not None:
                var_count += label == "var"
                if prev_dir == ljam.UP:
                    if phase_len == 0:
                        phase_bound = ljam.depth(prev_state) * size
                    phase_len += 1
                    total_up += 1
                    if phase_len > phase_bound:
                        return CheckReport(name, False, {
                            "term": pretty(term),
                            "reason": "up phase exceeds depth * size bound"})
                else:
                    phase_len = 0
            prev_dir = state.dir
            prev_state = state
            if state.dir != ljam.UP:
                phase_len = 0
    except FuelExhausted:
        return _inconclusive(name, term, fuel)
    if total_up > var_count * var_count * size:
        return CheckReport(name, False, {
            "term": pretty(term), "reason": "total up length exceeds vars^2 * size"})
    return CheckReport(name, True, {"term": pretty(term), "up": total_up, "vars": var_count})


def check_siam_bideterminism(term: Term, fuel: int = DEFAULT_FUEL) -> CheckReport:
    name = "siam-bidet"
    try:
        deriv = mt.infer_star_derivation(term, fuel)
    except Diverged:
        return _inconclusive(name, term, fuel)
    dindex = siam.DerivationIndex(deriv, term)
    prev = None
    prev_label = None
    try:
        for label, state in siam.trajectory(dindex, fuel):
            if prev is not None:
                back = siam.step_back(dindex, state)
                if back is None:
                    return CheckReport(name, False, {
                        "term": pretty(term), "reason": "reached state has no predecessor"})
                blabel, bstate = back
                if blabel != label or siam.occurrence(dindex, bstate) != siam.occurrence(
                    dindex, prev
                ) or bstate.dir != prev.dir:
                    return CheckReport(name, False, {
                        "term": pretty(term), "reason": "inverse step disagrees"})
            prev = state
            prev_label = label
    except FuelExhausted:
        return _inconclusive(name, term, fuel)
    return CheckReport(name, True, {"term": pretty(term)})


def check_invariants_suite(term: Term, fuel: int = DEFAULT_FUEL) -> CheckReport:
    """Debug-mode per-step invariants for every machine plus run-level identities."""
    name = "invariants"
    details: dict = {"term": pretty(term)}
    try:
        iam_report = liam.run(term, fuel, debug=True)
        jam_report = ljam.run(term, fuel, debug=True)
        pam_report = lpam.run(term, fuel, debug=True)
        kam_report = kam.run(term, fuel, debug=True)
        ham.run(term, ham.J_MODE, fuel, debug=True)
        ham.run(term, ham.K_MODE, fuel, debug=True)
    except FuelExhausted:
        return _inconclusive(name, term, fuel)
    except AssertionError as exc:
        return CheckReport(name, False, {**details, "violated": str(exc)})
    beta = len(whnf_trace(term, fuel))
    abs_count = kam_report.per_label.get("abs", 0)
    var_count = kam_report.per_label.get("var", 0)
    if kam_report.length != var_count + 2 * abs_count:
        return CheckReport(name, False, {**details, "reason": "Krivine length identity fails"})
    if abs_count != beta:
        return CheckReport(name, False, {
            **details, "reason": "abs transitions differ from reduction steps"})
    for sub in (
        check_backtracking_brackets(term, fuel),
        check_jam_up_phases(term, fuel),
        check_siam_bideterminism(term, fuel),
    ):
        if not sub.passed:
            return CheckReport(name, False, {**details, "sub": sub.name, **sub.details})
    if jam_report.length != pam_report.length:
        return CheckReport(name, False, {**details, "reason": "jam/pam lengths differ"})
    return CheckReport(name, True, details)
