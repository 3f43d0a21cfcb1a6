import pytest

from lamrun import lpam, tokens as tk
from lamrun.lpam import History, UndefinedLookup, phi, phi_pow
from lamrun.syntax import ARG, BODY, FUN, TermIndex, parse


def test_phi_zero_power_is_identity():
    h = History().append((FUN,), 0)
    assert phi_pow(h, 1, 0) == 1
    assert phi_pow(h, 7, 0) == 7  # no lookups, no bounds involved


def test_phi_single_entry():
    h = History().append((FUN,), 0)
    assert phi(h, 1) == 0


def test_phi_chain():
    h = History().append((FUN,), 0).append((ARG,), 0).append((BODY,), 0)
    assert phi_pow(h, 2, 1) == 0
    assert h.entry(2) == ((ARG,), 0)


def test_phi_undefined_on_zero():
    h = History().append((FUN,), 0)
    with pytest.raises(UndefinedLookup):
        phi_pow(h, 1, 2)  # second hop reads entry 0


def test_history_is_persistent():
    h1 = History().append((FUN,), 0)
    h2 = h1.append((ARG,), 1)
    assert len(h1) == 1 and len(h2) == 2
    assert h1.to_json() == [{"pos": "Fun", "idx": 0}]


def test_var_keeps_index_at_level_zero(running_example):
    index = TermIndex(running_example)
    s = lpam.PamState((FUN, FUN, BODY, BODY, FUN), History(), 0,
                      tk.cons(tk.MARKER, tk.nil), lpam.DOWN)
    result = lpam.step(index, s)
    assert result.label == "var" and result.state.index == 0
    assert result.state.tape.head == (FUN, FUN, BODY, BODY, FUN)
    assert result.cost == 0


def test_arg_appends_indexed_position(running_example):
    index = TermIndex(running_example)
    pos = (FUN, FUN, BODY, BODY, FUN)
    s = lpam.PamState((FUN,), History(), 0, tk.cons(pos, tk.cons(tk.MARKER, tk.nil)),
                      lpam.UP)
    result = lpam.step(index, s)
    assert result.label == "arg"
    assert result.state.history.entries() == [(pos, 0)]
    assert result.state.index == 1
    assert result.state.pos == (ARG,)


def test_jmp_decrements_index(running_example):
    index = TermIndex(running_example)
    pos = (FUN, FUN, BODY, BODY, FUN)
    h = History().append(pos, 0)
    s = lpam.PamState((ARG,), h, 1, tk.cons((ARG, BODY), tk.nil), lpam.UP)
    result = lpam.step(index, s)
    assert result.label == "jmp"
    assert result.state.pos == pos and result.state.index == 0
    assert result.state.tape.head == (ARG, BODY)


def test_final_history_running_example(running_example):
    report = lpam.run(running_example, 100)
    final = report.final_state
    assert final.index == 3
    assert [e["pos"] for e in final.history.to_json()] == [
        "Fun/Fun/Body/Body/Fun", "Arg/Body", "Fun/Fun/Body/Body/Arg"]


def test_debug_invariants(running_example, duplication_example, corpus):
    for term in [running_example, duplication_example] + corpus[:40]:
        lpam.run(term, 10**6, debug=True)


def test_identity_final():
    assert lpam.run(parse("\\x.x"), 10).length == 0
