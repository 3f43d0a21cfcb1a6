from lamrun import ljam, tokens as tk
from lamrun.equivalence import check_jam_up_phases
from lamrun.syntax import ARG, BODY, FUN, TermIndex, parse


def test_identity_final():
    report = ljam.run(parse("\\x.x"), 10)
    assert report.length == 0 and report.up_length == 0


def test_var_stores_global_position_and_whole_log(running_example):
    index = TermIndex(running_example)
    log = tk.cons(tk.LoggedPosition((FUN, FUN, BODY, BODY, FUN), (), tk.GLOBAL, None), None)
    s = ljam.JamState((ARG, BODY), tk.nil, log, ljam.DOWN)
    result = ljam.step(index, s)
    assert result.label == "var"
    lp = result.state.tape.head
    assert lp.var_path == (ARG, BODY)
    assert lp.flavor == tk.GLOBAL and lp.scope_path == ()
    assert lp.log is log  # shared, not copied
    assert result.state.log is log  # inner level 0 pops nothing


def test_jmp_restores_position_and_log(running_example):
    index = TermIndex(running_example)
    px = tk.LoggedPosition((FUN, FUN, BODY, BODY, FUN), (), tk.GLOBAL, None)
    pz = tk.LoggedPosition((ARG, BODY), (), tk.GLOBAL, tk.cons(px, None))
    s = ljam.JamState((ARG,), tk.cons(pz, tk.nil), tk.cons(px, tk.nil), ljam.UP)
    result = ljam.step(index, s)
    assert result.label == "jmp"
    assert result.state.pos == (FUN, FUN, BODY, BODY, FUN)
    assert result.state.log is px.log  # the stored log, here empty
    assert result.state.tape.head is pz  # tape untouched


def test_depth_examples(running_example):
    index = TermIndex(running_example)
    assert ljam.depth(ljam.initial(index)) == 0
    inner = tk.LoggedPosition((ARG, BODY), (), tk.GLOBAL, None)
    outer = tk.LoggedPosition((FUN, FUN, BODY, BODY, ARG), (), tk.GLOBAL,
                              tk.cons(inner, None))
    s = ljam.JamState((), tk.nil, tk.cons(outer, tk.nil), ljam.DOWN)
    assert ljam.depth(s) == 2


def test_depth_equals_var_count(running_example, corpus):
    for term in [running_example] + corpus[:30]:
        index = TermIndex(term)
        vars_seen = 0
        for label, state in ljam.trajectory(index, 10**6):
            vars_seen += label == "var"
            assert ljam.depth(state) == vars_seen


def test_debug_invariants(running_example, duplication_example):
    for term in (running_example, duplication_example):
        ljam.run(term, 100, debug=True)


def test_up_length_counts_up_transitions(running_example):
    report = ljam.run(running_example, 100)
    expected = sum(report.per_label.get(lbl, 0) for lbl in ("p3", "p4", "arg", "jmp"))
    assert report.up_length == expected == 6


def test_log_sharing_keeps_var_cheap(corpus):
    # a var transition adds O(1) new cells: the stored log is shared, not copied
    for term in corpus[:30]:
        index = TermIndex(term)
        prev_cells = 0
        prev = None
        for label, state in ljam.trajectory(index, 10**6):
            cells = ljam.state_footprint(state).deep_cells
            if label == "var":
                binder, inner = index.binder_at[prev.pos]
                assert cells - prev_cells <= 2 + inner
            prev_cells = cells
            prev = state


def test_up_phase_bounds(running_example, corpus):
    assert check_jam_up_phases(running_example, 1000).passed
    for term in corpus[:50]:
        assert check_jam_up_phases(term, 10**6).passed
