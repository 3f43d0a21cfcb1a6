from hypothesis import given, strategies as st

from lamrun import tokens as tk
from lamrun.syntax import ARG, BODY, FUN


def lp(var, scope=(), flavor=tk.LOCAL, log=None):
    return tk.LoggedPosition(var, scope, flavor, log)


def test_footprint_empty():
    assert tk.footprint(tk.nil, tk.nil) == tk.SpaceFootprint(0, 0, 0)


def test_footprint_peak_shape():
    # markers^k then two logged positions then markers^h: the peak state shape
    k, h = 2, 4
    p1 = lp((FUN,))
    p2 = lp((ARG,))
    tape = tk.from_list([tk.MARKER] * k + [p1, p2] + [tk.MARKER] * h)
    fp = tk.footprint(tk.nil, tape)
    assert (fp.lp_count, fp.marker_count) == (2, h + k)


def test_footprint_counts_log_and_tape():
    fp = tk.footprint(tk.cons(lp((FUN,)), tk.nil), tk.cons(tk.MARKER, tk.nil))
    assert (fp.lp_count, fp.marker_count) == (1, 1)


def test_footprint_flavor_invariant():
    inner = lp((ARG,))
    local = lp((FUN, BODY), scope=(FUN,), flavor=tk.LOCAL, log=tk.cons(inner, tk.nil))
    glob = lp((FUN, BODY), scope=(), flavor=tk.GLOBAL, log=tk.cons(inner, tk.nil))
    t1 = tk.footprint(tk.nil, tk.cons(local, tk.nil))
    t2 = tk.footprint(tk.nil, tk.cons(glob, tk.nil))
    assert (t1.lp_count, t1.marker_count) == (t2.lp_count, t2.marker_count) == (1, 0)


def test_nesting_affects_deep_cells_only():
    shallow = lp((FUN,))
    deep = lp((FUN,), log=tk.cons(lp((ARG,)), tk.nil))
    f1 = tk.footprint(tk.nil, tk.cons(shallow, tk.nil))
    f2 = tk.footprint(tk.nil, tk.cons(deep, tk.nil))
    assert (f1.lp_count, f1.marker_count) == (f2.lp_count, f2.marker_count)
    assert f2.deep_cells > f1.deep_cells


def test_shared_cells_counted_once():
    shared = tk.cons(lp((ARG,)), tk.nil)
    a = lp((FUN,), log=shared)
    b = lp((BODY,), log=shared)
    fp = tk.footprint(tk.nil, tk.from_list([a, b]))
    # one cell for the shared log, two for the tape spine
    assert fp.deep_cells == 3


def test_cons_shares_tail():
    base = tk.from_list([1, 2, 3])
    extended = tk.cons(0, base)
    assert extended.tail is base
    assert tk.to_list(base) == [1, 2, 3]


@given(st.lists(st.integers(), max_size=10), st.integers(0, 10))
def test_take_drop_partition(items, n):
    xs = tk.from_list(items)
    if n > len(items):
        return
    assert tk.to_list(tk.take(xs, n)) == items[:n]
    assert tk.to_list(tk.drop(xs, n)) == items[n:]
    assert tk.to_list(tk.concat(tk.take(xs, n), tk.drop(xs, n))) == items


@given(st.lists(st.integers(), max_size=8), st.lists(st.integers(), max_size=8))
def test_concat_lengths(a, b):
    assert tk.to_list(tk.concat(tk.from_list(a), tk.from_list(b))) == a + b


def test_persistence_under_extension():
    captured = tk.from_list([lp((FUN,)), tk.MARKER])
    before = tk.tape_to_json(captured)
    _ = tk.cons(lp((ARG,)), captured)
    _ = tk.cons(tk.MARKER, captured)
    assert tk.tape_to_json(captured) == before


def test_lp_equal_on_shared_structures():
    memo = {}
    inner = lp((ARG,))
    a = lp((FUN,), log=tk.cons(inner, tk.nil))
    b = lp((FUN,), log=tk.cons(lp((ARG,)), tk.nil))
    c = lp((FUN,), log=tk.cons(lp((BODY,)), tk.nil))
    assert tk.lp_equal(a, b, memo)
    assert not tk.lp_equal(a, c, memo)
    assert tk.tape_equal(tk.from_list([tk.MARKER, a]), tk.from_list([tk.MARKER, b]), memo)
    assert not tk.tape_equal(tk.from_list([a]), tk.from_list([tk.MARKER]), memo)


def test_serialization_shape():
    a = lp((FUN, BODY), scope=(FUN,), log=tk.cons(lp((ARG,)), tk.nil))
    doc = tk.lp_to_json(a)
    assert doc["var"] == "Fun/Body"
    assert doc["scope"] == "Fun"
    assert doc["flavor"] == "local"
    assert doc["log"][0]["var"] == "Arg"
    assert tk.tape_to_json(tk.from_list([tk.MARKER, a]))[0] == "p"
