import pytest

from lamrun import liam, multitypes as mt, siam
from lamrun.reporting import Next
from lamrun.syntax import TermIndex, parse


def test_identity_initial_is_final():
    t = parse("\\x.x")
    deriv = mt.infer_star_derivation(t, 10)
    report, coverage = siam.run(deriv, t, 10)
    assert report.length == 0
    assert coverage.hamiltonian and coverage.stars == 1


def test_non_star_derivation_rejected():
    from lamrun.syntax import BODY

    deriv = mt.DLam((), (mt.STAR,), mt.DVar((BODY,), 0, mt.STAR),
                    mt.Arrow((mt.STAR,), mt.STAR))
    with pytest.raises(siam.NotStarDerivationError):
        siam.initial(siam.DerivationIndex(deriv, parse("\\x.x")))


EXPECTED_RUNNING_ORDER = [
    ("", "·", "up"),
    ("Fun", "T", "up"),
    ("Fun/Fun", "T/T", "up"),
    ("Fun/Fun/Body", "T", "up"),
    ("Fun/Fun/Body/Body", "·", "up"),
    ("Fun/Fun/Body/Body/Fun", "T", "up"),
    ("Fun/Fun/Body", "E1/T", "down"),
    ("Fun/Fun", "T/E1/T", "down"),
    ("Fun", "E1/T", "down"),
    ("Arg", "T", "up"),
    ("Arg/Body", "·", "up"),
    ("Arg", "E1", "down"),
    ("Fun", "E1/E1", "up"),
    ("Fun/Fun", "T/E1/E1", "up"),
    ("Fun/Fun/Body", "E1/E1", "up"),
    ("Fun/Fun/Body/Body/Fun", "E1", "down"),
    ("Fun/Fun/Body/Body/Arg", "·", "up"),
    ("Fun/Fun", "E1", "down"),
    ("Fun/Arg", "·", "up"),
]


def test_visits_every_star_once_in_order(running_example):
    deriv = mt.infer_star_derivation(running_example, 10)
    dindex = siam.DerivationIndex(deriv, running_example)
    rows = [
        ("/".join(s.node.term_pos), siam.tpath_str(s.tpath), s.dir)
        for _, s in siam.trajectory(dindex, 100)
    ]
    assert rows == EXPECTED_RUNNING_ORDER
    report, coverage = siam.run(dindex, fuel=100)
    assert report.length == 18
    assert coverage.hamiltonian and coverage.stars == 19 and coverage.repeated == 0


def test_duplication_coverage(duplication_example):
    deriv = mt.infer_star_derivation(duplication_example, 10)
    report, coverage = siam.run(deriv, duplication_example, 100)
    assert report.length == 12
    assert coverage.hamiltonian and coverage.stars == 13


def test_observable_projection_matches_interaction_machine(running_example, corpus):
    for term in [running_example] + corpus[:30]:
        deriv = mt.infer_star_derivation(term, 10**6)
        dindex = siam.DerivationIndex(deriv, term)
        index = TermIndex(term)
        siam_obs = [(lbl,) + siam.observable(s) for lbl, s in siam.trajectory(dindex, 10**6)]
        iam_obs = [(lbl, s.pos, s.dir) for lbl, s in liam.trajectory(index, 10**6)]
        assert [(l, "/".join(p), d) for l, p, d in iam_obs] == [
            (l, "/".join(p), d) for l, p, d in siam_obs]


def test_initial_projects_to_root_down(running_example):
    deriv = mt.infer_star_derivation(running_example, 10)
    dindex = siam.DerivationIndex(deriv, running_example)
    assert siam.observable(siam.initial(dindex)) == ((), "down")


def test_bideterminism(running_example, duplication_example, corpus):
    for term in [running_example, duplication_example] + corpus[:25]:
        deriv = mt.infer_star_derivation(term, 10**6)
        dindex = siam.DerivationIndex(deriv, term)
        prev = None
        for label, state in siam.trajectory(dindex, 10**6):
            if prev is not None:
                back = siam.step_back(dindex, state)
                assert back is not None
                blabel, bstate = back
                assert blabel == label
                assert bstate.node is prev.node and bstate.tpath == prev.tpath
                assert bstate.dir == prev.dir
                fwd = siam.step(dindex, bstate)
                assert isinstance(fwd, Next) and fwd.state.node is state.node
            prev = state
        assert siam.step_back(dindex, siam.initial(dindex)) is None


def test_var_bt2_roundtrip(running_example, duplication_example):
    # the binder-axiom index round-trips: var targets entry i of the domain,
    # and entry i of the domain sends bt2 back to axiom i
    for term in (running_example, duplication_example):
        deriv = mt.infer_star_derivation(term, 10)
        dindex = siam.DerivationIndex(deriv, term)
        for node in dindex.nodes:
            if not isinstance(node, mt.DVar):
                continue
            binder, i = dindex.binder[id(node)]
            after_var = siam.step(dindex, siam.SiamState(node, (), siam.TO_LEAVES))
            assert after_var.label == "var"
            assert after_var.state.node is binder and after_var.state.tpath == (i,)
            after_bt2 = siam.step(dindex, siam.SiamState(binder, (i,), siam.TO_LEAVES))
            assert after_bt2.label == "bt2"
            assert after_bt2.state.node is node and after_bt2.state.tpath == ()


def test_no_state_repeats(corpus):
    for term in corpus[:30]:
        deriv = mt.infer_star_derivation(term, 10**6)
        _, coverage = siam.run(deriv, term, 10**6)
        assert coverage.repeated == 0
        assert coverage.visited == coverage.stars
        assert coverage.length == coverage.stars - 1
