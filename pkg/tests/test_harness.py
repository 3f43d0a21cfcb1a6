import json

import pytest

from lamrun import harness, liam, ljam
from lamrun.syntax import App, is_closed, parse, skeleton, term_size


def test_family_tn_base():
    assert harness.family_tn(1) == harness.IDENTITY


def test_family_tn_three():
    t = harness.family_tn(3)
    expected = App(App(harness.IDENTITY, harness.IDENTITY), harness.IDENTITY)
    assert t == expected


def test_family_tn_size_linear():
    sizes = [term_size(harness.family_tn(n)) for n in range(1, 8)]
    deltas = {b - a for a, b in zip(sizes, sizes[1:])}
    assert deltas == {3}


def test_family_tn_rejects_zero():
    with pytest.raises(ValueError):
        harness.family_tn(0)


def test_family_rkh_smallest():
    t = harness.family_rkh(1, 1)
    expected = parse("(\\x1.\\y.y (\\z1.\\z.z)) (\\x.x) (\\w.w (\\x.x))")
    assert skeleton(t) == skeleton(expected)


def test_family_rkh_closed():
    for k in range(1, 5):
        for h in range(1, 5):
            assert is_closed(harness.family_rkh(k, h))


def test_family_rkh_peak_markers():
    t = harness.family_rkh(2, 4)
    iam_peak = liam.run(t, 10**5).peak.marker_count
    jam_peak = ljam.run(t, 10**5).peak.marker_count
    assert (iam_peak, jam_peak) == (6, 4)


def test_gen_corpus_empty():
    assert harness.gen_corpus(1, 0, 10) == []


def test_gen_corpus_deterministic():
    a = harness.gen_corpus(7, 40, 30)
    b = harness.gen_corpus(7, 40, 30)
    assert a == b


def test_gen_corpus_retention(corpus):
    # retention measured once for seed 42, 200 candidates, size cap 40
    assert len(corpus) == 132
    assert len(corpus) >= 50
    assert all(is_closed(t) and term_size(t) <= 40 for t in corpus)


def test_compare_row(running_example):
    row = harness.compare(running_example, 1000, with_types=True)
    lengths = {name: entry["length"] for name, entry in row["machines"].items()}
    assert lengths["jam"] == lengths["pam"] == 15
    assert lengths["iam"] == 18 and lengths["kam"] == 9
    assert lengths["kam"] < lengths["jam"] < lengths["iam"]
    assert row["weights"] == {"w_kam": 9, "w_iam": 18, "stars": 19}


def test_compare_identity():
    row = harness.compare(parse("\\x.x"), 10)
    assert all(entry["length"] == 0 for entry in row["machines"].values())


def test_compare_records_fuel_exhaustion(omega):
    row = harness.compare(omega, 50)
    assert all(entry["outcome"] == "fuel" for entry in row["machines"].values())


def test_report_arithmetic(running_example, corpus):
    for term in [running_example] + corpus[:30]:
        for name in ("iam", "jam", "pam", "kam"):
            report = harness.run_machine(name, term, 10**6)
            assert report.length == sum(report.per_label.values())
            vars_ = sum(v for k, v in report.per_label.items() if k.startswith("var"))
            assert report.ram_cost_bound == (report.length - vars_) + vars_ * term_size(term)


def test_trace_jsonl_roundtrip(running_example):
    report = liam.run(running_example, 100, trace=True)
    lines = [json.dumps(ev.to_json()) for ev in report.events]
    parsed = [json.loads(line) for line in lines]
    assert parsed == [ev.to_json() for ev in report.events]
    assert [p["step"] for p in parsed] == list(range(len(parsed)))


def test_exponential_family_runs():
    t = harness.family_tn(5)
    row = harness.compare(t, 10**5)
    assert row["machines"]["iam"]["length"] == 60
    assert row["machines"]["kam"]["length"] == 12
