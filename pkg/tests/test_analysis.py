import csv
import io
import json

import pytest

from dictator_eval.agents import MockAgent, MockAgentSpec, TrialPlan, run_trials
from dictator_eval.analysis import (REGRESSION_COLUMNS, align_dirs, analyze, column_labels, fmt,
                                    read_regression_csv, write_files)
from dictator_eval.errors import StoreError
from dictator_eval.store import MemoryStore


def run(kind="engel_mixture", n=300, seed=1, model=None, **params):
    store = MemoryStore({"perspective": "SoS", "run_id": "abc"})
    run_trials(TrialPlan("SoS", n, seed, model or f"mock-{kind}"), MockAgent(MockAgentSpec(kind, params)),
               1, store)
    return store.load()


@pytest.fixture(scope="module")
def files():
    return analyze(run())


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_expected_files(files):
    assert set(files) == {"performance.csv", "descriptives.csv", "distribution.csv", "spikes.csv",
                          "regression_main.csv", "regression_liwc.csv", "analysis.json"}


def test_performance_table(files):
    (row,) = rows(files["performance.csv"])
    assert row["model_id"] == "mock-engel_mixture"
    assert row["n_trials"] == "300" and row["n_logically_correct"] == "300"


def test_descriptives_both_fields(files):
    fields = [r["field"] for r in rows(files["descriptives.csv"])]
    assert fields == ["amount_transfer", "giving_rate"]


def test_distribution_counts(files):
    counts = [int(r["count"]) for r in rows(files["distribution.csv"])]
    assert len(counts) == 20 and sum(counts) == 300
    spikes = rows(files["spikes.csv"])
    assert [r["giving_rate"] for r in spikes] == ["0.0", "0.5", "1.0"]


def test_regression_tables(files, tmp_path):
    for name in ("regression_main.csv", "regression_liwc.csv"):
        table = rows(files[name])
        assert tuple(table[0]) == REGRESSION_COLUMNS
        assert table[0]["term"] == "const"
    write_files(tmp_path, files)
    coefs = read_regression_csv(tmp_path / "regression_liwc.csv")
    assert "liwc_posemo" in coefs and all(0 <= p <= 1 for _, p in coefs.values())


def test_summary(files):
    summary = json.loads(files["analysis.json"])
    assert summary["model_id"] == "mock-engel_mixture" and summary["perspective"] == "SoS"
    assert summary["regression_main"]["n"] == 300
    assert summary["dv"] == "amount_transfer"


def test_deterministic():
    assert analyze(run(n=120)) == analyze(run(n=120))


def test_giving_rate_dv():
    out = analyze(run(n=150), dv="giving_rate")
    assert json.loads(out["analysis.json"])["dv"] == "giving_rate"
    with pytest.raises(ValueError):
        analyze(run(n=10), dv="payment")


def test_too_few_trials_recorded_not_raised():
    out = analyze(run(n=12))
    summary = json.loads(out["analysis.json"])
    assert "error" in summary["regression_main"]
    assert out["regression_main.csv"] == ",".join(REGRESSION_COLUMNS) + "\n"


def test_mixed_models_rejected():
    records = run(n=5).records + run(n=5, model="other").records
    with pytest.raises(StoreError, match="one model"):
        analyze(records)


def test_fmt():
    assert fmt(None) == "" and fmt(3) == "3" and fmt(0.1) == "0.1"
    assert fmt(float("inf")) == "inf" and fmt(float("nan")) == "nan"


def test_column_labels():
    assert column_labels([{"model_id": "a"}, {"model_id": "b"}]) == ["a", "b"]
    assert column_labels([{"model_id": "a", "perspective": "SoS"},
                          {"model_id": "a", "perspective": "ToM"}]) == ["a [SoS]", "a [ToM]"]
    with pytest.raises(StoreError):
        column_labels([{"model_id": "a", "perspective": "SoS"}] * 2)


def test_align_dirs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    write_files(a, analyze(run(n=200)))
    write_files(b, analyze(run("planted_effects", n=200, const=-6, stake=0.5, female=4, sigma=2)))
    report = align_dirs([a, b])
    assert report.models == ["mock-engel_mixture", "mock-planted_effects"]
    assert report.blocks["main"].cells[("female", "mock-planted_effects")].value == "✓"


def test_read_regression_bad_header(tmp_path):
    (tmp_path / "r.csv").write_text("a,b\n1,2\n")
    with pytest.raises(StoreError, match="columns"):
        read_regression_csv(tmp_path / "r.csv")
    with pytest.raises(StoreError, match="missing"):
        read_regression_csv(tmp_path / "nope.csv")
