"""Turn a stored run into the analysis tables: CSV text keyed by file name.

Everything here is a pure function of the records and the data files, and
floats are written with ``repr`` so re-running an analysis reproduces its
output byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from pathlib import Path

from .alignment import AlignmentReport, BaselineTable, alignment_matrix
from .errors import RegressionError, StoreError
from .lexicon import Lexicon, default_lexicon, score_text
from .persona import DemographicPools, default_pools
from .stats import (COMPASSION, DEPENDENTS, EMPATHY, CollinearityWarning, ModelSpec, RegressionResult,
                    describe, design_matrix, giving_rate_distribution, ols_fit)
from .validator import tally_performance

REGRESSION_COLUMNS = ("term", "estimate", "se", "t", "p", "ci_lo", "ci_hi")
DESCRIBED_FIELDS = ("amount_transfer", "giving_rate")
ANALYSIS_FILES = ("performance.csv", "descriptives.csv", "distribution.csv", "spikes.csv",
                  "regression_main.csv", "regression_liwc.csv", "analysis.json")


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, int, str)):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def score_reasons(records, lexicon: Lexicon) -> dict:
    return {r["trial_id"]: score_text(r.get("reason_transfer") or "", lexicon) for r in records}


def performance_csv(records) -> str:
    rows = [(r.model_id, r.n_trials, r.n_correct_format, r.n_logically_correct,
             round(r.pct_logically_correct, 2), round(r.pct_of_correct_format, 2))
            for r in tally_performance(records)]
    return _csv(("model_id", "n_trials", "n_correct_format", "n_logically_correct", "pct",
                 "pct_of_correct_format"), rows)


def descriptives_csv(correct) -> str:
    rows = []
    for name in DESCRIBED_FIELDS:
        for model, d in describe(correct, name).items():
            rows.append((model, name, d.count, d.mean, d.std, d.min, d.q25, d.median, d.q75, d.max))
    return _csv(("model_id", "field", "count", "mean", "std", "min", "q25", "median", "q75", "max"), rows)


def regression_csv(result: RegressionResult | None) -> str:
    rows = []
    if result is not None:
        rows = [(c.term, c.estimate, c.se, c.t, c.p, c.ci_lo, c.ci_hi) for c in result.coefficients()]
    return _csv(REGRESSION_COLUMNS, rows)


def read_regression_csv(path: str | Path) -> dict[str, tuple[float, float]]:
    """Read a regression CSV back as ``{term: (estimate, p)}``."""
    path = Path(path)
    if not path.exists():
        raise StoreError(f"missing regression table {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != REGRESSION_COLUMNS:
            raise StoreError(f"{path}: expected columns {','.join(REGRESSION_COLUMNS)}")
        return {row["term"]: (float(row["estimate"]), float(row["p"])) for row in reader}


def _fit(correct, spec, scores, pools):
    """Fit one specification; returns (result or None, dropped terms, error text)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CollinearityWarning)
        try:
            dm = design_matrix(correct, spec, scores, pools)
            return ols_fit(dm.X, dm.y, dm.labels), dm.dropped, None
        except (RegressionError, ValueError) as exc:
            return None, [], str(exc)


def _fit_summary(result, dropped, error) -> dict:
    if result is None:
        return {"error": error}
    return {"n": result.n, "k": result.k, "r2": result.r2, "sigma2": result.sigma2, "dropped": dropped}


def analyze(trials, *, dv: str = "amount_transfer", lexicon: Lexicon | None = None,
            pools: DemographicPools | None = None) -> dict[str, str]:
    """All analysis tables for one run (a single model)."""
    if dv not in DEPENDENTS:
        raise ValueError(f"dv must be one of {DEPENDENTS}")
    records = list(trials)
    manifest = getattr(trials, "manifest", {}) or {}
    models = sorted({r["model_id"] for r in records})
    if len(models) > 1:
        raise StoreError(f"a run should hold one model; found {', '.join(models)}")
    lexicon = lexicon or default_lexicon()
    pools = pools or default_pools()
    correct = [r for r in records if r["logically_correct"]]

    dist = giving_rate_distribution(correct)
    model = models[0] if models else manifest.get("model_id", "")
    dist_rows = [(model, lo, hi, int(c)) for lo, hi, c in zip(dist.edges[:-1], dist.edges[1:], dist.counts)]
    spike_rows = [(model, g, share, dist.n) for g, share in dist.spikes.items()]

    scores = score_reasons(correct, lexicon)
    main_spec = ModelSpec(dependent=dv)
    liwc_spec = main_spec.with_liwc(COMPASSION + EMPATHY)
    main = _fit(correct, main_spec, None, pools)
    liwc = _fit(correct, liwc_spec, scores, pools)

    summary = {
        "model_id": model,
        "perspective": manifest.get("perspective"),
        "run_id": manifest.get("run_id"),
        "dv": dv,
        "n_trials": len(records),
        "n_logically_correct": len(correct),
        "n_empty_reason": sum(s.empty_text for s in scores.values()),
        "lexicon_categories": [c for c in liwc_spec.liwc if c in lexicon.categories],
        "regression_main": _fit_summary(*main),
        "regression_liwc": _fit_summary(*liwc),
    }
    return {
        "performance.csv": performance_csv(records),
        "descriptives.csv": descriptives_csv(correct),
        "distribution.csv": _csv(("model_id", "bin_lo", "bin_hi", "count"), dist_rows),
        "spikes.csv": _csv(("model_id", "giving_rate", "share", "n"), spike_rows),
        "regression_main.csv": regression_csv(main[0]),
        "regression_liwc.csv": regression_csv(liwc[0]),
        "analysis.json": json.dumps(summary, indent=2, sort_keys=True, allow_nan=False) + "\n",
    }


def write_files(out_dir: str | Path, files: dict[str, str]) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8")


def read_analysis(analysis_dir: str | Path) -> dict:
    path = Path(analysis_dir) / "analysis.json"
    if not path.exists():
        raise StoreError(f"no analysis.json in {analysis_dir}")
    return json.loads(path.read_text(encoding="utf-8"))


def column_labels(summaries: list[dict]) -> list[str]:
    """Model column names; the perspective is appended only when a model repeats."""
    ids = [s.get("model_id") or "?" for s in summaries]
    labels = []
    for s, mid in zip(summaries, ids):
        labels.append(f"{mid} [{s.get('perspective')}]" if ids.count(mid) > 1 else mid)
    if len(set(labels)) != len(labels):
        raise StoreError("two analyses share a model id and perspective")
    return labels


def align_dirs(analysis_dirs, baseline: BaselineTable | None = None,
               missing: str = "absent") -> AlignmentReport:
    """Alignment report over analysis directories, models in argument order."""
    summaries = [read_analysis(d) for d in analysis_dirs]
    results = {}
    for label, d in zip(column_labels(summaries), analysis_dirs):
        main = read_regression_csv(Path(d) / "regression_main.csv")
        liwc = read_regression_csv(Path(d) / "regression_liwc.csv")
        results[label] = {"main": main, "compassion": liwc, "empathy": liwc}
    return alignment_matrix(results, baseline, missing=missing)
