"""Descriptive statistics, giving-rate distributions and OLS with classical inference."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, stats as sps

from .errors import RegressionError
from .persona import DemographicPools, default_pools

SPIKES = (0.0, 0.5, 1.0)
SPIKE_TOL = 1e-9

DEMOGRAPHICS = ("age", "education", "income", "female", "married", "temperature")
MBTI = ("introversion", "intuition", "feeling", "perceiving")
FRAMING = ("friend", "stranger_meet", "take", "stake")
DEPENDENTS = ("amount_transfer", "giving_rate")
CONTROL_POOLS = (("race", "race"), ("occupation", "occupation"), ("industry", "industry"))

COMPASSION = ("posemo", "social", "religion", "affiliation", "certain", "family", "drives", "affect")
EMPATHY = ("i", "focuspresent", "ppron", "sad", "discrep", "verb", "adverb", "cogproc", "pronoun", "affect")


class CollinearityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class DescriptiveRow:
    count: int
    mean: float | None = None
    std: float | None = None
    min: float | None = None
    q25: float | None = None
    median: float | None = None
    q75: float | None = None
    max: float | None = None


def describe_values(values) -> DescriptiveRow:
    x = np.asarray(list(values), dtype=float)
    if x.size == 0:
        return DescriptiveRow(0)
    q25, q50, q75 = np.quantile(x, [0.25, 0.5, 0.75])
    std = float(np.std(x, ddof=1)) if x.size > 1 else None
    return DescriptiveRow(int(x.size), float(x.mean()), std, float(x.min()),
                          float(q25), float(q50), float(q75), float(x.max()))


def field_value(rec: dict, name: str) -> float:
    if name == "giving_rate":
        return giving_rate(rec["amount_transfer"], rec["amount_given"])
    return float(rec[name])


def describe(trials, field_name: str) -> dict[str, DescriptiveRow]:
    """One DescriptiveRow per model, models in sorted order."""
    groups: dict[str, list[float]] = {}
    for rec in trials:
        groups.setdefault(rec["model_id"], []).append(field_value(rec, field_name))
    return {m: describe_values(groups[m]) for m in sorted(groups)}


def giving_rate(t: float, amount_given: float) -> float:
    if amount_given <= 0:
        raise ValueError("stake must be positive")
    return t / amount_given


@dataclass(frozen=True)
class GivingDistribution:
    edges: np.ndarray
    counts: np.ndarray
    n: int
    spikes: dict[float, float]


def giving_rate_distribution(trials_or_rates, n_bins: int = 20) -> GivingDistribution:
    """Histogram of giving rates over [-1, 1] plus exact-match spike shares.

    Accepts trial records or plain giving rates.
    """
    rates = []
    for item in trials_or_rates:
        if isinstance(item, dict):
            rates.append(giving_rate(item["amount_transfer"], item["amount_given"]))
        else:
            rates.append(float(item))
    g = np.asarray(rates, dtype=float)
    edges = np.linspace(-1.0, 1.0, n_bins + 1)
    counts, _ = np.histogram(np.clip(g, -1.0, 1.0), bins=edges)
    n = int(g.size)
    spikes = {s: (float(np.sum(np.abs(g - s) <= SPIKE_TOL)) / n if n else 0.0) for s in SPIKES}
    return GivingDistribution(edges, counts, n, spikes)


@dataclass(frozen=True)
class ModelSpec:
    dependent: str = "amount_transfer"
    demographics: bool = True
    mbti: bool = True
    framing: bool = True
    liwc: tuple[str, ...] = ()
    controls: bool = True

    def __post_init__(self):
        if self.dependent not in DEPENDENTS:
            raise ValueError(f"dependent must be one of {DEPENDENTS}")
        object.__setattr__(self, "liwc", tuple(dict.fromkeys(self.liwc)))

    def with_liwc(self, categories=COMPASSION + EMPATHY) -> "ModelSpec":
        return ModelSpec(self.dependent, self.demographics, self.mbti, self.framing,
                         tuple(categories), self.controls)


def record_covariates(rec: dict) -> dict[str, float]:
    mbti = rec["mbti"]
    return {
        "age": float(rec["age"]),
        "education": float(rec["education"]),
        "income": float(rec["income_band"]),
        "female": float(str(rec["gender"]).lower() == "female"),
        "married": float(bool(rec["married"])),
        "temperature": float(rec["temperature"]),
        "introversion": float(mbti[0] == "I"),
        "intuition": float(mbti[1] == "N"),
        "feeling": float(mbti[2] == "F"),
        "perceiving": float(mbti[3] == "P"),
        "friend": float(rec["social_distance"] == "Friend"),
        "stranger_meet": float(rec["social_distance"] == "StrangerMeet"),
        "take": float(rec["framing"] == "Take"),
        "stake": float(rec["amount_given"]),
    }


@dataclass
class DesignMatrix:
    X: np.ndarray
    y: np.ndarray
    labels: list[str]
    dropped: list[str] = field(default_factory=list)


def _independent_columns(X: np.ndarray, rtol: float = 1e-9) -> list[int]:
    """Indices of columns kept by a left-to-right Gram-Schmidt sweep."""
    basis: list[np.ndarray] = []
    keep = []
    for j in range(X.shape[1]):
        v = X[:, j].astype(float).copy()
        norm = np.linalg.norm(v)
        if norm == 0:
            continue
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            for q in basis:
                v -= (q @ v) * q
        r = np.linalg.norm(v)
        if r <= rtol * norm:
            continue
        basis.append(v / r)
        keep.append(j)
    return keep


def design_matrix(trials, spec: ModelSpec = ModelSpec(), lexicon_scores: dict | None = None,
                  pools: DemographicPools | None = None) -> DesignMatrix:
    """Build the regression design for one model's logically correct trials.

    Column order: intercept, demographics, MBTI, framing, LIWC categories
    (``liwc_<name>``), then dummy controls with the first pool label as the
    reference. Constant columns are always dropped; linearly dependent ones
    are dropped when there are more trials than columns. Each drop is
    reported through a :class:`CollinearityWarning`.
    """
    recs = list(trials)
    bad = [r["trial_id"] for r in recs if not r.get("logically_correct")]
    if bad:
        raise ValueError(f"design_matrix needs logically correct trials; got {len(bad)} others")
    if spec.liwc and lexicon_scores is None:
        raise ValueError("LIWC regressors requested but no lexicon scores given")
    pools = pools or default_pools()

    labels = ["const"]
    if spec.demographics:
        labels += DEMOGRAPHICS
    if spec.mbti:
        labels += MBTI
    if spec.framing:
        labels += FRAMING
    labels += [f"liwc_{c}" for c in spec.liwc]
    controls = []
    if spec.controls:
        for key, pool_name in CONTROL_POOLS:
            for label in getattr(pools, pool_name)[1:]:
                controls.append((f"{key}[{label}]", key, label))
        controls.append(("hispanic", "hispanic", True))
    n_base = len(labels)
    labels += [c[0] for c in controls]

    rows = []
    y = []
    for rec in recs:
        cov = record_covariates(rec)
        row = [1.0]
        for name in labels[1:n_base]:
            if name.startswith("liwc_"):
                scores = lexicon_scores[rec["trial_id"]]
                row.append(float(scores.scores.get(name[5:], 0.0)))
            else:
                row.append(cov[name])
        for _, key, label in controls:
            row.append(float(rec[key] == label))
        rows.append(row)
        y.append(field_value(rec, spec.dependent))

    X = np.asarray(rows, dtype=float).reshape(len(recs), len(labels))
    y = np.asarray(y, dtype=float)

    dropped = []
    keep = [0] + [j for j in range(1, X.shape[1]) if X.shape[0] == 0 or np.ptp(X[:, j]) > 0]
    dropped += [labels[j] for j in range(X.shape[1]) if j not in keep]
    if X.shape[0] > len(keep):
        independent = _independent_columns(X[:, keep])
        dropped += [labels[keep[j]] for j in range(len(keep)) if j not in independent]
        keep = [keep[j] for j in independent]
    if dropped:
        warnings.warn(f"dropped constant or collinear columns: {', '.join(dropped)}",
                      CollinearityWarning, stacklevel=2)
    return DesignMatrix(X[:, keep], y, [labels[j] for j in keep], dropped)


@dataclass(frozen=True)
class Coefficient:
    term: str
    estimate: float
    se: float
    t: float
    p: float
    ci_lo: float
    ci_hi: float


@dataclass
class RegressionResult:
    terms: list[str]
    estimate: np.ndarray
    se: np.ndarray
    t: np.ndarray
    p: np.ndarray
    ci_lo: np.ndarray
    ci_hi: np.ndarray
    n: int
    k: int
    r2: float
    sigma2: float
    residuals: np.ndarray = field(repr=False)

    def coef(self, term: str) -> Coefficient:
        j = self.terms.index(term)
        return Coefficient(term, float(self.estimate[j]), float(self.se[j]), float(self.t[j]),
                           float(self.p[j]), float(self.ci_lo[j]), float(self.ci_hi[j]))

    def coefficients(self) -> list[Coefficient]:
        return [self.coef(term) for term in self.terms]


def ols_fit(X, y, labels=None, level: float = 0.95) -> RegressionResult:
    """Least squares through a QR factorisation, with homoskedastic errors.

    Standard errors come from ``sigma2 * inv(R) @ inv(R).T``, which equals
    ``sigma2 * inv(X.T @ X)`` without forming the normal equations.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim != 2 or X.shape[0] != y.size:
        raise RegressionError("X must be 2-D with one row per observation")
    n, k = X.shape
    if n <= k:
        raise RegressionError(f"need more observations than columns (n={n}, k={k})")
    labels = list(labels) if labels is not None else [f"x{j}" for j in range(k)]

    Q, R = np.linalg.qr(X, mode="reduced")
    diag = np.abs(np.diag(R))
    if diag.min() <= 1e-10 * max(diag.max(), 1.0) * max(n, k):
        raise RegressionError("design matrix is rank deficient")
    beta = linalg.solve_triangular(R, Q.T @ y)
    resid = y - X @ beta
    df = n - k
    ssr = float(resid @ resid)
    sigma2 = ssr / df
    r_inv = linalg.solve_triangular(R, np.eye(k))
    se = np.sqrt(sigma2 * np.sum(r_inv ** 2, axis=1))

    with np.errstate(divide="ignore", invalid="ignore"):
        tstat = np.where(se > 0, beta / np.where(se > 0, se, 1.0),
                         np.where(beta == 0, 0.0, np.sign(beta) * np.inf))
    p = 2.0 * sps.t.sf(np.abs(tstat), df)
    crit = sps.t.ppf(0.5 + level / 2, df)

    has_const = np.any(np.all(X == 1.0, axis=0))
    centered = y - y.mean() if has_const else y
    sst = float(centered @ centered)
    r2 = 1.0 - ssr / sst if sst > 0 else (1.0 if ssr == 0 else 0.0)
    r2 = min(max(r2, 0.0), 1.0)
    return RegressionResult(labels, beta, se, tstat, p, beta - crit * se, beta + crit * se,
                            n, k, r2, sigma2, resid)


def fit_model(trials, spec: ModelSpec = ModelSpec(), lexicon_scores: dict | None = None,
              pools: DemographicPools | None = None) -> RegressionResult:
    dm = design_matrix(trials, spec, lexicon_scores, pools)
    return ols_fit(dm.X, dm.y, dm.labels)
