"""Compare fitted coefficients with the directions reported in human studies."""

from __future__ import annotations

import csv
import enum
import functools
import io
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import AlignmentError, ConfigError

DIRECTIONS = ("positive", "negative", "no_consensus")
GROUPS = ("main", "compassion", "empathy")
# categories with too few observations to report
EXCLUDED_FACTORS = frozenset({"liwc_shehe", "liwc_male"})


class Mark(str, enum.Enum):
    ALIGNED = "✓"
    MISALIGNED = "✗"
    NOT_SIGNIFICANT = "n.s."
    POSITIVE = "pos."
    NEGATIVE = "neg."
    ABSENT = "--"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Factor:
    name: str
    direction: str
    label: str


@dataclass(frozen=True)
class BaselineTable:
    groups: dict[str, tuple[Factor, ...]]

    def __getitem__(self, name: str) -> str:
        for factors in self.groups.values():
            for f in factors:
                if f.name == name:
                    return f.direction
        raise KeyError(name)

    def factors(self, group: str | None = None) -> tuple[Factor, ...]:
        if group is not None:
            return self.groups[group]
        seen: dict[str, Factor] = {}
        for factors in self.groups.values():
            for f in factors:
                seen.setdefault(f.name, f)
        return tuple(seen.values())


def parse_baseline(text: str) -> BaselineTable:
    groups: dict[str, list[Factor]] = {}
    current = None
    directions: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current in groups:
                raise ConfigError(f"line {lineno}: duplicate group [{current}]")
            groups[current] = []
            continue
        if current is None:
            current = "main"
            groups.setdefault(current, [])
        parts = raw.rstrip("\n").split("\t")
        if len(parts) not in (2, 3):
            raise ConfigError(f"line {lineno}: expected factor<TAB>direction[<TAB>label]")
        name, direction = parts[0].strip(), parts[1].strip()
        label = parts[2].strip() if len(parts) == 3 else name
        if direction not in DIRECTIONS:
            raise ConfigError(f"line {lineno}: direction must be one of {DIRECTIONS}")
        if any(f.name == name for f in groups[current]):
            raise ConfigError(f"line {lineno}: factor {name!r} repeated in [{current}]")
        if directions.setdefault(name, direction) != direction:
            raise ConfigError(f"line {lineno}: factor {name!r} has conflicting directions")
        if name in EXCLUDED_FACTORS:
            continue
        groups[current].append(Factor(name, direction, label))
    return BaselineTable({g: tuple(fs) for g, fs in groups.items()})


def load_baseline(path: str | Path) -> BaselineTable:
    return parse_baseline(Path(path).read_text(encoding="utf-8"))


@functools.lru_cache(maxsize=None)
def default_baseline() -> BaselineTable:
    text = resources.files("dictator_eval").joinpath("data/baseline.tsv").read_text(encoding="utf-8")
    return parse_baseline(text)


def classify(estimate: float, p: float, expected: str, alpha: float = 0.05) -> Mark:
    """Mark one coefficient: significance first, then sign against ``expected``."""
    if expected not in DIRECTIONS:
        raise ValueError(f"unknown direction {expected!r}")
    if p >= alpha or estimate == 0:
        return Mark.NOT_SIGNIFICANT
    positive = estimate > 0
    if expected == "no_consensus":
        return Mark.POSITIVE if positive else Mark.NEGATIVE
    return Mark.ALIGNED if positive == (expected == "positive") else Mark.MISALIGNED


@dataclass
class AlignmentBlock:
    group: str
    factors: tuple[Factor, ...]
    models: list[str]
    cells: dict[tuple[str, str], Mark]
    row_totals: dict[str, int | None] = field(default_factory=dict)
    column_totals: dict[str, int] = field(default_factory=dict)
    grand_total: int = 0

    def __post_init__(self):
        for f in self.factors:
            marks = [self.cells[(f.name, m)] for m in self.models]
            self.row_totals[f.name] = (None if f.direction == "no_consensus"
                                       else sum(mk is Mark.ALIGNED for mk in marks))
        for m in self.models:
            self.column_totals[m] = sum(self.cells[(f.name, m)] is Mark.ALIGNED for f in self.factors)
        self.grand_total = sum(self.column_totals.values())


@dataclass
class AlignmentReport:
    blocks: dict[str, AlignmentBlock]
    models: list[str]
    baseline: BaselineTable
    alpha: float = 0.05
    absent: list[str] = field(default_factory=list)

    @property
    def grand_total(self) -> int:
        return sum(b.grand_total for b in self.blocks.values())


def _coef_lookup(result) -> dict[str, tuple[float, float]] | None:
    if result is None:
        return None
    if hasattr(result, "terms"):
        return {t: (float(e), float(p)) for t, e, p in zip(result.terms, result.estimate, result.p)}
    return {k: (float(v[0]), float(v[1])) for k, v in result.items()}


def _per_group(res) -> bool:
    return isinstance(res, dict) and any(not isinstance(v, (tuple, list)) for v in res.values())


def alignment_matrix(results: dict, baseline: BaselineTable | None = None, *,
                     alpha: float = 0.05, groups=GROUPS, missing: str = "error") -> AlignmentReport:
    """Classify each model's coefficients against the baseline.

    ``results`` maps a model id to a RegressionResult, to ``{term: (estimate, p)}``,
    or to ``{group: result}`` when the blocks come from different fits (the
    LIWC blocks use the specification that includes the LIWC terms).
    With ``missing="absent"`` factors a model has no coefficient for are
    marked ``--`` and listed in ``report.absent``; otherwise they raise
    :class:`AlignmentError`.
    """
    baseline = baseline or default_baseline()
    if missing not in ("error", "absent"):
        raise ValueError("missing must be 'error' or 'absent'")
    models = list(results)
    blocks = {}
    problems = []
    for group in groups:
        if group not in baseline.groups:
            continue
        factors = baseline.groups[group]
        cells = {}
        for model in models:
            res = results[model]
            coefs = _coef_lookup(res.get(group) if _per_group(res) else res) or {}
            for f in factors:
                if f.name not in coefs:
                    problems.append(f"{model}: no coefficient for {f.name} ({group})")
                    cells[(f.name, model)] = Mark.ABSENT
                    continue
                est, p = coefs[f.name]
                cells[(f.name, model)] = classify(est, p, f.direction, alpha)
        blocks[group] = AlignmentBlock(group, factors, models, cells)
    if problems and missing == "error":
        raise AlignmentError("factor/term mismatch:\n" + "\n".join(problems))
    return AlignmentReport(blocks, models, baseline, alpha, problems)


_TITLES = {"main": "Alignment with human studies",
           "compassion": "Alignment with human studies: compassion",
           "empathy": "Alignment with human studies: empathy"}


def to_markdown(report: AlignmentReport) -> str:
    out = []
    for group, block in report.blocks.items():
        out.append(f"### {_TITLES.get(group, group)}\n")
        header = ["", "Factor"] + [f"({i}) {m}" for i, m in enumerate(block.models, 1)] + ["Total ✓ (by row)"]
        out.append("| " + " | ".join(header) + " |")
        out.append("|" + "---|" * len(header))
        for i, f in enumerate(block.factors, 1):
            total = block.row_totals[f.name]
            row = [str(i), f.label] + [str(block.cells[(f.name, m)]) for m in block.models]
            row.append("--" if total is None else str(total))
            out.append("| " + " | ".join(row) + " |")
        totals = ["", "Total ✓"] + [str(block.column_totals[m]) for m in block.models] + [str(block.grand_total)]
        out.append("| " + " | ".join(totals) + " |")
        out.append("")
    out.append("✓ = aligned with human studies; ✗ = not aligned; n.s. = not significant "
               f"(p ≥ {report.alpha}); pos./neg. = sign of a factor without a human consensus.")
    return "\n".join(out) + "\n"


def to_csv(report: AlignmentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["group", "factor", "label", "expected"] + report.models + ["total_aligned"])
    for group, block in report.blocks.items():
        for f in block.factors:
            total = block.row_totals[f.name]
            w.writerow([group, f.name, f.label, f.direction]
                       + [block.cells[(f.name, m)].value for m in block.models]
                       + ["" if total is None else total])
        w.writerow([group, "TOTAL", "Total ✓", ""]
                   + [block.column_totals[m] for m in block.models] + [block.grand_total])
    return buf.getvalue()
