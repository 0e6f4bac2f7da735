"""Command-line entry point: ``dictator-eval run|validate|analyze|align|report``.

Settings come from flags or from a ``--config`` file of ``key = value`` lines
(``#`` starts a comment); flags win. Keys are the long flag names with
dashes or underscores, e.g.::

    backend = mock:noisy:format_rate=0.05,arithmetic_rate=0.1
    trials = 2000
    seed = 7
    perspective = SoS

API keys are read from the environment variable named by ``api_key_env``
(default ``DICTATOR_EVAL_API_KEY``) and are never accepted as flags.

Exit codes: 0 ok, 1 usage error, 2 backend failure (any trial ended in a
transport error), 3 data error (unreadable or inconsistent files).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import logging
import sys
import tempfile
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import __version__
from .agents import HttpBackend, MockAgent, MockAgentSpec, TrialPlan, run_trials, summarize
from .alignment import default_baseline, load_baseline, to_csv, to_markdown
from .analysis import align_dirs, analyze, column_labels, write_files
from .errors import ConfigError, DictatorEvalError
from .lexicon import default_lexicon, load_lexicon
from .persona import default_pools, load_pools, parse_pools
from .protocol import PERSPECTIVES, default_prompt_set, load_prompt_set
from .stats import DEPENDENTS
from .store import MANIFEST_SCHEMA, TrialStore, load_run, record_config, sha256_text
from .validator import tally_performance, validate

EXIT_OK, EXIT_USAGE, EXIT_BACKEND, EXIT_DATA = 0, 1, 2, 3

log = logging.getLogger("dictator_eval")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    backend: str
    out: Path
    perspective: str = "SoS"
    trials: int = 100
    seed: int = 0
    model: str | None = None
    parallelism: int = 1
    timeout: float = 60.0
    retries: int = 3
    backoff: float = 1.0
    rps: float | None = None
    system_role: str = "system"
    api_key_env: str = "DICTATOR_EVAL_API_KEY"
    full_text: bool = False
    pools: Path | None = None
    templates: Path | None = None
    social_distance: Path | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise UsageError("trials must be at least 1")
        if self.parallelism < 1:
            raise UsageError("parallelism must be at least 1")
        if self.perspective not in PERSPECTIVES:
            raise UsageError(f"perspective must be one of {PERSPECTIVES}")
        if self.system_role not in ("system", "user"):
            raise UsageError("system_role must be 'system' or 'user'")
        if self.rps is not None and self.rps <= 0:
            raise UsageError("rps must be positive")


def parse_config_file(path: str | Path) -> dict[str, str]:
    values = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key = key.strip().replace("-", "_")
        if key in ("api_key", "token", "password"):
            raise UsageError(f"{path}:{lineno}: secrets belong in the environment, not the config file")
        values[key] = value.strip()
    return values


_CONVERTERS = {
    "trials": int, "seed": int, "parallelism": int, "retries": int,
    "timeout": float, "backoff": float, "rps": float,
    "full_text": lambda v: str(v).lower() in ("1", "true", "yes", "on"),
    "pools": Path, "templates": Path, "social_distance": Path, "out": Path,
    "baseline": Path, "lexicon": Path,
}


def merged_settings(args: argparse.Namespace, allowed: set[str]) -> dict:
    """Config-file values overlaid by the flags that were actually given."""
    settings = parse_config_file(args.config) if getattr(args, "config", None) else {}
    unknown = set(settings) - allowed
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for key in allowed:
        value = getattr(args, key, None)
        if value is not None and value is not False:
            settings[key] = value
    out = {}
    for key, value in settings.items():
        conv = _CONVERTERS.get(key)
        try:
            out[key] = conv(value) if conv and isinstance(value, str) else value
        except ValueError as exc:
            raise UsageError(f"bad value for {key}: {value!r}") from exc
    return out


def _run_config(args) -> RunConfig:
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    settings = merged_settings(args, fields)
    for required in ("backend", "out"):
        if required not in settings:
            raise UsageError(f"--{required} is required")
    return RunConfig(**settings)


def make_backend(descriptor: str, cfg: RunConfig):
    """``mock:<kind>[:k=v,...]`` or ``http:<base_url>`` (a bare http(s) URL also works)."""
    kind, _, rest = descriptor.partition(":")
    if kind == "mock":
        try:
            return MockAgent(MockAgentSpec.parse(rest))
        except ConfigError as exc:
            raise UsageError(str(exc)) from exc
    if kind == "http" and not rest.startswith("//"):
        url = rest
    elif kind in ("http", "https"):
        url = descriptor
    else:
        raise UsageError(f"backend must be mock:<kind> or http:<url>, got {descriptor!r}")
    if not url:
        raise UsageError("http backend needs a base URL")
    return HttpBackend(url, api_key_env=cfg.api_key_env, retries=cfg.retries, backoff=cfg.backoff,
                       timeout=cfg.timeout, requests_per_second=cfg.rps, system_role=cfg.system_role)


def build_manifest(cfg: RunConfig, backend, model_id: str, pools_text: str, prompts) -> dict:
    prompts_dict = prompts.as_dict()
    digests = {
        "pools": sha256_text(pools_text),
        "templates": sha256_text(json.dumps(prompts_dict, sort_keys=True, ensure_ascii=False)),
    }
    identity = {"model_id": model_id, "perspective": cfg.perspective, "master_seed": cfg.seed,
                "backend": backend.descriptor, "digests": digests}
    run_id = sha256_text(json.dumps(identity, sort_keys=True))[:16]
    # analysis-time inputs: recorded for provenance, kept out of the run identity
    bundled = resources.files("dictator_eval").joinpath("data")
    reference = {name: sha256_text(bundled.joinpath(f"{name}.tsv").read_text(encoding="utf-8"))
                 for name in ("lexicon", "baseline")}
    return {
        "schema_id": MANIFEST_SCHEMA,
        "run_id": run_id,
        **identity,
        "n_trials": cfg.trials,
        "code_version": __version__,
        "reference_digests": reference,
        "config": {"trials": cfg.trials, "timeout": cfg.timeout, "full_text": cfg.full_text,
                   "retries": cfg.retries, "system_role": cfg.system_role},
        "prompts": prompts_dict,
    }


def cmd_run(args) -> int:
    cfg = _run_config(args)
    backend = make_backend(cfg.backend, cfg)
    if isinstance(backend, MockAgent):
        model_id = cfg.model or f"mock-{backend.spec.kind}"
    elif not cfg.model:
        raise UsageError("--model is required with an http backend")
    else:
        model_id = cfg.model
    if cfg.pools:
        pools_text = cfg.pools.read_text(encoding="utf-8")
        pools = parse_pools(pools_text)
    else:
        pools_text = resources.files("dictator_eval").joinpath("data/pools.txt").read_text(encoding="utf-8")
        pools = default_pools()
    if cfg.templates or cfg.social_distance:
        prompts = load_prompt_set(cfg.templates, cfg.social_distance)
    else:
        prompts = default_prompt_set()

    manifest = build_manifest(cfg, backend, model_id, pools_text, prompts)
    store = TrialStore.open(cfg.out, manifest)
    plan = TrialPlan(cfg.perspective, cfg.trials, cfg.seed, model_id)
    try:
        summary = run_trials(plan, backend, cfg.parallelism, store, pools=pools, prompts=prompts,
                             timeout=cfg.timeout, full_text=cfg.full_text)
    finally:
        if isinstance(backend, HttpBackend):
            backend.close()
    print(f"run {manifest['run_id']} -> {cfg.out}")
    for line in summary.lines():
        print(line)
    if summary.n_transport_error:
        print(f"{summary.n_transport_error} trial(s) failed in the backend", file=sys.stderr)
        return EXIT_BACKEND
    return EXIT_OK if summary.n_completed >= cfg.trials else EXIT_BACKEND


def cmd_validate(args) -> int:
    """Re-run the validator over stored raw text and compare with the stored flags."""
    trials = load_run(args.run)
    mismatched = []
    for rec in trials:
        _, flags = validate(rec["raw_text"], record_config(rec))
        stored = {k: rec[k] for k in ("parseable", "strict_format", "arithmetic_ok", "in_range",
                                      "logically_correct")}
        if dataclasses.asdict(flags) != stored:
            mismatched.append(rec["trial_id"])
    for line in summarize(trials, trials.manifest.get("n_trials", len(trials))).lines():
        print(line)
    for row in tally_performance(trials):
        print(f"{row.model_id}: {row.n_logically_correct}/{row.n_trials} logically correct ({row.pct_logically_correct:.2f}%)")
    if mismatched:
        print(f"stored flags disagree with the validator for {len(mismatched)} trial(s): "
              f"{', '.join(mismatched[:10])}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def _analysis_inputs(settings):
    lexicon = load_lexicon(settings["lexicon"]) if settings.get("lexicon") else default_lexicon()
    pools = load_pools(settings["pools"]) if settings.get("pools") else default_pools()
    dv = settings.get("dv", "amount_transfer")
    if dv not in DEPENDENTS:
        raise UsageError(f"dv must be one of {DEPENDENTS}")
    return dv, lexicon, pools


def cmd_analyze(args) -> int:
    settings = merged_settings(args, {"out", "dv", "lexicon", "pools"})
    dv, lexicon, pools = _analysis_inputs(settings)
    out = settings.get("out") or Path(args.run) / "analysis"
    files = analyze(load_run(args.run), dv=dv, lexicon=lexicon, pools=pools)
    write_files(out, files)
    summary = json.loads(files["analysis.json"])
    for name in ("regression_main", "regression_liwc"):
        info = summary[name]
        if "error" in info:
            print(f"{name}: not fitted ({info['error']})", file=sys.stderr)
        elif info["dropped"]:
            print(f"{name}: dropped {', '.join(info['dropped'])}", file=sys.stderr)
    print(f"analysis -> {out}")
    return EXIT_OK


def _baseline(settings):
    return load_baseline(settings["baseline"]) if settings.get("baseline") else default_baseline()


def cmd_align(args) -> int:
    settings = merged_settings(args, {"out", "baseline"})
    report = align_dirs(args.analysis, _baseline(settings))
    for problem in report.absent:
        print(f"absent: {problem}", file=sys.stderr)
    md = to_markdown(report)
    if settings.get("out"):
        write_files(settings["out"], {"alignment.md": md, "alignment.csv": to_csv(report)})
        print(f"alignment -> {settings['out']}")
    else:
        sys.stdout.write(md)
    return EXIT_OK


def _md_table(header, rows) -> list[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines += ["| " + " | ".join(str(c) for c in row) + " |" for row in rows]
    return lines


def _rows(csv_text: str) -> list[list[str]]:
    return list(csv.reader(csv_text.splitlines()))[1:]


def build_report(run_paths, *, dv="amount_transfer", lexicon=None, pools=None, baseline=None) -> str:
    """Consolidated markdown for several runs, in argument order."""
    analyses = []
    with tempfile.TemporaryDirectory() as tmp:
        base = Path(tmp)
        dirs = []
        for i, path in enumerate(run_paths):
            trials = load_run(path)
            files = analyze(trials, dv=dv, lexicon=lexicon, pools=pools)
            d = base / f"run{i}"
            write_files(d, files)
            dirs.append(d)
            analyses.append((trials, files))
        alignment = align_dirs(dirs, baseline)
    labels = column_labels([json.loads(f["analysis.json"]) for _, f in analyses])

    out = ["# Dictator game evaluation report", ""]
    out += ["## Response validity", ""]
    rows = []
    for label, (trials, _) in zip(labels, analyses):
        s = summarize(trials, trials.manifest.get("n_trials", len(trials)))
        pct = 100.0 * s.n_logically_correct / s.n_completed if s.n_completed else 0.0
        rows.append((label, trials.manifest.get("run_id", ""), s.n_completed, s.n_transport_error,
                     s.n_parseable, s.n_strict_format, s.n_logically_correct, f"{pct:.2f}"))
    out += _md_table(("Model", "Run", "Trials", "Transport errors", "Parseable", "Strict format",
                      "Logically correct", "Pct"), rows)
    out += ["", "## Giving-rate distribution", ""]
    rows = []
    for label, (_, files) in zip(labels, analyses):
        spikes = _rows(files["spikes.csv"])
        shares = {float(g): float(share) for _, g, share, _ in spikes}
        n = spikes[0][3] if spikes else "0"
        rows.append((label, n, *(f"{100 * shares.get(g, 0.0):.2f}%" for g in (0.0, 0.5, 1.0))))
    out += _md_table(("Model", "n", "g = 0", "g = 0.5", "g = 1"), rows)
    out += ["", f"## Descriptive statistics ({dv})", ""]
    rows = []
    for label, (_, files) in zip(labels, analyses):
        for cells in _rows(files["descriptives.csv"]):
            if cells[1] == dv:
                rows.append((label, *(_short(c) for c in cells[2:])))
    out += _md_table(("Model", "Count", "Mean", "Std", "Min", "25%", "50%", "75%", "Max"), rows)
    out += ["", "## Alignment with human studies", "", to_markdown(alignment)]
    return "\n".join(out)


def _short(cell: str) -> str:
    try:
        return f"{float(cell):.4g}"
    except ValueError:
        return cell


def cmd_report(args) -> int:
    settings = merged_settings(args, {"out", "dv", "lexicon", "pools", "baseline"})
    dv, lexicon, pools = _analysis_inputs(settings)
    text = build_report(args.runs, dv=dv, lexicon=lexicon, pools=pools, baseline=_baseline(settings))
    if settings.get("out"):
        Path(settings["out"]).parent.mkdir(parents=True, exist_ok=True)
        Path(settings["out"]).write_text(text, encoding="utf-8")
        print(f"report -> {settings['out']}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dictator-eval", description="Dictator-game evaluation of LLM agents.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run trials against a backend and store the records")
    run.add_argument("--config")
    run.add_argument("--out", help="run directory (created, or resumed if it exists)")
    run.add_argument("--backend", help="mock:<kind>[:k=v,...] or http:<base_url>")
    run.add_argument("--model", help="model id sent to the backend and stored on records")
    run.add_argument("--perspective", choices=PERSPECTIVES)
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--parallelism", type=int)
    run.add_argument("--timeout", type=float)
    run.add_argument("--retries", type=int)
    run.add_argument("--backoff", type=float)
    run.add_argument("--rps", type=float, help="max requests per second (http backend)")
    run.add_argument("--system-role", dest="system_role", choices=("system", "user"))
    run.add_argument("--api-key-env", dest="api_key_env", help="environment variable holding the API key")
    run.add_argument("--full-text", dest="full_text", action="store_true",
                     help="store full prompt text on each record, not only hashes")
    run.add_argument("--pools")
    run.add_argument("--templates", help="directory of prompt templates")
    run.add_argument("--social-distance", dest="social_distance")

    val = sub.add_parser("validate", help="re-check stored responses")
    val.add_argument("run")

    ana = sub.add_parser("analyze", help="write analysis CSVs for a run")
    ana.add_argument("run")
    ana.add_argument("--config")
    ana.add_argument("--out", help="output directory (default: <run>/analysis)")
    ana.add_argument("--dv", choices=DEPENDENTS)
    ana.add_argument("--lexicon")
    ana.add_argument("--pools")

    ali = sub.add_parser("align", help="alignment tables from analysis directories")
    ali.add_argument("analysis", nargs="+")
    ali.add_argument("--config")
    ali.add_argument("--out", help="directory for alignment.md and alignment.csv (default: stdout)")
    ali.add_argument("--baseline")

    rep = sub.add_parser("report", help="consolidated markdown report over runs")
    rep.add_argument("runs", nargs="+")
    rep.add_argument("--config")
    rep.add_argument("--out", help="report file (default: stdout)")
    rep.add_argument("--dv", choices=DEPENDENTS)
    rep.add_argument("--lexicon")
    rep.add_argument("--pools")
    rep.add_argument("--baseline")
    return parser


COMMANDS = {"run": cmd_run, "validate": cmd_validate, "analyze": cmd_analyze,
            "align": cmd_align, "report": cmd_report}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"dictator-eval: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DictatorEvalError, OSError, ValueError) as exc:
        print(f"dictator-eval: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
