"""Append-only JSONL trial store plus a JSON run manifest.

A run directory holds ``trials.jsonl`` (one trial record per line) and
``manifest.json``. Records are written and flushed one at a time, so a crash
can leave at most one truncated final line, which is dropped on load.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DuplicateTrialError, StoreError
from .persona import PersonaProfile
from .protocol import TrialConfig
from .validator import ParsedResponse, ValidityFlags

RECORD_SCHEMA = "dictator-eval/trial-record/1"
MANIFEST_SCHEMA = "dictator-eval/run-manifest/1"
TRIALS_FILE = "trials.jsonl"
MANIFEST_FILE = "manifest.json"

FILTERS = ("all", "parseable", "logically_correct")

# manifest keys that must agree when resuming into an existing run
RESUME_KEYS = ("model_id", "perspective", "master_seed", "backend", "digests")


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def make_record(*, model_id: str, config: TrialConfig, profile: PersonaProfile,
                system_text: str, user_text: str, raw_text: str | None,
                transport_error: str | None, parsed: ParsedResponse | None,
                flags: ValidityFlags, latency: float, timestamp: str | None,
                trial_index: int, full_text: bool = False) -> dict:
    rec = {
        "schema_id": RECORD_SCHEMA,
        "trial_id": config.trial_id,
        "trial_index": trial_index,
        "model_id": model_id,
        "perspective": config.perspective,
        "framing": config.framing,
        "social_distance": config.social_distance,
        "amount_given": config.amount_given,
        "temperature": config.temperature,
        "trial_seed": config.trial_seed,
        "age": profile.age,
        "gender": profile.gender,
        "education": profile.education,
        "married": profile.married,
        "race": profile.race,
        "income_band": profile.income_band,
        "hispanic": profile.hispanic,
        "occupation": profile.occupation,
        "industry": profile.industry,
        "mbti": profile.mbti,
        "system_text_hash": sha256_text(system_text),
        "user_text_hash": sha256_text(user_text),
    }
    if full_text:
        rec["system_text"] = system_text
        rec["user_text"] = user_text
    rec.update({
        "raw_text": raw_text,
        "transport_error": transport_error,
        "amount_transfer": parsed.amount_transfer if parsed else None,
        "reason_transfer": parsed.reason_transfer if parsed else None,
        "final_payment_dictator": parsed.final_payment_dictator if parsed else None,
        "final_payment_recipient": parsed.final_payment_recipient if parsed else None,
        "normalization_notes": list(parsed.normalization_notes) if parsed else None,
        "parseable": flags.parseable,
        "strict_format": flags.strict_format,
        "arithmetic_ok": flags.arithmetic_ok,
        "in_range": flags.in_range,
        "logically_correct": flags.logically_correct,
        "timestamp": timestamp,
        "latency": latency,
    })
    return rec


def record_config(rec: dict) -> TrialConfig:
    return TrialConfig(
        perspective=rec["perspective"], framing=rec["framing"],
        social_distance=rec["social_distance"], amount_given=rec["amount_given"],
        temperature=rec["temperature"], trial_seed=rec["trial_seed"], trial_id=rec["trial_id"],
    )


def record_profile(rec: dict) -> PersonaProfile:
    return PersonaProfile(
        age=rec["age"], gender=rec["gender"], education=rec["education"],
        married=rec["married"], race=rec["race"], income_band=rec["income_band"],
        hispanic=rec["hispanic"], occupation=rec["occupation"], industry=rec["industry"],
        mbti=rec["mbti"],
    )


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, allow_nan=False)


def _sort_key(rec: dict):
    return (rec.get("trial_index", 0), rec["trial_id"])


def matches_filter(rec: dict, which: str) -> bool:
    if which == "all":
        return True
    if which == "parseable":
        return bool(rec["parseable"])
    if which == "logically_correct":
        return bool(rec["logically_correct"])
    raise ValueError(f"unknown filter {which!r}; expected one of {FILTERS}")


@dataclass
class TrialSet:
    records: list[dict]
    manifest: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def filter(self, which: str) -> "TrialSet":
        return TrialSet([r for r in self.records if matches_filter(r, which)],
                        self.manifest, list(self.warnings))


def _read_lines(path: Path) -> tuple[list[dict], list[str], int]:
    """Parse a trials file; returns (records, warnings, byte length of the valid prefix)."""
    data = path.read_bytes() if path.exists() else b""
    records, notes = [], []
    pos = 0
    lines = data.split(b"\n")
    for i, line in enumerate(lines):
        last = i == len(lines) - 1
        if last and not line:
            break
        try:
            rec = json.loads(line)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            if last:
                notes.append(f"dropped truncated final line in {path.name}")
                break
            raise StoreError(f"{path}: corrupt record on line {i + 1}") from exc
        if last:
            # valid JSON but no newline: the write was cut before the terminator
            notes.append(f"dropped unterminated final line in {path.name}")
            break
        records.append(rec)
        pos += len(line) + 1
    return records, notes, pos


class MemoryStore:
    """In-memory stand-in for :class:`TrialStore` (tests, benchmarks)."""

    def __init__(self, manifest: dict | None = None):
        self.manifest = dict(manifest or {})
        self._records: dict[str, dict] = {}
        self._lock = threading.Lock()

    def completed_ids(self) -> set[str]:
        return set(self._records)

    def append_trial(self, record: dict) -> None:
        with self._lock:
            if record["trial_id"] in self._records:
                raise DuplicateTrialError(record["trial_id"])
            self._records[record["trial_id"]] = json.loads(_dump(record))

    def finalize(self) -> None:
        self.manifest["n_trials_completed"] = len(self._records)

    def load(self, which: str = "all") -> TrialSet:
        recs = sorted(self._records.values(), key=_sort_key)
        return TrialSet(recs, dict(self.manifest)).filter(which)


class TrialStore:
    """Single-writer store for one run directory."""

    def __init__(self, path: str | Path, manifest: dict):
        self.path = Path(path)
        self.trials_path = self.path / TRIALS_FILE
        self.manifest_path = self.path / MANIFEST_FILE
        self.manifest = dict(manifest)
        self._lock = threading.Lock()
        self.warnings: list[str] = []
        self._ids: set[str] = set()

    @classmethod
    def open(cls, path: str | Path, manifest: dict) -> "TrialStore":
        """Create a run directory, or reopen one for resuming.

        Reopening checks that the stored manifest describes the same run and
        cuts off a truncated final line before any new appends.
        """
        store = cls(path, manifest)
        store.path.mkdir(parents=True, exist_ok=True)
        if store.manifest_path.exists():
            old = read_manifest(store.path)
            diffs = [k for k in RESUME_KEYS if old.get(k) != manifest.get(k)]
            if diffs:
                raise StoreError(f"{store.path} holds a different run (mismatch in {', '.join(diffs)})")
            records, notes, valid = _read_lines(store.trials_path)
            if notes:
                for n in notes:
                    warnings.warn(n)
                store.warnings.extend(notes)
                with open(store.trials_path, "r+b") as fh:
                    fh.truncate(valid)
            store._ids = {r["trial_id"] for r in records}
        elif store.trials_path.exists() and store.trials_path.stat().st_size:
            raise StoreError(f"{store.trials_path} exists without a manifest")
        store.manifest["n_trials_completed"] = len(store._ids)
        store._write_manifest()
        return store

    def completed_ids(self) -> set[str]:
        return set(self._ids)

    def append_trial(self, record: dict) -> None:
        line = _dump(record) + "\n"
        with self._lock:
            if record["trial_id"] in self._ids:
                raise DuplicateTrialError(record["trial_id"])
            with open(self.trials_path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())
            self._ids.add(record["trial_id"])

    def finalize(self) -> None:
        self.manifest["n_trials_completed"] = len(self._ids)
        self._write_manifest()

    def _write_manifest(self) -> None:
        tmp = self.manifest_path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(self.manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        os.replace(tmp, self.manifest_path)

    def load(self, which: str = "all") -> TrialSet:
        return load_run(self.path, which)


def read_manifest(path: str | Path) -> dict:
    mpath = Path(path) / MANIFEST_FILE
    if not mpath.exists():
        raise StoreError(f"no manifest at {mpath}")
    try:
        manifest = json.loads(mpath.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise StoreError(f"corrupt manifest {mpath}") from exc
    if manifest.get("schema_id") != MANIFEST_SCHEMA:
        raise StoreError(f"{mpath}: unexpected schema_id {manifest.get('schema_id')!r}")
    return manifest


def load_run(path: str | Path, which: str = "all") -> TrialSet:
    """Load a run's records, sorted by trial index, keeping those matching ``which``."""
    if which not in FILTERS:
        raise ValueError(f"unknown filter {which!r}; expected one of {FILTERS}")
    path = Path(path)
    if not path.is_dir():
        raise StoreError(f"no run directory at {path}")
    manifest = read_manifest(path)
    records, notes, _ = _read_lines(path / TRIALS_FILE)
    for n in notes:
        warnings.warn(n)
    seen = set()
    for rec in records:
        if rec["trial_id"] in seen:
            raise StoreError(f"duplicate trial_id {rec['trial_id']} in {path}")
        seen.add(rec["trial_id"])
    records.sort(key=_sort_key)
    return TrialSet(records, manifest, notes).filter(which)
