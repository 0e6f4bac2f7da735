"""Parse agent responses and check format and payoff arithmetic."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

from .errors import FormatError
from .protocol import PAYMENT_KEYS, TrialConfig

TOLERANCE = 0.01

NOTE_FENCE = "stripped code fence"
NOTE_TEXT = "stripped surrounding text"
NOTE_DOLLAR = "stripped $"
NOTE_PLUS = "stripped +"
NOTE_THOUSANDS = "stripped thousands separator"
NOTE_UNIT = "stripped unit"
NOTE_STRING = "numeric string"

_FENCE = re.compile(r"```[A-Za-z0-9_-]*[ \t]*\n?(.*?)```", re.S)
# a bare (unquoted) value after a colon that is not valid JSON as written
_LOOSE_VALUE = re.compile(
    r"(:\s*)([+-]?\s*\$?\s*[+-]?\s*(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?)(\s*(?:USD|usd|dollars?)\b)?(?=\s*[,}\n])"
)


@dataclass(frozen=True)
class ParsedResponse:
    amount_transfer: float
    reason_transfer: str
    final_payment_dictator: float
    final_payment_recipient: float
    normalization_notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidityFlags:
    parseable: bool
    arithmetic_ok: bool
    in_range: bool
    logically_correct: bool
    strict_format: bool = False


@dataclass(frozen=True)
class PerformanceRow:
    model_id: str
    n_trials: int
    n_correct_format: int
    n_logically_correct: int
    pct_logically_correct: float = field(init=False)
    # same count over correctly formatted responses only
    pct_of_correct_format: float = field(init=False)

    def __post_init__(self):
        pct = 100.0 * self.n_logically_correct / self.n_trials if self.n_trials else 0.0
        object.__setattr__(self, "pct_logically_correct", pct)
        fmt = 100.0 * self.n_logically_correct / self.n_correct_format if self.n_correct_format else 0.0
        object.__setattr__(self, "pct_of_correct_format", fmt)


def _clean_number(text: str, notes: list[str]) -> float:
    s = text.strip()
    unit = re.search(r"\s*(USD|usd|dollars?)$", s)
    if unit:
        s = s[:unit.start()]
        notes.append(NOTE_UNIT)
    if "$" in s:
        s = s.replace("$", "")
        notes.append(NOTE_DOLLAR)
    s = re.sub(r"\s+", "", s)
    if s.startswith("+") or s.startswith("-+"):
        s = s.replace("+", "", 1)
        notes.append(NOTE_PLUS)
    if re.fullmatch(r"-?\d{1,3}(,\d{3})+(\.\d+)?", s):
        s = s.replace(",", "")
        notes.append(NOTE_THOUSANDS)
    if not re.fullmatch(r"-?\d+(\.\d+)?", s):
        raise FormatError(f"unparseable number {text!r}")
    return float(s)


def _loosen(candidate: str, notes: list[str]) -> str:
    def fix(m):
        value = _clean_number(m.group(2) + (m.group(3) or ""), notes)
        return m.group(1) + repr(value)
    return _LOOSE_VALUE.sub(fix, candidate)


def _first_object(text: str, notes: list[str]) -> dict:
    decoder = json.JSONDecoder()
    start = text.find("{")
    while start != -1:
        try:
            obj, end = decoder.raw_decode(text, start)
        except json.JSONDecodeError:
            obj = None
            depth, end = 0, None
            for i in range(start, len(text)):
                if text[i] == "{":
                    depth += 1
                elif text[i] == "}":
                    depth -= 1
                    if depth == 0:
                        end = i + 1
                        break
            if end is not None:
                trial_notes: list[str] = []
                try:
                    obj = json.loads(_loosen(text[start:end], trial_notes))
                except (json.JSONDecodeError, FormatError):
                    obj = None
                else:
                    notes.extend(trial_notes)
        if isinstance(obj, dict):
            if text[:start].strip() or text[end:].strip():
                notes.append(NOTE_TEXT)
            return obj
        start = text.find("{", start + 1)
    raise FormatError("no JSON object found")


def _numeric_field(payload: dict, key: str, notes: list[str]) -> float:
    if key not in payload:
        raise FormatError(f"missing key {key!r}")
    value = payload[key]
    if isinstance(value, bool) or value is None:
        raise FormatError(f"{key} is not numeric")
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        notes.append(NOTE_STRING)
        out = _clean_number(value, notes)
    else:
        raise FormatError(f"{key} is not numeric")
    if not math.isfinite(out):
        raise FormatError(f"{key} is not finite")
    return out


def extract_payload(raw_text: str) -> ParsedResponse:
    """Find the first JSON object in ``raw_text`` and map it to unified fields.

    Surrounding prose and fenced code blocks are tolerated, as are "$", "+",
    thousands separators and quoted numbers; every such repair is listed in
    ``normalization_notes``. Raises :class:`FormatError` when no usable object
    is present.
    """
    if not isinstance(raw_text, str):
        raise FormatError("response is not text")
    notes: list[str] = []
    text = raw_text
    fence = _FENCE.search(text)
    if fence and "{" in fence.group(1):
        notes.append(NOTE_FENCE)
        if text[:fence.start()].strip() or text[fence.end():].strip():
            notes.append(NOTE_TEXT)
        text = fence.group(1)

    payload = _first_object(text, notes)

    for dictator_key, recipient_key in PAYMENT_KEYS.values():
        if dictator_key in payload or recipient_key in payload:
            break
    else:
        raise FormatError("missing final payment keys")

    t = _numeric_field(payload, "amount_transfer", notes)
    fp_d = _numeric_field(payload, dictator_key, notes)
    fp_r = _numeric_field(payload, recipient_key, notes)
    reason = payload.get("reason_transfer")
    if reason is None:
        raise FormatError("missing key 'reason_transfer'")
    if not isinstance(reason, str):
        reason = json.dumps(reason)
    return ParsedResponse(t, reason, fp_d, fp_r, tuple(dict.fromkeys(notes)))


def serialize_payload(parsed: ParsedResponse, perspective: str = "SoS") -> str:
    dictator_key, recipient_key = PAYMENT_KEYS[perspective]
    return json.dumps({
        "amount_transfer": parsed.amount_transfer,
        "reason_transfer": parsed.reason_transfer,
        dictator_key: parsed.final_payment_dictator,
        recipient_key: parsed.final_payment_recipient,
    })


def check_logic(parsed: ParsedResponse, config: TrialConfig, tol: float = TOLERANCE) -> ValidityFlags:
    a = config.amount_given
    t = parsed.amount_transfer
    slack = tol + 1e-9
    arithmetic_ok = (abs(parsed.final_payment_dictator - (2 * a - t)) <= slack
                     and abs(parsed.final_payment_recipient - (a + t)) <= slack)
    lower = 0 if config.framing == "Give" else -a
    in_range = lower <= t <= a
    return ValidityFlags(
        parseable=True,
        arithmetic_ok=arithmetic_ok,
        in_range=in_range,
        logically_correct=arithmetic_ok and in_range,
        strict_format=not parsed.normalization_notes,
    )


def validate(raw_text: str | None, config: TrialConfig) -> tuple[ParsedResponse | None, ValidityFlags]:
    """Parse and check one response; a missing or unparseable one gets all-false flags."""
    if raw_text is None:
        return None, ValidityFlags(False, False, False, False, False)
    try:
        parsed = extract_payload(raw_text)
    except FormatError:
        return None, ValidityFlags(False, False, False, False, False)
    return parsed, check_logic(parsed, config)


def tally_performance(trials) -> list[PerformanceRow]:
    """Count format and logic successes per model, best model first.

    ``trials`` is an iterable of trial records (mappings with ``model_id``,
    ``strict_format`` and ``logically_correct``).
    """
    counts: dict[str, list[int]] = {}
    for rec in trials:
        c = counts.setdefault(rec["model_id"], [0, 0, 0])
        c[0] += 1
        c[1] += bool(rec["strict_format"])
        c[2] += bool(rec["logically_correct"])
    rows = [PerformanceRow(model, *c) for model, c in counts.items()]
    return sorted(rows, key=lambda r: (-r.pct_logically_correct, r.model_id))


def empty_performance(model_id: str = "") -> PerformanceRow:
    return PerformanceRow(model_id, 0, 0, 0)


def pct_discrepancy(row: PerformanceRow, reported_pct: float, decimals: int = 2,
                    denominator: str = "trials") -> float | None:
    """Difference between a reported percentage and the one implied by the counts.

    ``denominator`` is ``"trials"`` or ``"correct_format"``. Returns ``None``
    when they agree at the reported precision.
    """
    if denominator not in ("trials", "correct_format"):
        raise ValueError("denominator must be 'trials' or 'correct_format'")
    implied = row.pct_logically_correct if denominator == "trials" else row.pct_of_correct_format
    diff = round(reported_pct - implied, decimals + 2)
    if abs(diff) < 0.5 * 10 ** -decimals:
        return None
    return diff
