"""Dictator agents: a chat-completions HTTP client and seeded mock agents.

Every backend exposes ``complete(request) -> AgentRawResponse``. Mock agents
never look at the prompt text; they read the stake and framing from the
structured trial config carried on the request, so they exercise the
pipeline rather than prompt comprehension.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import httpx
import numpy as np

from .errors import ConfigError
from .persona import DemographicPools, PersonaProfile, default_pools, sample_profile
from .protocol import (PAYMENT_KEYS, PromptSet, TrialConfig, build_prompts,
                       default_prompt_set, sample_trial_config, trial_id, trial_seed)
from .validator import validate

log = logging.getLogger(__name__)

MOCK_KINDS = ("selfish", "egalitarian", "engel_mixture", "planted_effects", "noisy")
MOCK_STREAM = 0x6D6F636B  # separates the mock's draws from persona/config draws

# covariates a planted_effects mock can load with a coefficient
PLANTED_FEATURES = ("age", "education", "income", "female", "married", "temperature",
                    "introversion", "intuition", "feeling", "perceiving",
                    "friend", "stranger_meet", "take", "stake")


@dataclass
class AgentRequest:
    model_id: str
    system_text: str
    user_text: str
    temperature: float
    timeout: float = 60.0
    trial_id: str = ""
    # structured trial context; read by mocks, never sent over HTTP
    config: TrialConfig | None = None
    profile: PersonaProfile | None = None

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 1.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 1]")


@dataclass
class AgentRawResponse:
    raw_text: str | None = None
    latency: float = 0.0
    backend_meta: dict = field(default_factory=dict)
    error: str | None = None

    def __post_init__(self):
        if (self.raw_text is None) == (self.error is None):
            raise ValueError("exactly one of raw_text / error must be set")


@dataclass(frozen=True)
class MockAgentSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in MOCK_KINDS:
            raise ConfigError(f"unknown mock kind {self.kind!r}; expected one of {MOCK_KINDS}")
        p = self.params
        if self.kind == "engel_mixture":
            weights = [float(p.get(k, 0.0)) for k in ("w0", "w_half", "w1")]
            if any(not 0.0 <= w <= 1.0 for w in weights) or sum(weights) > 1.0 + 1e-12:
                raise ConfigError("engel_mixture weights must lie in [0, 1] and sum to at most 1")
        if self.kind == "noisy":
            for k in ("format_rate", "arithmetic_rate", "fence_rate"):
                if not 0.0 <= float(p.get(k, 0.0)) <= 1.0:
                    raise ConfigError(f"noisy {k} must lie in [0, 1]")
            if p.get("base", "uniform") not in ("uniform", "selfish", "egalitarian"):
                raise ConfigError("noisy base must be uniform, selfish or egalitarian")
        if self.kind == "planted_effects":
            unknown = set(p) - set(PLANTED_FEATURES) - {"const", "sigma"}
            if unknown:
                raise ConfigError(f"planted_effects: unknown parameters {sorted(unknown)}")
            if float(p.get("sigma", 0.0)) < 0:
                raise ConfigError("planted_effects sigma must be non-negative")

    @classmethod
    def parse(cls, text: str) -> "MockAgentSpec":
        """Parse ``kind[:key=value,key=value]``, e.g. ``noisy:format_rate=0.05``."""
        kind, _, rest = text.partition(":")
        params: dict = {}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"mock parameter {item!r} is not key=value")
            try:
                params[key.strip()] = float(value)
            except ValueError:
                params[key.strip()] = value.strip()
        return cls(kind.strip(), params)

    def describe(self) -> str:
        if not self.params:
            return self.kind
        items = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.kind}:{items}"


def _num(x: float):
    x = float(x)
    return int(x) if x.is_integer() else x


_REASONS_SOS = {
    "none": ["I decided to keep the money because the choice is mine and I earned this allocation.",
             "I keep everything since the other person already has an initial amount."],
    "some": ["I want to share some of it but still keep more for myself.",
             "I think a small transfer is kind and still practical for me."],
    "half": ["I think it is fair to split the additional money equally with the other person.",
             "Sharing half is the fair thing to do, so we both end up with good outcomes."],
    "most": ["I care about the other person and want them to benefit more than me.",
             "Being generous makes me happy, so I give most of it away."],
    "take": ["I take some money from the other participant because I would like a larger payment.",
             "I choose to take money since the rules allow it and I want more."],
}


def _reason(g: float, perspective: str, rng: np.random.Generator) -> str:
    if g < 0:
        key = "take"
    elif g == 0:
        key = "none"
    elif g < 0.5:
        key = "some"
    elif g == 0.5:
        key = "half"
    else:
        key = "most"
    text = _REASONS_SOS[key][int(rng.integers(len(_REASONS_SOS[key])))]
    if perspective == "ToM":
        text = "The decision-maker would likely reason: " + text
    return text


def planted_covariates(profile: PersonaProfile, config: TrialConfig) -> dict[str, float]:
    return {
        "age": float(profile.age),
        "education": float(profile.education),
        "income": float(profile.income_band),
        "female": float(profile.female),
        "married": float(profile.married),
        "temperature": float(config.temperature),
        "introversion": float(profile.introversion),
        "intuition": float(profile.intuition),
        "feeling": float(profile.feeling),
        "perceiving": float(profile.perceiving),
        "friend": float(config.social_distance == "Friend"),
        "stranger_meet": float(config.social_distance == "StrangerMeet"),
        "take": float(config.framing == "Take"),
        "stake": float(config.amount_given),
    }


class MockAgent:
    """Seeded synthetic dictator; output depends only on the trial config,
    persona and trial seed."""

    deterministic = True

    def __init__(self, spec: MockAgentSpec):
        self.spec = spec

    @property
    def descriptor(self) -> dict:
        return {"type": "mock", "spec": self.spec.describe()}

    def decide(self, config: TrialConfig, profile: PersonaProfile, rng: np.random.Generator) -> float:
        a = config.amount_given
        lower = 0.0 if config.framing == "Give" else -1.0
        kind, p = self.spec.kind, self.spec.params
        if kind == "selfish":
            return 0.0
        if kind == "egalitarian":
            return a / 2
        if kind == "engel_mixture":
            u = rng.uniform()
            w0, wh, w1 = (float(p.get(k, 0.0)) for k in ("w0", "w_half", "w1"))
            if u < w0:
                return 0.0
            if u < w0 + wh:
                return a / 2
            if u < w0 + wh + w1:
                return float(a)
            return float(rng.uniform(lower, 1.0)) * a
        if kind == "planted_effects":
            x = planted_covariates(profile, config)
            mean = float(p.get("const", 0.0)) + sum(float(p[k]) * x[k] for k in PLANTED_FEATURES if k in p)
            t = mean + float(p.get("sigma", 0.0)) * rng.standard_normal()
            return min(max(t, lower * a), float(a))
        # noisy: the base behaviour; corruption happens in respond()
        base = p.get("base", "uniform")
        if base == "selfish":
            return 0.0
        if base == "egalitarian":
            return a / 2
        return float(rng.integers(int(lower * a), a + 1))

    def respond(self, config: TrialConfig, profile: PersonaProfile) -> str:
        rng = np.random.default_rng([config.trial_seed, MOCK_STREAM])
        a = config.amount_given
        t = self.decide(config, profile, rng)
        fp_d, fp_r = 2 * a - t, a + t
        reason = _reason(t / a, config.perspective, rng)
        p = self.spec.params
        if self.spec.kind == "noisy":
            if rng.uniform() < float(p.get("format_rate", 0.0)):
                return f"I would transfer {_num(t)} USD. {reason}"
            if rng.uniform() < float(p.get("arithmetic_rate", 0.0)):
                off = float(rng.integers(1, 6)) * (1 if rng.uniform() < 0.5 else -1)
                if rng.uniform() < 0.5:
                    fp_d += off
                else:
                    fp_r += off
        d_key, r_key = PAYMENT_KEYS[config.perspective]
        body = json.dumps({
            "amount_transfer": _num(t),
            "reason_transfer": reason,
            d_key: _num(fp_d),
            r_key: _num(fp_r),
        })
        if self.spec.kind == "noisy" and rng.uniform() < float(p.get("fence_rate", 0.0)):
            body = f"```json\n{body}\n```"
        return body

    def complete(self, request: AgentRequest) -> AgentRawResponse:
        if request.config is None or request.profile is None:
            return AgentRawResponse(error="mock agent needs the trial config and persona")
        return AgentRawResponse(raw_text=self.respond(request.config, request.profile),
                                backend_meta={"mock": self.spec.kind})


class HttpBackend:
    """Client for an OpenAI-style ``POST {base_url}/chat/completions`` endpoint.

    The bearer token is read from the environment variable ``api_key_env``.
    Transport failures, 429 and 5xx responses are retried with exponential
    backoff (``backoff * 2**attempt`` seconds); the final failure is returned
    as an error descriptor rather than raised.
    """

    deterministic = False

    def __init__(self, base_url: str, *, api_key_env: str = "DICTATOR_EVAL_API_KEY",
                 retries: int = 3, backoff: float = 1.0, timeout: float = 60.0,
                 requests_per_second: float | None = None, system_role: str = "system",
                 transport: httpx.BaseTransport | None = None, sleep=time.sleep):
        self.base_url = base_url.rstrip("/")
        self.api_key_env = api_key_env
        self.retries = retries
        self.backoff = backoff
        self.timeout = timeout
        self.system_role = system_role
        self._sleep = sleep
        self._min_interval = 1.0 / requests_per_second if requests_per_second else 0.0
        self._next_slot = 0.0
        self._rate_lock = threading.Lock()
        self._client = httpx.Client(transport=transport, timeout=timeout)

    @property
    def descriptor(self) -> dict:
        return {"type": "http", "base_url": self.base_url, "system_role": self.system_role}

    def close(self):
        self._client.close()

    def _throttle(self):
        if not self._min_interval:
            return
        with self._rate_lock:
            now = time.monotonic()
            wait = self._next_slot - now
            self._next_slot = max(now, self._next_slot) + self._min_interval
        if wait > 0:
            self._sleep(wait)

    def _payload(self, request: AgentRequest) -> dict:
        if self.system_role == "system":
            messages = [{"role": "system", "content": request.system_text},
                        {"role": "user", "content": request.user_text}]
        else:
            messages = [{"role": "user", "content": request.system_text},
                        {"role": "user", "content": request.user_text}]
        return {"model": request.model_id, "messages": messages, "temperature": request.temperature}

    def complete(self, request: AgentRequest) -> AgentRawResponse:
        headers = {}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        payload = self._payload(request)
        url = f"{self.base_url}/chat/completions"
        error = None
        start = time.perf_counter()
        for attempt in range(self.retries + 1):
            if attempt:
                self._sleep(self.backoff * 2 ** (attempt - 1))
            self._throttle()
            try:
                resp = self._client.post(url, json=payload, headers=headers,
                                         timeout=request.timeout or self.timeout)
            except httpx.TimeoutException as exc:
                error = f"timeout: {exc}"
                continue
            except httpx.HTTPError as exc:
                error = f"transport: {type(exc).__name__}: {exc}"
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                error = f"http {resp.status_code}"
                continue
            if not resp.is_success:
                error = f"http {resp.status_code}"
                break
            try:
                body = resp.json()
                content = body["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError):
                error = "malformed response envelope"
                break
            if not isinstance(content, str):
                error = "malformed response envelope"
                break
            meta = {"attempts": attempt + 1}
            if isinstance(body.get("usage"), dict):
                meta["usage"] = body["usage"]
            return AgentRawResponse(raw_text=content, latency=time.perf_counter() - start,
                                    backend_meta=meta)
        log.warning("trial %s failed: %s", request.trial_id, error)
        return AgentRawResponse(error=error, latency=time.perf_counter() - start,
                                backend_meta={"attempts": attempt + 1})


@dataclass(frozen=True)
class TrialPlan:
    perspective: str
    n_trials: int
    master_seed: int
    model_id: str = "mock"

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be at least 1")


@dataclass(frozen=True)
class RunSummary:
    n_planned: int
    n_completed: int
    n_new: int
    n_transport_error: int
    n_parseable: int
    n_strict_format: int
    n_arithmetic_ok: int
    n_in_range: int
    n_logically_correct: int

    def lines(self) -> list[str]:
        return [f"{name}: {getattr(self, name)}" for name in self.__dataclass_fields__]


def summarize(records, n_planned: int, n_new: int = 0) -> RunSummary:
    recs = list(records)
    return RunSummary(
        n_planned=n_planned,
        n_completed=len(recs),
        n_new=n_new,
        n_transport_error=sum(r["transport_error"] is not None for r in recs),
        n_parseable=sum(bool(r["parseable"]) for r in recs),
        n_strict_format=sum(bool(r["strict_format"]) for r in recs),
        n_arithmetic_ok=sum(bool(r["arithmetic_ok"]) for r in recs),
        n_in_range=sum(bool(r["in_range"]) for r in recs),
        n_logically_correct=sum(bool(r["logically_correct"]) for r in recs),
    )


def run_one(index: int, plan: TrialPlan, backend, *, pools: DemographicPools,
            prompts: PromptSet, timeout: float = 60.0, full_text: bool = False) -> dict:
    from .store import make_record

    seed = trial_seed(plan.master_seed, index)
    rng = np.random.default_rng(seed)
    profile = sample_profile(pools, rng)
    config = sample_trial_config(rng, plan.perspective, trial_seed=seed, trial_id=trial_id(index))
    pair = build_prompts(profile, config, prompts=prompts, pools=pools)
    request = AgentRequest(plan.model_id, pair.system_text, pair.user_text, config.temperature,
                           timeout, config.trial_id, config=config, profile=profile)
    response = backend.complete(request)
    parsed, flags = validate(response.raw_text, config)
    stamp = None if backend.deterministic else datetime.now(timezone.utc).isoformat()
    return make_record(
        model_id=plan.model_id, config=config, profile=profile,
        system_text=pair.system_text, user_text=pair.user_text,
        raw_text=response.raw_text, transport_error=response.error,
        parsed=parsed, flags=flags,
        latency=0.0 if backend.deterministic else response.latency,
        timestamp=stamp, trial_index=index, full_text=full_text,
    )


def run_trials(plan: TrialPlan, backend, parallelism: int, store, *,
               pools: DemographicPools | None = None, prompts: PromptSet | None = None,
               timeout: float = 60.0, full_text: bool = False) -> RunSummary:
    """Run the trials of ``plan`` not yet in ``store`` and append their records.

    Up to ``parallelism`` completions are in flight; records are appended in
    trial-index order, so the store is the same for any worker count.
    """
    if parallelism < 1:
        raise ValueError("parallelism must be at least 1")
    pools = pools or default_pools()
    prompts = prompts or default_prompt_set()
    done = store.completed_ids()
    pending = [i for i in range(plan.n_trials) if trial_id(i) not in done]

    def work(i):
        return run_one(i, plan, backend, pools=pools, prompts=prompts,
                       timeout=timeout, full_text=full_text)

    if parallelism == 1:
        for i in pending:
            store.append_trial(work(i))
    else:
        pool = ThreadPoolExecutor(max_workers=parallelism)
        try:
            for record in pool.map(work, pending):
                store.append_trial(record)
        finally:
            pool.shutdown(wait=True, cancel_futures=True)
    store.finalize()
    return summarize(store.load("all"), plan.n_trials, len(pending))
