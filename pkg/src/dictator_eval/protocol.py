"""Experimental conditions and the agent/game prompt texts.

Per-trial randomness comes from ``trial_seed(master_seed, index)``, which
hashes the pair through :class:`numpy.random.SeedSequence`. A trial can be
regenerated on its own from its index and the run's master seed.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .persona import DemographicPools, PersonaProfile, render_profile

PERSPECTIVES = ("SoS", "ToM")
FRAMINGS = ("Give", "Take")
SOCIAL_DISTANCES = ("Stranger", "StrangerMeet", "Friend")
STAKE_RANGE = (10, 100)

PROFILE_SLOT = "{dictator_profile}"
DISTANCE_SLOT = "{social_distance_dict[social_distance]}"
AMOUNT_SLOT = "{amount_given}"

TEMPLATE_FILES = {
    ("SoS", "system"): "sos_system.txt",
    ("ToM", "system"): "tom_system.txt",
    ("SoS", "Give"): "sos_give.txt",
    ("SoS", "Take"): "sos_take.txt",
    ("ToM", "Give"): "tom_give.txt",
    ("ToM", "Take"): "tom_take.txt",
}

# response keys for the dictator's and recipient's final payments
PAYMENT_KEYS = {
    "SoS": ("final_payment_you", "final_payment_other"),
    "ToM": ("final_payment_dmaker", "final_payment_recipient"),
}


@dataclass(frozen=True)
class TrialConfig:
    perspective: str
    framing: str
    social_distance: str
    amount_given: int
    temperature: float
    trial_seed: int
    trial_id: str

    def __post_init__(self):
        if self.perspective not in PERSPECTIVES:
            raise ValueError(f"unknown perspective {self.perspective!r}")
        if self.framing not in FRAMINGS:
            raise ValueError(f"unknown framing {self.framing!r}")
        if self.social_distance not in SOCIAL_DISTANCES:
            raise ValueError(f"unknown social distance {self.social_distance!r}")
        lo, hi = STAKE_RANGE
        if not lo <= self.amount_given <= hi:
            raise ValueError(f"amount_given {self.amount_given} outside [{lo}, {hi}]")
        if not 0.0 <= self.temperature <= 1.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 1]")


@dataclass(frozen=True)
class PromptPair:
    system_text: str
    user_text: str


@dataclass(frozen=True)
class PromptSet:
    """Template texts and social-distance sentences used for rendering."""

    templates: dict
    social_distance: dict

    def as_dict(self) -> dict:
        return {
            "templates": {f"{p}/{k}": v for (p, k), v in sorted(self.templates.items())},
            "social_distance": {f"{p}/{lvl}": v for (p, lvl), v in sorted(self.social_distance.items())},
        }


def _read_resource(name: str) -> str:
    return resources.files("dictator_eval").joinpath("data", name).read_text(encoding="utf-8")


def _strip_final_newline(text: str) -> str:
    return text[:-1] if text.endswith("\n") else text


def parse_social_distance(text: str) -> dict:
    sentences = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip() or raw.startswith("#"):
            continue
        parts = raw.split("\t")
        if len(parts) != 3:
            raise ConfigError(f"line {lineno}: expected perspective<TAB>level<TAB>sentence")
        perspective, level, sentence = parts
        if perspective not in PERSPECTIVES or level not in SOCIAL_DISTANCES:
            raise ConfigError(f"line {lineno}: unknown perspective/level {perspective}/{level}")
        if (perspective, level) in sentences:
            raise ConfigError(f"line {lineno}: duplicate entry {perspective}/{level}")
        if not sentence.strip() or "{" in sentence:
            raise ConfigError(f"line {lineno}: sentence empty or contains '{{'")
        sentences[(perspective, level)] = sentence
    missing = [(p, lvl) for p in PERSPECTIVES for lvl in SOCIAL_DISTANCES if (p, lvl) not in sentences]
    if missing:
        raise ConfigError(f"social-distance file missing entries: {missing}")
    return sentences


def load_prompt_set(template_dir: str | Path | None = None,
                    social_distance_path: str | Path | None = None) -> PromptSet:
    templates = {}
    for key, fname in TEMPLATE_FILES.items():
        if template_dir is None:
            text = _read_resource(f"templates/{fname}")
        else:
            text = (Path(template_dir) / fname).read_text(encoding="utf-8")
        templates[key] = _strip_final_newline(text)
    if social_distance_path is None:
        sd_text = _read_resource("social_distance.tsv")
    else:
        sd_text = Path(social_distance_path).read_text(encoding="utf-8")
    return PromptSet(templates, parse_social_distance(sd_text))


@functools.lru_cache(maxsize=None)
def default_prompt_set() -> PromptSet:
    return load_prompt_set()


def trial_seed(master_seed: int, index: int) -> int:
    """Seed for trial ``index`` of a run, independent of every other trial."""
    ss = np.random.SeedSequence([int(master_seed), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def trial_id(index: int) -> str:
    return f"T{index:07d}"


def sample_trial_config(rng: np.random.Generator, perspective: str, *,
                        trial_seed: int = 0, trial_id: str = "T0000000") -> TrialConfig:
    lo, hi = STAKE_RANGE
    return TrialConfig(
        perspective=perspective,
        framing=FRAMINGS[int(rng.integers(len(FRAMINGS)))],
        social_distance=SOCIAL_DISTANCES[int(rng.integers(len(SOCIAL_DISTANCES)))],
        amount_given=int(rng.integers(lo, hi + 1)),
        temperature=float(rng.uniform(0.0, 1.0)),
        trial_seed=trial_seed,
        trial_id=trial_id,
    )


def build_system_prompt(profile: PersonaProfile, perspective: str, *,
                        prompts: PromptSet | None = None,
                        pools: DemographicPools | None = None) -> str:
    prompts = prompts or default_prompt_set()
    template = prompts.templates[(perspective, "system")]
    return template.replace(PROFILE_SLOT, render_profile(profile, pools))


def build_game_prompt(config: TrialConfig, perspective: str | None = None, *,
                      prompts: PromptSet | None = None) -> str:
    prompts = prompts or default_prompt_set()
    perspective = perspective or config.perspective
    template = prompts.templates[(perspective, config.framing)]
    sentence = prompts.social_distance[(perspective, config.social_distance)]
    return (template.replace(DISTANCE_SLOT, sentence)
            .replace(AMOUNT_SLOT, str(config.amount_given)))


def build_prompts(profile: PersonaProfile, config: TrialConfig, *,
                  prompts: PromptSet | None = None,
                  pools: DemographicPools | None = None) -> PromptPair:
    pair = PromptPair(
        system_text=build_system_prompt(profile, config.perspective, prompts=prompts, pools=pools),
        user_text=build_game_prompt(config, prompts=prompts),
    )
    for text in (pair.system_text, pair.user_text):
        if not text or "{" in text:
            raise ConfigError("prompt has an unsubstituted slot")
    return pair
