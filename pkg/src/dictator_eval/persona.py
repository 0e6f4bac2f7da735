"""Demographic and MBTI persona pools, sampling, and rendering."""

from __future__ import annotations

import functools
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError

POOL_COUNTS = {
    "gender": 2,
    "education": 3,
    "marital": 2,
    "race": 15,
    "household_income": 10,
    "hispanic": 2,
    "occupation": 5,
    "industry": 13,
    "mbti": 16,
}

# letter that sets each MBTI flag, by code position
MBTI_FLAGS = (("introversion", "I", "E"), ("intuition", "N", "S"),
              ("feeling", "F", "T"), ("perceiving", "P", "J"))


@dataclass(frozen=True)
class DemographicPools:
    age_range: tuple[int, int]
    gender: tuple[str, ...]
    education: tuple[str, ...]
    marital: tuple[str, ...]
    race: tuple[str, ...]
    household_income: tuple[str, ...]
    hispanic: tuple[str, ...]
    occupation: tuple[str, ...]
    industry: tuple[str, ...]
    mbti_types: tuple[str, ...]

    @property
    def education_levels(self) -> tuple[int, ...]:
        return tuple(range(len(self.education)))

    @property
    def income_bands(self) -> tuple[int, ...]:
        return tuple(range(len(self.household_income)))


@dataclass(frozen=True)
class PersonaProfile:
    age: int
    gender: str
    education: int
    married: bool
    race: str
    income_band: int
    hispanic: bool
    occupation: str
    industry: str
    mbti: str

    @property
    def female(self) -> bool:
        return self.gender.lower() == "female"

    @property
    def introversion(self) -> bool:
        return self.mbti[0] == "I"

    @property
    def intuition(self) -> bool:
        return self.mbti[1] == "N"

    @property
    def feeling(self) -> bool:
        return self.mbti[2] == "F"

    @property
    def perceiving(self) -> bool:
        return self.mbti[3] == "P"


def mbti_flags(code: str) -> dict[str, bool]:
    if not is_mbti_code(code):
        raise ValueError(f"not an MBTI code: {code!r}")
    return {name: code[i] == yes for i, (name, yes, _) in enumerate(MBTI_FLAGS)}


def mbti_code(introversion: bool, intuition: bool, feeling: bool, perceiving: bool) -> str:
    flags = (introversion, intuition, feeling, perceiving)
    return "".join(yes if flag else no for flag, (_, yes, no) in zip(flags, MBTI_FLAGS))


def is_mbti_code(code: str) -> bool:
    return (isinstance(code, str) and len(code) == 4
            and all(code[i] in (yes, no) for i, (_, yes, no) in enumerate(MBTI_FLAGS)))


def parse_pools(text: str) -> DemographicPools:
    sections: dict[str, list[str]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current in sections:
                raise ConfigError(f"line {lineno}: duplicate section [{current}]")
            sections[current] = []
            continue
        if current is None:
            raise ConfigError(f"line {lineno}: label outside of a section")
        if ";" in line:
            raise ConfigError(f"line {lineno}: labels may not contain ';'")
        sections[current].append(line)

    missing = [name for name in ("age_range", *POOL_COUNTS) if name not in sections]
    if missing:
        raise ConfigError(f"pools file missing sections: {', '.join(missing)}")
    for name, count in POOL_COUNTS.items():
        labels = sections[name]
        if len(labels) != count:
            raise ConfigError(f"[{name}] needs {count} labels, found {len(labels)}")
        if len(set(labels)) != len(labels):
            raise ConfigError(f"[{name}] has duplicate labels")
    if not any(g.lower() == "female" for g in sections["gender"]):
        raise ConfigError("[gender] must contain a 'Female' label")
    bad = [c for c in sections["mbti"] if not is_mbti_code(c)]
    if bad:
        raise ConfigError(f"[mbti] invalid codes: {bad}")

    try:
        lo, hi = (int(v) for v in sections["age_range"])
    except ValueError as exc:
        raise ConfigError("[age_range] needs two integers: min and max") from exc
    if lo > hi:
        raise ConfigError("[age_range] min exceeds max")

    return DemographicPools(
        age_range=(lo, hi),
        gender=tuple(sections["gender"]),
        education=tuple(sections["education"]),
        marital=tuple(sections["marital"]),
        race=tuple(sections["race"]),
        household_income=tuple(sections["household_income"]),
        hispanic=tuple(sections["hispanic"]),
        occupation=tuple(sections["occupation"]),
        industry=tuple(sections["industry"]),
        mbti_types=tuple(sections["mbti"]),
    )


def load_pools(path: str | Path) -> DemographicPools:
    return parse_pools(Path(path).read_text(encoding="utf-8"))


@functools.lru_cache(maxsize=None)
def default_pools() -> DemographicPools:
    """Pools bundled with the package (``data/pools.txt``)."""
    text = resources.files("dictator_eval").joinpath("data/pools.txt").read_text(encoding="utf-8")
    return parse_pools(text)


def sample_profile(pools: DemographicPools, rng: np.random.Generator) -> PersonaProfile:
    """Draw every attribute independently and uniformly from its pool."""
    lo, hi = pools.age_range

    def pick(labels):
        return labels[int(rng.integers(len(labels)))]

    return PersonaProfile(
        age=int(rng.integers(lo, hi + 1)),
        gender=pick(pools.gender),
        education=int(rng.integers(len(pools.education))),
        married=bool(rng.integers(2) == 0),
        race=pick(pools.race),
        income_band=int(rng.integers(len(pools.household_income))),
        hispanic=bool(rng.integers(2) == 0),
        occupation=pick(pools.occupation),
        industry=pick(pools.industry),
        mbti=pick(pools.mbti_types),
    )


def render_profile(profile: PersonaProfile, pools: DemographicPools | None = None) -> str:
    """Render a profile as one ``key: value`` list in a fixed key order."""
    pools = pools or default_pools()
    fields = [
        ("age", str(profile.age)),
        ("gender", profile.gender),
        ("education", pools.education[profile.education]),
        ("marital status", pools.marital[0 if profile.married else 1]),
        ("race", profile.race),
        ("household income", pools.household_income[profile.income_band]),
        ("Hispanic origin", pools.hispanic[0 if profile.hispanic else 1]),
        ("occupation", profile.occupation),
        ("industry", profile.industry),
        ("MBTI personality type", profile.mbti),
    ]
    return "; ".join(f"{key}: {value}" for key, value in fields)
