import itertools
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from dictator_eval.errors import ConfigError
from dictator_eval.persona import (POOL_COUNTS, PersonaProfile, default_pools, is_mbti_code,
                                   mbti_code, mbti_flags, parse_pools, render_profile,
                                   sample_profile)

POOLS = default_pools()
POOLS_TEXT = resources.files("dictator_eval").joinpath("data/pools.txt").read_text(encoding="utf-8")


def test_default_pool_sizes():
    assert POOLS.age_range == (20, 60)
    assert len(POOLS.gender) == POOL_COUNTS["gender"]
    assert len(POOLS.race) == 15
    assert len(POOLS.household_income) == 10
    assert len(POOLS.occupation) == 5
    assert len(POOLS.industry) == 13
    assert len(POOLS.mbti_types) == 16
    assert POOLS.education_levels == (0, 1, 2)


def test_all_sixteen_mbti_codes_distinct():
    assert len(set(POOLS.mbti_types)) == 16
    assert all(is_mbti_code(c) for c in POOLS.mbti_types)


@pytest.mark.parametrize("flags", list(itertools.product([False, True], repeat=4)))
def test_mbti_round_trip(flags):
    code = mbti_code(*flags)
    assert tuple(mbti_flags(code).values()) == flags


def test_mbti_flags_example():
    assert mbti_flags("INFP") == {"introversion": True, "intuition": True,
                                  "feeling": True, "perceiving": True}
    assert mbti_flags("ESTJ") == dict.fromkeys(("introversion", "intuition", "feeling", "perceiving"), False)


@pytest.mark.parametrize("bad", ["", "INF", "XNFP", "infp", "INFPX", "IFNP"])
def test_invalid_mbti(bad):
    assert not is_mbti_code(bad)


def test_profile_flags(profile):
    assert profile.female
    assert profile.introversion and profile.intuition and profile.feeling and profile.perceiving


def test_sampling_is_seeded():
    a = [sample_profile(POOLS, np.random.default_rng(9)) for _ in range(3)]
    b = [sample_profile(POOLS, np.random.default_rng(9)) for _ in range(3)]
    assert a == b


def test_sample_within_pools():
    rng = np.random.default_rng(0)
    for _ in range(500):
        p = sample_profile(POOLS, rng)
        assert 20 <= p.age <= 60 and isinstance(p.age, int)
        assert p.gender in POOLS.gender
        assert p.race in POOLS.race
        assert 0 <= p.income_band < 10
        assert p.mbti in POOLS.mbti_types


def _chi2_uniform(values, categories):
    counts = np.array([sum(v == c for v in values) for c in categories])
    return sps.chisquare(counts).pvalue


@pytest.mark.parametrize("attr,categories", [
    ("race", POOLS.race),
    ("mbti", POOLS.mbti_types),
    ("industry", POOLS.industry),
    ("age", range(20, 61)),
    ("income_band", range(10)),
])
def test_marginals_uniform(attr, categories):
    rng = np.random.default_rng(2024)
    values = [getattr(sample_profile(POOLS, rng), attr) for _ in range(8000)]
    assert _chi2_uniform(values, list(categories)) > 0.01


def test_render_order_and_labels(profile):
    text = render_profile(profile)
    keys = [part.split(": ", 1)[0] for part in text.split("; ")]
    assert keys == ["age", "gender", "education", "marital status", "race", "household income",
                    "Hispanic origin", "occupation", "industry", "MBTI personality type"]
    assert "education: Bachelor's degree or more" in text
    assert "marital status: Currently married" in text
    assert "household income: $50,000 to $74,999" in text
    assert "Hispanic origin: Not Hispanic or Latino" in text


profiles = st.builds(
    PersonaProfile,
    age=st.integers(20, 60), gender=st.sampled_from(POOLS.gender),
    education=st.integers(0, 2), married=st.booleans(), race=st.sampled_from(POOLS.race),
    income_band=st.integers(0, 9), hispanic=st.booleans(),
    occupation=st.sampled_from(POOLS.occupation), industry=st.sampled_from(POOLS.industry),
    mbti=st.sampled_from(POOLS.mbti_types),
)


@settings(max_examples=200)
@given(profiles, profiles)
def test_render_injective(a, b):
    assert (render_profile(a) == render_profile(b)) == (a == b)


def test_custom_pools_parse():
    pools = parse_pools(POOLS_TEXT.replace("Some other race", "Two or more races"))
    assert pools.race[-1] == "Two or more races"


@pytest.mark.parametrize("edit,msg", [
    (lambda t: t.replace("Samoan\n", ""), "race"),
    (lambda t: t.replace("Chinese", "White"), "duplicate"),
    (lambda t: t.replace("Female", "Woman"), "Female"),
    (lambda t: t.replace("ENTJ", "ENTX"), "mbti"),
    (lambda t: t.replace("Korean", "Korean; other"), ";"),
    (lambda t: t.replace("[industry]", "[industries]"), "missing"),
    (lambda t: t.replace("20\n60", "60\n20"), "age_range"),
])
def test_bad_pools_rejected(edit, msg):
    with pytest.raises(ConfigError, match=msg):
        parse_pools(edit(POOLS_TEXT))
