"""Mark grids of the six published alignment tables, one row per factor.

Columns follow MODELS. ROW_TOTALS and COLUMN_TOTALS are the printed totals,
with None for the "--" rows of factors lacking a consensus.
"""

MODELS = ("G27B", "G9B", "GPT4o", "L405B", "L70B", "L8B", "P14B", "P3.8B", "Q72B", "Q7B")

GRIDS = {
    ("SoS", "main"): [
        "✗ n.s. n.s. n.s. n.s. n.s. n.s. n.s. n.s. n.s.",  # Age
        "n.s. ✓ n.s. ✓ ✓ ✓ ✓ n.s. ✓ n.s.",  # Education
        "pos. pos. n.s. n.s. pos. pos. n.s. n.s. neg. n.s.",  # H. Income
        "n.s. ✓ n.s. ✓ n.s. ✓ n.s. n.s. ✓ n.s.",  # Female
        "n.s. ✗ n.s. ✓ n.s. n.s. ✗ n.s. n.s. n.s.",  # Married
        "n.s. n.s. n.s. n.s. pos. pos. neg. n.s. n.s. n.s.",  # Temperature
        "✓ ✓ n.s. ✓ ✗ ✓ ✓ n.s. n.s. n.s.",  # Introversion
        "✓ ✓ n.s. ✓ ✓ n.s. n.s. n.s. ✓ n.s.",  # Feeling
        "✓ ✓ n.s. ✓ ✓ n.s. ✓ n.s. ✓ n.s.",  # Intuition
        "✓ n.s. n.s. ✓ ✓ ✓ n.s. n.s. ✓ n.s.",  # Perceiving
        "✓ ✓ n.s. ✓ ✓ ✓ n.s. n.s. ✓ n.s.",  # Friend
        "✓ ✓ ✓ ✓ ✓ ✓ ✓ n.s. ✓ n.s.",  # Stranger Meet
        "n.s. n.s. ✓ ✓ ✓ ✓ ✓ n.s. ✓ ✓",  # Take
        "✓ ✓ ✗ ✗ n.s. ✓ ✓ n.s. ✓ ✗",  # Stake
    ],
    ("SoS", "compassion"): [
        "✓ ✓ ✓ ✓ ✓ n.s. ✓ n.s. ✓ ✓",  # Pos. Emotion
        "✓ ✓ ✓ ✗ ✓ n.s. n.s. n.s. n.s. n.s.",  # Social
        "✗ ✓ n.s. n.s. ✓ n.s. n.s. n.s. n.s. ✓",  # Religious
        "✓ ✓ ✓ ✓ ✓ ✓ ✓ n.s. ✓ ✓",  # Affiliation
        "✓ ✗ ✓ ✗ ✗ n.s. ✗ n.s. ✗ n.s.",  # Certain
        "✗ ✗ n.s. ✗ ✓ ✗ ✗ ✓ n.s. ✓",  # Family
        "✗ n.s. ✗ ✗ ✗ ✗ ✗ n.s. ✗ n.s.",  # Drives
        "✗ n.s. ✗ ✗ ✓ ✓ ✗ n.s. ✗ n.s.",  # Affect
    ],
    ("SoS", "empathy"): [
        "✓ ✓ ✓ ✗ ✗ n.s. ✓ n.s. ✗ ✗",  # I
        "✗ ✗ ✗ ✗ ✗ ✗ ✓ n.s. n.s. n.s.",  # Focus Present
        "✗ n.s. ✗ ✗ ✓ ✓ ✗ n.s. ✗ n.s.",  # Personal Pronoun
        "n.s. n.s. ✗ ✓ n.s. ✗ n.s. n.s. ✗ n.s.",  # Sadness
        "n.s. ✓ n.s. ✓ ✓ ✓ ✗ n.s. ✗ ✗",  # Discrepancy
        "✗ ✗ ✓ ✗ ✗ n.s. ✗ n.s. ✗ n.s.",  # Verb
        "✓ ✗ n.s. ✓ n.s. ✗ ✗ n.s. ✗ n.s.",  # Adverb
        "✓ ✓ ✗ n.s. ✗ ✗ ✗ n.s. n.s. n.s.",  # Cognitive Processes
        "✓ ✗ ✓ ✗ ✗ ✗ n.s. n.s. ✗ n.s.",  # Pronoun
        "✗ n.s. ✗ ✗ ✓ ✓ ✗ n.s. ✗ n.s.",  # Affect
    ],
    ("ToM", "main"): [
        "n.s. n.s. n.s. n.s. ✗ n.s. n.s. ✓ n.s. n.s.",  # Age
        "✓ ✓ n.s. ✓ ✓ ✓ ✓ n.s. ✓ n.s.",  # Education
        "pos. n.s. n.s. pos. pos. pos. n.s. n.s. n.s. n.s.",  # H. Income
        "✓ n.s. n.s. ✓ ✓ n.s. ✓ n.s. ✓ n.s.",  # Female
        "n.s. n.s. n.s. n.s. ✓ n.s. n.s. n.s. n.s. n.s.",  # Married
        "n.s. n.s. n.s. n.s. n.s. pos. neg. n.s. n.s. n.s.",  # Temperature
        "✓ n.s. n.s. ✓ ✗ n.s. ✓ n.s. ✓ n.s.",  # Introversion
        "✓ ✓ n.s. ✓ ✓ ✓ ✓ n.s. ✓ n.s.",  # Feeling
        "✓ ✓ n.s. ✓ ✓ ✓ ✓ n.s. ✓ ✓",  # Intuition
        "n.s. n.s. n.s. ✓ ✓ n.s. n.s. n.s. n.s. n.s.",  # Perceiving
        "✓ ✓ ✓ ✓ ✓ ✓ ✓ n.s. ✓ ✓",  # Friend
        "✓ n.s. ✓ ✓ ✓ n.s. n.s. n.s. ✓ n.s.",  # Stranger Meet
        "✗ n.s. ✓ ✓ ✓ ✓ ✓ ✓ ✗ ✓",  # Take
        "✓ n.s. ✓ ✓ ✓ ✓ ✓ n.s. ✓ n.s.",  # Stake
    ],
    ("ToM", "compassion"): [
        "✓ n.s. n.s. ✓ ✓ ✓ ✓ n.s. ✓ ✓",  # Pos. Emotion
        "n.s. n.s. ✗ n.s. n.s. ✗ n.s. n.s. n.s. n.s.",  # Social
        "✓ n.s. ✗ n.s. n.s. n.s. n.s. n.s. ✓ n.s.",  # Religious
        "✓ n.s. ✓ ✓ ✓ ✓ ✓ n.s. ✓ ✓",  # Affiliation
        "n.s. n.s. ✓ ✗ n.s. ✗ ✓ n.s. n.s. n.s.",  # Certain
        "n.s. n.s. n.s. n.s. ✓ n.s. n.s. n.s. ✗ n.s.",  # Family
        "✗ n.s. n.s. ✗ ✗ ✗ n.s. n.s. ✗ n.s.",  # Drives
        "✗ n.s. n.s. ✗ ✗ ✗ ✗ n.s. ✗ n.s.",  # Affect
    ],
    ("ToM", "empathy"): [
        "n.s. n.s. n.s. n.s. n.s. n.s. n.s. n.s. n.s. n.s.",  # I
        "n.s. n.s. ✗ ✓ ✗ ✗ n.s. n.s. n.s. n.s.",  # Focus Present
        "✓ n.s. ✗ n.s. ✓ ✓ ✗ n.s. ✗ n.s.",  # Personal Pronoun
        "n.s. n.s. ✗ n.s. ✓ n.s. n.s. n.s. ✓ n.s.",  # Sadness
        "n.s. n.s. n.s. n.s. n.s. ✓ n.s. n.s. ✗ n.s.",  # Discrepancy
        "✗ n.s. ✓ ✗ n.s. ✗ n.s. n.s. ✗ ✗",  # Verb
        "n.s. n.s. ✗ n.s. n.s. ✗ n.s. n.s. n.s. n.s.",  # Adverb
        "✓ n.s. ✗ ✓ ✗ ✗ ✗ n.s. n.s. n.s.",  # Cognitive Processes
        "✗ n.s. ✓ ✗ ✗ ✗ ✓ n.s. ✓ n.s.",  # Pronoun
        "✗ n.s. n.s. ✗ ✗ ✗ ✗ n.s. ✗ n.s.",  # Affect
    ],
}

ROW_TOTALS = {
    ("SoS", "main"): (0, 6, None, 4, 1, None, 5, 5, 6, 5, 6, 8, 7, 5),
    ("SoS", "compassion"): (8, 4, 3, 9, 2, 3, 0, 2),
    ("SoS", "empathy"): (4, 1, 2, 1, 4, 1, 2, 2, 2, 2),
    ("ToM", "main"): (1, 7, None, 5, 1, None, 4, 7, 8, 2, 9, 5, 7, 7),
    ("ToM", "compassion"): (7, 0, 2, 8, 2, 1, 0, 0),
    ("ToM", "empathy"): (0, 1, 3, 2, 1, 1, 0, 1, 3, 0),
}

COLUMN_TOTALS = {
    ("SoS", "main"): ((7, 8, 2, 10, 7, 8, 6, 0, 9, 1), 58),
    ("SoS", "compassion"): ((4, 4, 4, 2, 6, 2, 2, 1, 2, 4), 31),
    ("SoS", "empathy"): ((4, 3, 3, 3, 3, 3, 2, 0, 0, 0), 21),
    ("ToM", "main"): ((8, 4, 4, 10, 10, 6, 8, 2, 8, 3), 63),
    ("ToM", "compassion"): ((3, 0, 2, 2, 3, 2, 3, 0, 3, 2), 20),
    ("ToM", "empathy"): ((2, 0, 2, 2, 2, 2, 1, 0, 2, 0), 13),
}
