"""Arabic text normalization and character-level distance for transcript scoring."""

from __future__ import annotations

import unicodedata

# Tashkeel (U+064B..U+0652) and tatweel stripped; common variant letters folded.
_FOLD_TABLE = {cp: None for cp in range(0x064B, 0x0653)}
_FOLD_TABLE[0x0640] = None  # tatweel
_FOLD_TABLE.update(
    {
        0x0623: "ا",  # أ → ا
        0x0625: "ا",  # إ → ا
        0x0622: "ا",  # آ → ا
        0x0629: "ه",  # ة → ه
        0x0649: "ي",  # ى → ي
    }
)


def normalize_arabic(text: str) -> str:
    """Fold Arabic orthographic variants and strip punctuation/extra whitespace.

    Applied in order: diacritics and tatweel removed, hamza/taa-marbuta/alef-
    maksura folded, all Unicode punctuation removed, whitespace runs collapsed
    to single spaces, result trimmed.
    """
    folded = text.translate(_FOLD_TABLE)
    no_punct = "".join(c for c in folded if not unicodedata.category(c).startswith("P"))
    return " ".join(no_punct.split())


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance over Unicode scalar values, unit costs."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a  # keep the DP row short
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(
                    previous[j] + 1,  # delete from a
                    current[j - 1] + 1,  # insert into a
                    previous[j - 1] + (ca != cb),  # substitute
                )
            )
        previous = current
    return previous[-1]


def confidence(prompt_text: str, hypothesis: str) -> float:
    """Similarity of hypothesis to prompt in [0, 1] after normalization.

    1.0 means a (normalized) exact match; 0.0 means nothing in common. Two
    empty strings count as a perfect match.
    """
    p = normalize_arabic(prompt_text)
    h = normalize_arabic(hypothesis)
    if not p and not h:
        return 1.0
    return max(0.0, 1.0 - edit_distance(p, h) / max(len(p), len(h)))
