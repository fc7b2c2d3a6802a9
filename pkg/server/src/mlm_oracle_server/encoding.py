"""The 22-position one-hot encoding and sentence template the oracle serves.

This is the wire-protocol vocabulary: positions 0-4 birth period, 5-13
location, 14-21 occupation. Clients may send either a templated
sentence with one generic <mask> placeholder or the 22-bit vector; the
server translates between them with this module.
"""

from __future__ import annotations

import re

MASK_PLACEHOLDER = "<mask>"

BIRTH_PERIODS = (
    "before 1875",
    "between 1875 and 1925",
    "between 1925 and 1951",
    "between 1951 and 1970",
    "after 1970",
)
LOCATIONS = (
    "North America",
    "Africa",
    "Europe",
    "Asia",
    "South America",
    "Oceania",
    "Eurasia",
    "Americas",
    "Australia",
)
OCCUPATIONS = (
    "nurse",
    "fashion designer",
    "dancer",
    "footballer",
    "industrialist",
    "boxer",
    "singer",
    "violinist",
)

VECTOR_LENGTH = len(BIRTH_PERIODS) + len(LOCATIONS) + len(OCCUPATIONS)
_LOCATION_OFFSET = len(BIRTH_PERIODS)
_OCCUPATION_OFFSET = _LOCATION_OFFSET + len(LOCATIONS)

_AN_OCCUPATIONS = frozenset({"industrialist"})

_SENTENCE_RE = re.compile(
    r"^<mask> was born (?P<birth>.+?) in (?P<location>.+?) and is an? (?P<occupation>.+?)\.?$"
)


class EncodingError(ValueError):
    """Raised for vectors or sentences outside the template space."""


def decode_vector(vector: list[int] | tuple[int, ...]) -> tuple[str, str, str]:
    if len(vector) != VECTOR_LENGTH:
        raise EncodingError(f"vector must have {VECTOR_LENGTH} bits, got {len(vector)}")
    if any(bit not in (0, 1) for bit in vector):
        raise EncodingError("vector bits must be 0 or 1")
    picks = []
    for values, offset in (
        (BIRTH_PERIODS, 0),
        (LOCATIONS, _LOCATION_OFFSET),
        (OCCUPATIONS, _OCCUPATION_OFFSET),
    ):
        block = tuple(vector[offset : offset + len(values)])
        if sum(block) != 1:
            raise EncodingError(
                f"vector must be one-hot in positions {offset}..{offset + len(values) - 1}"
            )
        picks.append(values[block.index(1)])
    return tuple(picks)


def encode_triple(birth: str, location: str, occupation: str) -> tuple[int, ...]:
    vector = [0] * VECTOR_LENGTH
    for value, values, offset in (
        (birth, BIRTH_PERIODS, 0),
        (location, LOCATIONS, _LOCATION_OFFSET),
        (occupation, OCCUPATIONS, _OCCUPATION_OFFSET),
    ):
        try:
            vector[offset + values.index(value)] = 1
        except ValueError:
            raise EncodingError(f"unknown feature value {value!r}") from None
    return tuple(vector)


def vector_to_sentence(vector) -> str:
    birth, location, occupation = decode_vector(vector)
    article = "an" if occupation in _AN_OCCUPATIONS else "a"
    return f"{MASK_PLACEHOLDER} was born {birth} in {location} and is {article} {occupation}."


def sentence_to_vector(sentence: str) -> tuple[int, ...]:
    match = _SENTENCE_RE.match(sentence.strip())
    if not match:
        raise EncodingError(f"sentence does not match the template: {sentence!r}")
    return encode_triple(match["birth"], match["location"], match["occupation"])


def all_vectors() -> list[tuple[int, ...]]:
    """All 360 template vectors, lexicographic by (birth, location, occupation)."""
    return [
        encode_triple(birth, location, occupation)
        for birth in BIRTH_PERIODS
        for location in LOCATIONS
        for occupation in OCCUPATIONS
    ]
