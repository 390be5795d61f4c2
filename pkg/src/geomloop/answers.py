"""Answer values: numbers, lowest-term ratios, and textual descriptors.

Gold answers arrive as surface text ("30", "2:1", "1/3", "isosceles right
triangle"); agents submit either numbers or text. These helpers normalize
both sides so result scoring can compare them under type-specific equality.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .errors import ProblemFormatError

# Unit spellings normalized to "degrees"; empty means dimensionless.
_DEGREE_UNITS = {"deg", "degs", "degree", "degrees", "°"}
_DIMENSIONLESS_UNITS = {"", "unit", "units"}

_RATIO_RE = re.compile(r"^\s*(\d+)\s*[:/]\s*(\d+)\s*$")


@dataclass(frozen=True)
class Numerical:
    value: float
    unit: str | None = None


@dataclass(frozen=True)
class Ratio:
    numerator: int
    denominator: int

    def __post_init__(self):
        if self.numerator <= 0 or self.denominator <= 0:
            raise ValueError("ratio terms must be positive integers")
        g = math.gcd(self.numerator, self.denominator)
        object.__setattr__(self, "numerator", self.numerator // g)
        object.__setattr__(self, "denominator", self.denominator // g)


@dataclass(frozen=True)
class Descriptor:
    text: str

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("descriptor text must be nonempty")


AnswerValue = Union[Numerical, Ratio, Descriptor]

ANSWER_TYPES = ("numerical", "ratio", "descriptor")


def normalize_unit(unit: str | None) -> str | None:
    if unit is None:
        return None
    u = unit.strip().lower()
    if u in _DIMENSIONLESS_UNITS:
        return None
    if u in _DEGREE_UNITS:
        return "degrees"
    return u


def normalize_text(text: str) -> str:
    return " ".join(text.split()).casefold()


def parse_ratio_text(text: str) -> Ratio | None:
    """Accepts the a:b and a/b surface forms with integer terms."""
    m = _RATIO_RE.match(text)
    if not m:
        return None
    num, den = int(m.group(1)), int(m.group(2))
    if num <= 0 or den <= 0:
        return None
    return Ratio(num, den)


def parse_gold_answer(text: str, answer_type: str, unit: str | None = None) -> AnswerValue:
    """Parse a problem file's gold answer string under its declared type."""
    if answer_type == "numerical":
        try:
            value = float(text)
        except ValueError as exc:
            raise ProblemFormatError(f"gold answer {text!r} is not numeric") from exc
        return Numerical(value, normalize_unit(unit))
    if answer_type == "ratio":
        ratio = parse_ratio_text(text)
        if ratio is None:
            raise ProblemFormatError(f"gold answer {text!r} is not a ratio")
        return ratio
    if answer_type == "descriptor":
        if not text.strip():
            raise ProblemFormatError("descriptor gold answer is empty")
        return Descriptor(text)
    raise ProblemFormatError(f"unknown answer type {answer_type!r}")


def answer_from_wire(value: object, unit: str | None = None) -> AnswerValue:
    """Interpret an action's answer payload.

    Numbers become Numerical; strings are tried as ratio surface forms, then
    as numbers, and fall back to descriptors.
    """
    if isinstance(value, bool):
        raise ValueError("answer value cannot be a boolean")
    if isinstance(value, (int, float)):
        if not math.isfinite(float(value)):
            raise ValueError("answer value must be finite")
        return Numerical(float(value), normalize_unit(unit))
    if isinstance(value, str):
        ratio = parse_ratio_text(value)
        if ratio is not None:
            return ratio
        try:
            return Numerical(float(value), normalize_unit(unit))
        except ValueError:
            pass
        return Descriptor(value)
    raise ValueError(f"unsupported answer payload {value!r}")


def answer_to_wire(answer: AnswerValue) -> dict:
    """Payload fields of the answer action for this value."""
    if isinstance(answer, Numerical):
        out: dict = {"value": answer.value}
        if answer.unit:
            out["unit"] = answer.unit
        return out
    if isinstance(answer, Ratio):
        return {"value": f"{answer.numerator}:{answer.denominator}"}
    return {"value": answer.text}


def _numbers_match(a: float, b: float) -> bool:
    # Relative 1e-6 with an absolute 1e-9 floor near zero.
    return abs(a - b) <= max(1e-9, 1e-6 * max(abs(a), abs(b)))


def answers_match(
    given: AnswerValue | None,
    gold: AnswerValue,
    aliases: tuple[str, ...] = (),
) -> bool:
    """Type-specific equality of a submitted answer against the gold one."""
    if given is None:
        return False
    if isinstance(gold, Numerical):
        if isinstance(given, Ratio):
            return False
        if isinstance(given, Descriptor):
            try:
                given = Numerical(float(given.text))
            except ValueError:
                return False
        assert isinstance(given, Numerical)
        gu, au = normalize_unit(gold.unit), normalize_unit(given.unit)
        if au is not None and gu is not None and au != gu:
            return False
        return _numbers_match(given.value, gold.value)
    if isinstance(gold, Ratio):
        if isinstance(given, Descriptor):
            given = parse_ratio_text(given.text) or given
        return isinstance(given, Ratio) and given == gold
    # Descriptor gold: case-insensitive, whitespace-normalized, alias-aware.
    if not isinstance(given, Descriptor):
        return False
    accepted = {normalize_text(gold.text)}
    accepted.update(normalize_text(a) for a in aliases)
    return normalize_text(given.text) in accepted
