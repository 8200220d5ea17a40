from __future__ import annotations

import enum
from typing import Iterable


class Answer(enum.Enum):
    """Outcome of a bounded decision procedure. UNKNOWN means fuel ran out."""

    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    def __bool__(self) -> bool:
        raise TypeError("Answer is tri-state; compare against Answer.YES explicitly")

    @property
    def definite(self) -> bool:
        return self is not Answer.UNKNOWN


def all_of(answers: Iterable[Answer]) -> Answer:
    """Conjunction: NO dominates, then UNKNOWN."""
    seen_unknown = False
    for a in answers:
        if a is Answer.NO:
            return Answer.NO
        if a is Answer.UNKNOWN:
            seen_unknown = True
    return Answer.UNKNOWN if seen_unknown else Answer.YES
