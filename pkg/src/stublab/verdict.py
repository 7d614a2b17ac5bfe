"""Verdict objects shared by the condition checkers, classifiers and oracles.

Some checks are exact, some are only bounded-decidable; a verdict records
which, plus a fully replayable witness when a property fails.
"""

from __future__ import annotations

from dataclasses import dataclass, field

HOLDS = "holds"
BOUNDED = "bounded-holds"
FAILS = "fails"


@dataclass(frozen=True)
class Verdict:
    status: str
    witness: dict | None = None
    limits: dict | None = None

    @property
    def ok(self) -> bool:
        return self.status != FAILS

    @property
    def exact(self) -> bool:
        return self.status == HOLDS

    def to_json(self) -> dict:
        doc: dict = {"status": self.status}
        if self.witness is not None:
            doc["witness"] = self.witness
        if self.limits is not None:
            doc["limits"] = self.limits
        return doc


def holds() -> Verdict:
    return Verdict(HOLDS)


def bounded(**limits) -> Verdict:
    return Verdict(BOUNDED, limits=limits)


def fails(**witness) -> Verdict:
    return Verdict(FAILS, witness=witness)
