"""Checker verdicts with witness data."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckReport:
    """Outcome of a geometric property check.

    For quantified checkers (constant width / constant diameter) the
    numeric fields hold the swept extremes and the tested target, and the
    verdict is equivalent to
    ``observed_max - observed_min <= tolerance and
    |observed_min - target| <= tolerance``.
    Predicate-style checks (strict convexity, chord intersections) fill
    only verdict, tolerance and witnesses.

    witnesses are JSON-ready dicts describing where extremes or violations
    were attained.  `profile` optionally carries the full sweep (an array
    of rows) for CSV export; it is not serialized to JSON.
    """

    verdict: bool
    tolerance: float
    target: float | None = None
    observed_min: float | None = None
    observed_max: float | None = None
    witnesses: list = field(default_factory=list)
    profile: object = None
    notes: str = ""

    def to_dict(self) -> dict:
        d = {
            "verdict": bool(self.verdict),
            "tolerance": float(self.tolerance),
            "target": None if self.target is None else float(self.target),
            "observed_min": None
            if self.observed_min is None
            else float(self.observed_min),
            "observed_max": None
            if self.observed_max is None
            else float(self.observed_max),
            "witnesses": self.witnesses,
        }
        if self.notes:
            d["notes"] = self.notes
        return d
