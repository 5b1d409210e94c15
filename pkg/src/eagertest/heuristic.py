"""Stereotype-based eager test verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .flow import LinearizedTest

EAGER = "eager"
NOT_EAGER = "not-eager"
NOT_APPLICABLE = "not-applicable"
RESULTS = (EAGER, NOT_EAGER, NOT_APPLICABLE)

HEURISTIC = "heuristic"


@dataclass(frozen=True)
class Verdict:
    test_id: tuple[str, str, str]
    detector: str
    result: str
    evidence: dict = field(default_factory=dict, compare=False, hash=False)
    flags: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.result not in RESULTS:
            raise ValueError(f"bad verdict result {self.result!r}")
        if self.result == NOT_APPLICABLE and not self.flags:
            raise ValueError("not-applicable verdicts must carry a flag explaining why")

    @property
    def is_eager(self) -> bool:
        return self.result == EAGER


def not_applicable(test_id, detector: str, flag: str, **evidence) -> Verdict:
    return Verdict(test_id, detector, NOT_APPLICABLE, dict(evidence), frozenset({flag}))


def detect_eager(test: LinearizedTest) -> Verdict:
    """Eager unless exactly one call's outcome covers everything asserted.

    Calls with empty outcomes (getters, external producers) never count as
    covering. Zero covering calls means the asserts span several calls; two
    or more is kept as eager but flagged, since coverage is then ambiguous.
    """
    tid = test.test.test_id
    flags: set[str] = set()
    if any(a.exceptional for a in test.asserts):
        flags.add("exceptional-path")
    verified = test.verified_union
    evidence: dict = {
        "verified_info": sorted(str(f) for f in verified),
        "semantics": "count calls whose outcome contains all verified facts; exactly one => not eager",
    }
    if not verified:
        flags.add("no-assertions" if not test.asserts else "no-verified-info")
        evidence["containment_count"] = 0
        return Verdict(tid, HEURISTIC, NOT_EAGER, evidence, frozenset(flags))

    covering = [
        rec.index
        for rec, outcome in zip(test.calls, test.meth_outcomes)
        if outcome and verified <= outcome
    ]
    evidence["containment_count"] = len(covering)
    evidence["covering_calls"] = covering
    if len(covering) == 1:
        result = NOT_EAGER
    else:
        result = EAGER
        if len(covering) >= 2:
            flags.add("ambiguous-coverage")
        else:
            evidence["uncovered_by_best"] = _best_gap(test)
    return Verdict(tid, HEURISTIC, result, evidence, frozenset(flags))


def _best_gap(test: LinearizedTest) -> Optional[dict]:
    """The call covering the most verified facts and what it leaves out."""
    best = None
    for rec, outcome in zip(test.calls, test.meth_outcomes):
        if not outcome:
            continue
        hit = len(test.verified_union & outcome)
        if best is None or hit > best[0]:
            best = (hit, rec.index, test.verified_union - outcome)
    if best is None:
        return None
    return {"call": best[1], "missing": sorted(str(f) for f in best[2])}
