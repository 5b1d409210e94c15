"""Pairwise Cohen's kappa between detectors."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .heuristic import EAGER, NOT_EAGER

UNDEFINED = "undefined"

# (upper bound inclusive, label); anything below 0 is "poor/no agreement"
BANDS = (
    (0.20, "slight"),
    (0.40, "fair"),
    (0.60, "moderate"),
    (0.80, "substantial"),
    (1.00, "almost perfect"),
)
BAND_CONVENTION = "<0 poor/no agreement; [0,0.20] slight; (0.20,0.40] fair; (0.40,0.60] moderate; (0.60,0.80] substantial; (0.80,1] almost perfect"


@dataclass(frozen=True)
class ContingencyTable:
    """Rows: detector A eager / not-eager; columns: detector B."""

    n11: int = 0
    n10: int = 0
    n01: int = 0
    n00: int = 0

    def __post_init__(self):
        if min(self.n11, self.n10, self.n01, self.n00) < 0:
            raise ValueError("contingency counts must be non-negative")

    @property
    def n(self) -> int:
        return self.n11 + self.n10 + self.n01 + self.n00

    @classmethod
    def from_results(cls, a: Sequence[str], b: Sequence[str]) -> "ContingencyTable":
        """Cross-tabulate two aligned result lists, skipping non-binary pairs."""
        if len(a) != len(b):
            raise ValueError("verdict lists must be aligned")
        c = {(True, True): 0, (True, False): 0, (False, True): 0, (False, False): 0}
        for x, y in zip(a, b):
            if x in (EAGER, NOT_EAGER) and y in (EAGER, NOT_EAGER):
                c[(x == EAGER, y == EAGER)] += 1
        return cls(c[(True, True)], c[(True, False)], c[(False, True)], c[(False, False)])

    def transpose(self) -> "ContingencyTable":
        return ContingencyTable(self.n11, self.n01, self.n10, self.n00)


def cohen_kappa(t: ContingencyTable) -> Optional[float]:
    """Kappa, or None when undefined (empty table, or constant raters that disagree)."""
    n = t.n
    if n == 0:
        return None
    p_o = (t.n11 + t.n00) / n
    p_e = ((t.n11 + t.n10) * (t.n11 + t.n01) + (t.n01 + t.n00) * (t.n10 + t.n00)) / (n * n)
    if p_e == 1:
        return 1.0 if p_o == 1 else None
    if p_o == 1:
        return 1.0
    return (p_o - p_e) / (1 - p_e)


def landis_koch_band(kappa: Optional[float]) -> str:
    if kappa is None or kappa != kappa or kappa > 1:
        return UNDEFINED
    if kappa < 0:
        return "poor/no agreement"
    for upper, label in BANDS:
        if kappa <= upper:
            return label
    return UNDEFINED


@dataclass(frozen=True)
class PairAgreement:
    a: str
    b: str
    kappa: Optional[float]
    band: str
    n: int

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "kappa": self.kappa, "band": self.band, "n": self.n}


@dataclass(frozen=True)
class AgreementMatrix:
    detectors: tuple[str, ...]
    cells: Mapping[tuple[str, str], PairAgreement]

    def get(self, a: str, b: str) -> PairAgreement:
        return self.cells[(a, b)]

    def pairs(self) -> list[PairAgreement]:
        """Upper-triangle entries in detector order."""
        return [self.cells[(a, b)] for a, b in itertools.combinations(self.detectors, 2)]


def build_matrix(verdicts: Mapping[str, Sequence[str]]) -> AgreementMatrix:
    """Kappa for every detector pair; ``verdicts`` maps detector -> aligned results."""
    names = tuple(verdicts)
    lengths = {len(v) for v in verdicts.values()}
    if len(lengths) > 1:
        raise ValueError("all detectors must cover the same test cases")
    cells: dict[tuple[str, str], PairAgreement] = {}
    for a in names:
        for b in names:
            t = ContingencyTable.from_results(verdicts[a], verdicts[b])
            k = cohen_kappa(t)
            cells[(a, b)] = PairAgreement(a, b, k, landis_koch_band(k), t.n)
    return AgreementMatrix(names, cells)
