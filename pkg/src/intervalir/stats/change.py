"""Counting significance verdicts that flip between a measure and its ranked version."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..exceptions import ContractError
from .significance import TEST_NAMES, all_pairs


@dataclass(frozen=True)
class SignificanceChangeReport:
    test: str
    sig: int
    s2ns: int
    ns2s: int
    delta_pct: float  # NaN when sig == 0

    @property
    def applicable(self) -> bool:
        return self.sig > 0


def significance_change_report(raw, ranked, test: str, alpha: float = 0.05) -> SignificanceChangeReport:
    """Compare pairwise verdicts of ``test`` on raw scores and on their ranks."""
    if test not in TEST_NAMES:
        raise ContractError(f"unknown test {test!r}")
    shape_a = getattr(raw, "shape", None)
    shape_b = getattr(ranked, "shape", None)
    if shape_a != shape_b:
        raise ContractError(f"matrices differ in shape: {shape_a} vs {shape_b}")
    before = all_pairs(raw, test, alpha)
    after = all_pairs(ranked, test, alpha)
    sig = s2ns = ns2s = 0
    for b, a in zip(before, after):
        if b.significant:
            sig += 1
            s2ns += not a.significant
        elif a.significant:
            ns2s += 1
    delta = 100.0 * (s2ns + ns2s) / sig if sig else math.nan
    return SignificanceChangeReport(test, sig, s2ns, ns2s, delta)
