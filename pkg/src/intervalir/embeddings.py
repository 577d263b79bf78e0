"""Embedding runs of different lengths or recall bases into one common run space.

Runs are handled as ``(relevant, length, rb)`` triples so that large common
multiples never require materialising the gain vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from .exceptions import CapacityError, ContractError
from .run_space import RunTriple

_MAX = 2 ** 63 - 1
RENDER_LIMIT = 10_000


@dataclass(frozen=True)
class EmbeddedRun:
    """Embedded run; ``f1_denominator`` is ``length + rb`` unless the F1
    embedding fixed it to the common multiple (which may be odd)."""

    relevant: int
    length: int
    rb: int
    f1_denominator: int = 0

    def __post_init__(self):
        if self.length < 1 or self.rb < 1 or self.relevant < 0:
            raise ContractError(f"invalid embedded run {self}")
        if self.relevant > min(self.length, self.rb):
            raise ContractError(f"{self.relevant} relevant exceeds min({self.length}, {self.rb})")
        if not self.f1_denominator:
            object.__setattr__(self, "f1_denominator", self.length + self.rb)

    def gains(self) -> Tuple[int, ...]:
        """Explicit 0/1 run with the relevant documents first."""
        if self.length > RENDER_LIMIT:
            raise CapacityError(f"refusing to render a run of length {self.length}")
        return (1,) * self.relevant + (0,) * (self.length - self.relevant)

    def precision(self) -> Fraction:
        return Fraction(self.relevant, self.length)

    def recall(self) -> Fraction:
        return Fraction(self.relevant, self.rb)

    def f1(self) -> Fraction:
        return Fraction(2 * self.relevant, self.f1_denominator)


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v)
        if out > _MAX:
            raise CapacityError("common multiple exceeds 64-bit range")
    return out


def _triples(runs) -> List[RunTriple]:
    runs = [r if isinstance(r, RunTriple) else RunTriple(*r) for r in runs]
    if not runs:
        raise ContractError("need at least one run")
    return runs


def embed_precision(runs: Sequence[RunTriple]) -> Tuple[int, List[EmbeddedRun]]:
    """Stretch every run to the LCM of the lengths, scaling relevant counts alike."""
    runs = _triples(runs)
    common = _lcm(t.n for t in runs)
    out = []
    for t in runs:
        factor = common // t.n
        # precision ignores the recall base; scale it along so the run stays admissible
        out.append(EmbeddedRun(t.r * factor, common, t.rb * factor))
    return common, out


def embed_recall(runs: Sequence[RunTriple]) -> Tuple[int, List[EmbeddedRun]]:
    """Move every run to a topic whose recall base (and run length) is the LCM of the bases."""
    runs = _triples(runs)
    common = _lcm(t.rb for t in runs)
    return common, [EmbeddedRun(t.r * (common // t.rb), common, common) for t in runs]


def embed_f1(runs: Sequence[RunTriple]) -> Tuple[int, int, List[EmbeddedRun]]:
    """Embed into runs of length and recall base ``floor(S/2)``, S the LCM of ``n + rb``."""
    runs = _triples(runs)
    s = _lcm(t.n + t.rb for t in runs)
    size = s // 2
    out = []
    for t in runs:
        scale = s // (t.n + t.rb)
        out.append(EmbeddedRun(scale * t.r, size, size, f1_denominator=s))
    return s, size, out
