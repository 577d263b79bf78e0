"""Binary-relevance IR effectiveness measures on fixed-length judged runs."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence, Union

import numpy as np

from .exceptions import ContractError
from .trec_io import JudgedRun, QrelsTable, RecallBase, recall_bases

logger = logging.getLogger(__name__)

KINDS = ("P", "R", "F1", "AP", "DCG", "nDCG", "RBP", "RR")
RB_DEPENDENT = frozenset({"R", "F1", "AP", "nDCG"})


@dataclass(frozen=True)
class MeasureSpec:
    """A measure together with its parameters.

    ``p`` is required for RBP only, ``log_base`` for DCG/nDCG only.
    """

    kind: str
    cutoff_n: int
    p: Optional[float] = None
    log_base: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractError(f"unknown measure {self.kind!r}; expected one of {KINDS}")
        if self.cutoff_n < 1:
            raise ContractError(f"cutoff must be >= 1, got {self.cutoff_n}")
        if self.kind == "RBP":
            if self.p is None or not 0 < self.p < 1:
                raise ContractError(f"RBP needs persistence p in (0, 1), got {self.p}")
        elif self.p is not None:
            raise ContractError(f"{self.kind} takes no persistence parameter")
        if self.kind in ("DCG", "nDCG"):
            if self.log_base is None or int(self.log_base) != self.log_base or self.log_base < 2:
                raise ContractError(f"{self.kind} needs an integer log base >= 2, got {self.log_base}")
        elif self.log_base is not None:
            raise ContractError(f"{self.kind} takes no log base")

    @property
    def depends_on_rb(self) -> bool:
        return self.kind in RB_DEPENDENT

    @property
    def name(self) -> str:
        """Short label such as ``RBP_p05@10`` or ``nDCG_b02@30``."""
        if self.kind == "RBP":
            label = f"RBP_p{round(self.p * 10):02d}" if round(self.p, 1) == self.p else f"RBP_p{self.p:g}"
        elif self.kind in ("DCG", "nDCG"):
            label = f"{self.kind}_b{self.log_base:02d}"
        else:
            label = self.kind
        return f"{label}@{self.cutoff_n}"

    def with_cutoff(self, n: int) -> "MeasureSpec":
        return MeasureSpec(self.kind, n, self.p, self.log_base)

    @classmethod
    def parse(cls, text: str, cutoff_n: int | None = None) -> "MeasureSpec":
        """Parse labels like ``P``, ``RBP_p05``, ``RBP:0.8``, ``nDCG_b10@20``."""
        body, _, cut = text.partition("@")
        if cut:
            cutoff_n = int(cut)
        if cutoff_n is None:
            raise ContractError(f"no cutoff given for measure {text!r}")
        kind, p, base = body, None, None
        if "_" in body or ":" in body:
            sep = "_" if "_" in body else ":"
            kind, _, param = body.partition(sep)
            if kind == "RBP":
                if param.startswith("p"):
                    digits = param[1:]
                    # "p05" -> 0.5, "p08" -> 0.8, "p0.75" -> 0.75
                    p = float(digits) if "." in digits else float(f"{digits[0]}.{digits[1:]}")
                else:
                    p = float(param)
            elif kind in ("DCG", "nDCG"):
                base = int(param.lstrip("b"))
            else:
                raise ContractError(f"measure {kind!r} takes no parameter")
        elif body == "RBP":
            raise ContractError("RBP needs a persistence, e.g. RBP_p05")
        elif body in ("DCG", "nDCG"):
            base = 2
        return cls(kind, cutoff_n, p, base)


@dataclass(frozen=True)
class Score:
    value: float
    topic_id: str
    system_tag: str
    spec: MeasureSpec


def dcg_weights(n: int, log_base: int) -> np.ndarray:
    """Per-rank discount weights ``1 / max(1, log_b i)`` for ranks 1..n."""
    return np.array([1.0 / max(1.0, math.log(i, log_base)) for i in range(1, n + 1)])


def rbp_weights(n: int, p: float) -> np.ndarray:
    return np.array([(1.0 - p) * p ** (i - 1) for i in range(1, n + 1)])


def ideal_dcg(n: int, rb: int, log_base: int) -> float:
    total = 0.0
    for w in dcg_weights(n, log_base)[: min(n, rb)]:
        total += w
    return total


def evaluate_gains(spec: MeasureSpec, gains: Sequence[int], rb: int) -> float:
    """Score a binary gain vector; summation always runs from rank 1 to rank n."""
    n = len(gains)
    if n != spec.cutoff_n:
        raise ContractError(f"run length {n} != cutoff {spec.cutoff_n}")
    if rb < 1:
        raise ContractError(f"recall base must be >= 1, got {rb}")
    r = sum(gains)
    if r > min(n, rb):
        raise ContractError(f"{r} relevant documents exceed min(n={n}, rb={rb})")
    kind = spec.kind
    if kind == "P":
        return r / n
    if kind == "R":
        return r / rb
    if kind == "F1":
        return 2 * r / (n + rb)
    if kind == "AP":
        total, hits = 0.0, 0
        for i, g in enumerate(gains, start=1):
            if g:
                hits += 1
                total += hits / i
        return total / rb
    if kind in ("DCG", "nDCG"):
        total = 0.0
        for i, g in enumerate(gains, start=1):
            if g:
                total += 1.0 / max(1.0, math.log(i, spec.log_base))
        if kind == "DCG":
            return total
        return total / ideal_dcg(n, rb, spec.log_base)
    if kind == "RBP":
        total = 0.0
        for i, g in enumerate(gains, start=1):
            if g:
                total += spec.p ** (i - 1)
        return (1.0 - spec.p) * total
    if kind == "RR":
        for i, g in enumerate(gains, start=1):
            if g:
                return 1.0 / i
        return 0.0
    raise AssertionError(kind)


def evaluate(spec: MeasureSpec, run: JudgedRun, rb: Union[RecallBase, int]) -> Score:
    """Evaluate *run* under *spec* against the topic's recall base."""
    if isinstance(rb, RecallBase):
        if rb.topic_id != run.topic_id:
            raise ContractError(f"recall base is for topic {rb.topic_id!r}, run for {run.topic_id!r}")
        rb = rb.rb
    return Score(evaluate_gains(spec, run.gains, rb), run.topic_id, run.system_tag, spec)


@dataclass
class ScoreMatrix:
    """Topics x systems grid of scores for one measure."""

    topics: list
    systems: list
    cells: np.ndarray
    spec: MeasureSpec
    recall_bases: Optional[Dict[str, int]] = None

    def __post_init__(self):
        self.cells = np.asarray(self.cells, dtype=float)
        if self.cells.shape != (len(self.topics), len(self.systems)):
            raise ContractError(
                f"cells shape {self.cells.shape} does not match "
                f"{len(self.topics)} topics x {len(self.systems)} systems")
        if not np.all(np.isfinite(self.cells)):
            raise ContractError("score matrix contains non-finite values")

    @property
    def shape(self):
        return self.cells.shape

    def column_means(self) -> np.ndarray:
        return np.round(self.cells.mean(axis=0), 8)


def score_matrix(spec: MeasureSpec, runs: Iterable[JudgedRun], qrels: QrelsTable) -> ScoreMatrix:
    """Build the topics x systems matrix; missing cells get the empty-run score."""
    runs = list(runs)
    if not runs:
        raise ContractError("no runs to score")
    rbs = recall_bases(qrels)
    topics = sorted({r.topic_id for r in runs})
    systems = sorted({r.system_tag for r in runs})
    if spec.depends_on_rb:
        missing = [t for t in topics if t not in rbs]
        if missing:
            raise ContractError(f"{spec.kind} needs a recall base; topics without relevant "
                                f"documents: {', '.join(missing)}")
    by_cell = {(r.topic_id, r.system_tag): r for r in runs}
    cells = np.zeros((len(topics), len(systems)))
    empty = (0,) * spec.cutoff_n
    for i, t in enumerate(topics):
        rb = rbs.get(t, spec.cutoff_n)
        for j, s in enumerate(systems):
            run = by_cell.get((t, s))
            if run is None:
                logger.warning("system %s has no run for topic %s; scoring it as an empty run", s, t)
                gains = empty
            else:
                gains = run.gains
            cells[i, j] = evaluate_gains(spec, gains, rb)
    return ScoreMatrix(topics, systems, cells, spec,
                       {t: rbs[t] for t in topics if t in rbs})
