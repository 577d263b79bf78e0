"""Reading TREC run and qrels files and turning them into binary judged runs.

Run lines carry six whitespace-separated columns::

    topic Q0 doc rank score tag

and qrels lines four::

    topic iteration doc grade

Relevance is binarised leniently: any grade above zero counts as relevant.
"""

from __future__ import annotations

import io
import logging
import os
from collections import defaultdict
from dataclasses import dataclass, field
from typing import IO, Dict, Iterable, List, Mapping, Tuple, Union

from .exceptions import ContractError, DegenerateTopicError, ParseError

logger = logging.getLogger(__name__)

Source = Union[bytes, str, os.PathLike, IO]


@dataclass(frozen=True)
class RetrievalRecord:
    topic_id: str
    doc_id: str
    rank: int
    score: float
    system_tag: str


@dataclass(frozen=True)
class QrelsTable:
    """Mapping ``(topic_id, doc_id) -> grade``."""

    judgments: Mapping[Tuple[str, str], int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.judgments)

    @property
    def topics(self) -> List[str]:
        return sorted({t for t, _ in self.judgments})

    def grade(self, topic_id: str, doc_id: str) -> int | None:
        return self.judgments.get((topic_id, doc_id))


@dataclass(frozen=True)
class JudgedRun:
    topic_id: str
    system_tag: str
    gains: Tuple[int, ...]

    def __post_init__(self):
        if any(g not in (0, 1) for g in self.gains):
            raise ContractError(f"gains must be binary, got {self.gains!r}")
        object.__setattr__(self, "gains", tuple(int(g) for g in self.gains))

    @property
    def n(self) -> int:
        return len(self.gains)

    @property
    def relevant(self) -> int:
        return sum(self.gains)


@dataclass(frozen=True)
class RecallBase:
    topic_id: str
    rb: int

    def __post_init__(self):
        if self.rb < 1:
            raise DegenerateTopicError(
                f"topic {self.topic_id!r} has no relevant documents")


def _lines(source: Source, name: str | None = None):
    """Yield ``(line_no, text)`` for non-empty lines of *source*."""
    if isinstance(source, bytes):
        stream = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, (str, os.PathLike)):
        stream = open(source, "r", encoding="utf-8")
    else:
        stream = source
    try:
        for line_no, raw in enumerate(stream, start=1):
            if isinstance(raw, bytes):
                raw = raw.decode("utf-8")
            text = raw.strip()
            if text:
                yield line_no, text
    finally:
        if stream is not source:
            stream.close()


def _source_name(source: Source) -> str | None:
    if isinstance(source, (str, os.PathLike)):
        return os.fspath(source)
    return getattr(source, "name", None)


def parse_run_file(source: Source) -> List[RetrievalRecord]:
    """Parse a TREC run. ``source`` may be bytes, a path, or an open stream.

    Raises :class:`ParseError` on malformed lines and on a document
    retrieved twice for the same topic by the same system.
    """
    name = _source_name(source)
    records: List[RetrievalRecord] = []
    seen = set()
    for line_no, text in _lines(source):
        parts = text.split()
        if len(parts) != 6:
            raise ParseError(f"expected 6 columns, got {len(parts)}: {text!r}",
                             line=line_no, source=name)
        topic, _q0, doc, rank_s, score_s, tag = parts
        try:
            rank = int(rank_s)
        except ValueError:
            raise ParseError(f"invalid rank {rank_s!r}", line=line_no, source=name) from None
        try:
            score = float(score_s)
        except ValueError:
            raise ParseError(f"invalid score {score_s!r}", line=line_no, source=name) from None
        if rank < 0:
            raise ParseError(f"negative rank {rank}", line=line_no, source=name)
        key = (tag, topic, doc)
        if key in seen:
            raise ParseError(f"document {doc!r} retrieved twice for topic {topic!r} by {tag!r}",
                             line=line_no, source=name)
        seen.add(key)
        records.append(RetrievalRecord(topic, doc, rank, score, tag))
    return records


def parse_qrels(source: Source) -> QrelsTable:
    """Parse a TREC qrels file into a :class:`QrelsTable`.

    Repeated lines with the same grade are tolerated; conflicting grades raise.
    """
    name = _source_name(source)
    judgments: Dict[Tuple[str, str], int] = {}
    for line_no, text in _lines(source):
        parts = text.split()
        if len(parts) != 4:
            raise ParseError(f"expected 4 columns, got {len(parts)}: {text!r}",
                             line=line_no, source=name)
        topic, _iteration, doc, grade_s = parts
        try:
            grade = int(grade_s)
        except ValueError:
            raise ParseError(f"invalid grade {grade_s!r}", line=line_no, source=name) from None
        if grade < 0:
            # some collections use -1 for "not judged / spam"; treat as not relevant
            grade = 0
        key = (topic, doc)
        if key in judgments and judgments[key] != grade:
            raise ParseError(
                f"conflicting grades for ({topic}, {doc}): {judgments[key]} and {grade}",
                line=line_no, source=name)
        judgments[key] = grade
    return QrelsTable(judgments)


def recall_base(qrels: QrelsTable, topic: str) -> RecallBase:
    """Number of documents judged relevant (grade > 0) for *topic*."""
    grades = [g for (t, _), g in qrels.judgments.items() if t == topic]
    if not grades:
        raise DegenerateTopicError(f"topic {topic!r} is not in the qrels")
    count = sum(1 for g in grades if g > 0)
    if count == 0:
        raise DegenerateTopicError(f"topic {topic!r} has no relevant documents")
    return RecallBase(topic, count)


def recall_bases(qrels: QrelsTable) -> Dict[str, int]:
    """Recall base of every non-degenerate topic in *qrels*."""
    counts: Dict[str, int] = defaultdict(int)
    for (topic, _), grade in qrels.judgments.items():
        counts[topic] += grade > 0
    return {t: c for t, c in sorted(counts.items()) if c > 0}


def judge_and_cut(records: Iterable[RetrievalRecord], qrels: QrelsTable, n: int,
                  lenient: bool = True) -> List[JudgedRun]:
    """Judge each (topic, system) ranking and cut or pad it to length *n*.

    Documents are ordered by score descending, ties by doc id descending.
    Unjudged documents are not relevant; short runs are padded with zeros.
    With ``lenient=False`` only grades >= 2 (the "highly relevant" level of
    three-level collections) count as relevant.
    """
    if n < 1:
        raise ContractError(f"cutoff must be >= 1, got {n}")
    groups: Dict[Tuple[str, str], List[RetrievalRecord]] = defaultdict(list)
    for rec in records:
        groups[(rec.topic_id, rec.system_tag)].append(rec)

    judged_topics = {t for t, _ in qrels.judgments}
    warned = set()
    runs = []
    for (topic, tag) in sorted(groups):
        if topic not in judged_topics and topic not in warned:
            logger.warning("topic %s has no judgments; its runs are all non-relevant", topic)
            warned.add(topic)
        ranked = sorted(groups[(topic, tag)], key=lambda r: (r.score, r.doc_id), reverse=True)
        gains = []
        for rec in ranked[:n]:
            grade = qrels.judgments.get((topic, rec.doc_id), 0)
            gains.append(int(grade >= (1 if lenient else 2)))
        gains.extend([0] * (n - len(gains)))
        runs.append(JudgedRun(topic, tag, tuple(gains)))
    return runs
