"""Mapping observed score matrices onto their interval-scaled (rank) versions.

Measures that ignore the recall base share one scale across all topics.
Measures that depend on it get a scale per topic, and the resulting ranks
are then treated as if they lived on a common scale.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Union

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import CapacityError, ContractError, ScaleDomainError
from .measures import MeasureSpec, ScoreMatrix, ideal_dcg
from .run_space import TIE_STRATEGIES, enumeration_cap, subset_sum_index
from .scale_cache import ScaleCache
from .trec_io import QrelsTable, recall_bases

__all__ = ["RankedMatrix", "RankMapTransformer", "ScoreMatrix", "column_means", "ranked_scores"]


@dataclass
class RankedMatrix:
    topics: list
    systems: list
    cells: np.ndarray
    spec: MeasureSpec
    #: recall base whose scale ranked each row (None: the shared unbounded scale)
    scale_rb: list = field(default_factory=list)
    scale_size: list = field(default_factory=list)
    ties: str = "unq"

    @property
    def shape(self):
        return self.cells.shape

    def column_means(self) -> np.ndarray:
        return np.round(np.asarray(self.cells, dtype=float).mean(axis=0), 8)

    def as_score_matrix(self) -> ScoreMatrix:
        return ScoreMatrix(self.topics, self.systems, np.asarray(self.cells, dtype=float), self.spec)


def column_means(matrix: Union[ScoreMatrix, RankedMatrix, np.ndarray]) -> np.ndarray:
    """Per-system arithmetic means, rounded to 8 decimals."""
    cells = matrix.cells if hasattr(matrix, "cells") else matrix
    cells = np.asarray(cells, dtype=float)
    if cells.size == 0:
        raise ContractError("cannot average an empty matrix")
    return np.round(cells.mean(axis=0), 8)


#: beyond this run length additive measures are ranked by a streaming pass
#: over the meet-in-the-middle index instead of a materialised scale
STREAM_N = 24


def _scale_for(spec: MeasureSpec, rb: Optional[int], cache: ScaleCache, need_counts: bool):
    """Scale used to rank values of ``spec`` and the factor mapping values onto it.

    The scale is a :class:`ValueScale`, or a :class:`SubsetSumIndex` for long
    additive runs; both offer ``ranks(values, strategy)`` and ``len()``.
    """
    n = spec.cutoff_n
    factor = 1.0
    if spec.kind == "nDCG":
        factor = ideal_dcg(n, rb, spec.log_base)
        spec = MeasureSpec("DCG", n, log_base=spec.log_base)
    if spec.kind in ("DCG", "RBP") and n > STREAM_N and not (spec.kind == "RBP" and spec.p == 0.5):
        cap = enumeration_cap(spec, cache.caps)
        if n > cap:
            raise CapacityError(
                f"ranking {spec.kind} runs of length {n} exceeds the cap of {cap}; "
                f"raise it with --max-enum-n")
        return subset_sum_index(spec, n, rb), factor
    return cache.get(spec, n, rb, need_counts=need_counts), factor


def rank_row(values, spec: MeasureSpec, rb: Optional[int], cache: ScaleCache,
             ties: str = "unq") -> tuple:
    """Ranks of ``values`` on the scale for ``(spec, rb)`` and that scale."""
    scale, factor = _scale_for(spec, rb, cache, ties != "unq")
    values = np.asarray(values, dtype=float)
    return scale.ranks(values * factor if factor != 1.0 else values, ties), scale


def _row_bases(matrix: ScoreMatrix, qrels) -> list:
    if not matrix.spec.depends_on_rb:
        return [None] * len(matrix.topics)
    if qrels is None:
        rbs = matrix.recall_bases or {}
    elif isinstance(qrels, QrelsTable):
        rbs = recall_bases(qrels)
    else:
        rbs = dict(qrels)
    missing = [t for t in matrix.topics if t not in rbs]
    if missing:
        raise ContractError(f"no recall base for topics {', '.join(map(str, missing))}")
    return [rbs[t] for t in matrix.topics]


def _scale_key(spec: MeasureSpec, rb: Optional[int]):
    # nDCG only sees rb through min(n, rb), so all bases >= n share one scale
    if rb is not None and rb >= spec.cutoff_n and spec.kind == "nDCG":
        return spec.cutoff_n
    return rb


def ranked_scores(matrix: ScoreMatrix, qrels: Union[QrelsTable, Mapping[str, int], None] = None,
                  cache: Optional[ScaleCache] = None, ties: str = "unq",
                  n_jobs: int = 1) -> RankedMatrix:
    """Replace every score by its rank on the scale of its topic.

    ``qrels`` may be a qrels table or a ``{topic: recall base}`` mapping; it
    is only consulted for measures that depend on the recall base. Rows
    sharing a scale are ranked together; with ``n_jobs > 1`` distinct scales
    are handled in parallel. The result does not depend on scheduling.
    """
    if ties not in TIE_STRATEGIES:
        raise ContractError(f"unknown tie strategy {ties!r}")
    spec = matrix.spec
    cache = cache if cache is not None else ScaleCache()
    row_rb = _row_bases(matrix, qrels)

    groups: Dict[object, list] = {}
    for i, rb in enumerate(row_rb):
        groups.setdefault(_scale_key(spec, rb), []).append(i)

    def work(rb):
        rows = groups[rb]
        values = matrix.cells[rows].ravel()
        try:
            ranks, scale = rank_row(values, spec, rb, cache, ties)
        except ScaleDomainError as err:
            k = err.index or 0
            i, j = rows[k // matrix.shape[1]], k % matrix.shape[1]
            raise ScaleDomainError(
                f"topic {matrix.topics[i]}, system {matrix.systems[j]}: score "
                f"{matrix.cells[i, j]!r} is not attainable by {spec.name} ({err})", index=k) from None
        return ranks.reshape(len(rows), -1), len(scale)

    keys = list(groups)
    if n_jobs and n_jobs > 1 and len(keys) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(work, keys))
    else:
        results = [work(rb) for rb in keys]

    dtype = np.int64 if ties == "unq" else float
    cells = np.empty(matrix.cells.shape, dtype=dtype)
    sizes = [0] * len(row_rb)
    for rb, (ranks, size) in zip(keys, results):
        for r, i in enumerate(groups[rb]):
            cells[i] = ranks[r]
            sizes[i] = size
    return RankedMatrix(list(matrix.topics), list(matrix.systems), cells, spec, row_rb, sizes, ties)


class RankMapTransformer(TransformerMixin, BaseEstimator):
    """Scikit-learn transformer mapping raw scores to interval-scaled ranks.

    ``X`` is a topics x systems matrix of scores for one measure. For
    measures depending on the recall base, pass ``recall_bases`` (one per
    row) to :meth:`fit`; the fitted per-row scales are reused by
    :meth:`transform`.

    >>> import numpy as np
    >>> t = RankMapTransformer(measure="P", cutoff=4).fit(np.array([[0.25, 0.5]]))
    >>> t.transform(np.array([[0.25, 0.5]])).tolist()
    [[2, 3]]
    """

    def __init__(self, measure: str = "P", cutoff: int = 10, p: Optional[float] = None,
                 log_base: Optional[int] = None, ties: str = "unq", cache_dir=None,
                 max_enum_n: Optional[int] = None):
        self.measure = measure
        self.cutoff = cutoff
        self.p = p
        self.log_base = log_base
        self.ties = ties
        self.cache_dir = cache_dir
        self.max_enum_n = max_enum_n

    def _spec(self) -> MeasureSpec:
        base = self.log_base
        if base is None and self.measure in ("DCG", "nDCG"):
            base = 2
        return MeasureSpec(self.measure, self.cutoff, self.p, base)

    def fit(self, X, y=None, recall_bases: Optional[Sequence[int]] = None):
        X = check_array(X, ensure_all_finite=True)
        if self.ties not in TIE_STRATEGIES:
            raise ValueError(f"ties must be one of {TIE_STRATEGIES}, got {self.ties!r}")
        spec = self._spec()
        caps = None
        if self.max_enum_n is not None:
            caps = {"exhaustive": self.max_enum_n, "subset_sum": self.max_enum_n}
        self.cache_ = ScaleCache(self.cache_dir, caps=caps)
        if spec.depends_on_rb:
            if recall_bases is None or len(recall_bases) != X.shape[0]:
                raise ValueError(f"{spec.kind} needs one recall base per row of X")
            self.recall_bases_ = [int(rb) for rb in recall_bases]
        else:
            self.recall_bases_ = [None] * X.shape[0]
        self.spec_ = spec
        fitted = {}
        for rb in self.recall_bases_:
            key = _scale_key(spec, rb)
            if key not in fitted:
                fitted[key] = _scale_for(spec, key, self.cache_, self.ties != "unq")
        self.scales_ = [fitted[_scale_key(spec, rb)][0] for rb in self.recall_bases_]
        self.factors_ = [fitted[_scale_key(spec, rb)][1] for rb in self.recall_bases_]
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "scales_")
        X = check_array(X, ensure_all_finite=True)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} columns, expected {self.n_features_in_}")
        if X.shape[0] != len(self.scales_):
            raise ValueError(f"X has {X.shape[0]} rows but {len(self.scales_)} were fitted")
        out = [scale.ranks(row * factor, self.ties)
               for row, scale, factor in zip(X, self.scales_, self.factors_)]
        return np.vstack(out)

    def fit_transform(self, X, y=None, recall_bases=None):
        return self.fit(X, y, recall_bases=recall_bases).transform(X)
