"""Interval-scaled versions of IR evaluation measures.

Scores of classical measures (P, R, F1, AP, DCG, nDCG, RBP, RR) are mapped
to their rank among all values the measure can attain on runs of the same
length, which yields equi-spaced (interval) scales. The package also holds
the correlation and significance-testing tools used to compare a measure
with its ranked version.
"""

from .embeddings import EmbeddedRun, embed_f1, embed_precision, embed_recall
from .exceptions import (
    CapacityError,
    ContractError,
    DegenerateInputError,
    DegenerateTopicError,
    IntervalIRError,
    NumericalError,
    ParseError,
    ScaleDomainError,
)
from .interval_map import RankedMatrix, RankMapTransformer, column_means, ranked_scores
from .measures import KINDS, MeasureSpec, Score, ScoreMatrix, evaluate, evaluate_gains, score_matrix
from .run_space import (
    QUANTUM,
    RunTriple,
    SubsetSumIndex,
    ValueScale,
    analyze_scale,
    dominates,
    enumerate_scale,
    find_order_disagreement,
    hasse_edges,
    naive_scale,
    rank_of,
    rank_with_ties,
)
from .scale_cache import ScaleCache
from .trec_io import (
    JudgedRun,
    QrelsTable,
    RecallBase,
    RetrievalRecord,
    judge_and_cut,
    parse_qrels,
    parse_run_file,
    recall_base,
    recall_bases,
)

__version__ = "0.1.0"
