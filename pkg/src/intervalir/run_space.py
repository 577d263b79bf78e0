"""The space of admissible judged runs and the value scales measures induce on it.

A run of length ``n`` is encoded as an integer mask whose most significant bit
is rank 1, so integer order coincides with lexicographic order of the gain
tuples. A run is admissible for recall base ``rb`` when it holds at most
``min(n, rb)`` relevant documents.

Scale values are quantised to multiples of :data:`QUANTUM` before
de-duplication so that mathematically tied sums collide even when floating
point addition orders differ.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .exceptions import CapacityError, ContractError, ScaleDomainError
from .measures import MeasureSpec, dcg_weights, ideal_dcg
from .trec_io import JudgedRun

QUANTUM = 1e-9

#: default enumeration caps on the run length, per strategy
DEFAULT_CAPS = {"exhaustive": 24, "subset_sum": 30}
CHUNK_BITS = 20

TIE_STRATEGIES = ("unq", "mid", "min", "max")


def quantize(values) -> np.ndarray:
    return np.rint(np.asarray(values, dtype=float) / QUANTUM).astype(np.int64)


@dataclass(frozen=True, eq=False)
class ValueScale:
    """Sorted distinct image of a measure over the admissible runs.

    ``rb`` is ``None`` for the unbounded case (every run of length ``n``).
    ``counts`` holds the number of runs attaining each value; it is ``None``
    for scales read back from the cache.
    """

    spec: Optional[MeasureSpec]
    n: int
    rb: Optional[int]
    quanta: np.ndarray
    counts: Optional[np.ndarray] = None
    quantum: float = QUANTUM

    def __post_init__(self):
        q = np.asarray(self.quanta, dtype=np.int64)
        if q.size and np.any(np.diff(q) <= 0):
            raise ContractError("scale values must be strictly increasing")
        q.setflags(write=False)
        object.__setattr__(self, "quanta", q)
        if self.counts is not None:
            c = np.asarray(self.counts, dtype=np.int64)
            if c.shape != q.shape:
                raise ContractError("counts must align with values")
            c.setflags(write=False)
            object.__setattr__(self, "counts", c)

    @property
    def values(self) -> np.ndarray:
        return self.quanta * self.quantum

    def __len__(self) -> int:
        return len(self.quanta)

    @property
    def n_runs(self) -> int:
        if self.counts is None:
            raise ContractError("scale carries no run multiplicities")
        return int(self.counts.sum())

    def _locate(self, m) -> np.ndarray:
        """Index of the scale value within one quantum of each ``m``."""
        m = np.atleast_1d(np.asarray(m, dtype=float))
        q = quantize(m)
        idx = np.searchsorted(self.quanta, q)
        lo = np.clip(idx - 1, 0, len(self.quanta) - 1)
        hi = np.clip(idx, 0, len(self.quanta) - 1)
        d_lo = np.abs(self.quanta[lo] - q)
        d_hi = np.abs(self.quanta[hi] - q)
        best = np.where(d_hi <= d_lo, hi, lo)
        bad = np.minimum(d_lo, d_hi) > 1
        if np.any(bad):
            k = int(np.flatnonzero(bad)[0])
            near = self.values[[lo[k], hi[k]]]
            raise ScaleDomainError(
                f"value {m[k]!r} is not on the scale of {self._label()}; "
                f"nearest scale values are {near[0]!r} and {near[1]!r}", index=k)
        return best

    def _label(self) -> str:
        name = self.spec.name if self.spec is not None else "observed values"
        rb = "unbounded" if self.rb is None else self.rb
        return f"{name} (n={self.n}, rb={rb})"

    def rank_of(self, m: float) -> int:
        """1-based rank of ``m`` among the distinct scale values (``unq`` ties)."""
        return int(self._locate(m)[0]) + 1

    def ranks(self, values, strategy: str = "unq") -> np.ndarray:
        """Vectorised rank lookup under a tie strategy."""
        idx = self._locate(values)
        if strategy == "unq":
            return idx + 1
        if strategy not in TIE_STRATEGIES:
            raise ContractError(f"unknown tie strategy {strategy!r}")
        if self.counts is None:
            raise ContractError(f"tie strategy {strategy!r} needs run multiplicities")
        above = np.cumsum(self.counts)
        below = above - self.counts
        lo = below[idx] + 1
        hi = above[idx]
        if strategy == "min":
            return lo.astype(float)
        if strategy == "max":
            return hi.astype(float)
        return (lo + hi) / 2.0


def rank_of(scale: ValueScale, m: float) -> int:
    return scale.rank_of(m)


def rank_with_ties(scale: ValueScale, m: float, strategy: str) -> float:
    """Rank of ``m`` counted over runs, ties resolved by ``mid``, ``min`` or ``max``."""
    if strategy == "unq":
        return float(scale.rank_of(m))
    return float(scale.ranks([m], strategy)[0])


def scale_from_values(values: Iterable[float], spec: Optional[MeasureSpec] = None,
                      n: int = 0, rb: Optional[int] = None) -> ValueScale:
    """Scale with multiplicities from an explicit list of attained values."""
    q, c = np.unique(quantize(list(values)), return_counts=True)
    return ValueScale(spec, n, rb, q, c)


def is_equispaced(values: Sequence[float], tol: float = QUANTUM) -> bool:
    return equispacing_witness(values, tol) is None


def equispacing_witness(values: Sequence[float], tol: float = QUANTUM):
    """First triple of adjacent distinct values with unequal gaps, else ``None``."""
    v = np.unique(np.asarray(values, dtype=float))
    if v.size < 3:
        return None
    gaps = np.diff(v)
    bad = np.flatnonzero(np.abs(gaps[1:] - gaps[0]) > tol)
    if bad.size == 0:
        return None
    i = int(bad[0]) + 1
    return (float(v[i - 1]), float(v[i]), float(v[i + 1]))


# -- enumeration -------------------------------------------------------------

def _merge(acc_q, acc_c, q, c):
    if acc_q is None:
        return q, c
    allq = np.concatenate([acc_q, q])
    allc = np.concatenate([acc_c, c])
    uq, inv = np.unique(allq, return_inverse=True)
    return uq, np.bincount(inv, weights=allc, minlength=len(uq)).astype(np.int64)


def _popcount(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64)
    out = np.zeros(x.shape, dtype=np.int64)
    while np.any(x):
        out += (x & np.uint64(1)).astype(np.int64)
        x >>= np.uint64(1)
    return out


def _strategy(spec: MeasureSpec) -> str:
    if spec.kind in ("P", "R", "F1", "RR"):
        return "closed_form"
    if spec.kind == "RBP" and spec.p == 0.5:
        return "closed_form_rbp"
    if spec.kind in ("DCG", "nDCG"):
        return "subset_sum"
    if spec.kind == "RBP":
        # tie-free in general, so the scale has up to 2^n entries
        return "subset_sum_rbp"
    return "exhaustive"


def enumeration_cap(spec: MeasureSpec, caps: Optional[Dict[str, int]] = None) -> int:
    caps = {**DEFAULT_CAPS, **(caps or {})}
    strategy = _strategy(spec)
    if strategy == "closed_form":
        return math.inf
    if strategy == "subset_sum":
        return caps["subset_sum"]
    return caps["exhaustive"]


def _counts(counts) -> Optional[np.ndarray]:
    # beyond 63 bits the multiplicities are dropped; only unq ranks remain available
    if max(counts) > np.iinfo(np.int64).max:
        return None
    return np.array(counts, dtype=np.int64)


def _closed_form(spec: MeasureSpec, n: int, k: int, rb: int):
    if spec.kind == "RR":
        vals = [Fraction(0)] + [Fraction(1, i) for i in range(n, 0, -1)]
        counts = [1] + [sum(math.comb(n - i, j) for j in range(0, min(k - 1, n - i) + 1))
                        for i in range(n, 0, -1)]
        return quantize([float(v) for v in vals]), _counts(counts)
    denom = {"P": n, "R": rb, "F1": n + rb}[spec.kind]
    numer = 2 if spec.kind == "F1" else 1
    vals = [numer * r / denom for r in range(k + 1)]
    return quantize(vals), _counts([math.comb(n, r) for r in range(k + 1)])


def _rbp_half(n: int, k: int):
    masks = np.arange(1 << n, dtype=np.int64)
    masks = masks[_popcount(masks) <= k]
    # value sum_i g_i 2^-i is exactly mask / 2^n
    return quantize(masks / float(1 << n)), np.ones(len(masks), dtype=np.int64)


def _subset_sums(weights: np.ndarray):
    """All subset sums of ``weights`` and the matching subset sizes."""
    sums = np.zeros(1)
    pcs = np.zeros(1, dtype=np.int64)
    for w in weights:
        sums = np.concatenate([sums, sums + w])
        pcs = np.concatenate([pcs, pcs + 1])
    return sums, pcs


class SubsetSumIndex:
    """Distinct sums of at most ``k`` of the given weights, by meet in the middle.

    The weights are split in two halves; the sums of the right half are
    sorted once per admissible subset size. The value range is then cut into
    buckets of bounded size and each bucket is gathered from the sorted
    halves, quantised and de-duplicated on its own, so memory stays at
    ``O(2^(n/2) + bucket)`` while buckets come out in increasing order.

    ``divisor`` and ``multiplier`` apply the final normalisation of the
    measure (nDCG divides by the ideal DCG, RBP multiplies by ``1 - p``).
    """

    def __init__(self, weights, k: int, divisor: float = 1.0, multiplier: float = 1.0,
                 bucket_size: int = 1 << 21):
        weights = np.asarray(weights, dtype=float)
        n = len(weights)
        h = n // 2
        self.k = k
        self.divisor = divisor
        self.multiplier = multiplier
        self.bucket_size = bucket_size
        left, left_pc = _subset_sums(weights[:h])
        right, right_pc = _subset_sums(weights[h:])
        self._pairs = []
        for a in range(0, min(h, k) + 1):
            la = np.sort(left[left_pc == a])
            ra = np.sort(right[right_pc <= k - a])
            if la.size and ra.size:
                self._pairs.append((la, ra))
        top = np.sort(weights)[::-1][:k].sum()
        self._qmax = int(quantize(self._post(np.array([top])))[0])
        self._buckets = None
        self._distinct = None

    def _post(self, sums):
        if self.divisor != 1.0:
            sums = sums / self.divisor
        if self.multiplier != 1.0:
            sums = self.multiplier * sums
        return sums

    def _raw_range(self, qlo: int, qhi: int):
        # widened by two quanta; exact membership is decided after quantising
        scale = self.divisor / self.multiplier
        return (qlo - 2) * QUANTUM * scale, (qhi + 2) * QUANTUM * scale

    def _slices(self, qlo, qhi):
        lo, hi = self._raw_range(qlo, qhi)
        for la, ra in self._pairs:
            starts = np.searchsorted(ra, lo - la, side="left")
            ends = np.searchsorted(ra, hi - la, side="left")
            yield la, ra, starts, ends

    def _count(self, qlo, qhi) -> int:
        return int(sum(int(np.sum(e - s)) for _, _, s, e in self._slices(qlo, qhi)))

    def buckets(self) -> List[Tuple[int, int]]:
        """Half-open quantised ranges, each holding a bounded number of sums."""
        if self._buckets is None:
            out = []
            stack = [(0, self._qmax + 1)]
            while stack:
                qlo, qhi = stack.pop()
                if qhi - qlo > 1 and self._count(qlo, qhi) > self.bucket_size:
                    mid = (qlo + qhi) // 2
                    stack.append((mid, qhi))
                    stack.append((qlo, mid))
                else:
                    out.append((qlo, qhi))
            self._buckets = out
        return self._buckets

    def bucket_values(self, qlo: int, qhi: int):
        """Sorted distinct quantised values in ``[qlo, qhi)`` and their run counts."""
        parts = []
        for la, ra, starts, ends in self._slices(qlo, qhi):
            lengths = ends - starts
            total = int(lengths.sum())
            if not total:
                continue
            owner = np.repeat(np.arange(len(la)), lengths)
            offsets = np.arange(total) - np.repeat(np.cumsum(lengths) - lengths, lengths)
            parts.append(la[owner] + ra[starts[owner] + offsets])
        if not parts:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        q = quantize(self._post(np.concatenate(parts)))
        q = q[(q >= qlo) & (q < qhi)]
        return np.unique(q, return_counts=True)

    def iter_values(self, n_jobs: int = 1):
        """Yield ``(quanta, counts)`` bucket by bucket, in increasing value order."""
        buckets = self.buckets()
        if n_jobs and n_jobs > 1 and len(buckets) > 1:
            with ThreadPoolExecutor(max_workers=n_jobs) as pool:
                yield from pool.map(lambda b: self.bucket_values(*b), buckets)
        else:
            for b in buckets:
                yield self.bucket_values(*b)

    def materialize(self, n_jobs: int = 1):
        qs, cs = [], []
        for q, c in self.iter_values(n_jobs):
            qs.append(q)
            cs.append(c)
        return np.concatenate(qs), np.concatenate(cs)

    def __len__(self) -> int:
        if self._distinct is None:
            self._distinct = sum(len(q) for q, _ in self.iter_values())
        return self._distinct

    def ranks(self, values, strategy: str = "unq", n_jobs: int = 1) -> np.ndarray:
        """Rank lookup in a single streaming pass, without materialising the scale."""
        values = np.atleast_1d(np.asarray(values, dtype=float))
        q = quantize(values)
        probes = np.stack([q, q + 1, q - 1], axis=1)  # preference order on ties
        distinct_le = np.zeros(probes.shape, dtype=np.int64)
        runs_le = np.zeros(probes.shape, dtype=np.int64)
        mult = np.zeros(probes.shape, dtype=np.int64)
        distinct = 0
        runs = 0
        for uq, uc in self.iter_values(n_jobs):
            if not len(uq):
                continue
            cum = np.cumsum(uc)
            pos = np.searchsorted(uq, probes, side="right")
            hit = pos > 0
            at = np.where(hit, pos - 1, 0)
            exact = hit & (uq[at] == probes)
            distinct_le += pos
            runs_le += np.where(hit, cum[at], 0)
            mult += np.where(exact, uc[at], 0)
            # values of earlier buckets are below every value of this bucket
            distinct += len(uq)
            runs += int(cum[-1])
        self._distinct = distinct
        found = mult > 0
        # nearest attained probe: exact first, then above, then below
        choice = np.argmax(found, axis=1)
        ok = found[np.arange(len(q)), choice]
        if not np.all(ok):
            k = int(np.flatnonzero(~ok)[0])
            raise ScaleDomainError(f"value {values[k]!r} is not attainable on this scale", index=k)
        rows = np.arange(len(q))
        le = distinct_le[rows, choice]
        if strategy == "unq":
            return le
        hi = runs_le[rows, choice]
        lo = hi - mult[rows, choice] + 1
        if strategy == "min":
            return lo.astype(float)
        if strategy == "max":
            return hi.astype(float)
        if strategy == "mid":
            return (lo + hi) / 2.0
        raise ContractError(f"unknown tie strategy {strategy!r}")


def subset_sum_index(spec: MeasureSpec, n: int, rb: Optional[int] = None,
                     bucket_size: int = 1 << 21) -> SubsetSumIndex:
    """Meet-in-the-middle index for the additive measures (DCG, nDCG, RBP)."""
    k = min(n, n if rb is None else rb)
    if spec.kind in ("DCG", "nDCG"):
        divisor = ideal_dcg(n, k, spec.log_base) if spec.kind == "nDCG" else 1.0
        return SubsetSumIndex(dcg_weights(n, spec.log_base), k, divisor=divisor,
                              bucket_size=bucket_size)
    if spec.kind == "RBP":
        # like evaluate(): sum p^(i-1), then multiply by (1 - p)
        w = np.array([spec.p ** (i - 1) for i in range(1, n + 1)])
        return SubsetSumIndex(w, k, multiplier=1.0 - spec.p, bucket_size=bucket_size)
    raise ContractError(f"{spec.kind} is not an additive measure")


def _reduce(work, tasks, n_jobs):
    acc_q = acc_c = None
    if n_jobs and n_jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(work, tasks))
    else:
        results = map(work, tasks)
    for q, c in results:
        acc_q, acc_c = _merge(acc_q, acc_c, q, c)
    return acc_q, acc_c


def _ap_scale(n: int, k: int, rb: int, n_jobs: int):
    """Exhaustive AP image, streamed over chunks of run masks."""
    total = 1 << n
    size = min(total, 1 << CHUNK_BITS)

    def work(start):
        masks = np.arange(start, min(start + size, total), dtype=np.int64)
        hits = np.zeros(masks.shape, dtype=np.int64)
        acc = np.zeros(masks.shape)
        for i in range(1, n + 1):
            g = (masks >> (n - i)) & 1
            hits += g
            acc += np.where(g == 1, hits / i, 0.0)
        keep = hits <= k
        return np.unique(quantize(acc[keep] / rb), return_counts=True)

    return _reduce(work, list(range(0, total, size)), n_jobs)


def enumerate_scale(spec: MeasureSpec, n: Optional[int] = None, rb: Optional[int] = None,
                    caps: Optional[Dict[str, int]] = None, n_jobs: int = 1) -> ValueScale:
    """Image of ``spec`` over all runs of length ``n`` with at most ``min(n, rb)`` ones.

    ``rb=None`` means unbounded (any number of relevant documents); measures
    that depend on the recall base require an explicit ``rb``.
    """
    n = spec.cutoff_n if n is None else n
    if n < 1:
        raise ContractError(f"run length must be >= 1, got {n}")
    if rb is None:
        if spec.depends_on_rb:
            raise ContractError(f"{spec.kind} needs an explicit recall base")
        eff_rb = n
    else:
        if rb < 1:
            raise ContractError(f"recall base must be >= 1, got {rb}")
        eff_rb = rb
    k = min(n, eff_rb)
    cap = enumeration_cap(spec, caps)
    if n > cap:
        raise CapacityError(
            f"enumerating {spec.kind} runs of length {n} exceeds the cap of {cap}; "
            f"raise it with --max-enum-n if you have the memory")

    strategy = _strategy(spec)
    if strategy == "closed_form":
        q, c = _closed_form(spec, n, k, eff_rb)
    elif strategy == "closed_form_rbp":
        q, c = _rbp_half(n, k)
    elif strategy in ("subset_sum", "subset_sum_rbp"):
        q, c = subset_sum_index(spec, n, eff_rb).materialize(n_jobs)
    else:
        q, c = _ap_scale(n, k, eff_rb, n_jobs)
    return ValueScale(spec.with_cutoff(n), n, rb, q, c)


def naive_scale(spec: MeasureSpec, n: int, rb: Optional[int] = None) -> ValueScale:
    """Brute-force reference: evaluate every admissible run one by one."""
    from .measures import evaluate_gains

    eff_rb = n if rb is None else rb
    s = spec.with_cutoff(n)
    vals = [evaluate_gains(s, g, eff_rb) for g in all_runs(n) if sum(g) <= min(n, eff_rb)]
    return scale_from_values(vals, s, n, rb)


def all_runs(n: int) -> List[Tuple[int, ...]]:
    """Every binary run of length ``n`` in lexicographic order."""
    return list(itertools.product((0, 1), repeat=n))


# -- partial order -----------------------------------------------------------

def _gains(run) -> Tuple[int, ...]:
    return tuple(run.gains) if isinstance(run, JudgedRun) else tuple(run)


def dominates(r, s) -> bool:
    """True iff ``r`` precedes ``s``: every prefix of ``s`` holds at least as many ones."""
    a, b = _gains(r), _gains(s)
    if len(a) != len(b):
        raise ContractError(f"runs of different lengths: {len(a)} and {len(b)}")
    pa = pb = 0
    for x, y in zip(a, b):
        pa += x
        pb += y
        if pb < pa:
            return False
    return True


HASSE_CAP = 12


def hasse_edges(n: int) -> Set[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Covering pairs ``(lower, upper)`` of the dominance order on runs of length ``n``.

    A run is covered by the runs obtained either by moving one relevant
    document up a single position past a non-relevant one, or by turning a
    non-relevant document at the last rank into a relevant one.
    """
    if n < 1:
        raise ContractError(f"n must be >= 1, got {n}")
    if n > HASSE_CAP:
        raise CapacityError(f"Hasse diagram limited to n <= {HASSE_CAP}, got {n}")
    edges = set()
    for run in all_runs(n):
        for i in range(n - 1):
            if run[i] == 0 and run[i + 1] == 1:
                up = run[:i] + (1, 0) + run[i + 2:]
                edges.add((run, up))
        if run[-1] == 0:
            edges.add((run, run[:-1] + (1,)))
    return edges


# -- the universe of runs of any length and recall base ----------------------

@dataclass(frozen=True)
class RunTriple:
    """A run summarised as ``[r, n, rb]`` (relevant retrieved, length, recall base)."""

    r: int
    n: int
    rb: int

    def __post_init__(self):
        if self.n < 1 or self.rb < 1 or self.r < 0:
            raise ContractError(f"invalid triple {self}")
        if self.r > min(self.n, self.rb):
            raise ContractError(f"r={self.r} exceeds min(n={self.n}, rb={self.rb})")

    def __iter__(self):
        return iter((self.r, self.n, self.rb))

    def __repr__(self):
        return f"[{self.r},{self.n},{self.rb}]"


@dataclass(frozen=True)
class ScaleAnalysis:
    image: Tuple[float, ...]
    equispaced: bool
    witness: Optional[Tuple[float, float, float]] = None


ANALYZE_CAP = 16


def analyze_scale(spec: MeasureSpec, n_max: int, k_max: int,
                  caps: Optional[Dict[str, int]] = None) -> ScaleAnalysis:
    """Union of the images over every length ``<= n_max`` and recall base ``<= k_max``."""
    if n_max < 1 or k_max < 1:
        raise ContractError("n_max and k_max must be >= 1")
    if n_max > ANALYZE_CAP:
        raise CapacityError(f"scale analysis limited to n_max <= {ANALYZE_CAP}, got {n_max}")
    image = None
    for n in range(1, n_max + 1):
        for rb in range(1, k_max + 1):
            sc = enumerate_scale(spec.with_cutoff(n), n, rb, caps=caps)
            image = sc.quanta if image is None else np.union1d(image, sc.quanta)
    values = tuple(float(v) for v in image * QUANTUM)
    witness = equispacing_witness(values)
    return ScaleAnalysis(values, witness is None, witness)


_SET_BASED = {
    "P": lambda t: Fraction(t.r, t.n),
    "R": lambda t: Fraction(t.r, t.rb),
    "F1": lambda t: Fraction(2 * t.r, t.n + t.rb),
}


@dataclass(frozen=True)
class OrderDisagreement:
    """Two triples ordered differently by two measures.

    ``ties_vs_strict`` is set when one measure ties the pair and the other
    orders it strictly; otherwise the two measures order it in opposite ways.
    The pair is listed in ascending order of the measure that separates it
    (the first measure when both do).
    """

    first: RunTriple
    second: RunTriple
    ties_vs_strict: bool = False


def triples(n_max: int, k_max: int) -> List[RunTriple]:
    return [RunTriple(r, n, rb)
            for n in range(1, n_max + 1)
            for rb in range(1, k_max + 1)
            for r in range(0, min(n, rb) + 1)]


def _kind(spec) -> str:
    return spec.kind if isinstance(spec, MeasureSpec) else str(spec)


def find_order_disagreement(spec_a, spec_b, n_max: int, k_max: int) -> Optional[OrderDisagreement]:
    """Search the universe for a pair of runs the two measures order differently.

    Only the set-based measures (P, R, F1) are supported since they are
    determined by the triple alone. Opposite strict orderings are preferred
    over tie-versus-strict disagreements, and among the latter a pair tied
    by ``spec_a`` over one tied by ``spec_b``.
    """
    ka, kb = _kind(spec_a), _kind(spec_b)
    for k in (ka, kb):
        if k not in _SET_BASED:
            raise ContractError(f"order disagreement is defined for P, R and F1, not {k!r}")
    if n_max > ANALYZE_CAP:
        raise CapacityError(f"limited to n_max <= {ANALYZE_CAP}")
    fa, fb = _SET_BASED[ka], _SET_BASED[kb]
    ts = triples(n_max, k_max)
    a_ties = b_ties = None
    for i, t1 in enumerate(ts):
        for t2 in ts[i + 1:]:
            da = (fa(t1) > fa(t2)) - (fa(t1) < fa(t2))
            db = (fb(t1) > fb(t2)) - (fb(t1) < fb(t2))
            if da * db < 0:
                lo, hi = (t1, t2) if da < 0 else (t2, t1)
                return OrderDisagreement(lo, hi)
            if a_ties is None and da == 0 and db != 0:
                lo, hi = (t1, t2) if db < 0 else (t2, t1)
                a_ties = OrderDisagreement(lo, hi, ties_vs_strict=True)
            elif b_ties is None and db == 0 and da != 0:
                lo, hi = (t1, t2) if da < 0 else (t2, t1)
                b_ties = OrderDisagreement(lo, hi, ties_vs_strict=True)
    # a pair tied by the first measure is the more telling witness
    return a_ties if a_ties is not None else b_ties
