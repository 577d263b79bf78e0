import itertools
import math

import numpy as np
import pytest

from intervalir.exceptions import CapacityError, ContractError, ScaleDomainError
from intervalir.measures import KINDS, MeasureSpec, evaluate_gains
from intervalir.run_space import (
    QUANTUM,
    RunTriple,
    SubsetSumIndex,
    all_runs,
    analyze_scale,
    dominates,
    enumerate_scale,
    enumeration_cap,
    equispacing_witness,
    find_order_disagreement,
    hasse_edges,
    is_equispaced,
    naive_scale,
    rank_of,
    rank_with_ties,
    scale_from_values,
    subset_sum_index,
)

ALL_SPECS = [
    MeasureSpec("P", 1), MeasureSpec("R", 1), MeasureSpec("F1", 1), MeasureSpec("AP", 1),
    MeasureSpec("DCG", 1, log_base=2), MeasureSpec("DCG", 1, log_base=10),
    MeasureSpec("nDCG", 1, log_base=2), MeasureSpec("RBP", 1, p=0.5),
    MeasureSpec("RBP", 1, p=0.3), MeasureSpec("RBP", 1, p=0.8), MeasureSpec("RR", 1),
]


def test_examples():
    assert len(enumerate_scale(MeasureSpec("DCG", 5, log_base=2))) == 24
    rbp = enumerate_scale(MeasureSpec("RBP", 4, p=0.5), rb=4)
    np.testing.assert_allclose(rbp.values, np.arange(16) / 16)
    rr = enumerate_scale(MeasureSpec("RR", 30))
    np.testing.assert_allclose(rr.values, sorted([0] + [1 / i for i in range(1, 31)]))
    r = enumerate_scale(MeasureSpec("R", 2), rb=3)
    np.testing.assert_allclose(r.values, [0, 1 / 3, 2 / 3])
    p = enumerate_scale(MeasureSpec("P", 3), rb=1)
    np.testing.assert_allclose(p.values, [0, 1 / 3])
    assert p.counts.tolist() == [1, 3]


@pytest.mark.parametrize("n", range(1, 13))
@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.name.split("@")[0])
def test_matches_brute_force(spec, n):
    spec = spec.with_cutoff(n)
    bases = sorted({1, 3, n}) if spec.depends_on_rb else [None, 1, 3]
    for rb in bases:
        fast = enumerate_scale(spec, n, rb)
        slow = naive_scale(spec, n, rb)
        assert np.array_equal(fast.quanta, slow.quanta), (spec, rb)
        assert np.array_equal(fast.counts, slow.counts), (spec, rb)


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.name.split("@")[0])
def test_every_run_is_on_its_scale(spec):
    n = 10
    spec = spec.with_cutoff(n)
    for rb in (2, n):
        scale = enumerate_scale(spec, n, rb)
        values = [evaluate_gains(spec, g, rb) for g in all_runs(n) if sum(g) <= rb]
        ranks = scale.ranks(values)
        assert ranks.min() == 1 and ranks.max() == len(scale)


def test_scale_invariants():
    scale = enumerate_scale(MeasureSpec("AP", 8), rb=5)
    assert np.all(np.diff(scale.quanta) > 0)
    assert scale.values[0] == 0
    assert scale.values[-1] == pytest.approx(1.0)
    assert scale.n_runs == sum(math.comb(8, k) for k in range(6))
    with pytest.raises(ValueError):
        scale.quanta[0] = 5


def test_parallel_enumeration_is_deterministic():
    for spec in (MeasureSpec("AP", 21), MeasureSpec("DCG", 20, log_base=2)):
        rb = 7 if spec.depends_on_rb else None
        one = enumerate_scale(spec, rb=rb, n_jobs=1)
        four = enumerate_scale(spec, rb=rb, n_jobs=4)
        assert one.quanta.tobytes() == four.quanta.tobytes()
        assert one.counts.tobytes() == four.counts.tobytes()


@pytest.mark.parametrize("bucket_size", [50, 1000, 1 << 21])
def test_subset_sum_buckets_do_not_change_the_result(bucket_size):
    spec = MeasureSpec("nDCG", 14, log_base=2)
    ref = naive_scale(spec, 14, 5)
    index = subset_sum_index(spec, 14, 5, bucket_size=bucket_size)
    q, c = index.materialize()
    assert np.array_equal(q, ref.quanta) and np.array_equal(c, ref.counts)
    assert len(index) == len(ref)


@pytest.mark.parametrize("strategy", ["unq", "mid", "min", "max"])
def test_streaming_ranks_match_materialised(strategy, rng):
    spec = MeasureSpec("DCG", 16, log_base=2)
    scale = enumerate_scale(spec)
    picks = rng.choice(len(scale), size=200)
    values = scale.values[picks] + rng.uniform(-0.4, 0.4, size=200) * QUANTUM
    index = subset_sum_index(spec, 16, bucket_size=1000)
    np.testing.assert_array_equal(index.ranks(values, strategy, n_jobs=3),
                                  scale.ranks(values, strategy))


def test_streaming_ranks_reject_off_scale_values():
    index = SubsetSumIndex([1.0, 0.5, 0.25], k=3)
    assert index.ranks([0.0, 1.75]).tolist() == [1, 8]
    with pytest.raises(ScaleDomainError) as info:
        index.ranks([0.5, 0.3])
    assert info.value.index == 1


def test_dcg_distinct_counts_follow_three_times_power_of_two():
    # b=2 weights of ranks 1 and 2 coincide; all other subset sums are distinct
    for n in (12, 16, 20):
        index = subset_sum_index(MeasureSpec("DCG", n, log_base=2), n)
        assert len(index) == 3 * 2 ** (n - 2)


def test_caps():
    with pytest.raises(CapacityError, match="--max-enum-n"):
        enumerate_scale(MeasureSpec("AP", 30), rb=30)
    with pytest.raises(CapacityError):
        enumerate_scale(MeasureSpec("RBP", 25, p=0.8))
    with pytest.raises(CapacityError):
        enumerate_scale(MeasureSpec("DCG", 31, log_base=2))
    assert enumeration_cap(MeasureSpec("P", 5)) == math.inf
    assert enumeration_cap(MeasureSpec("AP", 5), {"exhaustive": 30}) == 30
    assert len(enumerate_scale(MeasureSpec("P", 1000))) == 1001


def test_contract_errors():
    with pytest.raises(ContractError):
        enumerate_scale(MeasureSpec("AP", 4))
    with pytest.raises(ContractError):
        enumerate_scale(MeasureSpec("P", 4), rb=0)


def test_rank_of_tolerance_and_domain():
    scale = enumerate_scale(MeasureSpec("DCG", 4, log_base=2))
    top = scale.values[-1]
    assert rank_of(scale, top) == 12
    assert rank_of(scale, top + 0.9 * QUANTUM) == 12
    with pytest.raises(ScaleDomainError, match="nearest scale values"):
        rank_of(scale, 1.2345)


def test_tie_strategies_on_five_values():
    scale = scale_from_values([0.0, 0.25, 0.40, 0.40, 0.70])
    values = [0.0, 0.25, 0.40, 0.40, 0.70]
    assert scale.ranks(values, "mid").tolist() == [1, 2, 3.5, 3.5, 5]
    assert scale.ranks(values, "min").tolist() == [1, 2, 3, 3, 5]
    assert scale.ranks(values, "max").tolist() == [1, 2, 4, 4, 5]
    assert scale.ranks(values, "unq").tolist() == [1, 2, 3, 3, 4]
    for strategy in ("mid", "min", "max"):
        assert rank_with_ties(scale, 0.25, strategy) == 2


def test_tie_strategies_need_counts():
    scale = enumerate_scale(MeasureSpec("P", 3))
    bare = type(scale)(scale.spec, scale.n, scale.rb, scale.quanta)
    with pytest.raises(ContractError):
        bare.ranks([0.0], "mid")


def test_equispacing():
    assert is_equispaced([0, 0.5, 1.0])
    assert not is_equispaced([0, 1 / 3, 0.5])
    assert equispacing_witness([0, 1 / 3, 0.5, 2 / 3, 1]) == pytest.approx((0, 1 / 3, 0.5))
    assert equispacing_witness([1, 2]) is None


# -- partial order ------------------------------------------------------------

def test_dominance_statements_for_n4():
    assert dominates((1, 1, 0, 1), (1, 1, 1, 0))
    assert dominates((1, 1, 0, 0), (1, 1, 1, 0))
    assert dominates((1, 0, 1, 1), (1, 1, 1, 0))
    for a, b in [((1, 1, 0, 0), (1, 0, 1, 1)), ((1, 1, 0, 0), (0, 1, 1, 1))]:
        assert not dominates(a, b) and not dominates(b, a)
    assert dominates((0, 1, 0, 1), (0, 1, 0, 1))
    with pytest.raises(ContractError):
        dominates((1,), (1, 0))


def _brute_force_covers(n):
    runs = all_runs(n)
    less = {(a, b) for a in runs for b in runs if a != b and dominates(a, b)}
    return {(a, b) for (a, b) in less
            if not any((a, c) in less and (c, b) in less for c in runs)}


@pytest.mark.parametrize("n", range(1, 7))
def test_hasse_edges_are_the_transitive_reduction(n):
    assert hasse_edges(n) == _brute_force_covers(n)


def test_hasse_small_cases():
    assert hasse_edges(1) == {((0,), (1,))}
    assert hasse_edges(2) == {((0, 0), (0, 1)), ((0, 1), (1, 0)), ((1, 0), (1, 1))}
    edges = hasse_edges(4)
    assert ((1, 1, 0, 1), (1, 1, 1, 0)) in edges
    with pytest.raises(CapacityError):
        hasse_edges(13)


def _value_table(spec, n, rb):
    return np.array([evaluate_gains(spec.with_cutoff(n), g, rb) for g in all_runs(n)])


@pytest.mark.parametrize("n", range(1, 9))
def test_dominance_implies_agreement(n):
    runs = np.array(all_runs(n))
    prefix = np.cumsum(runs, axis=1)
    # dom[i, j]: run i precedes run j
    dom = np.all(prefix[:, None, :] <= prefix[None, :, :], axis=2)
    for spec in ALL_SPECS:
        for rb in (n, n + 3):
            v = _value_table(spec, n, rb)
            q = np.rint(v / QUANTUM)
            assert np.all(q[:, None] <= q[None, :] + 0, where=dom), (spec, n, rb)


# -- the universe S[N, K] -----------------------------------------------------

def test_analyze_scale():
    p3 = analyze_scale(MeasureSpec("P", 1), 3, 2)
    np.testing.assert_allclose(p3.image, [0, 1 / 3, 1 / 2, 2 / 3, 1])
    assert not p3.equispaced
    assert analyze_scale(MeasureSpec("P", 1), 3, 7).image == p3.image
    assert analyze_scale(MeasureSpec("P", 1), 2, 5).equispaced
    assert analyze_scale(MeasureSpec("R", 1), 6, 2).equispaced
    assert analyze_scale(MeasureSpec("R", 1), 6, 1).image == (0.0, 1.0)
    f1 = analyze_scale(MeasureSpec("F1", 1), 2, 2)
    np.testing.assert_allclose(f1.image, [0, 1 / 2, 2 / 3, 1])
    assert not f1.equispaced
    with pytest.raises(CapacityError):
        analyze_scale(MeasureSpec("P", 1), 17, 2)


def test_order_disagreements():
    found = find_order_disagreement("P", "R", 2, 2)
    assert (found.first, found.second) == (RunTriple(1, 2, 1), RunTriple(1, 1, 2))
    assert not found.ties_vs_strict
    assert find_order_disagreement("P", "P", 4, 4) is None
    f1 = find_order_disagreement(MeasureSpec("F1", 2), MeasureSpec("P", 2), 2, 2)
    assert (f1.first, f1.second, f1.ties_vs_strict) == (RunTriple(1, 2, 1), RunTriple(1, 1, 2), True)
    with pytest.raises(ContractError):
        find_order_disagreement("AP", "P", 2, 2)


def test_run_triple():
    t = RunTriple(1, 2, 3)
    assert repr(t) == "[1,2,3]" and tuple(t) == (1, 2, 3)
    with pytest.raises(ContractError):
        RunTriple(3, 2, 5)
