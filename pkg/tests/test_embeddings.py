from fractions import Fraction

import pytest

from intervalir.embeddings import RENDER_LIMIT, EmbeddedRun, embed_f1, embed_precision, embed_recall
from intervalir.exceptions import CapacityError, ContractError
from intervalir.run_space import RunTriple


def test_precision_worked_example():
    common, (r, s) = embed_precision([RunTriple(2, 3, 4), RunTriple(2, 4, 3)])
    assert common == 12
    assert r.gains() == (1,) * 8 + (0,) * 4
    assert s.gains() == (1,) * 6 + (0,) * 6
    assert (r.precision(), s.precision()) == (Fraction(2, 3), Fraction(1, 2))


def test_recall_worked_example():
    common, (r1, r2) = embed_recall([RunTriple(2, 5, 2), RunTriple(2, 5, 3)])
    assert common == 6
    assert r1.gains() == (1,) * 6
    assert r2.gains() == (1,) * 4 + (0,) * 2
    assert (r1.recall(), r2.recall()) == (1, Fraction(2, 3))


@pytest.mark.parametrize("rbs, s, size, rel", [((4, 3), 7, 3, (2, 2)), ((3, 5), 18, 9, (6, 4))])
def test_f1_worked_examples(rbs, s, size, rel):
    runs = [RunTriple(2, 3, rbs[0]), RunTriple(2, 4, rbs[1])]
    got_s, got_size, out = embed_f1(runs)
    assert (got_s, got_size) == (s, size)
    assert tuple(e.relevant for e in out) == rel
    assert all(e.length == e.rb == size for e in out)
    for t, e in zip(runs, out):
        assert e.f1() == Fraction(2 * t.r, t.n + t.rb)


def test_single_run_is_unchanged():
    common, (e,) = embed_precision([RunTriple(3, 7, 5)])
    assert common == 7 and (e.relevant, e.length, e.rb) == (3, 7, 5)


def test_precision_and_recall_embeddings_disagree():
    runs = [RunTriple(2, 3, 4), RunTriple(2, 4, 3)]
    _, (pr, ps) = embed_precision(runs)
    _, (rr, rs) = embed_recall(runs)
    assert ps.precision() < pr.precision()
    assert rr.recall() < rs.recall()


def test_random_triples_preserve_values(rng):
    for _ in range(1000):
        k = int(rng.integers(1, 5))
        runs = []
        for _ in range(k):
            n, rb = (int(v) for v in rng.integers(1, 40, 2))
            runs.append(RunTriple(int(rng.integers(0, min(n, rb) + 1)), n, rb))
        _, ps = embed_precision(runs)
        _, rs = embed_recall(runs)
        _, _, fs = embed_f1(runs)
        for t, p, r, f in zip(runs, ps, rs, fs):
            assert p.precision() == Fraction(t.r, t.n)
            assert r.recall() == Fraction(t.r, t.rb)
            assert f.f1() == Fraction(2 * t.r, t.n + t.rb)
            assert len({p.length for p in ps}) == 1 and len({r.rb for r in rs}) == 1


def test_large_common_multiples_stay_symbolic():
    primes = [101, 103, 107, 109, 113]
    common, out = embed_precision([RunTriple(1, p, p) for p in primes])
    assert common > RENDER_LIMIT
    assert out[0].precision() == Fraction(1, 101)
    with pytest.raises(CapacityError):
        out[0].gains()


def test_overflow_and_validation():
    primes = [1000003, 1000033, 1000037, 1000039]
    with pytest.raises(CapacityError):
        embed_recall([RunTriple(1, 1, p) for p in primes])
    with pytest.raises(ContractError):
        embed_precision([])
    with pytest.raises(ContractError):
        EmbeddedRun(5, 4, 10)
    assert embed_precision([(1, 2, 2)])[0] == 2
