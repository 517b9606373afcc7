import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varlp.errors import BoundViolation, PreconditionError
from varlp.exponents import (
    INF,
    INFINITE,
    AffineLog,
    Constant,
    ExponentSequence,
    IndexSet,
    Infinite,
    Power,
    difference_set,
)
from varlp.embedding import (
    compose_classification,
    criterion_sum,
    classify_pair,
    embedding_constant,
    exists_c,
    linfty_relation,
    verify_embedding_empirically,
)

ONE, TWO = ExponentSequence.constant(1.0), ExponentSequence.constant(2.0)
P_N = ExponentSequence((), Power(1, 1), declared_inf=1)  # p_n = n
LOG4 = ExponentSequence((), AffineLog(4, 1), declared_inf=1)  # p_n = 4 ln n + 1


def test_criterion_constant_gap():
    res = criterion_sum(ONE, TWO, 0.5, difference_set(ONE, TWO, "less"), 20)
    assert res.partial_sum == pytest.approx(5.0)
    assert res.tail_verdict == "divergent" and res.M is None


def test_criterion_geometric_total():
    # r_n = n against an infinite exponent: sum 2^-n = 1
    res = criterion_sum(P_N, INFINITE, 0.5, P_N.finite_set(), 10)
    assert res.tail_verdict == "convergent"
    assert res.M == pytest.approx(1.0, rel=1e-12)
    assert res.M >= res.partial_sum


def test_criterion_empty_set():
    res = criterion_sum(ONE, TWO, 0.5, IndexSet.from_indices([]), 10)
    assert (res.partial_sum, res.tail_verdict, res.M) == (0.0, "convergent", 0.0)


def test_criterion_rejects_bad_subset():
    with pytest.raises(PreconditionError):
        criterion_sum(TWO, ONE, 0.5, IndexSet.from_indices([1]), 3)
    with pytest.raises(PreconditionError):
        criterion_sum(ONE, TWO, 1.0, IndexSet.naturals(), 3)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 0.98), st.floats(0.01, 0.98), st.integers(1, 200))
def test_partial_sum_monotone_in_c(c1, c2, D):
    c1, c2 = sorted((c1, c2))
    A = P_N.finite_set()
    s1 = criterion_sum(P_N, INFINITE, c1, A, D).partial_sum
    s2 = criterion_sum(P_N, INFINITE, c2, A, D).partial_sum
    assert s1 <= s2


def test_certified_tail_bounds_dominate_long_sums():
    # r_n = 4 ln n + 1 at c = e^-1/2: the true total is e^-1/2 pi^2/6
    A = LOG4.finite_set()
    e = exists_c(LOG4, INFINITE, A)
    assert e.answer == "yes" and e.c == pytest.approx(math.exp(-0.5))
    truth = math.exp(-0.5) * math.pi ** 2 / 6
    assert truth <= e.M < truth + 0.1
    n = np.arange(1, 2_000_001)
    long = np.sum(e.c ** (4 * np.log(n) + 1))
    assert long <= e.M


def test_exists_c_examples():
    assert exists_c(ONE, TWO, difference_set(ONE, TWO, "less")).answer == "no"
    fin = exists_c(ONE, TWO, IndexSet.from_indices(range(1, 6)))
    assert (fin.answer, fin.c) == ("yes", 0.5)
    assert fin.M == pytest.approx(5 * 0.25)
    sup = exists_c(P_N, INFINITE, P_N.finite_set())
    assert (sup.answer, sup.c) == ("yes", 0.5)


def test_exists_c_without_tail_model_is_undecided():
    A = IndexSet(lambda n: np.asarray(n) % 2 == 0, label="even")
    e = exists_c(ONE, TWO, A, D_grid=2000)
    assert e.answer == "undecided"
    assert len(e.grid) == 20


def test_linfty_relation_examples():
    rel = linfty_relation(P_N, c=0.5)
    assert rel.coincides and rel.M == pytest.approx(1.0) and rel.upper == pytest.approx(2.0)
    assert not linfty_relation(TWO).coincides
    all_inf = linfty_relation(ExponentSequence.infinite())
    assert all_inf.coincides and all_inf.upper == 1.0


def test_embedding_constants():
    assert embedding_constant(1.0, 0.5, 1.0, "finite_q") == pytest.approx(8)
    assert embedding_constant(1.0, 0.5, 1.0, "mixed_q") == pytest.approx(20)
    assert embedding_constant(1.0, 0.5, 1.0, "general") == pytest.approx(46)
    with pytest.raises(PreconditionError):
        embedding_constant(1.0, 0.5, 1.0, "other")


def test_classify_examples():
    v = classify_pair(ONE, TWO)
    assert v.classification == "strict_forward"
    assert v.forward.constant == 1.0 and v.backward.witness == {"kind": "block"}
    same = classify_pair(LOG4, LOG4)
    assert same.classification == "equivalent"
    assert same.forward.constant == same.backward.constant == 1.0
    eq = classify_pair(LOG4, ExponentSequence.infinite())
    assert eq.classification == "equivalent"
    assert eq.backward.regime == "mixed_q" and eq.backward.constant >= 1


def test_general_regime_when_set_is_partial():
    p = ExponentSequence((3.0,), Constant(1.0), declared_inf=1)
    q = ExponentSequence((2.0,), Power(1, 1), declared_inf=1)
    v = classify_pair(p, q)
    # q_n = n against p_n = 1: r_n -> 1, the reverse embedding fails
    assert v.backward.status == "fails"
    w = classify_pair(ExponentSequence((3.0,), Power(1, 1), declared_inf=1),
                      ExponentSequence((2.0,), Infinite(), declared_inf=2))
    assert w.backward.regime == "general"


def test_compose_table():
    assert compose_classification("holds", "fails") == "strict_forward"
    assert compose_classification("fails", "holds") == "strict_backward"
    assert compose_classification("fails", "fails") == "incomparable"
    assert compose_classification("undecided", "holds") == "undecided"


def test_empirical_checks():
    assert verify_embedding_empirically(TWO, TWO, 1.0, samples=50).max_ratio == pytest.approx(1)
    chk = verify_embedding_empirically(P_N, INFINITE, 2.0, samples=200)
    assert chk.ok and chk.max_ratio <= 2.0
    # l_2 norm is dominated by the l_1 norm
    assert verify_embedding_empirically(TWO, ONE, 1.0, samples=100).ok
    with pytest.raises(BoundViolation):
        verify_embedding_empirically(ONE, TWO, 1.0, samples=50)


def test_certified_constants_hold_empirically():
    for p, q in [(LOG4, ExponentSequence.infinite()), (P_N, INFINITE),
                 (ExponentSequence((1.0, 1.0), Constant(2.0), declared_inf=1), TWO)]:
        v = classify_pair(p, q)
        assert v.backward.status == "holds"
        verify_embedding_empirically(p, q, v.backward.constant, samples=200, seed=1)


def test_pointwise_order_gives_constant_one():
    p = ExponentSequence((0.5, 1.0, 3.0), Constant(2.0), declared_inf=0.5)
    q = ExponentSequence((0.7, 1.0, 4.0), Constant(2.5), declared_inf=0.7)
    assert classify_pair(p, q).forward.constant == 1.0
    # ||a||_q <= ||a||_p when p_n <= q_n < inf
    assert verify_embedding_empirically(q, p, 1.0, samples=300, D=30).ok


def test_pointwise_constant_with_infinite_target():
    # a sup term replaces |x|^2, so constant 1 fails: ||a||_p = 1, ||a||_q = 5/4
    p = ExponentSequence((2.0, 1.0), Constant(1.0), declared_inf=1)
    q = ExponentSequence((INF, 1.0), Constant(1.0), declared_inf=1)
    from varlp.norms import luxemburg_norm
    a = [0.5, 0.75]
    assert luxemburg_norm(a, p) == pytest.approx(1.0, rel=1e-12)
    assert luxemburg_norm(a, q) == pytest.approx(1.25, rel=1e-12)
    assert classify_pair(p, q).forward.constant == pytest.approx(1.25)
    # and the constant is never beaten on random data
    p2 = ExponentSequence((0.5, 1.0, 3.0), Constant(2.0), declared_inf=0.5)
    q2 = ExponentSequence((0.7, 1.0, INF), Constant(2.5), declared_inf=0.7)
    C = classify_pair(p2, q2).forward.constant
    assert C > 1
    assert verify_embedding_empirically(q2, p2, C, samples=500, D=30).ok
