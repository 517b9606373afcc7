import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import luxemburg_ref, lp_closed, modular_ref
from varlp.errors import PreconditionError
from varlp.exponents import INF, Constant, ExponentSequence
from varlp.norms import (
    NormContext,
    conjugate,
    holder_pairing,
    luxemburg_norm,
    luxemburg_norms,
    modular,
    quasi_triangle_constant,
    sup_norm,
)


def prefix(*vals):
    lo = min(vals)
    return ExponentSequence(vals, Constant(max(vals) if math.isfinite(max(vals)) else INF),
                            declared_inf=lo)


entries = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
seqs = arrays(np.float64, st.integers(1, 12), elements=entries)
exps = st.lists(st.one_of(st.floats(0.3, 8), st.just(INF)), min_size=12, max_size=12)


def test_modular_examples():
    assert modular([1, 1], ExponentSequence.constant(1.0)) == 2
    assert modular([0.5, 3], prefix(2, INF)) == 3.25
    assert modular(np.zeros(4), ExponentSequence.constant(2.0)) == 0


def test_norm_examples():
    assert luxemburg_norm([3, 4], ExponentSequence.constant(2.0)) == pytest.approx(5, rel=1e-12)
    golden = (1 + math.sqrt(5)) / 2
    assert luxemburg_norm([1, 1], prefix(1, 2)) == pytest.approx(golden, rel=1e-12)
    assert luxemburg_norm([7], ExponentSequence.infinite()) == pytest.approx(7, rel=1e-12)
    assert luxemburg_norm([0, 0], ExponentSequence.constant(0.5)) == 0.0


def test_sup_norm_and_conjugate():
    assert sup_norm([1, -2, 0]) == 2 and sup_norm([]) == 0 and sup_norm([5]) == 5
    assert conjugate(2) == 2 and conjugate(1) == INF and conjugate(INF) == 1
    assert conjugate(4 / 3) == pytest.approx(4)
    with pytest.raises(PreconditionError):
        conjugate(0.9)


def test_holder_examples():
    two = ExponentSequence.constant(2.0)
    r = holder_pairing([1, 0], [1, 0], two)
    assert (r.pairing, r.satisfied) == (1, True) and r.bound == pytest.approx(4)
    r = holder_pairing([1, 1], [1, 1], two)
    assert r.pairing == 2 and r.bound == pytest.approx(8)
    r = holder_pairing([1], [1], ExponentSequence.constant(1.0))
    assert r.bound == pytest.approx(4)
    with pytest.raises(PreconditionError):
        holder_pairing([1], [1], ExponentSequence.constant(0.5))


def test_quasi_triangle_constant():
    assert quasi_triangle_constant(0.5) == 2.0
    assert quasi_triangle_constant(1.0) == 1.0
    assert quasi_triangle_constant(3.0) == 1.0
    ctx = NormContext(ExponentSequence.constant(0.5))
    assert ctx.T == 2.0 and ctx.norm([1, 0]) == pytest.approx(1)
    with pytest.raises(PreconditionError):
        NormContext(ExponentSequence.constant(1.0), bisection_tol=0)


@settings(max_examples=150, deadline=None)
@given(seqs, exps)
def test_matches_independent_root_finder(a, e):
    assume(np.any(a))
    e = np.array(e[:a.size])
    got = luxemburg_norm(a, e)
    assert got == pytest.approx(luxemburg_ref(list(a), list(e)), rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(seqs, st.sampled_from([0.5, 1.0, 2.0, 3.0, INF]))
def test_constant_exponent_reduction(a, p):
    assume(np.any(a))
    assert luxemburg_norm(a, p) == pytest.approx(lp_closed(a, p), rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(seqs, exps, st.floats(-1e3, 1e3).filter(lambda x: abs(x) > 1e-6))
def test_homogeneity(a, e, alpha):
    assume(np.any(a))
    e = np.array(e[:a.size])
    assert luxemburg_norm(alpha * a, e) == pytest.approx(abs(alpha) * luxemburg_norm(a, e),
                                                         rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(seqs, exps, st.data())
def test_monotone(a, e, data):
    e = np.array(e[:a.size])
    shrink = np.array(data.draw(st.lists(st.floats(0, 1), min_size=a.size, max_size=a.size)))
    assert luxemburg_norm(a * shrink, e) <= luxemburg_norm(a, e) * (1 + 1e-11)


@settings(max_examples=100, deadline=None)
@given(seqs, exps)
def test_unit_ball_consistency(a, e):
    e = np.array(e[:a.size])
    n = luxemburg_norm(a, e)
    assume(abs(n - 1) > 1e-9)
    assert (modular(a, e) <= 1) == (n <= 1)
    if n > 0:
        assert modular(a / n, e) == pytest.approx(1, rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(seqs, seqs, st.sampled_from([0.5, 0.75, 1.0, 2.0]))
def test_quasi_triangle(a, b, p):
    D = min(a.size, b.size)
    a, b = a[:D], b[:D]
    lhs = luxemburg_norm(a + b, p)
    rhs = quasi_triangle_constant(p) * (luxemburg_norm(a, p) + luxemburg_norm(b, p))
    assert lhs <= rhs * (1 + 1e-9) + 1e-300


def test_fatou_finite_form():
    rng = np.random.default_rng(3)
    u = np.abs(rng.standard_normal(10))
    e = np.array([0.5, 1, 2, 3, INF, 0.7, 1.5, 4, 2, INF])
    levels = [luxemburg_norm(u * t, e) for t in np.linspace(0.1, 1, 10)]
    assert np.all(np.diff(levels) > 0)
    assert levels[-1] == pytest.approx(luxemburg_norm(u, e), rel=1e-12)


def test_batch_matches_single():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((20, 9))
    X[3] = 0
    e = np.array([0.5, 1, 2, INF, 3, 0.8, 1, 1, 6])
    batch = luxemburg_norms(X, e)
    single = [luxemburg_norm(x, e) for x in X]
    assert np.allclose(batch, single, rtol=1e-13)
    assert batch[3] == 0


def test_modular_oracle_agrees():
    a = [0.3, -2.0, 0.0, 5.0]
    e = [0.5, 3.0, 1.0, INF]
    assert modular(a, e) == pytest.approx(modular_ref(a, e), rel=1e-15)


def test_exponent_array_too_short():
    with pytest.raises(PreconditionError):
        modular([1, 2, 3], [1.0, 2.0])
