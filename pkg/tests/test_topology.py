import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varlp.errors import PreconditionError
from varlp.exponents import Constant, ExponentSequence
from varlp.norms import luxemburg_norm
from varlp.topology import (
    BallSpec,
    NoFormulaError,
    check_inclusion,
    inclusion_radius_B_in_U,
    inclusion_radius_U_in_B,
    rho_metric,
    riesz_witness,
)

HALF = ExponentSequence.constant(0.5)
ONE = ExponentSequence.constant(1.0)
TWO = ExponentSequence.constant(2.0)


def test_rho_examples():
    assert rho_metric([1, 0], [0, 0], HALF) == pytest.approx(1.0)
    p = ExponentSequence((0.5, 2.0), Constant(2.0), declared_inf=0.5)
    assert rho_metric([1, 3], [0, 0], p) == pytest.approx(4.0)
    x, y = np.array([1.0, -2.0, 2.0]), np.array([0.5, 0.0, 0.0])
    assert rho_metric(x, y, TWO) == pytest.approx(np.linalg.norm(x - y))
    assert rho_metric([], [], HALF) == 0.0
    assert rho_metric([1, 2], [1, 2, 0], HALF) == 0.0


mixed = ExponentSequence((0.3, 0.7, 1.0, 3.0), Constant(0.5), declared_inf=0.3)
vec = st.lists(st.floats(-5, 5), min_size=6, max_size=6).map(np.array)


@settings(max_examples=200, deadline=None)
@given(vec, vec, vec)
def test_rho_is_a_metric(x, y, z):
    xy, yx = rho_metric(x, y, mixed), rho_metric(y, x, mixed)
    assert xy == yx
    assert xy <= rho_metric(x, z, mixed) + rho_metric(z, y, mixed) + 1e-12 * (1 + xy)
    assert rho_metric(x, x, mixed) == 0


def test_radius_examples():
    assert inclusion_radius_U_in_B([0, 0], 0.3, HALF) == pytest.approx(0.3)
    assert inclusion_radius_U_in_B([1 / 8], 0.5, HALF) == pytest.approx(0.25)
    assert inclusion_radius_B_in_U([0.0], 0.25, HALF) == pytest.approx(1 / 16)
    assert inclusion_radius_B_in_U([0.0, 0.0], 0.4, ONE) == pytest.approx(0.4)
    # alpha = eps - 1e-9
    eps = 0.5
    y = [(eps - 1e-9) ** 2]
    assert inclusion_radius_B_in_U(y, eps, HALF) == pytest.approx(1e-18, rel=1e-5)


def test_radius_errors():
    with pytest.raises(PreconditionError):
        inclusion_radius_U_in_B([0.5], 0.5, HALF)  # alpha = sqrt(1) = 1
    with pytest.raises(PreconditionError):
        inclusion_radius_B_in_U([0.25], 0.5, HALF)  # alpha = eps
    with pytest.raises(PreconditionError):
        inclusion_radius_U_in_B([0.0], 1.0, HALF)
    with pytest.raises(NoFormulaError):
        inclusion_radius_U_in_B([0.0], 0.5, TWO)
    with pytest.raises(NoFormulaError):
        inclusion_radius_B_in_U([0.0, 0.0], 0.5, ExponentSequence((0.5,), Constant(1.5), declared_inf=0.5))


def test_inclusions_hold_at_formula_radii():
    rng = np.random.default_rng(3)
    eps = 0.5
    for p in (HALF, ExponentSequence((0.3, 0.9), Constant(0.6), declared_inf=0.3)):
        y = rng.uniform(-1, 1, 6)
        y = 1e-5 * y
        d1 = inclusion_radius_U_in_B(y, eps, p)
        assert check_inclusion(BallSpec(y, d1, "U"), BallSpec(np.zeros(6), eps, "B"), p, 3000) == 0
        d2 = inclusion_radius_B_in_U(y, eps, p)
        assert check_inclusion(BallSpec(y, d2, "B"), BallSpec(np.zeros(6), eps, "U"), p, 3000) == 0


def test_inflated_radius_is_caught():
    y = np.zeros(4)
    d = inclusion_radius_B_in_U(y, 0.5, HALF)
    assert check_inclusion(BallSpec(y, 10 * d, "B"), BallSpec(y, 0.5, "U"), HALF, 2000) > 0
    d = inclusion_radius_U_in_B(y, 0.5, HALF)
    assert check_inclusion(BallSpec(y, 10 * d, "U"), BallSpec(y, 0.5, "B"), HALF, 2000) > 0


def test_zero_radius_and_ball_spec():
    assert check_inclusion(BallSpec([0, 0], 0, "B"), BallSpec([0, 0], 0, "U"), HALF) == 0
    with pytest.raises(PreconditionError):
        BallSpec([0], 1.0, "C")
    with pytest.raises(PreconditionError):
        BallSpec([0], -1.0, "B")
    with pytest.raises(PreconditionError):
        check_inclusion(BallSpec([0], 1, "B"), BallSpec([0, 0], 1, "B"), HALF)


def test_inclusion_is_deterministic():
    a = BallSpec(np.zeros(3), 0.1, "B")
    b = BallSpec(np.zeros(3), 0.05, "U")
    assert check_inclusion(a, b, HALF, 500, seed=9) == check_inclusion(a, b, HALF, 500, seed=9)


def test_riesz_orthogonal_case():
    r = riesz_witness([[1.0, 0.0]], 0.1, TWO, 2)
    assert np.allclose(np.abs(r.z), [0, 1], atol=1e-8)
    assert r.min_sampled >= 1 - 1e-8 and r.passes and r.certified


def test_riesz_l1_diagonal():
    r = riesz_witness([[1.0, 1.0]], 0.5, ONE, 2, verify_samples=2000)
    assert abs(np.abs(r.z).sum() - 1) < 1e-8
    # exact l1 distance from z to the line t(1, 1)
    t = np.concatenate([r.z, np.linspace(-3, 3, 20001)])
    dist = np.min(np.abs(r.z[0] - t) + np.abs(r.z[1] - t))
    assert dist > 0.5 and r.passes


def test_riesz_random_subspace():
    rng = np.random.default_rng(1)
    L = rng.standard_normal((3, 8))
    r = riesz_witness(list(L), 0.1, TWO, 8, verify_samples=2000)
    e = np.full(8, 2.0)
    assert abs(luxemburg_norm(r.z, e) - 1) < 1e-8
    assert r.min_sampled > 0.9 - 1e-6 and r.passes


def test_riesz_below_one_is_heuristic():
    L = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 1.0, 0.0]]
    r = riesz_witness(L, 0.3, HALF, 4, verify_samples=1000, starts=16)
    assert not r.certified
    assert abs(luxemburg_norm(r.z, np.full(4, 0.5)) - 1) < 1e-8


def test_riesz_errors():
    with pytest.raises(PreconditionError):
        riesz_witness([[1, 0], [0, 1]], 0.1, TWO, 2)
    with pytest.raises(PreconditionError):
        riesz_witness([[1, 0]], 1.0, TWO, 2)
