"""The metric rho_{p_n}, ball-inclusion radii and a finite-dimensional Riesz lemma.

rho(x, y) = sum_{p_n<1} |x_n - y_n|^{p_n} + ||(x - y) chi_{p_n >= 1}||_{p_n}.
The inclusion radii are only known in the regime where every exponent is at
most 1; elsewhere the functions refuse rather than guess.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import PreconditionError
from .norms import _powers, exponent_array, luxemburg_norm, luxemburg_norms, modular, modular_rows

MEMBERSHIP_TOL = 1e-12


class NoFormulaError(PreconditionError):
    """No inclusion radius formula outside the p_n <= 1 regime."""


def _exps(p, D):
    return exponent_array(p, D)


def rho_rows(Z: np.ndarray, e: np.ndarray) -> np.ndarray:
    """rho(z, 0) for each row of Z."""
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    low = e < 1
    out = np.zeros(Z.shape[0])
    if low.any():
        out += _powers(Z[:, low], e[low]).sum(axis=1)
    if (~low).any():
        out += luxemburg_norms(Z[:, ~low], e[~low])
    return out


def rho_metric(x, y, p) -> float:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    D = max(x.size, y.size)
    d = np.pad(x, (0, D - x.size)) - np.pad(y, (0, D - y.size))
    if D == 0:
        return 0.0
    return float(rho_rows(d[None, :], _exps(p, D))[0])


# --------------------------------------------------------------------------
# inclusion radii


def _regime(p, D):
    e = _exps(p, D)
    if np.any(e > 1):
        raise NoFormulaError("inclusion radii are only given when every p_n <= 1")
    p_minus = getattr(p, "declared_inf", None)
    return e, float(e.min()) if p_minus is None else float(p_minus)


def inclusion_radius_U_in_B(y, epsilon: float, p) -> float:
    """delta = eps (1 - alpha), alpha = sum |y_n/eps|^{p_n}: U(y, delta) in B(0, eps)."""
    if not 0 < epsilon < 1:
        raise PreconditionError("epsilon must lie in (0, 1)")
    y = np.asarray(y, dtype=float).ravel()
    e, _ = _regime(p, y.size)
    alpha = modular(y / epsilon, e)
    if alpha >= 1:
        raise PreconditionError(f"y is not inside B(0, eps): alpha = {alpha}")
    return epsilon * (1.0 - alpha)


def inclusion_radius_B_in_U(y, epsilon: float, p) -> float:
    """delta = (eps - alpha)^{1/p_-}, alpha = sum |y_n|^{p_n}: B(y, delta) in U(0, eps)."""
    if not 0 < epsilon < 1:
        raise PreconditionError("epsilon must lie in (0, 1)")
    y = np.asarray(y, dtype=float).ravel()
    e, p_minus = _regime(p, y.size)
    alpha = modular(y, e)
    if alpha >= epsilon:
        raise PreconditionError(f"y is not inside U(0, eps): alpha = {alpha}")
    return (epsilon - alpha) ** (1.0 / p_minus)


# --------------------------------------------------------------------------
# sampled verification


@dataclass(frozen=True)
class BallSpec:
    center: np.ndarray
    radius: float
    kind: str  # 'B' (quasi-norm ball) or 'U' (metric ball)

    def __post_init__(self):
        if self.kind not in ("B", "U"):
            raise PreconditionError("ball kind must be 'B' or 'U'")
        if self.radius < 0:
            raise PreconditionError("radius must be nonnegative")
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).ravel())


def _inside(Z, e, ball: BallSpec):
    """Strict membership with a relative allowance for rounding."""
    if ball.radius == 0:
        return np.zeros(Z.shape[0], dtype=bool)
    if ball.kind == "B":
        return modular_rows(Z / ball.radius, e) < 1.0 + MEMBERSHIP_TOL
    return rho_rows(Z, e) < ball.radius * (1.0 + MEMBERSHIP_TOL)


def _directions(rng, count, D, e):
    """Generalised-Gaussian, axis, flat and sparse directions."""
    kinds = rng.integers(4, size=count)
    U = np.zeros((count, D))
    g = rng.standard_gamma(1.0 / np.minimum(e, 2.0), size=(count, D)) ** (1.0 / np.minimum(e, 2.0))
    U[kinds == 0] = (g * rng.choice([-1.0, 1.0], size=(count, D)))[kinds == 0]
    ax = np.flatnonzero(kinds == 1)
    U[ax, rng.integers(D, size=ax.size)] = rng.choice([-1.0, 1.0], size=ax.size)
    U[kinds == 2] = rng.choice([-1.0, 1.0], size=(int((kinds == 2).sum()), D))
    sp = np.flatnonzero(kinds == 3)
    for i in sp:
        k = rng.integers(1, D + 1)
        U[i, rng.choice(D, k, replace=False)] = rng.standard_normal(k)
    dead = ~np.any(U, axis=1)
    U[dead, 0] = 1.0
    return U


def _scale_to(U, e, kind, level):
    """t per row with size(t u) = level (size is increasing in t)."""
    if kind == "B":
        return level / luxemburg_norms(U, e)
    lo = np.full(U.shape[0], -60.0)
    hi = np.full(U.shape[0], 60.0)
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        big = rho_rows(U * np.exp(mid)[:, None], e) >= level
        hi = np.where(big, mid, hi)
        lo = np.where(big, lo, mid)
    return np.exp(lo)


def sample_ball(ball: BallSpec, p, samples: int, rng: np.random.Generator) -> np.ndarray:
    """Points of the open ball: random direction, radial level in (0, radius).

    A tenth of the levels sit within 1e-9 of the boundary.
    """
    D = ball.center.size
    e = _exps(p, D)
    U = _directions(rng, samples, D, e)
    s = rng.uniform(size=samples) ** (1.0 / D)
    s[rng.uniform(size=samples) < 0.1] = 1.0 - 1e-9
    t = _scale_to(U, e, ball.kind, ball.radius * s)
    return ball.center + U * t[:, None]


def check_inclusion(inner: BallSpec, outer: BallSpec, p, samples: int = 10_000,
                    seed: int = 0) -> int:
    """Number of sampled points of `inner` falling outside `outer`."""
    if samples < 1:
        raise PreconditionError("samples must be >= 1")
    if inner.center.size != outer.center.size:
        raise PreconditionError("balls live in different dimensions")
    if inner.radius == 0:
        return 0
    e = _exps(p, inner.center.size)
    X = sample_ball(inner, p, samples, np.random.default_rng(seed))
    return int((~_inside(X - outer.center, e, outer)).sum())


# --------------------------------------------------------------------------
# Riesz lemma


@dataclass(frozen=True)
class RieszResult:
    z: np.ndarray
    distance: float  # inf_{y in L} ||u - y|| (numerical)
    eta: float
    min_sampled: float
    passes: bool
    certified: bool


def _descend(B, u, e, C, rng, step=1.0, tol=1e-10):
    """Batched pattern search on coefficients, one row of C per start."""
    m = C.shape[1]
    f = luxemburg_norms(u - C @ B, e)
    h = np.full(C.shape[0], step) * (1.0 + np.abs(C).max(axis=1))
    axes = np.vstack([np.eye(m), -np.eye(m)])
    while np.any(h > tol):
        live = np.flatnonzero(h > tol)
        R = rng.standard_normal((m, m))
        R /= np.linalg.norm(R, axis=1, keepdims=True)
        moves = np.vstack([axes, R, -R])
        cand = C[live, None, :] + h[live, None, None] * moves[None]
        vals = luxemburg_norms(u - cand.reshape(-1, m) @ B, e).reshape(live.size, -1)
        best = vals.argmin(axis=1)
        bv = vals[np.arange(live.size), best]
        up = bv < f[live]
        C[live[up]] = cand[np.flatnonzero(up), best[up]]
        f[live[up]] = bv[up]
        h[live[~up]] *= 0.5
    return f, C


def _min_distance(B, u, e, starts, rng):
    """inf over c of ||u - c B||: multistart pattern search, Powell polish."""
    c0 = np.linalg.lstsq(B.T, u, rcond=None)[0]
    C = np.vstack([c0, c0 + rng.standard_normal((starts - 1, c0.size))
                   * 10.0 ** rng.uniform(-2, 0.5, size=(starts - 1, 1))])
    f, C = _descend(B, u, e, C, rng)
    i = int(f.argmin())
    res = minimize(lambda c: luxemburg_norm(u - c @ B, e), C[i], method="Powell",
                   options={"xtol": 1e-12, "ftol": 1e-14, "maxfev": 20_000})
    if res.fun < f[i]:
        return float(res.fun), res.x
    return float(f[i]), C[i]


def riesz_witness(L_basis, epsilon: float, p, D: int, seed: int = 0,
                  verify_samples: int = 10_000, verify_tol: float = 1e-6,
                  starts: int | None = None) -> RieszResult:
    """z with ||z|| = 1 and ||z - y|| > 1 - eps for every y in span(L_basis)."""
    if not 0 < epsilon < 1:
        raise PreconditionError("epsilon must lie in (0, 1)")
    B = np.array([np.pad(np.asarray(b, dtype=float), (0, max(0, D - len(b))))[:D]
                  for b in L_basis]).reshape(-1, D)
    if np.linalg.matrix_rank(B) >= D:
        raise PreconditionError("L must be a proper subspace")
    e = _exps(p, D)
    p_minus = float(e.min())
    rng = np.random.default_rng(seed)
    # first standard vector outside the span
    u = None
    for j in range(D):
        cand = np.zeros(D)
        cand[j] = 1.0
        r = cand - B.T @ np.linalg.lstsq(B.T, cand, rcond=None)[0]
        if np.linalg.norm(r) > 1e-8:
            u = cand
            break
    if starts is None:
        starts = 1 if p_minus >= 1 else 64
    d, c = _min_distance(B, u, e, starts, rng)
    if not d > 1e-12:
        raise PreconditionError("distance to L not certified positive")
    eta = epsilon * d / (2.0 * (1.0 - epsilon))
    w = u - c @ B
    if not luxemburg_norm(w, e) < d + eta:
        raise PreconditionError("could not find v in L within d + eta")
    z = w / luxemburg_norm(w, e)
    z = z / luxemburg_norm(z, e)  # second pass absorbs bisection rounding
    # sampled points of L, plus the local nearest point to z
    m = B.shape[0]
    C = rng.standard_normal((verify_samples, m)) * 10.0 ** rng.uniform(-3, 1, size=(verify_samples, 1))
    _, cz = _min_distance(B, z, e, starts, rng)
    C[0] = cz
    dist = luxemburg_norms(z - C @ B, e)
    lo = float(dist.min())
    return RieszResult(z, d, eta, lo, lo > 1.0 - epsilon - verify_tol, p_minus >= 1)
