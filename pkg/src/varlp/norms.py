"""Modular, Luxemburg quasi-norm and the variable-exponent Hoelder pairing.

Sequences are plain 1-d arrays (index n stored at position n-1).  Exponent
arguments accept an ``ExponentSequence``, a scalar, or an array of exponents
at least as long as the sequence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .exponents import ExponentSequence


def exponent_array(p, D: int) -> np.ndarray:
    if isinstance(p, ExponentSequence):
        return p.values(D)
    arr = np.asarray(p, dtype=float)
    if arr.ndim == 0:
        return np.full(D, float(arr))
    if arr.size < D:
        raise PreconditionError(f"need {D} exponents, got {arr.size}")
    return arr[:D]


def _powers(x: np.ndarray, e: np.ndarray) -> np.ndarray:
    """|x|^e as exp(e ln|x|) with 0^e = 0, for finite e."""
    ax = np.abs(x)
    out = np.zeros(np.broadcast(ax, e).shape)
    nz = ax > 0
    with np.errstate(over="ignore"):
        out[nz] = np.exp(np.broadcast_to(e, out.shape)[nz] * np.log(ax[nz]))
    return out


def modular(a, p) -> float:
    """sum_{p_n<inf} |a_n|^{p_n} + sup_{p_n=inf} |a_n|."""
    a = np.asarray(a, dtype=float).ravel()
    if a.size == 0:
        return 0.0
    e = exponent_array(p, a.size)
    fin = np.isfinite(e)
    total = float(_powers(a[fin], e[fin]).sum()) if fin.any() else 0.0
    if (~fin).any():
        total += float(np.abs(a[~fin]).max())
    return total


def modular_rows(X: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Row-wise modular of a 2-d array against one exponent vector."""
    X = np.abs(np.atleast_2d(np.asarray(X, dtype=float)))
    fin = np.isfinite(e)
    out = np.zeros(X.shape[0])
    if fin.any():
        out += _powers(X[:, fin], e[fin]).sum(axis=1)
    if (~fin).any():
        out += X[:, ~fin].max(axis=1)
    return out


def luxemburg_norms(X, p, tol: float = 1e-12, max_iter: int = 200) -> np.ndarray:
    """Row-wise ||x||_{p_n} by bisection on log(lambda).

    Bracket: m(x/lambda) >= 1 at lambda = ||x||_inf, and m <= 1 at
    ||x||_inf * N^{1/min(p_min, 1)} with N the support size.
    """
    X = np.abs(np.atleast_2d(np.asarray(X, dtype=float)))
    m, D = X.shape
    e = exponent_array(p, D)
    out = np.zeros(m)
    amax = X.max(axis=1) if D else np.zeros(m)
    rows = np.flatnonzero(amax > 0)
    if rows.size == 0:
        return out
    Y = X[rows] / amax[rows, None]
    support = Y > 0
    fin = np.isfinite(e)
    with np.errstate(divide="ignore"):
        logY = np.where(support, np.log(np.where(support, Y, 1.0)), -np.inf)
    N = support.sum(axis=1)
    pmin = np.where(support, e[None, :], np.inf).min(axis=1)
    lo = np.zeros(rows.size)
    hi = np.log(N) / np.minimum(pmin, 1.0)

    logF = logY[:, fin]
    eF = e[fin][None, :]
    logI = logY[:, ~fin].max(axis=1) if (~fin).any() else None

    def mod(level):
        # modular of Y / exp(level), level per row
        with np.errstate(over="ignore"):
            total = np.exp(eF * (logF - level[:, None])).sum(axis=1)
        if logI is not None:
            total += np.exp(logI - level)
        return total

    # guard the upper bracket against rounding
    bad = mod(hi) > 1.0
    while bad.any():
        hi[bad] += math.log(2.0)
        bad = mod(hi) > 1.0
    step_tol = math.log1p(tol)
    for _ in range(max_iter):
        if np.all(hi - lo <= step_tol):
            break
        mid = 0.5 * (lo + hi)
        ok = mod(mid) <= 1.0
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    out[rows] = amax[rows] * np.exp(0.5 * (lo + hi))
    return out


def luxemburg_norm(a, p, tol: float = 1e-12, max_iter: int = 200) -> float:
    """inf{lambda > 0 : m(a/lambda) <= 1}; exactly 0 for the zero sequence."""
    a = np.asarray(a, dtype=float).ravel()
    if a.size == 0 or not np.any(a):
        return 0.0
    return float(luxemburg_norms(a[None, :], p, tol=tol, max_iter=max_iter)[0])


def sup_norm(a) -> float:
    a = np.asarray(a, dtype=float).ravel()
    return float(np.abs(a).max()) if a.size else 0.0


def quasi_triangle_constant(p_minus: float) -> float:
    """T = max(1, 2^{1/p_- - 1})."""
    return max(1.0, 2.0 ** (1.0 / p_minus - 1.0))


@dataclass(frozen=True)
class NormContext:
    p: ExponentSequence
    bisection_tol: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not self.bisection_tol > 0:
            raise PreconditionError("bisection_tol must be positive")

    @property
    def T(self) -> float:
        return quasi_triangle_constant(self.p.declared_inf)

    def norm(self, a) -> float:
        return luxemburg_norm(a, self.p, tol=self.bisection_tol, max_iter=self.max_iter)

    def modular(self, a) -> float:
        return modular(a, self.p)


def conjugate(e: float) -> float:
    """e' with 1/e + 1/e' = 1 on [1, inf]."""
    if math.isnan(e) or e < 1:
        raise PreconditionError(f"conjugate exponent undefined for {e} < 1")
    if e == 1:
        return math.inf
    if math.isinf(e):
        return 1.0
    return e / (e - 1.0)


def conjugate_array(e: np.ndarray) -> np.ndarray:
    e = np.asarray(e, dtype=float)
    if np.any(e < 1) or np.any(np.isnan(e)):
        raise PreconditionError("conjugate exponent undefined below 1")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = e / (e - 1.0)
    out[e == 1] = math.inf
    out[np.isinf(e)] = 1.0
    return out


@dataclass(frozen=True)
class HolderResult:
    pairing: float
    bound: float
    satisfied: bool


def holder_pairing(a, b, r, tol: float = 1e-9) -> HolderResult:
    """sum |a_n b_n| against 4 ||a||_{r_n} ||b||_{r'_n}."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    D = max(a.size, b.size)
    a = np.pad(a, (0, D - a.size))
    b = np.pad(b, (0, D - b.size))
    re = exponent_array(r, D)
    rc = conjugate_array(re)
    pairing = float(np.abs(a * b).sum())
    bound = 4.0 * luxemburg_norm(a, re) * luxemburg_norm(b, rc)
    return HolderResult(pairing, bound, pairing <= bound * (1.0 + tol))
