"""Bernstein numbers of the identity between variable-exponent sequence spaces.

b_n(T) = sup_{dim E = n} inf_{u in E, ||u||_X = 1} ||T u||_Y.  The inner
infimum is minimised numerically over a handful of candidate subspaces, so the
result is an estimate except on constant-exponent coordinate subspaces, where
the flat vector is the known minimiser.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .embedding import classify_pair, exists_c
from .errors import PreconditionError
from .exponents import INF, ExponentSequence, IndexSet, difference_set, gap_values
from .norms import exponent_array, luxemburg_norms

STRATEGIES = ("coordinate", "random", "flat")
FLAT_TOL = 1e-8
ENUMERATION_MAX_N = 8
ENUMERATION_BUDGET = 200_000


class FlatVectorError(RuntimeError):
    """No candidate passed the flatness check."""


def _inv(e):
    e = np.asarray(e, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(np.isinf(e), 0.0, 1.0 / e)


# --------------------------------------------------------------------------
# closed forms


def classical_bernstein(p: float, q: float, n: int) -> float:
    """n^{1/q - 1/p} for constant exponents 0 < p < q <= inf."""
    if not 0 < p < q:
        raise PreconditionError("need 0 < p < q")
    if n < 1:
        raise PreconditionError("n must be >= 1")
    return float(n) ** (float(_inv(q)) - float(_inv(p)))


def _certified_gap(p: ExponentSequence, q: ExponentSequence) -> float:
    """inf_n (q_n - p_n) from the prefixes and constant tails."""
    N = max(p.length, q.length)
    head = (q.values(N) - p.values(N)).min() if N else INF
    kp, kq = p.tail.canonical, q.tail.canonical
    if kq[0] != "const":
        raise PreconditionError("q_+ must be finite (constant tail)")
    if kp[0] != "const":
        return -INF  # p_n unbounded while q_n is bounded
    return float(min(head, kq[1] - kp[1]))


@dataclass(frozen=True)
class UpperBound:
    theorem: float
    proof: float
    alpha: float
    q_plus: float
    p_plus: float


def upper_bound(p: ExponentSequence, q: ExponentSequence, n: int) -> UpperBound:
    """theorem n^{-a/((q_+ - a) q_+)} and proof n^{-a/(p_+ q_+)}, a = inf(q_n - p_n)."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    q_plus = q.p_plus
    if not math.isfinite(q_plus):
        raise PreconditionError("upper bound needs q_+ < inf")
    alpha = _certified_gap(p, q)
    if not alpha > 0:
        raise PreconditionError(f"upper bound needs inf(q_n - p_n) > 0, got {alpha}")
    p_plus = p.p_plus
    theorem = float(n) ** (-alpha / ((q_plus - alpha) * q_plus))
    proof = float(n) ** (-alpha / (p_plus * q_plus))
    return UpperBound(theorem, proof, alpha, q_plus, p_plus)


# --------------------------------------------------------------------------
# inner minimisation


def _ratio(X, es, et):
    return luxemburg_norms(X, et) / luxemburg_norms(X, es)


def minimize_ratio(B: np.ndarray, es: np.ndarray, et: np.ndarray, rng: np.random.Generator,
                   starts: int = 32, step: float = 0.5, tol: float = 1e-9):
    """min over span(B) of ||x||_et / ||x||_es by multistart descent.

    Coefficients live on the Euclidean unit sphere of an orthonormal basis of
    span(B); each sweep tries +-step along every axis and a few random
    directions, halving the step when nothing improves.
    """
    Q = np.linalg.qr(np.asarray(B, dtype=float).T)[0].T
    n = Q.shape[0]
    C = np.vstack([np.ones((1, n)), np.eye(n), rng.standard_normal((max(starts - n - 1, 0), n))])
    C = C[:max(starts, 1)]
    C /= np.linalg.norm(C, axis=1, keepdims=True)
    f = _ratio(C @ Q, es, et)
    h = np.full(C.shape[0], step)
    axes = np.vstack([np.eye(n), -np.eye(n)])
    while np.any(h > tol):
        live = np.flatnonzero(h > tol)
        R = rng.standard_normal((n, n))
        R /= np.linalg.norm(R, axis=1, keepdims=True)
        moves = np.vstack([axes, R, -R])
        cand = C[live, None, :] + h[live, None, None] * moves[None]
        cand /= np.linalg.norm(cand, axis=2, keepdims=True)
        vals = _ratio(cand.reshape(-1, n) @ Q, es, et).reshape(live.size, -1)
        best = vals.argmin(axis=1)
        bv = vals[np.arange(live.size), best]
        up = bv < f[live]
        C[live[up]] = cand[np.flatnonzero(up), best[up]]
        f[live[up]] = bv[up]
        h[live[~up]] *= 0.5
    i = int(f.argmin())
    return float(f[i]), C[i] @ Q


# --------------------------------------------------------------------------
# estimates


@dataclass(frozen=True)
class BernsteinReport:
    n: int
    empirical_estimate: float
    raw_estimate: float
    subspace_descriptor: str
    certified: bool
    upper_bound_theorem: float | None = None
    upper_bound_proof: float | None = None
    shift: int = 0
    candidates: tuple = field(default=())
    fitted: tuple | None = None
    label: str = "estimate"


def _constant_on(e: np.ndarray):
    return float(e[0]) if e.size and np.all(e == e[0]) else None


def _candidate_bases(es, et, n, coords, strategies, rng, num_random, reduce_on=()):
    """Yield (descriptor, basis, certified value or None)."""
    D = es.size
    coords = np.asarray(coords)
    if n > coords.size:
        raise PreconditionError(f"n={n} exceeds the {coords.size} available coordinates")
    gap = np.abs(_inv(es[coords]) - _inv(et[coords]))
    if "coordinate" in strategies:
        picks = {"coordinate:favourable": coords[np.argsort(gap, kind="stable")[:n]],
                 "coordinate:leading": coords[:n]}
        for name, idx in picks.items():
            idx = np.sort(idx)
            B = np.zeros((n, D))
            B[np.arange(n), idx] = 1.0
            s, t = _constant_on(es[idx]), _constant_on(et[idx])
            cert = None
            if s is not None and t is not None:
                cert = float(n) ** min(0.0, float(_inv(t)) - float(_inv(s)))
            yield f"{name}{idx.tolist()}", B, cert
    if "random" in strategies:
        for j in range(num_random):
            B = np.zeros((n + len(reduce_on), D))
            B[:, coords] = rng.standard_normal((B.shape[0], coords.size))
            if len(reduce_on):
                B[:, list(reduce_on)] = rng.standard_normal((B.shape[0], len(reduce_on)))
                B = np.array(gaussian_reduce(list(B), list(reduce_on)))
            yield f"random:{j}", B, None
    if "flat" in strategies:
        groups = np.array_split(coords, n)
        B = np.zeros((n, D))
        for i, g in enumerate(groups):
            B[i, g] = 1.0
        yield "flat:blocks", B, None


def _estimate(es, et, n, coords, strategies, seed, starts, num_random, reduce_on=()):
    rng = np.random.default_rng(seed)
    rows = []
    for desc, B, cert in _candidate_bases(es, et, n, coords, strategies, rng, num_random,
                                          reduce_on):
        if cert is not None:
            rows.append((cert, desc, True))
            continue
        val, _ = minimize_ratio(B, es, et, rng, starts=starts)
        rows.append((val, desc, False))
    # max with lexicographic tie-break on the descriptor
    best = max(rows, key=lambda r: (r[0], [-ord(ch) for ch in r[1]]))
    return best, tuple((d, v) for v, d, _ in rows)


def bernstein_estimate(p, q, n: int, D: int, strategies=STRATEGIES, seed: int = 0,
                       starts: int = 32, num_random: int = 4) -> BernsteinReport:
    """Estimate b_n of l_{p_n} -> l_{q_n} truncated to D coordinates."""
    if not 1 <= n <= D:
        raise PreconditionError("need 1 <= n <= D")
    es, et = exponent_array(p, D), exponent_array(q, D)
    (val, desc, cert), cands = _estimate(es, et, n, np.arange(D), strategies, seed, starts,
                                         num_random)
    thm = prf = None
    if isinstance(p, ExponentSequence) and isinstance(q, ExponentSequence):
        try:
            ub = upper_bound(p, q, n)
            thm, prf = ub.theorem, ub.proof
        except PreconditionError:
            pass
    return BernsteinReport(n, val, val, desc, cert, thm, prf, 0, cands,
                           label="certified" if cert else "estimate")


def bernstein_sweep(p, q, ns, D: int, **kw) -> list:
    """Estimates over n with a running-min envelope (b_n is nonincreasing)."""
    out, env = [], INF
    for n in ns:
        r = bernstein_estimate(p, q, n, D, **kw)
        env = min(env, r.raw_estimate)
        out.append(BernsteinReport(r.n, env, r.raw_estimate, r.subspace_descriptor, r.certified,
                                   r.upper_bound_theorem, r.upper_bound_proof, r.shift,
                                   r.candidates, label=r.label))
    return out


def fit_decay(estimates) -> tuple:
    """Least-squares (C, beta) for log b_n = log C - beta log n."""
    pts = [(float(n), float(b)) for n, b in estimates]
    if len(pts) < 3:
        raise PreconditionError("need at least 3 points")
    if any(n <= 0 or b <= 0 for n, b in pts):
        raise PreconditionError("values must be positive")
    x = np.log([n for n, _ in pts])
    y = np.log([b for _, b in pts])
    slope, icpt = np.polyfit(x, y, 1)
    return float(math.exp(icpt)), float(-slope)


# --------------------------------------------------------------------------
# linear algebra helpers


def gaussian_reduce(basis, k) -> list:
    """Eliminate coordinates with partial pivoting; the survivors vanish there.

    k is either a count (coordinates 1..k) or an explicit list of 0-based
    coordinates to kill.
    """
    R = np.array([np.asarray(b, dtype=float) for b in basis])
    cols = list(range(k)) if isinstance(k, (int, np.integer)) else list(k)
    if len(cols) == 0:
        return [r.copy() for r in R]
    if R.shape[0] < len(cols) + 1:
        raise PreconditionError("need more basis vectors than eliminated coordinates")
    scale = np.abs(R).max()
    alive = list(range(R.shape[0]))
    for j in cols:
        piv = max(alive, key=lambda i: abs(R[i, j]))
        if abs(R[piv, j]) <= 1e-12 * scale:
            raise PreconditionError(f"degenerate basis: no pivot in coordinate {j + 1}")
        alive.remove(piv)
        for i in alive:
            R[i] -= (R[i, j] / R[piv, j]) * R[piv]
            R[i, j] = 0.0
    return [R[i] for i in alive]


def _flat_count(x: np.ndarray, tol: float) -> int:
    m = np.abs(x).max()
    return int(np.sum(np.abs(x) >= (1.0 - tol) * m)) if m > 0 else 0


def _enumerate_flat(B: np.ndarray, n: int, tol: float, budget: int):
    m, D = B.shape
    subsets = list(itertools.combinations(range(D), n))
    signs = np.array([(1.0,) + s for s in itertools.product((1.0, -1.0), repeat=n - 1)])
    if len(subsets) * len(signs) > budget:
        return None
    for K in subsets:
        M = B[:, list(K)].T  # n x m system: sum_j c_j B[j, k_i] = s_i
        if abs(np.linalg.det(M)) < 1e-14:
            continue
        Cs = np.linalg.solve(M, signs.T).T
        X = Cs @ B
        ok = np.abs(X).max(axis=1) <= 1.0 + tol
        for i in np.flatnonzero(ok):
            if _flat_count(X[i], tol) >= n:
                return X[i]
    return None


def _lp_flat(B: np.ndarray, n: int, tol: float, rng: np.random.Generator, tries: int = 20):
    """Vertex of {c : |c B|_inf <= 1}; a vertex has >= dim active coordinates."""
    m, D = B.shape
    A = np.vstack([B.T, -B.T])
    for _ in range(tries):
        res = linprog(rng.standard_normal(m), A_ub=A, b_ub=np.ones(2 * D),
                      bounds=[(None, None)] * m, method="highs-ds")
        if res.status == 0:
            x = res.x @ B
            if _flat_count(x, tol) >= n:
                return x
    return None


def flat_vector(basis, n: int, flat_tol: float = FLAT_TOL, seed: int = 0,
                budget: int = ENUMERATION_BUDGET) -> np.ndarray:
    """Vector in span(basis) whose max modulus is attained at >= n coordinates."""
    B = np.array([np.asarray(b, dtype=float) for b in basis])
    if B.ndim != 2 or B.shape[0] < 1:
        raise PreconditionError("basis must be a nonempty list of equal-length vectors")
    if np.linalg.matrix_rank(B) < B.shape[0]:
        raise PreconditionError("basis is linearly dependent")
    if n > B.shape[0]:
        raise PreconditionError("n exceeds the dimension of the span")
    x = None
    if B.shape[0] == n and n <= ENUMERATION_MAX_N:
        x = _enumerate_flat(B, n, flat_tol, budget)
    if x is None:
        x = _lp_flat(B, n, flat_tol, np.random.default_rng(seed))
    if x is None or _flat_count(x, flat_tol) < n:
        raise FlatVectorError(f"no vector with {n} flat coordinates found")
    return x


# --------------------------------------------------------------------------
# singularity


@dataclass(frozen=True)
class SingularityVerdict:
    kind: str  # 'not_strictly_singular' | 'finitely_strictly_singular' | 'undecided'
    subset: IndexSet | None = None
    c: float | None = None
    beta: float | None = None
    note: str = ""


def _explicit_sup_r(p, q, A: IndexSet) -> float:
    idx = A.enumerate(A.tail_start - 1) if A.tail_start else np.array([], dtype=int)
    if idx.size == 0:
        return 0.0
    return float(gap_values(p.values_at(idx), q.values_at(idx)).max())


def singularity_classify(p: ExponentSequence, q: ExponentSequence) -> SingularityVerdict:
    """Strict / finite strict singularity of id: l_{p_n} -> l_{q_n}."""
    verdict = classify_pair(p, q)
    if verdict.forward.status != "holds":
        return SingularityVerdict("undecided", note=f"forward embedding {verdict.forward.status}")
    unequal = difference_set(p, q, "unequal")
    if unequal.is_empty():
        return SingularityVerdict("undecided", note="p = q: identity, not applicable")
    if unequal.tail_member is False:
        eq = IndexSet(lambda n: ~np.asarray(unequal.predicate(n), dtype=bool), True,
                      unequal.tail_start, True, None, "{p=q}")
        return SingularityVerdict("not_strictly_singular", eq, note="p_n = q_n on an infinite set")
    greater = difference_set(p, q, "greater")
    if greater.tail_member:
        return SingularityVerdict("not_strictly_singular", greater,
                                  note="q_n < p_n on an infinite set; norms agree there")
    A = difference_set(p, q, "less")
    if A.tail_member is None or A.gap is None:
        return SingularityVerdict("undecided", note="no tail model for {p<q}")
    if A.gap.kind in ("log", "superlog"):
        e = exists_c(p, q, A)
        if e.answer == "yes":
            return SingularityVerdict("not_strictly_singular", A, e.c,
                                      note=f"{A.gap.kind} growth of r_n")
        return SingularityVerdict("undecided", note=e.reason)
    # bounded r_n on the tail of {p<q}
    K_r = max(A.gap.sup, _explicit_sup_r(p, q, A))
    if p.p_minus == p.p_plus and q.p_minus == q.p_plus:
        beta = float(_inv(p.p_plus) - _inv(q.p_plus))
        return SingularityVerdict("finitely_strictly_singular", A, beta=beta,
                                  note="constant exponents: classical rate")
    p_plus = p.p_plus
    if not math.isfinite(p_plus) or not math.isfinite(K_r):
        return SingularityVerdict("undecided", note="p_+ or sup r_n infinite")
    alpha = p.declared_inf ** 2 / K_r
    beta = alpha / (p_plus * (p_plus + alpha))
    return SingularityVerdict("finitely_strictly_singular", A, beta=beta,
                              note=f"alpha = p_-^2/sup r_n = {alpha:.6g}")


def reversed_bn_estimate(p: ExponentSequence, q: ExponentSequence, n: int, D: int,
                         strategies=STRATEGIES, seed: int = 0, starts: int = 32,
                         num_random: int = 4) -> BernsteinReport:
    """Estimate b_n of l_{q_n} -> l_{p_n} when {p<q} is finite.

    Each candidate subspace is cut down by Gaussian elimination on the k
    coordinates of {p<q}; the estimate is taken on the (n-k)-dimensional rest.
    """
    if classify_pair(p, q).backward.status != "holds":
        raise PreconditionError("reverse embedding does not hold")
    A = difference_set(p, q, "less")
    if not A.is_finite:
        raise PreconditionError("{p<q} must be finite")
    killed = [int(i) - 1 for i in A.members() if i <= D]
    k = len(killed)
    if not 1 <= n <= D or n - k < 1:
        raise PreconditionError(f"need k < n <= D (k = {k})")
    es, et = exponent_array(q, D), exponent_array(p, D)
    coords = np.setdiff1d(np.arange(D), killed)
    (val, desc, cert), cands = _estimate(es, et, n - k, coords, strategies, seed, starts,
                                         num_random, reduce_on=killed)
    return BernsteinReport(n, val, val, desc, cert, shift=k, candidates=cands,
                           label="certified" if cert else "estimate")
