"""Exponent sequences p_n in (0, inf] with a finite prefix and a symbolic tail.

Infinite exponents are ``math.inf``; reciprocals follow 1/inf = 0.  The four
tail families (constant, affine-in-log, power, all-infinite) are closed under
the comparisons needed to decide where ``p_n < q_n`` eventually and how fast
the gap reciprocal ``r_n = 1/(1/p_n - 1/q_n)`` grows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy import special

from .errors import PreconditionError, UndecidableTail

INF = math.inf

# Indices below the uniform-tail start are enumerated explicitly.
MAX_EXPLICIT = 10_000_000


# --------------------------------------------------------------------------
# Tail families


class TailModel:
    """Governs p_n for indices past the explicit prefix."""

    def values(self, n: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def value(self, n: int) -> float:
        raise NotImplementedError

    def inf_from(self, start: int) -> float:
        raise NotImplementedError

    def sup_from(self, start: int) -> float:
        raise NotImplementedError

    @property
    def canonical(self) -> tuple:
        raise NotImplementedError

    @property
    def is_constant(self) -> bool:
        return self.canonical[0] in ("const", "inf")


@dataclass(frozen=True)
class Constant(TailModel):
    value_: float

    def __post_init__(self):
        if not self.value_ > 0:
            raise PreconditionError(f"constant tail must be positive, got {self.value_}")

    def values(self, n):
        return np.full(np.shape(n), float(self.value_))

    def value(self, n):
        return float(self.value_)

    def inf_from(self, start):
        return float(self.value_)

    def sup_from(self, start):
        return float(self.value_)

    @property
    def canonical(self):
        return ("inf",) if math.isinf(self.value_) else ("const", float(self.value_))


@dataclass(frozen=True)
class Infinite(TailModel):
    """All exponents beyond the prefix are infinite."""

    def values(self, n):
        return np.full(np.shape(n), INF)

    def value(self, n):
        return INF

    def inf_from(self, start):
        return INF

    def sup_from(self, start):
        return INF

    @property
    def canonical(self):
        return ("inf",)


@dataclass(frozen=True)
class AffineLog(TailModel):
    """p_n = a ln n + b, a >= 0."""

    a: float
    b: float

    def __post_init__(self):
        if self.a < 0:
            raise PreconditionError("AffineLog slope must be nonnegative")

    def values(self, n):
        return self.a * np.log(np.asarray(n, dtype=float)) + self.b

    def value(self, n):
        return self.a * math.log(n) + self.b

    def inf_from(self, start):
        return self.value(start)

    def sup_from(self, start):
        return INF if self.a > 0 else float(self.b)

    @property
    def canonical(self):
        if self.a == 0:
            return ("const", float(self.b))
        return ("log", float(self.a), float(self.b))


@dataclass(frozen=True)
class Power(TailModel):
    """p_n = a n^gamma, a > 0, gamma > 0."""

    a: float
    gamma: float

    def __post_init__(self):
        if not (self.a > 0 and self.gamma > 0):
            raise PreconditionError("Power tail needs a > 0 and gamma > 0")

    def values(self, n):
        with np.errstate(over="ignore"):
            return self.a * np.asarray(n, dtype=float) ** self.gamma

    def value(self, n):
        try:
            return self.a * float(n) ** self.gamma
        except OverflowError:
            return INF

    def inf_from(self, start):
        return self.value(start)

    def sup_from(self, start):
        return INF

    @property
    def canonical(self):
        return ("pow", float(self.a), float(self.gamma))


# --------------------------------------------------------------------------
# Exponent sequences


@dataclass(frozen=True)
class ExponentSequence:
    """p_n = prefix[n-1] for n <= len(prefix), tail model afterwards.

    ``declared_inf`` is the user's p_-; it is validated, never inferred.
    """

    prefix: tuple
    tail: TailModel
    declared_inf: float
    declared_sup: float = INF

    def __post_init__(self):
        prefix = tuple(float(v) for v in self.prefix)
        object.__setattr__(self, "prefix", prefix)
        if not self.declared_inf > 0:
            raise PreconditionError(f"declared_inf must be > 0, got {self.declared_inf}")
        if self.declared_sup < self.declared_inf:
            raise PreconditionError("declared_sup < declared_inf")
        for i, v in enumerate(prefix, start=1):
            if math.isnan(v) or v <= 0:
                raise PreconditionError(f"p_{i} = {v} is not in (0, inf]")
            if v < self.declared_inf:
                raise PreconditionError(f"p_{i} = {v} below declared_inf {self.declared_inf}")
            if v > self.declared_sup:
                raise PreconditionError(f"p_{i} = {v} above declared_sup {self.declared_sup}")
        start = len(prefix) + 1
        if self.tail.inf_from(start) < self.declared_inf:
            raise PreconditionError("tail model drops below declared_inf")
        if self.tail.sup_from(start) > self.declared_sup:
            raise PreconditionError("tail model exceeds declared_sup")

    @classmethod
    def constant(cls, v: float) -> "ExponentSequence":
        return cls((), Constant(v), declared_inf=v, declared_sup=v)

    @classmethod
    def infinite(cls) -> "ExponentSequence":
        return cls((), Infinite(), declared_inf=INF)

    @property
    def length(self) -> int:
        return len(self.prefix)

    def __call__(self, n: int) -> float:
        return eval_exponent(self, n)

    def values(self, D: int) -> np.ndarray:
        """p_1..p_D as a float array."""
        return self.values_at(np.arange(1, D + 1))

    def values_at(self, n: np.ndarray) -> np.ndarray:
        n = np.asarray(n)
        out = np.empty(n.shape, dtype=float)
        inside = n <= self.length
        if inside.any():
            out[inside] = np.asarray(self.prefix)[n[inside] - 1]
        if (~inside).any():
            out[~inside] = self.tail.values(n[~inside])
        return out

    @property
    def p_minus(self) -> float:
        """Actual infimum from prefix and tail (>= declared_inf)."""
        vals = list(self.prefix) + [self.tail.inf_from(self.length + 1)]
        return min(vals)

    @property
    def p_plus(self) -> float:
        vals = list(self.prefix) + [self.tail.sup_from(self.length + 1)]
        return max(vals)

    def finite_set(self) -> "IndexSet":
        """F_p = {n : p_n < inf}, carrying the growth of p_n on its tail."""
        A = difference_set(self, INFINITE, "less")
        return IndexSet(A.predicate, A.infinite, A.tail_start, A.tail_member, A.gap, "F_p")

    def all_finite(self) -> bool:
        return self.tail.canonical[0] != "inf" and all(math.isfinite(v) for v in self.prefix)


INFINITE = ExponentSequence((), Infinite(), declared_inf=INF)


def eval_exponent(p: ExponentSequence, n: int) -> float:
    if n < 1:
        raise PreconditionError("indices start at 1")
    if n <= p.length:
        return p.prefix[n - 1]
    return p.tail.value(n)


def _recip(x):
    with np.errstate(divide="ignore"):
        return np.where(np.isinf(x), 0.0, 1.0 / np.asarray(x, dtype=float))


def gap_values(pv: np.ndarray, qv: np.ndarray) -> np.ndarray:
    """Vectorised 1/|1/p - 1/q| (inf where the exponents agree)."""
    d = np.abs(_recip(pv) - _recip(qv))
    with np.errstate(divide="ignore"):
        return np.where(d == 0, INF, 1.0 / np.where(d == 0, 1.0, d))


def gap_reciprocal(p: ExponentSequence, q: ExponentSequence, n: int) -> float:
    """r_n = 1/(1/p_n - 1/q_n), using 1/inf = 0.

    For the mirrored set (q_n < p_n) the absolute value is taken, so r_n is
    always in (0, inf].
    """
    pn, qn = eval_exponent(p, n), eval_exponent(q, n)
    if pn == qn:
        raise PreconditionError(f"p_{n} == q_{n}: gap undefined")
    d = abs((0.0 if math.isinf(pn) else 1.0 / pn) - (0.0 if math.isinf(qn) else 1.0 / qn))
    return 1.0 / d


# --------------------------------------------------------------------------
# Index sets


@dataclass(frozen=True)
class IndexSet:
    """A set of positive integers given by a vectorised predicate.

    When ``tail_member`` is known, membership for every n >= ``tail_start`` is
    uniform (all in or all out); ``gap`` then describes r_n on that tail.
    """

    predicate: Callable[[np.ndarray], np.ndarray]
    infinite: bool | None = None
    tail_start: int | None = None
    tail_member: bool | None = None
    gap: "GapTail | None" = None
    label: str = ""

    def enumerate(self, D: int) -> np.ndarray:
        """Members <= D, sorted and duplicate-free."""
        if D < 1:
            return np.zeros(0, dtype=np.int64)
        out = []
        for lo in range(1, D + 1, 1 << 20):
            n = np.arange(lo, min(D, lo + (1 << 20) - 1) + 1)
            out.append(n[np.asarray(self.predicate(n), dtype=bool)])
        return np.concatenate(out)

    def __contains__(self, n: int) -> bool:
        return bool(self.predicate(np.array([n]))[0])

    @property
    def is_finite(self) -> bool:
        return self.tail_member is False

    def members(self) -> np.ndarray:
        """All members of a finite set."""
        if not self.is_finite:
            raise PreconditionError("members() needs a set known to be finite")
        return self.enumerate(self.tail_start - 1)

    def is_empty(self) -> bool:
        return self.is_finite and self.members().size == 0

    def restrict(self, other: "IndexSet") -> "IndexSet":
        """Intersection; keeps this set's gap description."""
        a, b = self, other

        def pred(n):
            return np.logical_and(a.predicate(n), b.predicate(n))

        if a.tail_member is None or b.tail_member is None:
            return IndexSet(pred, label=f"{a.label}&{b.label}")
        member = a.tail_member and b.tail_member
        start = max(a.tail_start, b.tail_start)
        gap = a.gap if member else None
        return IndexSet(pred, infinite=member, tail_start=start, tail_member=member,
                        gap=gap, label=f"{a.label}&{b.label}")

    @classmethod
    def from_indices(cls, indices: Iterable[int], label: str = "") -> "IndexSet":
        idx = np.unique(np.asarray(list(indices), dtype=np.int64))
        if idx.size and idx[0] < 1:
            raise PreconditionError("indices start at 1")
        top = int(idx[-1]) + 1 if idx.size else 1

        def pred(n):
            return np.isin(np.asarray(n), idx)

        return cls(pred, infinite=False, tail_start=top, tail_member=False, label=label)

    @classmethod
    def naturals(cls) -> "IndexSet":
        return cls(lambda n: np.ones(np.shape(n), dtype=bool), infinite=True,
                   tail_start=1, tail_member=True, label="N")


# --------------------------------------------------------------------------
# Tail comparison and growth of the gap reciprocal


@dataclass(frozen=True)
class GapTail:
    """Growth of r_n for n >= start on a set where lo_n < hi_n.

    kind: 'bounded' (sup r_n < inf), 'log' (r_n = slope*ln n + O(1)) or
    'superlog'.  ``minorant`` is a certified lower bound valid for n >= start:
    ('log', s, t): s ln n + t;  ('pow', a, g): a n^g;  ('logsq', a, b, e):
    (a ln n + b)^2 / e.
    """

    kind: str
    start: int
    slope: float = 0.0
    minorant: tuple = ()
    sup: float = INF

    def converges(self, c: float) -> bool:
        if self.kind == "bounded":
            return False
        if self.kind == "superlog":
            return True
        return self.slope * math.log(1.0 / c) > 1.0

    def tail_bound(self, c: float, start: int) -> float:
        """Upper bound for sum_{n >= start} c^{r_n}; inf when not certified."""
        start = max(int(start), self.start)
        lam = math.log(1.0 / c)
        kind = self.minorant[0] if self.minorant else None
        if kind == "log":
            _, s, t = self.minorant
            sigma = s * lam
            if sigma <= 1.0:
                return INF
            # decreasing summand: sum_{n>=N} n^-sigma <= N^-sigma + N^{1-sigma}/(sigma-1)
            N = float(start)
            return math.exp(-lam * t) * (N ** -sigma + N ** (1.0 - sigma) / (sigma - 1.0))
        if kind == "pow":
            _, a, g = self.minorant
            k = lam * a
            N = float(start)
            if g >= 1.0:
                # a n^g >= a n: geometric majorant
                return math.exp(-k * N) / (-math.expm1(-k))
            s = 1.0 / g
            integral = s * k ** (-s) * special.gamma(s) * special.gammaincc(s, k * N ** g)
            return math.exp(-k * N ** g) + integral
        if kind == "logsq":
            _, a, b, e = self.minorant
            k = lam / e
            N = float(start)
            W = a * math.log(N) + b
            first = math.exp(-k * W * W)
            # int_{ln N}^inf exp(u - k (a u + b)^2) du, completed square in w = a u + b
            w0 = 1.0 / (2.0 * a * k)
            z = math.sqrt(k) * (W - w0)
            log_pref = -b / a + 1.0 / (4.0 * a * a * k) + 0.5 * math.log(math.pi / k) - math.log(2.0 * a)
            if z > 0:
                log_erfc = math.log(special.erfcx(z)) - z * z
            else:
                log_erfc = math.log(special.erfc(z))
            return first + math.exp(log_pref + log_erfc)
        return INF


def _rank(k: tuple) -> int:
    return {"const": 0, "log": 1, "pow": 2, "inf": 3}[k[0]]


def _tail_fn(k: tuple) -> Callable[[float], float]:
    if k[0] == "const":
        return lambda n: k[1]
    if k[0] == "log":
        return lambda n: k[1] * math.log(n) + k[2]
    if k[0] == "pow":
        return lambda n: k[1] * float(n) ** k[2]
    return lambda n: INF


def _threshold_index(x0: float, T: int) -> int:
    if not math.isfinite(x0) or x0 > 1e15:
        raise UndecidableTail(f"tail comparison settles only past n ~ {x0:.3g}")
    return max(T, int(math.floor(max(x0, 0.0))) + 1)


def _eventual_less(kp: tuple, kq: tuple, T: int) -> int:
    """First index from which P < Q holds for good, where Q grows faster."""
    P, Q = _tail_fn(kp), _tail_fn(kq)
    if kp[0] == "const" and kq[0] == "log":
        x0 = math.exp(min((kp[1] - kq[2]) / kq[1], 700.0))
    elif kp[0] == "const" and kq[0] == "pow":
        x0 = (kp[1] / kq[1]) ** (1.0 / kq[2])
    elif kp[0] == "log" and kq[0] == "pow":
        # Q - P is increasing once a2 g n^g > a1; search from there
        n1 = (kp[1] / (kq[1] * kq[2])) ** (1.0 / kq[2])
        n = _threshold_index(n1, T)
        hi = n
        while Q(hi) - P(hi) <= 0:
            hi *= 2
            if hi > 1e15:
                raise UndecidableTail("log/power tails cross too late")
        lo = n
        if Q(lo) - P(lo) > 0:
            return lo
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if Q(mid) - P(mid) > 0:
                hi = mid
            else:
                lo = mid
        return hi
    else:  # pragma: no cover - guarded by caller
        raise AssertionError((kp, kq))
    N = _threshold_index(x0, T)
    while not P(N) < Q(N):
        N += 1
    return N


def _cross(kp: tuple, kq: tuple, T: int) -> tuple[int, str]:
    """(N, rel): for n >= N the relation between the two tails is uniform."""
    if kp[0] == "inf" and kq[0] == "inf":
        return T, "equal"
    if kp[0] == "inf":
        return T, "greater"
    if kq[0] == "inf":
        return T, "less"
    rp, rq = _rank(kp), _rank(kq)
    if rp < rq:
        return _eventual_less(kp, kq, T), "less"
    if rp > rq:
        return _eventual_less(kq, kp, T), "greater"
    if kp[0] == "const":
        u, v = kp[1], kq[1]
        return T, "equal" if u == v else ("less" if u < v else "greater")
    if kp[0] == "log":
        (_, a1, b1), (_, a2, b2) = kp, kq
        if a1 == a2:
            return T, "equal" if b1 == b2 else ("less" if b1 < b2 else "greater")
        x0 = math.exp(min(-(b2 - b1) / (a2 - a1), 700.0))
        rel = "less" if a2 > a1 else "greater"
    else:
        (_, a1, g1), (_, a2, g2) = kp, kq
        if g1 == g2:
            return T, "equal" if a1 == a2 else ("less" if a1 < a2 else "greater")
        x0 = (a1 / a2) ** (1.0 / (g2 - g1))
        rel = "less" if g2 > g1 else "greater"
    N = _threshold_index(x0, T)
    P, Q = _tail_fn(kp), _tail_fn(kq)
    ok = (lambda n: P(n) < Q(n)) if rel == "less" else (lambda n: P(n) > Q(n))
    while not ok(N):
        N += 1
    return N, rel


def tail_relation(p: ExponentSequence, q: ExponentSequence) -> tuple[int, str]:
    """Index N and relation ('less'|'greater'|'equal') of p_n vs q_n for n >= N."""
    T = max(p.length, q.length) + 1
    return _cross(p.tail.canonical, q.tail.canonical, T)


def gap_tail(lo: ExponentSequence, hi: ExponentSequence, start: int) -> GapTail:
    """Growth class of r_n = 1/(1/lo_n - 1/hi_n) for n >= start, lo_n < hi_n there."""
    kp, kq = lo.tail.canonical, hi.tail.canonical
    if kq[0] == "inf":
        if kp[0] == "const":
            return GapTail("bounded", start, sup=kp[1])
        if kp[0] == "log":
            return GapTail("log", start, slope=kp[1], minorant=("log", kp[1], kp[2]))
        return GapTail("superlog", start, minorant=("pow", kp[1], kp[2]))
    if kp[0] == "const":
        # r = u Q/(Q - u) decreases as Q grows, so the sup sits at the start
        u, Qs = kp[1], _tail_fn(kq)(start)
        return GapTail("bounded", start, sup=u * Qs / (Qs - u))
    if kp[0] == "log":
        _, a1, b1 = kp
        if kq[0] == "log":
            _, a2, b2 = kq
            if a2 == a1:
                e = b2 - b1
                return GapTail("superlog", start, minorant=("logsq", a1, b1, e))
            d, e = a2 - a1, b2 - b1
            s = a1 * a2 / d
            kappa = (a1 * b2 + a2 * b1 - e * s) / d
            rho = b1 * b2 - e * kappa
            u0 = math.log(start)
            t = kappa - abs(rho) / (d * u0 + e)
            return GapTail("log", start, slope=s, minorant=("log", s, t))
        # power upper exponent: r = P + P^2/(Q - P) >= P, same log slope
        return GapTail("log", start, slope=a1, minorant=("log", a1, b1))
    return GapTail("superlog", start, minorant=("pow", kp[1], kp[2]))


def difference_set(p: ExponentSequence, q: ExponentSequence, mode: str) -> IndexSet:
    """{n : p_n < q_n} ('less'), {p_n > q_n} ('greater') or {p_n != q_n} ('unequal').

    Members below the uniform-tail start are enumerated directly; beyond it the
    tail models decide membership for every index at once.
    """
    if mode not in ("less", "greater", "unequal"):
        raise PreconditionError(f"unknown mode {mode!r}")
    N, rel = tail_relation(p, q)
    if N - 1 > MAX_EXPLICIT:
        raise UndecidableTail(f"explicit region up to {N} exceeds cap")
    if mode == "unequal":
        tail_member = rel != "equal"
    else:
        tail_member = rel == mode
    gap = None
    if tail_member and mode == "less":
        gap = gap_tail(p, q, N)
    elif tail_member and mode == "greater":
        gap = gap_tail(q, p, N)

    def pred(n):
        n = np.asarray(n)
        res = np.full(n.shape, tail_member)
        inside = n < N
        if inside.any():
            pv, qv = p.values_at(n[inside]), q.values_at(n[inside])
            if mode == "less":
                res[inside] = pv < qv
            elif mode == "greater":
                res[inside] = pv > qv
            else:
                res[inside] = pv != qv
        return res

    return IndexSet(pred, infinite=tail_member, tail_start=N, tail_member=tail_member,
                    gap=gap, label=f"{mode}(p,q)")
