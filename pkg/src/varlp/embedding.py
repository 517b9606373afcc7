"""Embedding and equivalence decisions between l_{p_n} and l_{q_n}.

The backward embedding l_{q_n} -> l_{p_n} holds iff some 0 < c < 1 makes
M = sum_{n : p_n < q_n} c^{r_n} finite, r_n = 1/(1/p_n - 1/q_n).  Tail models
make that existence question exact; everything else is bookkeeping of the
explicit constants.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundViolation, PreconditionError
from .exponents import (
    INFINITE,
    MAX_EXPLICIT,
    ExponentSequence,
    IndexSet,
    difference_set,
    gap_values,
)
from .norms import luxemburg_norms
from .sampling import sample_sequences

GRID = tuple(2.0 ** -k for k in range(1, 21))
DIVERGENCE_THRESHOLD = 1e6


@dataclass(frozen=True)
class CriterionResult:
    c: float
    D: int
    partial_sum: float
    tail_verdict: str  # 'convergent' | 'divergent' | 'undecided'
    tail_bound: float | None = None
    M: float | None = None


@dataclass(frozen=True)
class ExistsC:
    answer: str  # 'yes' | 'no' | 'undecided'
    c: float | None = None
    M: float | None = None
    reason: str = ""
    grid: dict = field(default_factory=dict)


def _terms(p, q, idx: np.ndarray, c: float) -> np.ndarray:
    r = gap_values(p.values_at(idx), q.values_at(idx))
    with np.errstate(under="ignore"):
        return np.exp(r * math.log(c))


def _check_subset(p, q, idx):
    if idx.size and np.any(p.values_at(idx) >= q.values_at(idx)):
        bad = idx[p.values_at(idx) >= q.values_at(idx)][0]
        raise PreconditionError(f"index {bad} has p_n >= q_n; A must lie in {{p_n < q_n}}")


def _explicit_sum(p, q, A: IndexSet, c: float, lo: int, hi: int) -> float:
    """Exact sum of c^{r_n} over members of A in [lo, hi]."""
    total = 0.0
    for start in range(lo, hi + 1, 1 << 20):
        n = np.arange(start, min(hi, start + (1 << 20) - 1) + 1)
        idx = n[np.asarray(A.predicate(n), dtype=bool)]
        _check_subset(p, q, idx)
        total += float(_terms(p, q, idx, c).sum())
    return total


def criterion_sum(p: ExponentSequence, q: ExponentSequence, c: float, A: IndexSet,
                  D: int) -> CriterionResult:
    """Partial sum over A up to D plus a certified tail verdict."""
    if not 0 < c < 1:
        raise PreconditionError("c must lie in (0, 1)")
    if D < 1:
        raise PreconditionError("D must be >= 1")
    partial = _explicit_sum(p, q, A, c, 1, D)
    if A.tail_member is None:
        return CriterionResult(c, D, partial, "undecided")
    # members strictly between D and the uniform tail are summed exactly
    stop = A.tail_start - 1
    if stop - D > MAX_EXPLICIT:
        return CriterionResult(c, D, partial, "undecided")
    middle = _explicit_sum(p, q, A, c, D + 1, stop) if stop > D else 0.0
    if not A.tail_member:
        return CriterionResult(c, D, partial, "convergent", middle, partial + middle)
    if A.gap is None:
        return CriterionResult(c, D, partial, "undecided")
    if not A.gap.converges(c):
        return CriterionResult(c, D, partial, "divergent")
    bound = A.gap.tail_bound(c, max(D + 1, A.tail_start))
    if not math.isfinite(bound):
        return CriterionResult(c, D, partial, "undecided")
    return CriterionResult(c, D, partial, "convergent", middle + bound, partial + middle + bound)


def exists_c(p: ExponentSequence, q: ExponentSequence, A: IndexSet,
             D_grid: int = 10_000) -> ExistsC:
    """Is there 0 < c < 1 with sum_{n in A} c^{r_n} finite?"""
    if A.is_finite:
        res = criterion_sum(p, q, 0.5, A, max(1, A.tail_start - 1))
        return ExistsC("yes", 0.5, res.M, "finite set")
    if A.tail_member and A.gap is not None:
        g = A.gap
        if g.kind == "bounded":
            return ExistsC("no", reason=f"r_n bounded by {g.sup:.6g} on an infinite set")
        c = math.exp(-2.0 / g.slope) if g.kind == "log" else 0.5
        res = criterion_sum(p, q, c, A, max(1, A.tail_start - 1))
        if res.tail_verdict == "convergent":
            return ExistsC("yes", c, res.M, f"{g.kind} growth of r_n")
        return ExistsC("undecided", reason="tail bound not certified")
    # no tail information: grid of partial sums, reported but never trusted
    grid = {}
    for c in GRID:
        grid[c] = criterion_sum(p, q, c, A, D_grid).partial_sum
    diverging = all(v > DIVERGENCE_THRESHOLD for v in grid.values())
    reason = "partial sums exceed threshold on the whole grid" if diverging else "no tail model"
    return ExistsC("undecided", reason=reason, grid=grid)


# --------------------------------------------------------------------------
# constants


def embedding_constant(p_minus: float, c: float, M: float, regime: str,
                       pointwise: float = 1.0) -> float:
    """Closed-form bound on the norm of l_{q_n} -> l_{p_n}.

    finite_q: 4 R/c;  mixed_q: 5 2^{1/p_-} R/c;
    general: 2^{1/p_-}((5 2^{1/p_-} + 1) R/c + P), with R = max(1, M)^{1/p_-}
    and P the constant of the pointwise-ordered part (1 unless infinite
    target exponents meet finite source exponents above 1).
    """
    if not 0 < c < 1:
        raise PreconditionError("c must lie in (0, 1)")
    if M < 0:
        raise PreconditionError("M must be nonnegative")
    R = max(1.0, M) ** (1.0 / p_minus)
    two = 2.0 ** (1.0 / p_minus)
    if regime == "finite_q":
        return 4.0 * R / c
    if regime == "mixed_q":
        return 5.0 * two * R / c
    if regime == "general":
        return two * ((5.0 * two + 1.0) * R / c + pointwise)
    raise PreconditionError(f"unknown regime {regime!r}")


@dataclass(frozen=True)
class LinftyRelation:
    coincides: bool
    lower: float = 1.0
    upper: float | None = None
    c: float | None = None
    M: float | None = None
    reason: str = ""


def linfty_relation(p: ExponentSequence, c: float | None = None) -> LinftyRelation:
    """Does l_{p_n} coincide with l_inf?  If so, ||a||_inf <= ||a|| <= upper ||a||_inf."""
    A = p.finite_set()
    if A.is_empty():
        return LinftyRelation(True, 1.0, 1.0, 1.0, 0.0, "all exponents infinite")
    e = exists_c(p, INFINITE, A)
    if e.answer == "no":
        return LinftyRelation(False, reason=e.reason)
    if e.answer == "undecided":
        return LinftyRelation(False, reason="undecided: " + e.reason)
    if c is None:
        c, M = e.c, e.M
    else:
        res = criterion_sum(p, INFINITE, c, A, max(1, A.tail_start - 1))
        if res.tail_verdict != "convergent":
            return LinftyRelation(False, reason=f"sum c^p_n not certified finite at c={c}")
        M = res.M
    upper = max(1.0, M) ** (1.0 / p.declared_inf) / c
    return LinftyRelation(True, 1.0, upper, c, M)


# --------------------------------------------------------------------------
# pair classification


@dataclass(frozen=True)
class DirectionVerdict:
    status: str  # 'holds' | 'fails' | 'undecided'
    constant: float | None = None
    c: float | None = None
    M: float | None = None
    regime: str | None = None
    witness: dict | None = None
    reason: str = ""


@dataclass(frozen=True)
class EmbeddingVerdict:
    forward: DirectionVerdict   # l_{p_n} -> l_{q_n}
    backward: DirectionVerdict  # l_{q_n} -> l_{p_n}
    classification: str


def compose_classification(forward: str, backward: str) -> str:
    if "undecided" in (forward, backward):
        return "undecided"
    table = {
        ("holds", "holds"): "equivalent",
        ("holds", "fails"): "strict_forward",
        ("fails", "holds"): "strict_backward",
        ("fails", "fails"): "incomparable",
    }
    return table[(forward, backward)]


def _covers_everything(A: IndexSet) -> bool:
    if not A.tail_member:
        return False
    head = A.enumerate(A.tail_start - 1)
    return head.size == A.tail_start - 1


def _bump(P: float) -> float:
    """max_{0<=x<=1} x - x^P: the excess a sup term can add over a P-power term."""
    if P <= 1:
        return 0.0
    if math.isinf(P):
        return 1.0
    return P ** (-1.0 / (P - 1.0)) * (1.0 - 1.0 / P)


def pointwise_constant(lo: ExponentSequence, hi: ExponentSequence) -> float:
    """C with ||a||_lo <= C ||a||_hi for a supported on {lo_n >= hi_n}.

    Termwise |x|^lo <= |x|^hi for |x| <= 1, except where lo_n = inf: the sup
    term |x| can exceed |x|^{hi_n} when hi_n > 1.  That raises the modular to
    at most 1 + kappa, kappa = max_x (x - x^P) with P = sup of such hi_n, and
    rescaling by (1 + kappa)^{1/min(1, lo_-)} brings it back to 1.  The bound
    is attained, e.g. lo = (inf, 1), hi = (2, 1), a = (1/2, 3/4) gives 5/4.
    """
    J = difference_set(hi, lo, "less")

    def keep(n):
        n = np.asarray(n)
        return (np.asarray(J.predicate(n), dtype=bool) & np.isinf(lo.values_at(n))
                & (hi.values_at(n) > 1))

    P = 0.0
    if J.tail_member is None:
        return 2.0 ** (1.0 / min(1.0, lo.declared_inf))  # kappa <= 1 always
    head = np.arange(1, J.tail_start)
    if head.size:
        sel = head[keep(head)]
        if sel.size:
            P = float(hi.values_at(sel).max())
    if J.tail_member and lo.tail.canonical[0] == "inf":
        P = max(P, hi.tail.sup_from(J.tail_start))
    return (1.0 + _bump(P)) ** (1.0 / min(1.0, lo.declared_inf))


def direction_verdict(lo: ExponentSequence, hi: ExponentSequence) -> DirectionVerdict:
    """Decide l_{hi} -> l_{lo}, driven by A = {lo_n < hi_n}."""
    A = difference_set(lo, hi, "less")
    ptw = pointwise_constant(lo, hi)
    if A.is_empty():
        return DirectionVerdict("holds", ptw, reason="lo_n >= hi_n everywhere")
    e = exists_c(lo, hi, A)
    if e.answer == "no":
        branch = "block" if hi.tail.canonical[0] != "inf" else "linfty"
        return DirectionVerdict("fails", witness={"kind": branch}, reason=e.reason)
    if e.answer == "undecided":
        return DirectionVerdict("undecided", reason=e.reason)
    if _covers_everything(A):
        regime = "finite_q" if hi.all_finite() else "mixed_q"
    else:
        regime = "general"
    pm = min(lo.declared_inf, hi.declared_inf)
    return DirectionVerdict("holds", embedding_constant(pm, e.c, e.M, regime, ptw), e.c, e.M,
                            regime, reason=e.reason)


def classify_pair(p: ExponentSequence, q: ExponentSequence) -> EmbeddingVerdict:
    forward = direction_verdict(q, p)
    backward = direction_verdict(p, q)
    return EmbeddingVerdict(forward, backward,
                            compose_classification(forward.status, backward.status))


# --------------------------------------------------------------------------
# numeric validation


@dataclass(frozen=True)
class EmpiricalCheck:
    max_ratio: float
    bound: float
    samples: int
    ok: bool


def verify_embedding_empirically(p, q, bound: float, samples: int = 200, D: int = 50,
                                 seed: int = 0, strict: bool = True) -> EmpiricalCheck:
    """max ||a||_{p_n} / ||a||_{q_n} over random finite sequences.

    Raises BoundViolation when the ratio exceeds bound (1 + 1e-9) and strict.
    """
    if samples < 1:
        raise PreconditionError("samples must be >= 1")
    X = sample_sequences(seed, samples, D)
    ratio = luxemburg_norms(X, p) / luxemburg_norms(X, q)
    worst = float(ratio.max())
    ok = worst <= bound * (1.0 + 1e-9)
    if strict and not ok:
        raise BoundViolation(f"observed ratio {worst} exceeds bound {bound}")
    return EmpiricalCheck(worst, bound, samples, ok)
