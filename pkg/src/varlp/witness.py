"""Sequences that certify l_{q_n} is not embedded in l_{p_n}.

Block construction: consecutive index blocks N_k with constants
0 < c_k <= 1/(alpha^k K), alpha = 2^{1/p_-}, chosen so that
sum_{n in N_k} c_k^{r_n} = 1.  Setting a_n = K c_k^{r_n/p_n} gives
q-modular <= sum 2^{-k} <= 1 while every block adds 1 to the p-modular of a/K.

Where both exponent tails are constant a block is a single run of identical
entries, so the witness is stored as atoms (start index, multiplicity,
exponents, log a_n).  Multiplicities are exact Python integers and can be far
beyond anything that could be materialised.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .embedding import exists_c
from .errors import PreconditionError
from .exponents import ExponentSequence, IndexSet, difference_set, gap_values
from .norms import modular

MAX_BLOCK_LEN = 10_000_000
_SLACK = 1e-12  # rounding allowance when filling a block to mass 1


class WitnessHypothesisError(PreconditionError):
    """The divergence hypothesis of the block construction does not hold."""


@dataclass(frozen=True)
class BlockSpec:
    first: int
    last: int
    c: float
    target: float  # 1/(alpha^k K)
    block_sum: float
    group: int = 1


@dataclass(frozen=True)
class WitnessPlan:
    K: float
    alpha: float
    blocks: tuple
    D: int


@dataclass
class Witness:
    starts: list
    counts: list
    p: np.ndarray
    q: np.ndarray
    log_a: np.ndarray
    block: np.ndarray
    plan: WitnessPlan | None = None

    @property
    def D(self) -> int:
        if not self.starts:
            return 0
        return self.starts[-1] + self.counts[-1] - 1

    @property
    def log_counts(self) -> np.ndarray:
        return np.array([math.log(c) for c in self.counts])

    def _log_terms(self, e: np.ndarray, scale: float) -> np.ndarray:
        return self.log_counts + e * (self.log_a - math.log(scale))

    def q_modular(self) -> float:
        """sum a_n^{q_n}."""
        return float(np.exp(self._log_terms(self.q, 1.0)).sum())

    def scaled_p_modular(self, K: float) -> float:
        """sum (a_n/K)^{p_n}."""
        return float(np.exp(self._log_terms(self.p, K)).sum())

    def block_p_modulars(self, K: float) -> np.ndarray:
        """Contribution of each block to sum (a_n/K)^{p_n}."""
        terms = np.exp(self._log_terms(self.p, K))
        nb = int(self.block.max()) + 1 if self.block.size else 0
        return np.bincount(self.block, weights=terms, minlength=nb)

    def scaled(self, eps: float) -> "Witness":
        return Witness(list(self.starts), list(self.counts), self.p.copy(), self.q.copy(),
                       self.log_a + math.log(eps), self.block.copy(), self.plan)

    def dense(self, limit: int = MAX_BLOCK_LEN) -> np.ndarray:
        """Materialise a_1..a_D (zeros off the support)."""
        if self.D > limit:
            raise PreconditionError(f"witness has {self.D} entries, above limit {limit}")
        out = np.zeros(self.D)
        for s, c, la in zip(self.starts, self.counts, self.log_a):
            out[s - 1:s - 1 + c] = math.exp(la)
        return out

    def rows(self):
        """(first index, last index, p_n, q_n, a_n) per atom."""
        for s, c, pe, qe, la in zip(self.starts, self.counts, self.p, self.q, self.log_a):
            yield s, s + c - 1, float(pe), float(qe), math.exp(la)


# --------------------------------------------------------------------------
# index stream


class _Cursor:
    """Walks the members of A in increasing order as chunks or constant runs."""

    def __init__(self, p: ExponentSequence, q: ExponentSequence, A: IndexSet):
        self.p, self.q, self.A = p, q, A
        self.pending = None  # ('chunk', idx) or ('run', start, count|None)
        self.next_n = 1
        self.chunk = 4096
        self.run_tail = (A.tail_member and p.tail.is_constant and q.tail.is_constant)

    def _refill(self):
        N = self.A.tail_start
        if self.next_n < N or (self.A.tail_member and not self.run_tail):
            if self.next_n >= N and not self.A.tail_member:
                return False
            hi = self.next_n + self.chunk - 1
            if self.next_n < N:
                hi = min(hi, N - 1)
            n = np.arange(self.next_n, hi + 1)
            self.next_n = hi + 1
            self.chunk = min(self.chunk * 2, 1 << 20)
            idx = n[np.asarray(self.A.predicate(n), dtype=bool)]
            self.pending = ("chunk", idx) if idx.size else None
            return True
        if self.A.tail_member and self.run_tail and self.next_n >= N:
            self.pending = ("run", self.next_n, None)
            self.next_n = None
            return True
        return False

    def peek(self):
        while self.pending is None:
            if self.next_n is None or not self._refill():
                raise WitnessHypothesisError("index set exhausted before the block sum reached 1")
        return self.pending

    def take_block(self, log_t: float, max_len: int):
        """Consume members until sum t^{r_n} >= 1; return atoms (start, count, p, q, r)."""
        atoms = []
        total = 0.0
        materialised = 0
        while total < 1.0 - _SLACK:
            piece = self.peek()
            if piece[0] == "chunk":
                idx = piece[1]
                pv, qv = self.p.values_at(idx), self.q.values_at(idx)
                r = gap_values(pv, qv)
                with np.errstate(under="ignore"):
                    csum = total + np.cumsum(np.exp(r * log_t))
                hit = np.flatnonzero(csum >= 1.0 - _SLACK)
                take = int(hit[0]) + 1 if hit.size else idx.size
                if materialised + take > max_len:
                    raise WitnessHypothesisError(f"block would exceed {max_len} entries")
                materialised += take
                for j in range(take):
                    atoms.append((int(idx[j]), 1, pv[j], qv[j], r[j]))
                total = float(csum[take - 1])
                rest = idx[take:]
                self.pending = ("chunk", rest) if rest.size else None
            else:
                _, start, count = piece
                pe, qe = self.p(start), self.q(start)
                r = float(gap_values(np.array([pe]), np.array([qe]))[0])
                log_term = r * log_t
                need = (1.0 - total) * math.exp(-log_term)
                m = max(1, int(math.ceil(need * (1.0 - _SLACK))))
                if total + math.exp(math.log(m) + log_term) < 1.0 - _SLACK:
                    m += 1
                if count is not None and m >= count:
                    m = count
                atoms.append((start, m, pe, qe, r))
                total += math.exp(math.log(m) + log_term)
                left = None if count is None else count - m
                self.pending = None if left == 0 else ("run", start + m, left)
                materialised += 1
        return atoms


def _solve_block_constant(log_counts, r, log_t, tol):
    """log c in (-inf, log_t] with sum count * c^r = 1 within tol."""
    def f(lc):
        return logsumexp(log_counts + r * lc)

    target = math.log1p(tol) * 0.5
    if abs(f(log_t)) <= target:
        return log_t
    hi = log_t
    width = 1.0
    lo = hi - width
    while f(lo) > 0:
        width *= 2.0
        lo = hi - width
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        val = f(mid)
        if abs(val) <= target:
            return mid
        if val > 0:
            hi = mid
        else:
            lo = mid
    return mid


def _witness_set(p: ExponentSequence, q: ExponentSequence) -> IndexSet:
    A = difference_set(p, q, "less").restrict(q.finite_set())
    e = exists_c(p, q, A)
    if e.answer != "no":
        raise WitnessHypothesisError(
            f"sum c^r_n diverging for all c is required; exists_c answered {e.answer!r}")
    return A


def _assemble(specs, atoms_per_block, plan_K, alpha):
    starts, counts, ps, qs, las, blk = [], [], [], [], [], []
    for b, (atoms, (la_shift, log_c)) in enumerate(atoms_per_block):
        for s, m, pe, qe, r in atoms:
            starts.append(s)
            counts.append(m)
            ps.append(pe)
            qs.append(qe)
            las.append(la_shift + (r / pe) * log_c)
            blk.append(b)
    D = starts[-1] + counts[-1] - 1 if starts else 0
    plan = WitnessPlan(plan_K, alpha, tuple(specs), D)
    return Witness(starts, counts, np.array(ps), np.array(qs), np.array(las),
                   np.array(blk, dtype=np.int64), plan)


def _build(p, q, schedule, block_tol, max_block_len):
    """schedule: list of (log_t, log_scale, group); a_n = scale * c^{r_n/p_n}."""
    A = _witness_set(p, q)
    cur = _Cursor(p, q, A)
    specs, blocks = [], []
    for log_t, log_scale, group in schedule:
        atoms = cur.take_block(log_t, max_block_len)
        lcnt = np.array([math.log(a[1]) for a in atoms])
        r = np.array([a[4] for a in atoms])
        log_c = _solve_block_constant(lcnt, r, log_t, block_tol)
        bsum = float(np.exp(logsumexp(lcnt + r * log_c)))
        last = atoms[-1][0] + atoms[-1][1] - 1
        specs.append(BlockSpec(atoms[0][0], last, math.exp(log_c), math.exp(log_t), bsum, group))
        blocks.append((atoms, (log_scale, log_c)))
    return specs, blocks


def construct_block_witness(p: ExponentSequence, q: ExponentSequence, K: float,
                            num_blocks: int, block_tol: float = 1e-10,
                            max_block_len: int = MAX_BLOCK_LEN) -> Witness:
    """a with sum a_n^{q_n} <= 1 and sum (a_n/K)^{p_n} = num_blocks (within tolerance)."""
    if K <= 1:
        raise PreconditionError("K must exceed 1")
    if num_blocks < 1:
        raise PreconditionError("num_blocks must be >= 1")
    alpha = 2.0 ** (1.0 / p.declared_inf)
    lK, la = math.log(K), math.log(alpha)
    schedule = [(-(k * la + lK), lK, 1) for k in range(1, num_blocks + 1)]
    specs, blocks = _build(p, q, schedule, block_tol, max_block_len)
    return _assemble(specs, blocks, K, alpha)


def construct_scaled_witness(p, q, epsilon: float, K: float, num_blocks: int,
                             block_tol: float = 1e-10,
                             max_block_len: int = MAX_BLOCK_LEN) -> Witness:
    """a = eps * b, b the block witness at scale K/eps: sum (a_n/eps)^{q_n} <= 1."""
    if not 0 < epsilon <= 1:
        raise PreconditionError("epsilon must lie in (0, 1]")
    b = construct_block_witness(p, q, K / epsilon, num_blocks, block_tol, max_block_len)
    if epsilon == 1:
        return b
    return b.scaled(epsilon)


def construct_universal_witness(p, q, num_groups: int, blocks_per_group: int,
                                block_tol: float = 1e-10,
                                max_block_len: int = MAX_BLOCK_LEN) -> Witness:
    """One sequence that works for every K <= num_groups.

    Blocks are dealt round-robin to groups; group k is a scaled witness with
    eps = alpha^{-k} and scale k, so its q-modular is at most 2^{-k} and each
    of its blocks adds at least 1 to sum (a_n/K)^{p_n} for K <= k.
    """
    if num_groups < 1 or blocks_per_group < 1:
        raise PreconditionError("need at least one group and one block")
    alpha = 2.0 ** (1.0 / p.declared_inf)
    la = math.log(alpha)
    schedule = []
    for i in range(1, blocks_per_group + 1):
        for k in range(1, num_groups + 1):
            log_L = math.log(k) + k * la  # L = K/eps = k alpha^k
            schedule.append((-(i * la + log_L), math.log(k), k))
    specs, blocks = _build(p, q, schedule, block_tol, max_block_len)
    return _assemble(specs, blocks, float(num_groups), alpha)


def linfty_witness(D: int) -> np.ndarray:
    """a_n = 1: bounded, but outside l_{p_n} whenever sum c^{p_n} diverges for all c."""
    if D < 1:
        raise PreconditionError("D must be >= 1")
    return np.ones(D)


@dataclass(frozen=True)
class WitnessReport:
    q_modular: float
    scaled_p_modular: float
    threshold: float
    passes: bool
    partial_p_modulars: tuple = field(default=())


def verify_witness(a, p, q, K: float, threshold: float, D: int | None = None,
                   tol: float = 1e-8) -> WitnessReport:
    """passes iff q-modular <= 1 + tol and sum_{n<=D} (a_n/K)^{p_n} >= threshold."""
    if isinstance(a, Witness):
        qm = a.q_modular()
        pm = a.scaled_p_modular(K)
        partial = tuple(np.cumsum(a.block_p_modulars(K)).tolist())
    else:
        a = np.asarray(a, dtype=float).ravel()
        if D is not None:
            a = a[:D]
        qm = modular(a, q) if a.size else 0.0
        pm = modular(a / K, p) if a.size else 0.0
        partial = ()
    return WitnessReport(qm, pm, threshold, qm <= 1.0 + tol and pm >= threshold, partial)
