"""Command-line front end: varlp {norm,classify,witness,bernstein,topology}.

Exit codes: 0 ok, 2 parse error, 3 precondition, 4 undecided, 5 property violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bernstein import bernstein_sweep, fit_decay, singularity_classify
from .embedding import classify_pair, linfty_relation
from .errors import BoundViolation, ParseError, PreconditionError, UndecidableTail
from .fileformat import format_exponent, read_exponent_file, read_sequence_file
from .norms import luxemburg_norm, modular, sup_norm
from .topology import (
    BallSpec,
    NoFormulaError,
    check_inclusion,
    inclusion_radius_B_in_U,
    inclusion_radius_U_in_B,
    riesz_witness,
)
from .witness import (
    construct_block_witness,
    construct_scaled_witness,
    construct_universal_witness,
    verify_witness,
)

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_UNDECIDED, EXIT_VIOLATION = 0, 2, 3, 4, 5


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


@dataclass
class Report:
    config: dict
    summary: dict = field(default_factory=dict)
    columns: tuple = ()
    rows: list = field(default_factory=list)


def _clean(v):
    """JSON-safe, deterministic scalars (non-finite floats become strings)."""
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return v


def _cell(v):
    v = _clean(v)
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def render(rep: Report, fmt: str) -> str:
    if fmt == "structured":
        doc = {"config": rep.config, "summary": rep.summary, "columns": list(rep.columns),
               "rows": [list(r) for r in rep.rows]}
        return json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n"
    if fmt == "rows":
        buf = io.StringIO()
        buf.write("# config: " + json.dumps(_clean(rep.config), sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        if rep.columns:
            w.writerow(rep.columns)
            for r in rep.rows:
                w.writerow([_cell(x) for x in r])
        else:
            w.writerow(("key", "value"))
            for k in sorted(rep.summary):
                w.writerow((k, _cell(rep.summary[k])))
        return buf.getvalue()
    lines = [f"{k}: {_cell(rep.summary[k])}" for k in sorted(rep.summary)]
    if rep.columns:
        table = [list(rep.columns)] + [[_cell(x) for x in r] for r in rep.rows]
        widths = [max(len(r[i]) for r in table) for i in range(len(rep.columns))]
        lines.append("")
        lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in table]
    return "\n".join(lines) + "\n"


def _config(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    cfg["version"] = __version__
    for key in ("p", "q"):
        if cfg.get(key):
            cfg[key + "_resolved"] = format_exponent(read_exponent_file(cfg[key]))
    return cfg


def _need(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise _ArgError(f"--{n} is required for {args.command}")


# --------------------------------------------------------------------------
# commands


def cmd_norm(args):
    _need(args, "seq", "p")
    a = read_sequence_file(args.seq)
    p = read_exponent_file(args.p)
    if args.D is not None:
        a = a[:args.D]
    rep = Report(_config(args))
    rep.summary = {"D": int(a.size), "modular": modular(a, p), "luxemburg_norm": luxemburg_norm(a, p),
                   "sup_norm": sup_norm(a)}
    return rep, EXIT_OK


def _direction(tag, d):
    return {f"{tag}_status": d.status, f"{tag}_constant": d.constant, f"{tag}_c": d.c,
            f"{tag}_M": d.M, f"{tag}_regime": d.regime, f"{tag}_reason": d.reason,
            f"{tag}_witness": None if d.witness is None else d.witness["kind"]}


def cmd_classify(args):
    _need(args, "p", "q")
    p, q = read_exponent_file(args.p), read_exponent_file(args.q)
    v = classify_pair(p, q)
    rep = Report(_config(args))
    rep.summary = {"classification": v.classification}
    rep.summary.update(_direction("forward", v.forward))
    rep.summary.update(_direction("backward", v.backward))
    for tag, e in (("p", p), ("q", q)):
        rel = linfty_relation(e)
        rep.summary[f"{tag}_equals_linfty"] = rel.coincides
        rep.summary[f"{tag}_linfty_upper"] = rel.upper
    return rep, EXIT_UNDECIDED if v.classification == "undecided" else EXIT_OK


def cmd_witness(args):
    _need(args, "p", "q")
    p, q = read_exponent_file(args.p), read_exponent_file(args.q)
    K = 2.0 if args.K is None else args.K
    blocks = 10 if args.blocks is None else args.blocks
    if args.groups:
        w = construct_universal_witness(p, q, args.groups, blocks)
        kind = "universal"
    elif args.epsilon is not None:
        w = construct_scaled_witness(p, q, args.epsilon, K, blocks)
        kind = "scaled"
    else:
        w = construct_block_witness(p, q, K, blocks)
        kind = "block"
    threshold = blocks / 2.0 if args.threshold is None else args.threshold
    r = verify_witness(w, p, q, K, threshold)
    if kind == "scaled":
        # the q-modular is certified for a/eps, the p-modular at scale K for a itself
        qm = w.scaled(1.0 / args.epsilon).q_modular()
        ok = qm <= 1.0 + 1e-8 and r.scaled_p_modular >= threshold
        r = type(r)(qm, r.scaled_p_modular, threshold, ok, r.partial_p_modulars)
    rep = Report(_config(args))
    rep.summary = {"kind": kind, "K": K, "blocks": len(w.plan.blocks), "D": str(w.D),
                   "q_modular": r.q_modular, "scaled_p_modular": r.scaled_p_modular,
                   "threshold": threshold, "passes": r.passes,
                   "block_constants": [b.c for b in w.plan.blocks],
                   "partial_p_modulars": list(r.partial_p_modulars)}
    rep.columns = ("first", "last", "p_n", "q_n", "a_n")
    rep.rows = [(str(s), str(e), pe, qe, a) for s, e, pe, qe, a in w.rows()]
    return rep, EXIT_OK if r.passes else EXIT_VIOLATION


def cmd_bernstein(args):
    _need(args, "p", "q")
    p, q = read_exponent_file(args.p), read_exponent_file(args.q)
    N = 6 if args.n is None else args.n
    D = 24 if args.D is None else args.D
    if N > D:
        raise PreconditionError(f"n={N} exceeds D={D}")
    reps = bernstein_sweep(p, q, range(1, N + 1), D, seed=args.seed)
    rep = Report(_config(args))
    rep.columns = ("n", "theorem_bound", "proof_bound", "estimate", "raw_estimate", "subspace")
    rep.rows = [(r.n, r.upper_bound_theorem, r.upper_bound_proof, r.empirical_estimate,
                 r.raw_estimate, r.subspace_descriptor) for r in reps]
    if N >= 3:
        C, beta = fit_decay([(r.n, r.empirical_estimate) for r in reps])
        rep.summary.update({"fit_C": C, "fit_beta": beta})
    v = singularity_classify(p, q)
    rep.summary.update({"singularity": v.kind, "singularity_c": v.c, "singularity_beta": v.beta,
                        "singularity_note": v.note})
    return rep, EXIT_OK


def cmd_topology(args):
    _need(args, "p")
    p = read_exponent_file(args.p)
    D = 10 if args.D is None else args.D
    eps = 0.5 if args.epsilon is None else args.epsilon
    if not 0 < eps < 1:
        raise PreconditionError("epsilon must lie in (0, 1)")
    rng = np.random.default_rng(args.seed)
    rep = Report(_config(args))
    rep.columns = ("check", "center", "delta", "violations")
    zero = np.zeros(D)
    y = rng.standard_normal(D)
    total = 0
    try:
        e = p.values(D)
        # random center with modular(y/eps) = 1/2 and modular(y) < eps
        lo, hi = -60.0, 60.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            ok = modular(y * math.exp(mid) / eps, e) < 0.5 and modular(y * math.exp(mid), e) < eps / 2
            lo, hi = (mid, hi) if ok else (lo, mid)
        y = y * math.exp(lo)
        for name, center in (("origin", zero), ("random", y)):
            d1 = inclusion_radius_U_in_B(center, eps, p) * args.inflate
            v1 = check_inclusion(BallSpec(center, d1, "U"), BallSpec(zero, eps, "B"), p,
                                 args.samples, args.seed)
            d2 = inclusion_radius_B_in_U(center, eps, p) * args.inflate
            v2 = check_inclusion(BallSpec(center, d2, "B"), BallSpec(zero, eps, "U"), p,
                                 args.samples, args.seed + 1)
            rep.rows += [("U_in_B", name, d1, v1), ("B_in_U", name, d2, v2)]
            total += v1 + v2
        rep.summary["inclusion"] = "checked"
    except NoFormulaError:
        rep.summary["inclusion"] = "no formula (some p_n > 1)"
    dimL = min(3, D - 1)
    L = rng.standard_normal((dimL, D))
    rz = riesz_witness(list(L), min(eps, 0.5), p, D, seed=args.seed,
                       verify_samples=args.samples, starts=args.riesz_starts)
    rep.summary.update({"violations": total, "inflate": args.inflate,
                        "riesz_distance": rz.distance, "riesz_min_sampled": rz.min_sampled,
                        "riesz_passes": rz.passes, "riesz_certified": rz.certified})
    ok = total == 0 and rz.passes
    return rep, EXIT_OK if ok else EXIT_VIOLATION


COMMANDS = {"norm": cmd_norm, "classify": cmd_classify, "witness": cmd_witness,
            "bernstein": cmd_bernstein, "topology": cmd_topology}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="varlp", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--p", help="exponent file")
        sp.add_argument("--q", help="second exponent file")
        sp.add_argument("--seq", help="sequence file, one value per line")
        sp.add_argument("--D", type=int, help="truncation length")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--c", type=float)
        sp.add_argument("--K", type=float)
        sp.add_argument("--epsilon", type=float)
        sp.add_argument("--n", type=int)
        sp.add_argument("--blocks", type=int)
        sp.add_argument("--groups", type=int, help="universal witness with this many groups")
        sp.add_argument("--threshold", type=float)
        sp.add_argument("--samples", type=int, default=10_000)
        sp.add_argument("--inflate", type=float, default=1.0,
                        help="multiply inclusion radii (negative control)")
        sp.add_argument("--riesz-starts", type=int, default=None)
        sp.add_argument("--format", choices=("table", "rows", "structured"), default="table")
        sp.add_argument("--out", help="write the report here instead of stdout")
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise _ArgError("a command is required")
        if args.D is not None and args.D < 1:
            raise PreconditionError("D must be >= 1")
        rep, code = COMMANDS[args.command](args)
    except (_ArgError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BoundViolation as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except UndecidableTail as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except PreconditionError as exc:
        print(f"precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    text = render(rep, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
