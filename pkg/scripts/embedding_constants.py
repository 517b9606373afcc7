"""Certified embedding constants against the worst ratio seen on random sequences.

    python scripts/embedding_constants.py --samples 2000
"""
import argparse
import csv
import sys

from varlp.embedding import classify_pair, verify_embedding_empirically
from varlp.exponents import AffineLog, Constant, ExponentSequence, Power

INF = float("inf")
PAIRS = {
    "l1 vs l2": (ExponentSequence.constant(1.0), ExponentSequence.constant(2.0)),
    "p_n=n vs linf": (ExponentSequence((), Power(1.0, 1.0), declared_inf=1),
                      ExponentSequence.infinite()),
    "4ln n+1 vs linf": (ExponentSequence((), AffineLog(4.0, 1.0), declared_inf=1),
                        ExponentSequence.infinite()),
    "mixed prefix": (ExponentSequence((INF, 0.5, 3.0), Constant(1.0), declared_inf=0.5),
                     ExponentSequence((2.0, 1.0, 3.0), Power(1.0, 1.0), declared_inf=1)),
    "pointwise bump": (ExponentSequence((INF,), Constant(1.0), declared_inf=1),
                       ExponentSequence((2.0,), Constant(1.0), declared_inf=1)),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--D", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["pair", "direction", "status", "regime", "constant", "max_ratio"])
    for name, (p, q) in PAIRS.items():
        v = classify_pair(p, q)
        # forward: ||a||_q <= C ||a||_p;  backward: ||a||_p <= C ||a||_q
        for tag, d, lo, hi in (("forward", v.forward, q, p), ("backward", v.backward, p, q)):
            ratio = ""
            if d.status == "holds":
                chk = verify_embedding_empirically(lo, hi, d.constant, samples=args.samples,
                                                   D=args.D, seed=args.seed)
                ratio = repr(chk.max_ratio)
            w.writerow([name, tag, d.status, d.regime or "", "" if d.constant is None
                        else repr(d.constant), ratio])


if __name__ == "__main__":
    main()
