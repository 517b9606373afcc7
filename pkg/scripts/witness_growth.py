"""Growth of the block witness: q-modular stays below 1, p-modular climbs by 1 per block.

    python scripts/witness_growth.py --blocks 200 --K 2
"""
import argparse
import csv
import sys

import numpy as np

from varlp.exponents import ExponentSequence
from varlp.witness import construct_block_witness, verify_witness


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=float, default=1.0)
    ap.add_argument("--q", type=float, default=2.0)
    ap.add_argument("--K", type=float, default=2.0)
    ap.add_argument("--blocks", type=int, default=200)
    args = ap.parse_args()

    p, q = ExponentSequence.constant(args.p), ExponentSequence.constant(args.q)
    w = construct_block_witness(p, q, args.K, args.blocks)
    r = verify_witness(w, p, q, args.K, threshold=args.blocks * (1 - 1e-8))
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["block", "first", "last", "log10_length", "c", "cum_p_modular"])
    for k, (b, pm) in enumerate(zip(w.plan.blocks, r.partial_p_modulars), start=1):
        out.writerow([k, b.first, b.last, f"{np.log10(float(b.last - b.first + 1)):.6f}",
                      repr(b.c), repr(pm)])
    slope = float(np.polyfit(np.arange(1, len(r.partial_p_modulars) + 1), r.partial_p_modulars, 1)[0])
    print(f"# q_modular={r.q_modular!r} scaled_p_modular={r.scaled_p_modular!r} "
          f"slope={slope!r} passes={r.passes}")


if __name__ == "__main__":
    main()
