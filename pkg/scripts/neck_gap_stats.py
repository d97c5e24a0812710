#!/usr/bin/env python3
"""Are neck levels of a random graph-directed sequence geometrically spaced?

Samples a long i.i.d. label sequence from a graph system, reads off the neck
levels (one past every all-to-root label), and compares the gaps between
consecutive necks to the Geometric(p) law they should follow, where p is the
total probability of neck labels.  Prints the gap histogram, the sample mean
against 1/p, and a chi-square p-value with the tail pooled so every expected
count stays at least 5.
"""

import argparse
import json
import sys
import tempfile

import numpy as np
from scipy import stats

from affdim import detect_necks, parse_system, sample_graph_sequence

# Two-vertex system: label "n" (prob 0.3) sends everything back to vertex 1,
# label "s" (prob 0.7) branches away from it, so necks recur at rate 0.3.
GRAPH_DOC = {
    "d": 1,
    "bounds": {"sigma_lo": 0.2, "sigma_hi": 0.4},
    "families": [
        {"label": "n", "maps": [{"T": [[0.25]]}, {"T": [[0.2]]}]},
        {"label": "s", "maps": [{"T": [[0.4]]}, {"T": [[0.35]]}, {"T": [[0.3]]}]},
    ],
    "graph": {
        "V": 2,
        "v0": 1,
        "labels": [
            {
                "prob": 0.3,
                "edges": [
                    {"from": 1, "to": 1, "map": 0},
                    {"from": 2, "to": 1, "map": 1},
                ],
            },
            {
                "prob": 0.7,
                "edges": [
                    {"from": 1, "to": 2, "map": 0},
                    {"from": 1, "to": 2, "map": 1},
                    {"from": 2, "to": 2, "map": 2},
                ],
            },
        ],
    },
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("doc", nargs="?", help="system JSON path (default: built-in two-vertex system)")
    parser.add_argument("--length", type=int, default=10_000, help="sequence length (default 10000)")
    parser.add_argument("--thinning", type=int, default=1, help="keep every t-th neck")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if args.doc is None:
        with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
            json.dump(GRAPH_DOC, fh)
            path = fh.name
        spec = parse_system(path)
    else:
        spec = parse_system(args.doc)
    gs = spec.graph
    if gs is None:
        print("document has no graph section; nothing to sample", file=sys.stderr)
        return 2

    p_neck = sum(gs.mu[i] for i in gs.neck_label_indices())
    g = sample_graph_sequence(gs, args.seed, args.length)
    necks = np.array(detect_necks(g, gs, thinning=args.thinning))
    if necks.size < 2:
        print(f"only {necks.size} neck(s) in {args.length} levels; increase --length", file=sys.stderr)
        return 1
    gaps = np.diff(np.concatenate([[0], necks]))

    print(f"length = {args.length}, seed = {args.seed}, thinning = {args.thinning}")
    print(f"neck probability: {p_neck:.6g}   necks found: {necks.size}")
    print(f"gap mean: {gaps.mean():.4f}   "
          f"theory (thinning/p): {args.thinning / p_neck:.4f}")

    counts = np.bincount(gaps)[1:]  # gaps start at 1
    print(f"{'gap':>4}  {'count':>7}  histogram")
    peak = counts.max()
    for gap_len, count in enumerate(counts, start=1):
        bar = "#" * max(1, round(40 * count / peak)) if count else ""
        print(f"{gap_len:>4}  {count:>7}  {bar}")

    if args.thinning == 1:
        n = gaps.size
        kmax = int(gaps.max())
        expected = n * p_neck * (1 - p_neck) ** (np.arange(1, kmax + 1) - 1)
        observed = np.bincount(gaps, minlength=kmax + 1)[1:].astype(float)
        # pool the tail until every expected bin is >= 5
        while expected.size > 1 and expected[-1] < 5:
            expected[-2] += expected[-1]
            observed[-2] += observed[-1]
            expected, observed = expected[:-1], observed[:-1]
        chi2, pval = stats.chisquare(observed, expected * observed.sum() / expected.sum())
        print(f"chi-square vs Geometric({p_neck:g}): stat = {chi2:.3f}, p = {pval:.4f}")
    else:
        print("(chi-square check only applies to unthinned gaps)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
