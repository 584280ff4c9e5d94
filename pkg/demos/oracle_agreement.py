"""Compare exact tropical counts with the activation-region oracle on random nets.

Usage: ``python3 demos/oracle_agreement.py [n_nets]``.

The raw oracle counts activation patterns, the merged oracle joins adjacent
regions with identical affine maps.  The tropical count sits between them.
"""
import sys

import numpy as np

from tropicount.counting import count_affine_pieces, count_boundary_pieces
from tropicount.network import random_network
from tropicount.oracle import oracle_counts
from tropicount.tropical import dcpa_extract

n_nets = int(sys.argv[1]) if len(sys.argv) > 1 else 20
rng = np.random.default_rng(0)
print(f"{'widths':>10} {'boundary':>8} {'oracle':>6} | {'merged':>6} {'tropical':>8} {'raw':>4}")
exact = 0
for _ in range(n_nets):
    widths = (2, int(rng.integers(3, 7)), int(rng.integers(3, 7)), 1)
    net = random_network(widths, rng)
    f = dcpa_extract(net)
    b, t = count_boundary_pieces(f).boundary_piece_count, count_affine_pieces(f)
    ob, raw = oracle_counts(net)
    _, merged = oracle_counts(net, merge=True)
    assert merged <= t <= raw
    exact += (b, t) == (ob, raw)
    flag = "" if t == raw else "  <- split region"
    print(f"{'-'.join(map(str, widths)):>10} {b:>8} {ob:>6} | {merged:>6} {t:>8} {raw:>4}{flag}")
print(f"{exact}/{n_nets} nets agree with the raw oracle on both counts")
