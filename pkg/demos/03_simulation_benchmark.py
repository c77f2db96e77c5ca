"""How close does the method get to the truth on simulated families?

Sequences evolve along a star tree from a random ancestor, so the true
alignment is known.  Each replicate is aligned twice: once from estimated
pairwise alignments and once from the true pairwise paths.  The second run
isolates the combining step from pairwise errors.

Run with a smaller replicate count for a quick look:  python 03_simulation_benchmark.py 5
"""

import sys

import numpy as np

from medwarp.benchmark import ESTIMATED, REFERENCE, run_benchmark
from medwarp.evolve import SimParams

replicates = int(sys.argv[1]) if len(sys.argv) > 1 else 20
k_list = [10, 20, 30]
rows = run_benchmark(k_list, replicates, SimParams(n_ancestor=100, seed=0), threads=4)

print(f"{'K':>3}  {'variant':<10} {'median SP':>9} {'median TC':>9}")
for k in k_list:
    for variant in (REFERENCE, ESTIMATED):
        sel = [r for r in rows if r.k == k and r.variant == variant]
        sp = np.median([r.sp for r in sel])
        tc = np.median([r.tc for r in sel])
        print(f"{k:>3}  {variant:<10} {sp:9.3f} {tc:9.3f}")
