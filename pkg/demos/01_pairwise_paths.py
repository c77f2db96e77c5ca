"""Pairwise alignments as lattice paths.

An alignment of x against y is a monotone walk from (0, 0) to (len x, len y).
Diagonal steps pair residues, horizontal steps consume x against a gap and
vertical steps consume y against a gap.
"""

from medwarp import align_pair, dna_default_scheme, invert, path_from_alignment
from medwarp.paths import alignment_from_path, step_coords
from medwarp.pairwise import OVERLAP

rows = ("ACAGTA-GT", "-CT-TAAG-")
path = path_from_alignment(*rows)
print("alignment:")
print("  " + rows[0])
print("  " + rows[1])
print("path:    ", path.tolist())
print("inverse: ", invert(path).tolist())

# Which residue of y does each residue of x land on (0 = before the first)?
print("x -> y:  ", [step_coords(path, u).v2 for u in range(1, path.n + 1)])

# Let the aligner find its own answer for the same two sequences.
x, y = "ACAGTAGT", "CTTAAG"
scheme = dna_default_scheme()
for mode_scheme in (scheme, scheme.with_mode(OVERLAP)):
    res = align_pair(x, y, mode_scheme)
    ax, ay = alignment_from_path(res.path, x, y)
    print(f"\n{mode_scheme.mode} alignment, score {res.score:g}")
    print("  " + ax)
    print("  " + ay)
