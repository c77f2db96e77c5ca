"""From pairwise paths to a multiple alignment.

Every sequence is aligned to all the others.  For one sequence, the positions
its residues map to in each partner are averaged with an integer median; the
result places that sequence on a shared ancestral axis.  Doing this for every
sequence yields the Hom/Ins tables, which render straight to an MSA.
"""

from medwarp import Sequence, align_all, dna_default_scheme
from medwarp.pairwise import pairwise_table
from medwarp.median import build_tables, median_path, render, tables_to_tsv

seqs = [
    Sequence("s1", "ACGTTGCATGCA"),
    Sequence("s2", "ACGTGCATGCA"),
    Sequence("s3", "ACGTTGCAATGCA"),
    Sequence("s4", "AGTTGCATGCA"),
    Sequence("s5", "ACGTTGCATGGCA"),
]
scheme = dna_default_scheme()
table = pairwise_table([len(s) for s in seqs], align_all(seqs, scheme))

tables = build_tables(seqs, table)
print(f"estimated ancestor length: {tables.n_hat}")
print("median path of s1 onto the ancestral axis:")
print(" ", median_path(0, table[0], tables.n_hat).tolist())

print("\nHom/Ins tables:")
print(tables_to_tsv(tables))

msa = render(tables, seqs)
marks = "".join("*" if c in msa.homologous_columns else " " for c in range(msa.width))
for sid, row in zip(msa.ids, msa.rows):
    print(f"{sid:>3} {row}")
print(f"    {marks}   (* = ancestral column)")
