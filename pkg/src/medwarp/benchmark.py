"""Replicate benchmark on simulated star-tree data.

Each replicate is aligned twice: from estimated pairwise alignments and from
the true pairwise alignments read off the simulated alignment.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .median import align_from_pairwise, pairwise_from_msa
from .pairwise import ScoringScheme, align_all, dna_default_scheme, pairwise_table
from .scoring import score
from .evolve import SimParams, simulate

ESTIMATED = "estimated"
REFERENCE = "reference"


@dataclass(frozen=True)
class BenchRow:
    k: int
    replicate: int
    variant: str
    sp: float
    tc: float

    def to_tsv(self) -> str:
        return f"{self.k}\t{self.replicate}\t{self.variant}\t{self.sp:.6f}\t{self.tc:.6f}\n"


BENCH_HEADER = "K\treplicate\tvariant\tsp\ttc\n"


def run_replicate(params: SimParams, replicate: int, scheme: ScoringScheme) -> list[BenchRow]:
    out = simulate(params, replicate)
    seqs = out.descendants
    lengths = [len(s) for s in seqs]
    est = pairwise_table(lengths, align_all(seqs, scheme))
    rows = []
    for variant, table in ((ESTIMATED, est), (REFERENCE, pairwise_from_msa(out.reference))):
        rep = score(align_from_pairwise(seqs, table), out.reference)
        rows.append(BenchRow(params.k, replicate, variant, rep.sp, rep.tc))
    return rows


def run_benchmark(
    k_list,
    replicates: int,
    base: SimParams | None = None,
    scheme: ScoringScheme | None = None,
    threads: int = 1,
) -> list[BenchRow]:
    """Rows ordered by ``(K, replicate, variant)`` whatever the thread count."""
    base = base or SimParams()
    scheme = scheme or dna_default_scheme()
    jobs = [(replace(base, k=k), r) for k in k_list for r in range(replicates)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            chunks = list(pool.map(lambda job: run_replicate(*job, scheme), jobs))
    else:
        chunks = [run_replicate(p, r, scheme) for p, r in jobs]
    return [row for chunk in chunks for row in chunk]
