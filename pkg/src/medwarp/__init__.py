"""Multiple sequence alignment by median warping of pairwise alignment paths."""

from .median import (
    MsaTables,
    align_from_pairwise,
    build_tables,
    compute_weights,
    estimate_n_hat,
    extract_tables,
    integer_median,
    median_path,
    pairwise_from_msa,
    render,
    weighted_integer_median,
)
from .pairwise import PairwiseResult, ScoringScheme, align_all, align_pair, blosum62_scheme, dna_default_scheme
from .paths import AlignmentPath, invert, path_from_alignment, step_coords
from .scoring import ScoreReport, score, sp_score, tc_score
from .seqio import DNA, PROTEIN, Msa, Sequence, read_aligned_fasta, read_fasta, write_aligned_fasta, write_fasta
from .evolve import SimParams, extract_reference_pairwise, simulate

__version__ = "0.1.0"
