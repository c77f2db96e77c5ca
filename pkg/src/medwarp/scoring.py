"""Sum-of-pairs (SP) and total-column (TC) agreement with a reference alignment.

Residues are identified by ``(row, index in the ungapped sequence)`` so that
repeated characters never count as agreement.  Gap-only columns are ignored
in both alignments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .seqio import GAP, Msa


class ScoreError(ValueError):
    pass


@dataclass(frozen=True)
class ScoreReport:
    sp: float
    tc: float
    aligned_pairs_ref: int
    aligned_pairs_correct: int
    columns_ref: int
    columns_correct: int

    def to_tsv(self) -> str:
        return (
            f"{self.sp:.6f}\t{self.tc:.6f}\t{self.aligned_pairs_ref}\t"
            f"{self.aligned_pairs_correct}\t{self.columns_ref}\t{self.columns_correct}\n"
        )


def residue_index(msa: Msa) -> np.ndarray:
    """``K x L`` array: 0-based residue number at each cell, -1 for gaps."""
    out = np.full((len(msa), msa.width), -1, dtype=np.int64)
    for i, row in enumerate(msa.rows):
        present = np.frombuffer(row.encode(), np.uint8) != ord(GAP)
        out[i, present] = np.arange(int(present.sum()))
    return out


def _matched(test: Msa, reference: Msa) -> tuple[np.ndarray, np.ndarray]:
    if len(set(reference.ids)) != len(reference.ids):
        raise ScoreError("duplicate ids in reference")
    if sorted(test.ids) != sorted(reference.ids):
        raise ScoreError("test and reference hold different sequence ids")
    pos = {name: k for k, name in enumerate(test.ids)}
    order = [pos[name] for name in reference.ids]
    ref_seqs = reference.sequences()
    test_seqs = test.sequences()
    for k, o in enumerate(order):
        if ref_seqs[k].residues != test_seqs[o].residues:
            raise ScoreError(f"sequence {reference.ids[k]!r} differs between test and reference")
    ridx = residue_index(reference)
    tidx = residue_index(test)[order]
    return ridx[:, (ridx >= 0).any(axis=0)], tidx[:, (tidx >= 0).any(axis=0)]


def _test_column_of(tidx: np.ndarray) -> list[np.ndarray]:
    """For each row, the test column holding each residue."""
    cols = []
    for row in tidx:
        present = np.flatnonzero(row >= 0)
        cols.append(present)
    return cols


def score(test: Msa, reference: Msa, min_column_residues: int = 2) -> ScoreReport:
    """SP and TC of ``test`` against ``reference``.

    SP counts residue pairs sharing a reference column that also share a test
    column.  TC counts reference columns holding at least
    ``min_column_residues`` residues whose exact residue/gap content appears as
    a column of ``test``.
    """
    ridx, tidx = _matched(test, reference)
    where = _test_column_of(tidx)
    pairs_ref = pairs_ok = 0
    for c in range(ridx.shape[1]):
        rows = np.flatnonzero(ridx[:, c] >= 0)
        g = len(rows)
        pairs_ref += g * (g - 1) // 2
        if g > 1:
            tcols = np.array([where[r][ridx[r, c]] for r in rows])
            _, counts = np.unique(tcols, return_counts=True)
            pairs_ok += int((counts * (counts - 1) // 2).sum())
    test_cols = {tidx[:, c].tobytes() for c in range(tidx.shape[1])}
    counted = (ridx >= 0).sum(axis=0) >= min_column_residues
    cols_ref = int(counted.sum())
    cols_ok = sum(1 for c in np.flatnonzero(counted) if ridx[:, c].tobytes() in test_cols)
    return ScoreReport(
        sp=pairs_ok / pairs_ref if pairs_ref else 0.0,
        tc=cols_ok / cols_ref if cols_ref else 0.0,
        aligned_pairs_ref=pairs_ref,
        aligned_pairs_correct=pairs_ok,
        columns_ref=cols_ref,
        columns_correct=cols_ok,
    )


def sp_score(test: Msa, reference: Msa) -> float:
    return score(test, reference).sp


def tc_score(test: Msa, reference: Msa, min_column_residues: int = 2) -> float:
    return score(test, reference, min_column_residues).tc
