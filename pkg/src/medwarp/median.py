"""Median warping: per-sequence median paths and the Hom/Ins encoding of an MSA."""

from __future__ import annotations

import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .paths import AlignmentPath, invert, path_from_alignment, step_coords_all
from .seqio import GAP, Msa

log = logging.getLogger(__name__)

# tolerance when comparing cumulative weights with 1/2
_HALF_TOL = 1e-9


class TableError(ValueError):
    pass


def integer_median(values) -> int:
    """Median of integers; an even count with a non-integer midpoint is floored."""
    a = np.asarray(values, dtype=np.int64).ravel()
    if a.size == 0:
        raise ValueError("median of an empty list")
    return int(median_columns(a[:, None])[0])


def median_columns(values: np.ndarray) -> np.ndarray:
    """Integer median of each column of a ``K x n`` array via selection (no full sort)."""
    k = values.shape[0]
    h = k // 2
    if k % 2:
        return np.partition(values, h, axis=0)[h]
    part = np.partition(values, [h - 1, h], axis=0)
    return (part[h - 1] + part[h]) // 2


def estimate_n_hat(lengths) -> int:
    return integer_median(lengths)


def compute_weights(distances, epsilon: float) -> np.ndarray:
    """Weights decreasing linearly with distance to the root, normalised to 1."""
    d = np.asarray(distances, dtype=np.float64)
    if d.size == 0:
        raise ValueError("no distances")
    if (d < 0).any():
        raise ValueError("distances must be nonnegative")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    raw = 1.0 - d / (d.max() + epsilon)
    return raw / raw.sum()


def _check_weights(weights, k: int) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (k,):
        raise ValueError(f"{w.size} weights for {k} values")
    if (w <= 0).any() or abs(w.sum() - 1.0) > 1e-9:
        raise ValueError("weights must be positive and sum to 1")
    return w


def weighted_median_columns(values: np.ndarray, weights) -> np.ndarray:
    """Weighted integer median of each column.

    ``lo`` is the smallest value whose cumulative weight reaches 1/2 and ``hi``
    the smallest whose cumulative weight exceeds it; the result is
    ``floor((lo + hi) / 2)``.  Uniform weights give back :func:`median_columns`.
    """
    w = _check_weights(weights, values.shape[0])
    order = np.argsort(values, axis=0, kind="stable")
    sv = np.take_along_axis(values, order, axis=0)
    cw = np.cumsum(w[order], axis=0)
    lo_idx = np.argmax(cw >= 0.5 - _HALF_TOL, axis=0)
    hi_idx = np.argmax(cw > 0.5 + _HALF_TOL, axis=0)
    cols = np.arange(values.shape[1])
    return (sv[lo_idx, cols] + sv[hi_idx, cols]) // 2


def weighted_integer_median(values, weights) -> int:
    a = np.asarray(values, dtype=np.int64).ravel()
    if a.size == 0:
        raise ValueError("median of an empty list")
    return int(weighted_median_columns(a[:, None], weights)[0])


@dataclass
class MedianDiagnostics:
    clamped: int = 0
    reclassified: int = 0


@dataclass
class MsaTables:
    """``hom[i, c]`` is the 1-based residue of sequence ``i`` homologous to ancestral
    column ``c`` (0 for a deletion); ``ins[i, c]`` counts residues inserted before
    ancestral column ``c`` (the last entry: after the last column)."""

    n_hat: int
    hom: np.ndarray
    ins: np.ndarray
    paths: list[AlignmentPath] = field(default_factory=list)
    diagnostics: MedianDiagnostics = field(default_factory=MedianDiagnostics)

    def __post_init__(self):
        self.ins = np.asarray(self.ins, dtype=np.int64).reshape(-1, self.n_hat + 1)
        hom = np.asarray(self.hom, dtype=np.int64)
        if hom.size != self.ins.shape[0] * self.n_hat:
            raise TableError("Hom and Ins have different numbers of rows")
        self.hom = hom.reshape(self.ins.shape[0], self.n_hat)
        if not self.paths:
            self.paths = [tables_row_path(h, c) for h, c in zip(self.hom, self.ins)]

    @property
    def k(self) -> int:
        return self.hom.shape[0]

    def lengths(self) -> np.ndarray:
        return (self.hom > 0).sum(axis=1) + self.ins.sum(axis=1)

    def check(self, lengths=None) -> None:
        if (self.ins < 0).any() or (self.hom < 0).any():
            raise TableError("negative table entry")
        for i, row in enumerate(self.hom):
            nz = row[row > 0]
            if (np.diff(nz) <= 0).any():
                raise TableError(f"Hom row {i} is not increasing")
        if lengths is not None:
            got = self.lengths()
            if not np.array_equal(got, np.asarray(lengths)):
                raise TableError(f"tables account for {got.tolist()} residues, expected {list(lengths)}")

    def __eq__(self, other):
        if not isinstance(other, MsaTables):
            return NotImplemented
        return (
            self.n_hat == other.n_hat
            and np.array_equal(self.hom, other.hom)
            and np.array_equal(self.ins, other.ins)
        )


def tables_row_path(hom_row: np.ndarray, ins_row: np.ndarray) -> AlignmentPath:
    """Path of one sequence against the ancestral axis implied by its table rows."""
    steps = []
    for c in range(len(hom_row)):
        steps += [(1, 0)] * int(ins_row[c])
        steps.append((1, 1) if hom_row[c] else (0, 1))
    steps += [(1, 0)] * int(ins_row[-1])
    return AlignmentPath.from_steps(steps)


def median_positions(paths_to_i, weights=None):
    """Per-position medians ``(m1, m2)`` of the step coordinates of all paths."""
    coords = [step_coords_all(p) for p in paths_to_i]
    v1 = np.stack([c[0] for c in coords])
    v2 = np.stack([c[1] for c in coords])
    if weights is None:
        return median_columns(v1), median_columns(v2)
    return weighted_median_columns(v1, weights), weighted_median_columns(v2, weights)


def _assemble_path(m1: np.ndarray, m2: np.ndarray, n_hat: int) -> AlignmentPath:
    steps = []
    h = 0
    for a, b in zip(m1.tolist(), m2.tolist()):
        steps += [(0, 1)] * (a - h)
        steps.append((1, b - a))
        h = b
    steps += [(0, 1)] * (n_hat - h)
    return AlignmentPath.from_steps(steps)


def _check_bundle(i: int, paths_to_i, n_i: int | None):
    if n_i is None:
        n_i = paths_to_i[i].n
    for j, p in enumerate(paths_to_i):
        if p.n != n_i:
            raise TableError(f"path ({i},{j}) has first axis {p.n}, expected {n_i}")
    if paths_to_i[i] != AlignmentPath.diagonal(n_i):
        raise TableError(f"entry ({i},{i}) must be the self-alignment")
    return n_i


def _median_row(i, paths_to_i, n_hat, weights, diag: MedianDiagnostics):
    m1, m2 = median_positions(paths_to_i, weights)
    over = int((m2 > n_hat).sum())
    if over:
        diag.clamped += over
        log.warning("sequence %d: %d median coordinates above n_hat=%d clamped", i, over, n_hat)
        m1 = np.minimum(m1, n_hat)
        m2 = np.minimum(m2, n_hat)
    return m1, m2


def median_path(i: int, paths_to_i, n_hat: int, weights=None) -> AlignmentPath:
    """Median path of sequence ``i`` against an ancestral axis of length ``n_hat``.

    ``paths_to_i[j]`` aligns sequence ``i`` (first axis) to sequence ``j``;
    ``paths_to_i[i]`` is the identity.  Vertical steps fill any jump between
    consecutive median points and pad the end up to ``n_hat``.
    """
    _check_bundle(i, paths_to_i, None)
    m1, m2 = _median_row(i, paths_to_i, n_hat, weights, MedianDiagnostics())
    return _assemble_path(m1, m2, n_hat)


def _classify(m1, m2, n_hat, diag: MedianDiagnostics):
    hom = np.zeros(n_hat, np.int64)
    ins = np.zeros(n_hat + 1, np.int64)
    for u, (a, b) in enumerate(zip(m1.tolist(), m2.tolist()), start=1):
        if a == b:
            ins[a] += 1
        elif hom[b - 1]:
            diag.reclassified += 1
            ins[a] += 1
        else:
            hom[b - 1] = u
    return hom, ins


def build_tables(
    sequences,
    pairwise,
    weights=None,
    threads: int = 1,
    check_inverse: bool = True,
) -> MsaTables:
    """Hom/Ins tables from the full table of pairwise paths.

    ``pairwise[i][j]`` aligns sequence ``i`` to ``j``; the diagonal holds
    identity paths and ``pairwise[j][i]`` must be the inverse of ``pairwise[i][j]``.
    """
    k = len(sequences)
    lengths = [len(s) for s in sequences]
    if len(pairwise) != k or any(len(row) != k for row in pairwise):
        raise TableError(f"pairwise table must be {k}x{k}")
    for i in range(k):
        _check_bundle(i, pairwise[i], lengths[i])
        for j in range(i + 1, k):
            if pairwise[i][j].m != lengths[j]:
                raise TableError(f"path ({i},{j}) has second axis {pairwise[i][j].m}, expected {lengths[j]}")
            if check_inverse and pairwise[j][i] != invert(pairwise[i][j]):
                raise TableError(f"pairwise ({j},{i}) is not the inverse of ({i},{j})")
    n_hat = estimate_n_hat(lengths)
    if weights is not None:
        weights = _check_weights(weights, k)
    diag = MedianDiagnostics()

    def row(i):
        m1, m2 = _median_row(i, pairwise[i], n_hat, weights, diag)
        hom, ins = _classify(m1, m2, n_hat, diag)
        return hom, ins, _assemble_path(m1, m2, n_hat)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(row, range(k)))
    else:
        rows = [row(i) for i in range(k)]
    tables = MsaTables(
        n_hat,
        np.array([r[0] for r in rows]).reshape(k, n_hat),
        np.array([r[1] for r in rows]).reshape(k, n_hat + 1),
        [r[2] for r in rows],
        diag,
    )
    tables.check(lengths)
    return tables


def render(tables: MsaTables, sequences) -> Msa:
    """Lay out the alignment: insert blocks sized by the largest insert run,
    residues left-justified inside each block, homologous residues in their column."""
    k, n_hat = tables.k, tables.n_hat
    if len(sequences) != k:
        raise TableError(f"{len(sequences)} sequences for {k} table rows")
    tables.check([len(s) for s in sequences])
    nb_ins = tables.ins.max(axis=0) if k else np.zeros(n_hat + 1, np.int64)
    width = n_hat + int(nb_ins.sum())
    # start column of each insert block and of each homologous column
    block_start = np.zeros(n_hat + 1, np.int64)
    hom_col = np.zeros(n_hat, np.int64)
    pos = 0
    for c in range(n_hat + 1):
        block_start[c] = pos
        pos += nb_ins[c]
        if c < n_hat:
            hom_col[c] = pos
            pos += 1
    rows = []
    for i, seq in enumerate(sequences):
        res = seq.residues
        row = [GAP] * width
        p = 0
        for c in range(n_hat + 1):
            run = int(tables.ins[i, c])
            row[block_start[c] : block_start[c] + run] = res[p : p + run]
            p += run
            if c < n_hat and tables.hom[i, c]:
                if tables.hom[i, c] != p + 1:
                    raise TableError(
                        f"sequence {i}: Hom gives residue {tables.hom[i, c]} at column {c + 1}, "
                        f"insert counts give {p + 1}"
                    )
                row[hom_col[c]] = res[p]
                p += 1
        rows.append("".join(row))
    ids = [s.id for s in sequences]
    return Msa(rows, ids, frozenset(hom_col.tolist()))


def extract_tables(msa: Msa, homologous_columns=None) -> MsaTables:
    """Hom/Ins tables of an alignment given its 0-based homologous columns."""
    cols = msa.homologous_columns if homologous_columns is None else frozenset(homologous_columns)
    if cols is None:
        raise TableError("no homologous columns given")
    bad = [c for c in cols if not 0 <= c < msa.width]
    if bad:
        raise TableError(f"homologous columns out of range: {sorted(bad)}")
    is_hom = np.zeros(msa.width, bool)
    is_hom[list(cols)] = True
    n_hat = int(is_hom.sum())
    k = len(msa)
    hom = np.zeros((k, n_hat), np.int64)
    ins = np.zeros((k, n_hat + 1), np.int64)
    # ancestral column index of each alignment column (0-based), or block index for inserts
    block = np.cumsum(is_hom) - is_hom
    for i, row in enumerate(msa.rows):
        present = np.frombuffer(row.encode(), np.uint8) != ord(GAP)
        rank = np.cumsum(present)
        h = present & is_hom
        hom[i, block[h]] = rank[h]
        np.add.at(ins[i], block[present & ~is_hom], 1)
    return MsaTables(n_hat, hom, ins)


def pairwise_path_from_msa(msa: Msa, i: int, j: int) -> AlignmentPath:
    """Path of rows ``i`` and ``j`` of an alignment, gap/gap columns dropped."""
    k = len(msa)
    if not (0 <= i < k and 0 <= j < k):
        raise IndexError(f"row index out of range for {k} rows")
    rx, ry = msa.rows[i], msa.rows[j]
    keep = [c for c in range(msa.width) if rx[c] != GAP or ry[c] != GAP]
    return path_from_alignment("".join(rx[c] for c in keep), "".join(ry[c] for c in keep))


def pairwise_from_msa(msa: Msa):
    """Full ``K x K`` table of reference pairwise paths extracted from ``msa``."""
    from .pairwise import pairwise_table

    k = len(msa)
    lengths = [len(s) for s in msa.sequences()]
    upper = {(i, j): pairwise_path_from_msa(msa, i, j) for i in range(k) for j in range(i + 1, k)}
    return pairwise_table(lengths, upper)


def align_from_pairwise(sequences, pairwise, weights=None, threads: int = 1) -> Msa:
    return render(build_tables(sequences, pairwise, weights, threads), sequences)


def tables_to_tsv(tables: MsaTables) -> str:
    buf = io.StringIO()
    buf.write(f"K\t{tables.k}\tN_hat\t{tables.n_hat}\n")
    for row in tables.hom:
        buf.write("\t".join(map(str, row.tolist())) + "\n")
    for row in tables.ins:
        buf.write("\t".join(map(str, row.tolist())) + "\n")
    return buf.getvalue()


def tables_from_tsv(text: str) -> MsaTables:
    lines = text.rstrip("\n").split("\n")
    head = lines[0].split("\t")
    if len(head) != 4 or head[0] != "K" or head[2] != "N_hat":
        raise TableError("bad tables header")
    k, n_hat = int(head[1]), int(head[3])
    body = lines[1:]
    if len(body) != 2 * k:
        raise TableError(f"expected {2 * k} table rows, found {len(body)}")
    rows = [[int(v) for v in ln.split("\t")] if ln else [] for ln in body]
    return MsaTables(n_hat, np.array(rows[:k], np.int64), np.array(rows[k:], np.int64))
