"""Affine-gap pairwise alignment (three-state Gotoh recursion).

A gap run of length ``l`` costs ``gap_open + l * gap_extend``.  In ``overlap``
mode the first and the last run of the alignment are free when they are gap
runs, which is what zero-initialising the first row/column and reading the
optimum off the last row/column computes.
"""

from __future__ import annotations

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence as Seq

import numba
import numpy as np

from .paths import AlignmentPath, invert
from .seqio import DNA, PROTEIN, Alphabet, Sequence

GLOBAL = "global"
OVERLAP = "overlap"

_BLOSUM62 = """\
   A  R  N  D  C  Q  E  G  H  I  L  K  M  F  P  S  T  W  Y  V
A  4 -1 -2 -2  0 -1 -1  0 -2 -1 -1 -1 -1 -2 -1  1  0 -3 -2  0
R -1  5  0 -2 -3  1  0 -2  0 -3 -2  2 -1 -3 -2 -1 -1 -3 -2 -3
N -2  0  6  1 -3  0  0  0  1 -3 -3  0 -2 -3 -2  1  0 -4 -2 -3
D -2 -2  1  6 -3  0  2 -1 -1 -3 -4 -1 -3 -3 -1  0 -1 -4 -3 -3
C  0 -3 -3 -3  9 -3 -4 -3 -3 -1 -1 -3 -1 -2 -3 -1 -1 -2 -2 -1
Q -1  1  0  0 -3  5  2 -2  0 -3 -2  1  0 -3 -1  0 -1 -2 -1 -2
E -1  0  0  2 -4  2  5 -2  0 -3 -3  1 -2 -3 -1  0 -1 -3 -2 -2
G  0 -2  0 -1 -3 -2 -2  6 -2 -4 -4 -2 -3 -3 -2  0 -2 -2 -3 -3
H -2  0  1 -1 -3  0  0 -2  8 -3 -3 -1 -2 -1 -2 -1 -2 -2  2 -3
I -1 -3 -3 -3 -1 -3 -3 -4 -3  4  2 -3  1  0 -3 -2 -1 -3 -1  3
L -1 -2 -3 -4 -1 -2 -3 -4 -3  2  4 -2  2  0 -3 -2 -1 -2 -1  1
K -1  2  0 -1 -3  1  1 -2 -1 -3 -2  5 -1 -3 -1  0 -1 -3 -2 -2
M -1 -1 -2 -3 -1  0 -2 -3 -2  1  2 -1  5  0 -2 -1 -1 -1 -1  1
F -2 -3 -3 -3 -2 -3 -3 -3 -1  0  0 -3  0  6 -4 -2 -2  1  3 -1
P -1 -2 -2 -1 -3 -1 -1 -2 -2 -3 -3 -1 -2 -4  7 -1 -1 -4 -3 -2
S  1 -1  1  0 -1  0  0  0 -1 -2 -2  0 -1 -2 -1  4  1 -3 -2 -2
T  0 -1  0 -1 -1 -1 -1 -2 -2 -1 -1 -1 -1 -2 -1  1  5 -2 -2  0
W -3 -3 -4 -4 -2 -2 -3 -2 -2 -3 -2 -3 -1  1 -4 -3 -2 11  2 -3
Y -2 -2 -2 -3 -2 -1 -2 -3  2 -1 -1 -2 -1  3 -3 -2 -2  2  7 -1
V  0 -3 -3 -3 -1 -2 -2 -3 -3  3  1 -2  1 -1 -2 -2  0 -3 -1  4
"""


@dataclass(frozen=True)
class ScoringScheme:
    alphabet: Alphabet
    matrix: np.ndarray
    gap_open: float
    gap_extend: float
    mode: str = GLOBAL

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.float64)
        k = len(self.alphabet.symbols)
        if mat.shape != (k, k):
            raise ValueError(f"matrix shape {mat.shape} does not match alphabet size {k}")
        if not np.array_equal(mat, mat.T):
            raise ValueError("substitution matrix must be symmetric")
        if self.gap_open < 0 or self.gap_extend < 0:
            raise ValueError("gap penalties are nonnegative magnitudes")
        if self.mode not in (GLOBAL, OVERLAP):
            raise ValueError(f"unknown mode {self.mode!r}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def substitution(self, a: str, b: str) -> float:
        s = self.alphabet.symbols
        return float(self.matrix[s.index(a), s.index(b)])

    def gap_cost(self, length: int) -> float:
        return self.gap_open + length * self.gap_extend if length > 0 else 0.0

    def with_mode(self, mode: str) -> "ScoringScheme":
        return ScoringScheme(self.alphabet, self.matrix, self.gap_open, self.gap_extend, mode)

    def encode(self, residues: str) -> np.ndarray:
        lut = np.full(256, -1, dtype=np.int64)
        for k, ch in enumerate(self.alphabet.symbols):
            lut[ord(ch)] = k
        codes = lut[np.frombuffer(residues.encode("ascii"), np.uint8)]
        if (codes < 0).any():
            bad = residues[int(np.flatnonzero(codes < 0)[0])]
            raise ValueError(f"residue {bad!r} not in {self.alphabet.kind} scoring alphabet")
        return codes


@dataclass(frozen=True)
class PairwiseResult:
    path: AlignmentPath
    score: float


def dna_default_scheme(mode: str = GLOBAL) -> ScoringScheme:
    mat = np.where(np.eye(4, dtype=bool), 5.0, -4.0)
    return ScoringScheme(DNA, mat, 10.0, 0.5, mode)


def load_matrix(text: str) -> tuple[str, np.ndarray]:
    """Parse a square substitution matrix with a header row of residue symbols.

    Lines starting with ``#`` are comments.  Each data row may start with its
    residue label.
    """
    lines = [ln for ln in io.StringIO(text) if ln.strip() and not ln.lstrip().startswith("#")]
    header = lines[0].split()
    rows = []
    for ln in lines[1:]:
        tok = ln.split()
        if tok[0].upper() in header and len(tok) == len(header) + 1:
            tok = tok[1:]
        rows.append([float(t) for t in tok])
    mat = np.array(rows)
    if mat.shape != (len(header), len(header)):
        raise ValueError(f"matrix is {mat.shape}, header has {len(header)} symbols")
    return "".join(h.upper() for h in header), mat


def scheme_from_matrix(text: str, gap_open=10.0, gap_extend=0.5, mode=GLOBAL, kind="custom"):
    """Build a scheme from matrix text, keeping only the residue letters of the header."""
    symbols, mat = load_matrix(text)
    keep = [k for k, c in enumerate(symbols) if c.isalpha()]
    alpha = Alphabet(kind, "".join(symbols[k] for k in keep))
    return ScoringScheme(alpha, mat[np.ix_(keep, keep)], gap_open, gap_extend, mode)


def blosum62_scheme(mode: str = GLOBAL) -> ScoringScheme:
    symbols, mat = load_matrix(_BLOSUM62)
    assert symbols == PROTEIN.symbols
    return ScoringScheme(PROTEIN, mat, 10.0, 0.5, mode)


# state codes; tie precedence follows the numeric order
_D, _V, _H = 0, 1, 2


@numba.njit(cache=True, nogil=True)
def _fill(x, y, sub, go, ge, overlap):
    n, m = len(x), len(y)
    neg = -np.inf
    S = np.full((3, n + 1, m + 1), neg)
    P = np.zeros((3, n + 1, m + 1), dtype=np.int8)
    S[_D, 0, 0] = 0.0
    for i in range(1, n + 1):
        S[_H, i, 0] = 0.0 if overlap else -(go + i * ge)
        P[_H, i, 0] = _D if i == 1 else _H
    for j in range(1, m + 1):
        S[_V, 0, j] = 0.0 if overlap else -(go + j * ge)
        P[_V, 0, j] = _D if j == 1 else _V
    for i in range(1, n + 1):
        xi = x[i - 1]
        for j in range(1, m + 1):
            # diagonal
            best, arg = S[_D, i - 1, j - 1], _D
            if S[_V, i - 1, j - 1] > best:
                best, arg = S[_V, i - 1, j - 1], _V
            if S[_H, i - 1, j - 1] > best:
                best, arg = S[_H, i - 1, j - 1], _H
            S[_D, i, j] = best + sub[xi, y[j - 1]]
            P[_D, i, j] = arg
            # vertical: residue of y against a gap
            best, arg = S[_D, i, j - 1] - go - ge, _D
            if S[_V, i, j - 1] - ge > best:
                best, arg = S[_V, i, j - 1] - ge, _V
            if S[_H, i, j - 1] - go - ge > best:
                best, arg = S[_H, i, j - 1] - go - ge, _H
            S[_V, i, j] = best
            P[_V, i, j] = arg
            # horizontal: residue of x against a gap
            best, arg = S[_D, i - 1, j] - go - ge, _D
            if S[_V, i - 1, j] - go - ge > best:
                best, arg = S[_V, i - 1, j] - go - ge, _V
            if S[_H, i - 1, j] - ge > best:
                best, arg = S[_H, i - 1, j] - ge, _H
            S[_H, i, j] = best
            P[_H, i, j] = arg
    return S, P


@numba.njit(cache=True, nogil=True)
def _end_cell(S, overlap):
    n, m = S.shape[1] - 1, S.shape[2] - 1
    best, bi, bj, bs = -np.inf, n, m, _D
    for s in range(3):
        if S[s, n, m] > best:
            best, bs = S[s, n, m], s
    if overlap:
        for i in range(n - 1, -1, -1):
            for s in range(3):
                if S[s, i, m] > best:
                    best, bi, bj, bs = S[s, i, m], i, m, s
        for j in range(m - 1, -1, -1):
            for s in range(3):
                if S[s, n, j] > best:
                    best, bi, bj, bs = S[s, n, j], n, j, s
    return best, bi, bj, bs


@numba.njit(cache=True, nogil=True)
def _traceback(P, i, j, s):
    steps = np.zeros((i + j, 2), dtype=np.int64)
    k = 0
    while i > 0 or j > 0:
        prev = P[s, i, j]
        if s == _D:
            steps[k, 0], steps[k, 1] = 1, 1
            i -= 1
            j -= 1
        elif s == _V:
            steps[k, 0], steps[k, 1] = 0, 1
            j -= 1
        else:
            steps[k, 0], steps[k, 1] = 1, 0
            i -= 1
        s = prev
        k += 1
    return steps[:k][::-1]


def align_codes(x: np.ndarray, y: np.ndarray, scheme: ScoringScheme) -> PairwiseResult:
    overlap = scheme.mode == OVERLAP
    S, P = _fill(x, y, scheme.matrix, float(scheme.gap_open), float(scheme.gap_extend), overlap)
    score, i, j, s = _end_cell(S, overlap)
    steps = _traceback(P, i, j, s)
    n, m = len(x), len(y)
    tail = [(1, 0)] * (n - i) + [(0, 1)] * (m - j)
    if tail:
        steps = np.vstack([steps, np.array(tail, dtype=np.int64)])
    return PairwiseResult(AlignmentPath.from_steps(steps), float(score))


def align_pair(x: Sequence | str, y: Sequence | str, scheme: ScoringScheme) -> PairwiseResult:
    """Optimal alignment of ``x`` (first axis) against ``y`` under ``scheme``.

    Ties are broken diagonal > vertical > horizontal, both in the recursion and
    when choosing the end state.
    """
    xs = x.residues if isinstance(x, Sequence) else x
    ys = y.residues if isinstance(y, Sequence) else y
    return align_codes(scheme.encode(xs), scheme.encode(ys), scheme)


def align_all(
    seqs: Seq[Sequence], scheme: ScoringScheme, threads: int = 1
) -> dict[tuple[int, int], PairwiseResult]:
    """Align every pair ``i < j``; results keyed by ``(i, j)``."""
    codes = [scheme.encode(s.residues) for s in seqs]
    pairs = [(i, j) for i in range(len(seqs)) for j in range(i + 1, len(seqs))]

    def job(ij):
        i, j = ij
        return align_codes(codes[i], codes[j], scheme)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(job, pairs))
    else:
        results = [job(ij) for ij in pairs]
    return dict(zip(pairs, results))


def pairwise_table(lengths: Seq[int], upper: dict[tuple[int, int], AlignmentPath]):
    """Fill a full ``K x K`` path table from the ``i < j`` half.

    The lower half holds inverses and the diagonal holds identity paths.
    """
    k = len(lengths)
    table = [[None] * k for _ in range(k)]
    for i in range(k):
        table[i][i] = AlignmentPath.diagonal(lengths[i])
    for (i, j), p in upper.items():
        p = p.path if isinstance(p, PairwiseResult) else p
        table[i][j] = p
        table[j][i] = invert(p)
    return table
