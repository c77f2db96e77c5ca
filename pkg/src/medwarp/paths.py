"""Pairwise alignments as monotone lattice paths.

A path over the grid ``[0, n] x [0, m]`` starts at ``(0, 0)``, ends at
``(n, m)`` and moves by unit steps ``(1, 0)``, ``(0, 1)`` or ``(1, 1)``.  The
first axis indexes the first sequence.  Coordinate 0 plays the role of the
artificial leading character, so a residue aligned to a gap is associated
with the previous aligned position of the other sequence.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .seqio import GAP

HORIZONTAL = (1, 0)
VERTICAL = (0, 1)
DIAGONAL = (1, 1)


class PathError(ValueError):
    pass


class StepCoords(NamedTuple):
    u: int
    v1: int
    v2: int


class AlignmentPath:
    """Immutable point list of an alignment path."""

    __slots__ = ("_points",)

    def __init__(self, points, validate: bool = True):
        pts = np.array(points, dtype=np.int64).reshape(-1, 2)
        pts.setflags(write=False)
        self._points = pts
        if validate:
            check_path(pts)

    @classmethod
    def diagonal(cls, n: int) -> "AlignmentPath":
        r = np.arange(n + 1)
        return cls(np.column_stack([r, r]), validate=False)

    @classmethod
    def from_steps(cls, steps) -> "AlignmentPath":
        steps = np.asarray(steps, dtype=np.int64).reshape(-1, 2)
        pts = np.vstack([np.zeros((1, 2), np.int64), np.cumsum(steps, axis=0)])
        return cls(pts)

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def n(self) -> int:
        return int(self._points[-1, 0])

    @property
    def m(self) -> int:
        return int(self._points[-1, 1])

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self._points, axis=0)

    def __len__(self) -> int:
        return len(self._points)

    def __eq__(self, other):
        if not isinstance(other, AlignmentPath):
            return NotImplemented
        return np.array_equal(self._points, other._points)

    def __hash__(self):
        return hash(self._points.tobytes())

    def __repr__(self):
        inner = ",".join(f"({a},{b})" for a, b in self._points[:12])
        more = "..." if len(self) > 12 else ""
        return f"AlignmentPath[{self.n}x{self.m}]({inner}{more})"

    def tolist(self) -> list[tuple[int, int]]:
        return [(int(a), int(b)) for a, b in self._points]


def check_path(points) -> None:
    """Raise :class:`PathError` unless ``points`` is a valid alignment path."""
    pts = np.asarray(points)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
        raise PathError("a path needs at least one 2-d point")
    if pts[0, 0] != 0 or pts[0, 1] != 0:
        raise PathError(f"path must start at (0,0), got {tuple(pts[0])}")
    d = np.diff(pts, axis=0)
    ok = ((d == 0) | (d == 1)).all(axis=1) & (d.sum(axis=1) > 0)
    if not ok.all():
        t = int(np.flatnonzero(~ok)[0])
        raise PathError(f"illegal step {tuple(d[t])} after point {t}")


def is_valid_path(points) -> bool:
    try:
        check_path(points)
    except PathError:
        return False
    return True


def path_from_alignment(row_x: str, row_y: str) -> AlignmentPath:
    """Transcribe a gapped pair of rows, one step per column."""
    if len(row_x) != len(row_y):
        raise PathError("aligned rows have different lengths")
    dx = np.frombuffer(row_x.encode(), np.uint8) != ord(GAP)
    dy = np.frombuffer(row_y.encode(), np.uint8) != ord(GAP)
    if (~dx & ~dy).any():
        col = int(np.flatnonzero(~dx & ~dy)[0])
        raise PathError(f"gap/gap column at index {col}")
    return AlignmentPath.from_steps(np.column_stack([dx, dy]))


def alignment_from_path(path: AlignmentPath, x: str, y: str) -> tuple[str, str]:
    """Render ``path`` as two gapped rows over the residues of ``x`` and ``y``."""
    if path.n != len(x) or path.m != len(y):
        raise PathError(f"path spans {path.n}x{path.m}, sequences are {len(x)}x{len(y)}")
    rx, ry = [], []
    for (a, b), (da, db) in zip(path.points[:-1], path.steps):
        rx.append(x[a] if da else GAP)
        ry.append(y[b] if db else GAP)
    return "".join(rx), "".join(ry)


def invert(path: AlignmentPath) -> AlignmentPath:
    """Mirror a path through the diagonal (the generalized inverse warping)."""
    return AlignmentPath(path.points[:, ::-1], validate=False)


def step_coords_all(path: AlignmentPath) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(v1, v2)`` arrays of length ``n``: the step into first-axis column ``u``
    goes from ``(u-1, v1[u-1])`` to ``(u, v2[u-1])``."""
    pts = path.points
    t = np.flatnonzero(np.diff(pts[:, 0]) == 1)
    return pts[t, 1], pts[t + 1, 1]


def step_coords(path: AlignmentPath, u: int) -> StepCoords:
    if not 1 <= u <= path.n:
        raise PathError(f"position {u} outside 1..{path.n}")
    v1, v2 = step_coords_all(path)
    return StepCoords(u, int(v1[u - 1]), int(v2[u - 1]))


def normalize_no_adjacent_indels(path: AlignmentPath) -> AlignmentPath:
    """Merge each horizontal+vertical (or vertical+horizontal) pair into a diagonal.

    Steps are scanned left to right; a merged diagonal is not merged again.
    """
    out = []
    steps = [tuple(s) for s in path.steps.tolist()]
    k = 0
    while k < len(steps):
        s = steps[k]
        if k + 1 < len(steps) and {s, steps[k + 1]} == {HORIZONTAL, VERTICAL}:
            out.append(DIAGONAL)
            k += 2
        else:
            out.append(s)
            k += 1
    return AlignmentPath.from_steps(out)


def path_to_text(path: AlignmentPath) -> str:
    return "".join(f"{a},{b}\n" for a, b in path.points)


def path_from_text(text: str) -> AlignmentPath:
    pts = [tuple(int(c) for c in tok.split(",")) for tok in text.split()]
    return AlignmentPath(pts)
