"""Star-tree sequence evolution under the TKF91 indel process with Jukes-Cantor
substitutions, keeping the true alignment.

Every branch starts from the same ancestor.  Along a branch of length ``t``:

* each ancestral residue survives with probability ``exp(-mu t)``;
* a surviving residue changes to each of the three other bases with
  probability ``(1 - exp(-4 alpha t / 3)) / 4``;
* the immortal link and every surviving residue are followed by a
  geometric number of new residues, ``P(k) = (1 - beta) beta**k``;
* a deleted residue leaves ``k >= 1`` new residues with probability
  ``gamma (1 - beta) beta**(k-1)``, none otherwise.

New residues are uniform over ACGT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .median import pairwise_path_from_msa
from .paths import AlignmentPath
from .seqio import DNA, GAP, Msa, Sequence

BASES = np.frombuffer(DNA.symbols.encode(), np.uint8)


@dataclass(frozen=True)
class SimParams:
    n_ancestor: int = 100
    k: int = 10
    lam: float = 0.03
    mu: float = 0.03
    alpha: float = 0.1
    branch_length: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if min(self.lam, self.mu, self.alpha) < 0:
            raise ValueError("rates must be nonnegative")
        if self.branch_length <= 0:
            raise ValueError("branch length must be positive")
        if self.n_ancestor < 1 or self.k < 1:
            raise ValueError("need at least one ancestral residue and one sequence")


@dataclass
class Branch:
    """One descendant with its ancestral bookkeeping.

    ``origin[r]`` is the 1-based ancestral position of residue ``r`` or 0 for an
    inserted residue; ``after[r]`` is the ancestral position an inserted residue
    follows (0 for the immortal link).
    """

    residues: str
    origin: np.ndarray
    after: np.ndarray


@dataclass
class SimOutput:
    ancestor: Sequence
    descendants: list[Sequence]
    reference: Msa
    branches: list[Branch] = field(repr=False, default_factory=list)


def tkf91_coefficients(lam: float, mu: float, t: float) -> tuple[float, float, float]:
    """Survival probability, insertion ratio ``beta`` and ``gamma`` on a branch of length ``t``."""
    surv = math.exp(-mu * t)
    if mu == 0:
        # pure birth: geometric bursts with the Yule ratio
        beta = 1.0 - math.exp(-lam * t)
        return 1.0, beta, 0.0
    if math.isclose(lam, mu, rel_tol=1e-12):
        beta = lam * t / (1.0 + lam * t)
        ratio = t / (1.0 + lam * t)
    else:
        e = math.exp((lam - mu) * t)
        beta = lam * (1.0 - e) / (mu - lam * e)
        ratio = (1.0 - e) / (mu - lam * e)
    gamma = 1.0 - mu * ratio / (1.0 - surv)
    return surv, beta, max(gamma, 0.0)


def _branch_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def evolve_branch(ancestor: np.ndarray, p: SimParams, rng: np.random.Generator) -> Branch:
    """Evolve a uint8-coded ancestor along one branch."""
    n = len(ancestor)
    t = p.branch_length
    surv, beta, gamma = tkf91_coefficients(p.lam, p.mu, t)
    alive = rng.random(n) < surv
    # geometric(1 - beta) on {1, 2, ...}; shift to {0, 1, ...}
    burst = rng.geometric(1.0 - beta, size=n + 1) - 1 if beta > 0 else np.zeros(n + 1, np.int64)
    dead_has = rng.random(n) < gamma
    counts = burst.copy()
    counts[1:] = np.where(alive, burst[1:], np.where(dead_has, burst[1:] + 1, 0))
    p_change = 0.25 * (1.0 - math.exp(-4.0 * p.alpha * t / 3.0))
    # shift 1..3 codes a change to one of the other three bases, uniformly
    change = rng.random(n) < 3.0 * p_change
    shift = rng.integers(1, 4, size=n)
    codes = np.searchsorted(BASES, ancestor)
    codes = np.where(change, (codes + shift) % 4, codes)

    total_ins = int(counts.sum())
    new = rng.integers(0, 4, size=total_ins)
    out_codes, origin, after = [], [], []
    k = 0
    for a in range(n + 1):
        if a > 0 and alive[a - 1]:
            out_codes.append(codes[a - 1])
            origin.append(a)
            after.append(a)
        c = int(counts[a])
        out_codes.extend(new[k : k + c].tolist())
        origin.extend([0] * c)
        after.extend([a] * c)
        k += c
    seq = BASES[np.asarray(out_codes, np.int64)].tobytes().decode() if out_codes else ""
    return Branch(seq, np.asarray(origin, np.int64), np.asarray(after, np.int64))


def reference_alignment(ancestor_len: int, branches: list[Branch], ids: list[str]) -> Msa:
    """Lay out the true alignment on ancestral coordinates.

    Inserts following ancestral position ``a`` go in a block after column
    ``a``, one sub-block per branch, left-justified.  Ancestral columns deleted
    on every branch are dropped; the remaining ones are flagged homologous.
    """
    k = len(branches)
    cols: list[list[str]] = []
    hom: list[int] = []
    for a in range(ancestor_len + 1):
        if a > 0:
            col = [GAP] * k
            for i, b in enumerate(branches):
                hit = np.flatnonzero(b.origin == a)
                if hit.size:
                    col[i] = b.residues[hit[0]]
            if any(ch != GAP for ch in col):
                hom.append(len(cols))
                cols.append(col)
        for i, b in enumerate(branches):
            ins = np.flatnonzero((b.origin == 0) & (b.after == a))
            for r in ins:
                col = [GAP] * k
                col[i] = b.residues[r]
                cols.append(col)
    rows = ["".join(c[i] for c in cols) for i in range(k)]
    return Msa(rows, ids, frozenset(hom))


def simulate(params: SimParams, replicate: int = 0) -> SimOutput:
    """Draw an ancestor and ``params.k`` descendants on a star tree.

    RNG streams are keyed by ``(seed, k, replicate, branch)``; branch 0 draws
    the ancestor, so results do not depend on how replicates are scheduled.
    """
    anc_rng = _branch_rng(params.seed, params.k, replicate, 0)
    ancestor = BASES[anc_rng.integers(0, 4, size=params.n_ancestor)]
    branches = [
        evolve_branch(ancestor, params, _branch_rng(params.seed, params.k, replicate, b + 1))
        for b in range(params.k)
    ]
    ids = [f"s{b + 1}" for b in range(params.k)]
    ref = reference_alignment(params.n_ancestor, branches, ids)
    return SimOutput(
        ancestor=Sequence("ancestor", ancestor.tobytes().decode(), DNA),
        descendants=[Sequence(i, b.residues, DNA) for i, b in zip(ids, branches)],
        reference=ref,
        branches=branches,
    )


def extract_reference_pairwise(output: SimOutput, i: int, j: int) -> AlignmentPath:
    """True pairwise path of descendants ``i`` and ``j``."""
    return pairwise_path_from_msa(output.reference, i, j)
