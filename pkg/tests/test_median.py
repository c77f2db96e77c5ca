import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from medwarp.evolve import SimParams, simulate
from medwarp.median import (
    MsaTables,
    TableError,
    align_from_pairwise,
    build_tables,
    compute_weights,
    estimate_n_hat,
    extract_tables,
    integer_median,
    median_columns,
    median_path,
    median_positions,
    pairwise_from_msa,
    pairwise_path_from_msa,
    render,
    tables_from_tsv,
    tables_to_tsv,
    weighted_integer_median,
)
from medwarp.pairwise import pairwise_table
from medwarp.paths import AlignmentPath, check_path, invert
from medwarp.scoring import score
from medwarp.seqio import Msa, Sequence
from oracles import random_path_points

XYZ_HOM = [[2, 3, 4, 0], [1, 2, 0, 6], [2, 3, 4, 5]]
XYZ_INS = [[1, 0, 0, 2, 1], [0, 0, 0, 3, 0], [1, 0, 0, 0, 1]]
# 0-based positions of the four columns marked homologous
XYZ_HOM_COLS = {1, 2, 3, 7}


def brute_median(values):
    s = sorted(values)
    k = len(s)
    if k % 2:
        return s[k // 2]
    total = s[k // 2 - 1] + s[k // 2]
    return total // 2 if total % 2 == 0 else int(np.floor(total / 2))


def brute_weighted_median(values, weights):
    # smallest v with F(v) >= 1/2 and smallest v with F(v) > 1/2, by enumeration
    cands = sorted(set(values))
    F = {v: sum(w for x, w in zip(values, weights) if x <= v) for v in cands}
    lo = min(v for v in cands if F[v] >= 0.5 - 1e-9)
    hi = min(v for v in cands if F[v] > 0.5 + 1e-9)
    return (lo + hi) // 2


# ---- medians -------------------------------------------------------------


@pytest.mark.parametrize("values,expected", [([4, 5], 4), ([3, 7, 7], 7), ([2, 4, 6, 8], 5), ([-3, 0], -2)])
def test_integer_median(values, expected):
    assert integer_median(values) == expected


def test_integer_median_empty():
    with pytest.raises(ValueError):
        integer_median([])


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=40))
def test_integer_median_matches_sorting(values):
    assert integer_median(values) == brute_median(values)


@pytest.mark.parametrize("lengths,expected", [([100, 100, 100], 100), ([98, 100, 103, 105], 101), ([6, 7, 6], 6)])
def test_estimate_n_hat(lengths, expected):
    assert estimate_n_hat(lengths) == expected


def test_weighted_median_examples():
    assert weighted_integer_median([3, 7, 7], [1 / 3] * 3) == 7
    assert weighted_integer_median([2, 9], [0.9, 0.1]) == 2
    with pytest.raises(ValueError):
        weighted_integer_median([1, 2], [1.0])


def test_weighted_median_uniform_reduces_to_plain():
    rng = random.Random(3)
    for _ in range(100):
        k = rng.randint(1, 12)
        vals = [rng.randint(0, 40) for _ in range(k)]
        w = compute_weights([0.0] * k, 0.1)
        assert weighted_integer_median(vals, w) == integer_median(vals)


@given(st.lists(st.tuples(st.integers(0, 30), st.integers(1, 20)), min_size=1, max_size=15))
def test_weighted_median_matches_enumeration(pairs):
    vals = [v for v, _ in pairs]
    w = np.array([c for _, c in pairs], float)
    w /= w.sum()
    assert weighted_integer_median(vals, w) == brute_weighted_median(vals, w)


def test_compute_weights():
    assert np.allclose(compute_weights([0.3] * 4, 0.01), 0.25)
    assert np.allclose(compute_weights([0.0, 1.0], 1.0), [2 / 3, 1 / 3])
    assert np.allclose(compute_weights([5.0], 1.0), [1.0])
    with pytest.raises(ValueError):
        compute_weights([-1.0, 1.0], 1.0)


@given(st.lists(st.floats(0, 10), min_size=1, max_size=20), st.floats(1e-3, 5))
def test_weights_are_a_distribution(d, eps):
    w = compute_weights(d, eps)
    assert np.all((w > 0) & (w <= 1))
    assert abs(w.sum() - 1) < 1e-12


# ---- median path ---------------------------------------------------------


def _path_to(pts_per_u, height):
    """One-column path whose only horizontal-crossing step is (0,a)->(1,b)."""
    a, b = pts_per_u
    return AlignmentPath([(0, v) for v in range(a + 1)] + [(1, v) for v in range(b, height + 1)])


def test_median_of_five_segments():
    # five segments at one position: (1,1) (1,2) (2,3) (3,3) (4,5); the middle one is (2,3)
    segs = [(1, 1), (1, 2), (2, 3), (3, 3), (4, 5)]
    m1, m2 = median_positions([_path_to(s, 6) for s in segs])
    assert (int(m1[0]), int(m2[0])) == (2, 3)


def test_median_path_of_three_paths():
    below = AlignmentPath([(0, 0), (1, 0), (2, 1), (3, 2), (3, 3), (3, 4), (4, 5), (5, 5), (6, 5), (7, 5), (8, 5)])
    above = AlignmentPath([(0, 0), (0, 1), (0, 2), (1, 3), (2, 4), (3, 4), (4, 4), (5, 4), (6, 5), (7, 6), (8, 6)])
    got = median_path(1, [below, AlignmentPath.diagonal(8), above], estimate_n_hat([5, 8, 6]))
    assert got.tolist() == [(0, 0), (1, 1), (2, 2), (3, 3), (3, 4), (4, 4), (5, 5), (6, 5), (7, 6), (8, 6)]


def test_median_path_golden_4x4():
    # hand-run: medians per u are (1,2) (2,2) (2,3) (3,4); one vertical step at
    # the start, three repeated points dropped
    p_self = AlignmentPath.diagonal(4)
    p2 = AlignmentPath([(0, 0), (0, 1), (1, 2), (2, 2), (3, 3), (4, 4)])
    p3 = AlignmentPath([(0, 0), (0, 1), (1, 2), (2, 3), (2, 4), (3, 5), (4, 5)])
    n_hat = estimate_n_hat([4, 4, 5])
    got = median_path(0, [p_self, p2, p3], n_hat)
    assert got.tolist() == [(0, 0), (0, 1), (1, 2), (2, 2), (3, 3), (4, 4)]
    seqs = [Sequence("a", "ACGT"), Sequence("b", "ACGT"), Sequence("c", "ACGTA")]
    table = [[p_self, p2, p3], [invert(p2), p_self, None], [invert(p3), None, AlignmentPath.diagonal(5)]]
    # complete the table with any consistent pair for (1,2)
    table[1][2] = AlignmentPath.from_steps([(1, 1)] * 4 + [(0, 1)])
    table[2][1] = invert(table[1][2])
    t = build_tables(seqs, table)
    assert t.hom[0].tolist() == [0, 1, 3, 4]
    assert t.ins[0].tolist() == [0, 0, 1, 0, 0]
    assert t.paths[0] == got


def test_identical_sequences_give_diagonal():
    n, k = 9, 4
    seqs = [Sequence(f"s{i}", "ACGTTGCAA") for i in range(k)]
    table = [[AlignmentPath.diagonal(n)] * k for _ in range(k)]
    assert median_path(2, table[2], n) == AlignmentPath.diagonal(n)
    t = build_tables(seqs, table)
    assert t.n_hat == n
    assert (t.hom == np.arange(1, n + 1)).all() and (t.ins == 0).all()
    msa = render(t, seqs)
    assert msa.rows == tuple(s.residues for s in seqs)


def test_median_path_requires_self_alignment():
    with pytest.raises(TableError):
        median_path(0, [AlignmentPath([(0, 0), (1, 0), (1, 1)]), AlignmentPath.diagonal(1)], 1)


def test_build_tables_rejects_inconsistent_table():
    seqs = [Sequence("a", "AC"), Sequence("b", "AC")]
    d = AlignmentPath.diagonal(2)
    other = AlignmentPath([(0, 0), (1, 0), (2, 1), (2, 2)])
    with pytest.raises(TableError, match="inverse"):
        build_tables(seqs, [[d, other], [other, d]])


def _random_bundle(rng, k):
    lengths = [rng.randint(0, 12) for _ in range(k)]
    i = rng.randrange(k)
    paths = [
        AlignmentPath.diagonal(lengths[i]) if j == i else AlignmentPath(random_path_points(lengths[i], lengths[j], rng))
        for j in range(k)
    ]
    return i, paths, estimate_n_hat(lengths)


def test_median_path_validity_on_10k_bundles():
    rng = random.Random(2024)
    for _ in range(10_000):
        k = rng.randint(1, 8)
        i, paths, n_hat = _random_bundle(rng, k)
        m1, m2 = median_positions(paths)
        d = m2 - m1
        assert ((d == 0) | (d == 1)).all()
        assert (m2[:-1] <= m1[1:]).all()
        assert (m2 <= n_hat).all()
        p = median_path(i, paths, n_hat)
        check_path(p.points)
        assert (p.n, p.m) == (paths[i].n, n_hat)


# ---- tables --------------------------------------------------------------


def test_extract_xyz_tables(xyz_msa):
    t = extract_tables(xyz_msa, XYZ_HOM_COLS)
    assert t.n_hat == 4
    assert t.hom.tolist() == XYZ_HOM
    assert t.ins.tolist() == XYZ_INS


def test_render_xyz_tables(xyz_msa):
    t = MsaTables(4, XYZ_HOM, XYZ_INS)
    seqs = [Sequence("X", "ACAGTAT"), Sequence("Y", "CTCCAG"), Sequence("Z", "TCACCT")]
    msa = render(t, seqs)
    assert msa.rows == ("ACAGTA--T", "-CT-CCAG-", "TCAC---CT")
    assert msa.width == 4 + (1 + 0 + 0 + 3 + 1)
    assert msa.homologous_columns == XYZ_HOM_COLS


def test_pair_extracted_from_xyz_alignment(xyz_msa):
    # X/Y columns, none gap/gap: A/- C/C A/T G/- T/C A/C -/A -/G T/-
    p = pairwise_path_from_msa(xyz_msa, 0, 1)
    assert p.tolist() == [(0, 0), (1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (6, 4), (6, 5), (6, 6), (7, 6)]
    assert (p.n, p.m) == (7, 6)


def test_single_sequence_tables():
    t = extract_tables(Msa(["ACGT"], ["a"]), {0, 1, 2, 3})
    assert t.hom.tolist() == [[1, 2, 3, 4]] and t.ins.tolist() == [[0] * 5]


def test_extract_rejects_bad_columns(xyz_msa):
    with pytest.raises(TableError):
        extract_tables(xyz_msa, {0, 9})


def test_render_detects_inconsistent_tables():
    seqs = [Sequence("a", "ACG")]
    with pytest.raises(TableError):
        render(MsaTables(2, [[1, 2]], [[0, 0, 0]]), seqs)
    with pytest.raises(TableError):
        render(MsaTables(2, [[2, 0]], [[0, 0, 2]]), seqs)


@st.composite
def tables(draw):
    k = draw(st.integers(1, 6))
    n_hat = draw(st.integers(0, 10))
    present = draw(st.lists(st.lists(st.booleans(), min_size=n_hat, max_size=n_hat), min_size=k, max_size=k))
    ins = draw(st.lists(st.lists(st.integers(0, 3), min_size=n_hat + 1, max_size=n_hat + 1), min_size=k, max_size=k))
    hom = []
    for pres, run in zip(present, ins):
        row, p = [], 0
        for c in range(n_hat):
            p += run[c]
            if pres[c]:
                p += 1
                row.append(p)
            else:
                row.append(0)
        hom.append(row)
    return MsaTables(n_hat, np.array(hom, np.int64).reshape(k, n_hat), np.array(ins, np.int64))


@given(tables())
def test_render_extract_round_trip(t):
    rng = random.Random(int(t.hom.sum() + 7 * t.ins.sum()))
    seqs = [Sequence(f"s{i}", "".join(rng.choice("ACGT") for _ in range(n))) for i, n in enumerate(t.lengths())]
    msa = render(t, seqs)
    back = extract_tables(msa)
    assert back == t
    assert [s.residues for s in msa.sequences()] == [s.residues for s in seqs]
    for i in range(t.k):
        check_path(back.paths[i].points)


@given(tables())
def test_tables_tsv_round_trip(t):
    assert tables_from_tsv(tables_to_tsv(t)) == t


def test_tsv_header():
    text = tables_to_tsv(MsaTables(4, XYZ_HOM, XYZ_INS))
    assert text.splitlines()[0] == "K\t3\tN_hat\t4"
    assert len(text.splitlines()) == 7


# ---- build_tables on simulated data ---------------------------------------


def _sim_tables(k, seed, n=20):
    out = simulate(SimParams(n_ancestor=n, k=k, seed=seed))
    return out, build_tables(out.descendants, pairwise_from_msa(out.reference))


def test_true_pairwise_paths_small_instance():
    out = simulate(SimParams(n_ancestor=20, k=3, seed=5))
    msa = align_from_pairwise(out.descendants, pairwise_from_msa(out.reference))
    rep = score(msa, out.reference)
    assert rep.sp == 1.0 and rep.tc == 1.0


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 9), st.integers(0, 10_000), st.data())
def test_table_invariants_and_permutation(k, seed, data):
    out, t = _sim_tables(k, seed)
    lengths = [len(s) for s in out.descendants]
    t.check(lengths)
    assert t.ins.shape == (k, t.n_hat + 1) and t.hom.shape == (k, t.n_hat)
    for i in range(k):
        assert t.paths[i] == t.__class__(t.n_hat, t.hom[i : i + 1], t.ins[i : i + 1]).paths[0]
    perm = data.draw(st.permutations(range(k)))
    pw = pairwise_from_msa(out.reference)
    seqs = [out.descendants[p] for p in perm]
    table = [[pw[a][b] for b in perm] for a in perm]
    tp = build_tables(seqs, table)
    assert tp.n_hat == t.n_hat
    assert np.array_equal(tp.hom, t.hom[perm]) and np.array_equal(tp.ins, t.ins[perm])


def test_uniform_weights_equal_unweighted_odd_k():
    for seed in range(5):
        out = simulate(SimParams(n_ancestor=40, k=7, seed=seed))
        pw = pairwise_from_msa(out.reference)
        plain = build_tables(out.descendants, pw)
        weighted = build_tables(out.descendants, pw, compute_weights([0.2] * 7, 0.5))
        assert plain == weighted


def test_weights_change_the_median():
    # with one sequence weighted overwhelmingly, its own (diagonal) view dominates
    out = simulate(SimParams(n_ancestor=40, k=5, seed=3, lam=0.1, mu=0.1))
    pw = pairwise_from_msa(out.reference)
    w = compute_weights([0.0, 10, 10, 10, 10], 1e-6)
    t = build_tables(out.descendants, pw, w)
    t.check([len(s) for s in out.descendants])
    assert t.hom[0].tolist()[: len(out.descendants[0])] == list(range(1, len(out.descendants[0]) + 1))[: t.n_hat]


def test_threads_do_not_change_tables():
    out, t = _sim_tables(12, 9, n=60)
    assert build_tables(out.descendants, pairwise_from_msa(out.reference), threads=4) == t
