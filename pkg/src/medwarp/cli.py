"""Command-line driver: ``medwarp {pairwise,align,score,simulate,bench}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import benchmark, evolve, median, pairwise, scoring, seqio

log = logging.getLogger("medwarp")


def _read_text(path: str | None) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    return Path(path).read_text()


def _write_text(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _scheme(args) -> pairwise.ScoringScheme:
    if args.scheme == "blosum62":
        return pairwise.blosum62_scheme(args.mode)
    if args.scheme == "dna-default":
        return pairwise.dna_default_scheme(args.mode)
    return pairwise.scheme_from_matrix(Path(args.scheme).read_text(), mode=args.mode)


def _read_sequences(args, minimum: int) -> list[seqio.Sequence]:
    seqs = seqio.read_fasta(_read_text(args.inp), seqio.ALPHABETS[args.alphabet])
    if len(seqs) < minimum:
        raise ValueError(f"need at least {minimum} sequences, got {len(seqs)}")
    return seqs


def _read_weights(path: str, ids: list[str], epsilon: float):
    dist = {}
    for ln in Path(path).read_text().splitlines():
        if ln.strip() and not ln.startswith("#"):
            name, value = ln.split()[:2]
            dist[name] = float(value)
    missing = [i for i in ids if i not in dist]
    if missing:
        raise ValueError(f"no distance for {missing}")
    return median.compute_weights([dist[i] for i in ids], epsilon)


def _sim_params(args, k: int | None = None) -> evolve.SimParams:
    return evolve.SimParams(
        n_ancestor=args.n_ancestor,
        k=k if k is not None else args.k,
        lam=args.lam,
        mu=args.mu,
        alpha=args.alpha,
        branch_length=args.branch_length,
        seed=args.seed,
    )


def cmd_pairwise(args) -> int:
    seqs = _read_sequences(args, 2)
    results = pairwise.align_all(seqs, _scheme(args), args.threads)
    lines = ["i\tj\tscore\tpath\n"]
    for (i, j), res in sorted(results.items()):
        pts = " ".join(f"{a},{b}" for a, b in res.path.tolist())
        lines.append(f"{seqs[i].id}\t{seqs[j].id}\t{res.score:g}\t{pts}\n")
    _write_text(args.out, "".join(lines))
    return 0


def cmd_align(args) -> int:
    seqs = _read_sequences(args, 2)
    results = pairwise.align_all(seqs, _scheme(args), args.threads)
    table = pairwise.pairwise_table([len(s) for s in seqs], results)
    weights = None
    if args.weights:
        weights = _read_weights(args.weights, [s.id for s in seqs], args.epsilon)
    tables = median.build_tables(seqs, table, weights, args.threads)
    if args.tables:
        Path(args.tables).write_text(median.tables_to_tsv(tables))
    _write_text(args.out, seqio.write_aligned_fasta(median.render(tables, seqs)))
    return 0


def cmd_score(args) -> int:
    test = seqio.read_aligned_fasta(_read_text(args.inp))
    ref = seqio.read_aligned_fasta(_read_text(args.ref))
    report = scoring.score(test, ref, args.min_column_residues)
    _write_text(args.out, report.to_tsv())
    return 0


def cmd_simulate(args) -> int:
    out = evolve.simulate(_sim_params(args), args.replicate)
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    Path(f"{prefix}.ancestor.fa").write_text(seqio.write_fasta([out.ancestor]))
    Path(f"{prefix}.descendants.fa").write_text(seqio.write_fasta(out.descendants))
    Path(f"{prefix}.reference.fa").write_text(seqio.write_aligned_fasta(out.reference))
    hom = " ".join(map(str, sorted(out.reference.homologous_columns)))
    Path(f"{prefix}.homologous.txt").write_text(hom + "\n")
    return 0


def cmd_bench(args) -> int:
    k_list = [int(v) for v in args.k_list.split(",") if v]
    rows = benchmark.run_benchmark(k_list, args.replicates, _sim_params(args, k_list[0]), _scheme(args), args.threads)
    _write_text(args.out, benchmark.BENCH_HEADER + "".join(r.to_tsv() for r in rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="medwarp", description="Multiple alignment by median warping.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def io_flags(p, needs_in=True):
        if needs_in:
            p.add_argument("--in", dest="inp", default="-", help="input file ('-' for stdin)")
        p.add_argument("--out", default="-", help="output file ('-' for stdout)")

    def align_flags(p):
        p.add_argument("--alphabet", choices=sorted(seqio.ALPHABETS), default="dna")
        p.add_argument("--scheme", default="dna-default", help="dna-default, blosum62 or a matrix file")
        p.add_argument("--mode", choices=[pairwise.GLOBAL, pairwise.OVERLAP], default=pairwise.GLOBAL)
        p.add_argument("--threads", type=int, default=1)

    def sim_flags(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--n-ancestor", type=int, default=100)
        p.add_argument("--lambda", dest="lam", type=float, default=0.03)
        p.add_argument("--mu", type=float, default=0.03)
        p.add_argument("--alpha", type=float, default=0.1)
        p.add_argument("--branch-length", type=float, default=1.0)

    p = sub.add_parser("pairwise", help="all-pairs alignment paths and scores (TSV)")
    io_flags(p)
    align_flags(p)
    p.set_defaults(func=cmd_pairwise)

    p = sub.add_parser("align", help="median-warping MSA as aligned FASTA")
    io_flags(p)
    align_flags(p)
    p.add_argument("--weights", help="two-column file: sequence id, distance to root")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--tables", help="also write the Hom/Ins tables (TSV) here")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("score", help="SP/TC of --in against --ref")
    io_flags(p)
    p.add_argument("--ref", required=True)
    p.add_argument("--min-column-residues", type=int, default=2)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("simulate", help="simulate a star-tree dataset")
    p.add_argument("--out", default="sim", help="output path prefix")
    sim_flags(p)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--replicate", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="replicate benchmark, long-format TSV")
    io_flags(p, needs_in=False)
    align_flags(p)
    sim_flags(p)
    p.add_argument("--k-list", default="10,20,30,40,50")
    p.add_argument("--replicates", type=int, default=100)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"medwarp {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
