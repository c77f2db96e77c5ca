"""Sequences, alphabets, alignments and their FASTA representations."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, TextIO

GAP = "-"
LINE_WIDTH = 80


class FastaError(ValueError):
    """Raised on malformed FASTA input."""


@dataclass(frozen=True)
class Alphabet:
    kind: str
    symbols: str

    def __post_init__(self):
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be unique")
        if self.symbols != self.symbols.upper() or GAP in self.symbols:
            raise ValueError("alphabet symbols must be uppercase residues")

    def __contains__(self, ch: str) -> bool:
        return ch in self.symbols


DNA = Alphabet("DNA", "ACGT")
PROTEIN = Alphabet("Protein", "ARNDCQEGHILKMFPSTWYV")

ALPHABETS = {"dna": DNA, "protein": PROTEIN}


@dataclass(frozen=True)
class Sequence:
    id: str
    residues: str
    alphabet: Alphabet | None = None

    def __post_init__(self):
        if self.alphabet is not None:
            for ch in self.residues:
                if ch not in self.alphabet:
                    raise ValueError(
                        f"residue {ch!r} of {self.id!r} not in {self.alphabet.kind} alphabet"
                    )

    def __len__(self) -> int:
        return len(self.residues)


@dataclass(frozen=True)
class Msa:
    """Rows of equal length over residues plus ``'-'``.

    ``homologous_columns`` holds 0-based column indices, or ``None`` when the
    alignment carries no homology annotation.
    """

    rows: tuple[str, ...]
    ids: tuple[str, ...]
    homologous_columns: frozenset[int] | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "ids", tuple(self.ids))
        if self.homologous_columns is not None:
            object.__setattr__(self, "homologous_columns", frozenset(self.homologous_columns))
        if len(self.rows) != len(self.ids):
            raise ValueError("number of rows and ids differ")
        if len({len(r) for r in self.rows}) > 1:
            raise ValueError("alignment rows have different lengths")
        if self.homologous_columns is not None:
            bad = [c for c in self.homologous_columns if not 0 <= c < self.width]
            if bad:
                raise ValueError(f"homologous columns out of range: {sorted(bad)}")

    @property
    def width(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def __len__(self) -> int:
        return len(self.rows)

    def sequences(self) -> list[Sequence]:
        return [Sequence(i, r.replace(GAP, "")) for i, r in zip(self.ids, self.rows)]

    def select(self, indices: Iterable[int]) -> "Msa":
        """Project onto a subset of rows, dropping columns that become gap-only."""
        rows = [self.rows[i] for i in indices]
        ids = [self.ids[i] for i in indices]
        keep = [c for c in range(self.width) if any(r[c] != GAP for r in rows)]
        hom = None
        if self.homologous_columns is not None:
            remap = {c: k for k, c in enumerate(keep)}
            hom = {remap[c] for c in self.homologous_columns if c in remap}
        return Msa(["".join(r[c] for c in keep) for r in rows], ids, hom)


def parse_fasta(handle: TextIO | str, alphabet: Alphabet | None = None) -> list[Sequence]:
    """Parse FASTA (gapped or not) into ``(id, text)`` records, checking characters.

    Gaps are accepted; callers that want plain sequences use :func:`read_fasta`.
    """
    if isinstance(handle, str):
        handle = io.StringIO(handle)
    allowed = None if alphabet is None else set(alphabet.symbols) | {GAP}
    records: list[tuple[str, list[str], int]] = []
    for lineno, raw in enumerate(handle, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(">"):
            name = line[1:].strip()
            if not name:
                raise FastaError(f"line {lineno}: empty header")
            records.append((name.split()[0], [], lineno))
            continue
        if not records:
            raise FastaError(f"line {lineno}: sequence data before first header")
        chunk = "".join(line.split()).upper()
        for ch in chunk:
            ok = ch in allowed if allowed is not None else (ch.isalpha() or ch == GAP)
            if not ok:
                raise FastaError(f"line {lineno}: illegal character {ch!r}")
        records[-1][1].append(chunk)
    out = []
    for name, parts, lineno in records:
        text = "".join(parts)
        if not text:
            raise FastaError(f"line {lineno}: empty record {name!r}")
        out.append(Sequence(name, text))
    return out


def read_fasta(handle: TextIO | str, alphabet: Alphabet | None = None) -> list[Sequence]:
    """Read ungapped FASTA records; residues are uppercased, order is kept."""
    seqs = parse_fasta(handle, alphabet)
    for s in seqs:
        if GAP in s.residues:
            raise FastaError(f"record {s.id!r} contains gap characters")
    return [Sequence(s.id, s.residues, alphabet) for s in seqs]


def read_aligned_fasta(handle: TextIO | str, alphabet: Alphabet | None = None) -> Msa:
    recs = parse_fasta(handle, alphabet)
    if not recs:
        raise FastaError("empty alignment")
    try:
        return Msa([r.residues for r in recs], [r.id for r in recs])
    except ValueError as exc:
        raise FastaError(str(exc)) from None


def _format_records(pairs: Iterable[tuple[str, str]], width: int) -> str:
    buf = []
    for name, text in pairs:
        buf.append(f">{name}\n")
        for k in range(0, len(text), width):
            buf.append(text[k : k + width] + "\n")
    return "".join(buf)


def write_fasta(seqs: Iterable[Sequence], width: int = LINE_WIDTH) -> str:
    return _format_records(((s.id, s.residues) for s in seqs), width)


def write_aligned_fasta(msa: Msa, width: int = LINE_WIDTH) -> str:
    if len(msa) == 0:
        raise ValueError("empty alignment")
    return _format_records(zip(msa.ids, msa.rows), width)
