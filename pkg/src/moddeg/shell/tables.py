"""Curve tables in a minimal comma-separated schema.

Header row, then one curve per line:

    label,a1,a2,a3,a4,a6,conductor,rank,torsion,degree,selmer2_rank

torsion, degree and selmer2_rank may be empty. Blank lines and lines
starting with '#' are ignored.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from ..elliptic import CurveQ, SingularCurveError
from ..numth import factor, integer_root

COLUMNS = ("label", "a1", "a2", "a3", "a4", "a6", "conductor", "rank", "torsion",
           "degree", "selmer2_rank")
OPTIONAL = ("torsion", "degree", "selmer2_rank")


class TableError(ValueError):
    """One or more malformed rows; .problems lists (line, message)."""

    def __init__(self, path: str, problems: list[tuple[int, str]]):
        self.path = path
        self.problems = problems
        shown = "; ".join(f"line {n}: {m}" for n, m in problems[:10])
        more = f" (+{len(problems) - 10} more)" if len(problems) > 10 else ""
        super().__init__(f"{path}: {shown}{more}")


@dataclass(frozen=True)
class CurveRecordRow:
    label: str
    ainvs: tuple[int, int, int, int, int]
    conductor: int
    rank: int
    torsion: Optional[int] = None
    degree: Optional[int] = None
    selmer2_rank: Optional[int] = None

    def curve(self) -> CurveQ:
        return CurveQ.from_ainvs(
            self.ainvs,
            self.label,
            conductor=self.conductor,
            rank=self.rank,
            torsion_order=self.torsion,
            modular_degree=self.degree,
            selmer2_rank=self.selmer2_rank,
        )

    def cells(self) -> list[str]:
        opt = lambda v: "" if v is None else str(v)
        return [self.label, *map(str, self.ainvs), str(self.conductor), str(self.rank),
                opt(self.torsion), opt(self.degree), opt(self.selmer2_rank)]


def _conductor_problem(E: CurveQ, N: int) -> Optional[str]:
    """Primes >= 5 of N must be the primes >= 5 of the minimal discriminant.

    Checked without factoring the discriminant: once 2, 3 and the primes of
    N are removed, what is left must be a 12th power (a non-minimal scaling).
    """
    rest = abs(E.discriminant)
    for q in (2, 3, *(q for q in factor(N).primes if q >= 5)):
        if q >= 5 and rest % q:
            return f"conductor {N} has the prime {q} of good reduction"
        while rest % q == 0:
            rest //= q
    if integer_root(rest, 12) ** 12 != rest:
        return f"discriminant has primes >= 5 outside conductor {N}"
    return None


def parse_row(cells: Sequence[str], validate: bool = True) -> CurveRecordRow:
    if len(cells) != len(COLUMNS):
        raise ValueError(f"expected {len(COLUMNS)} fields, got {len(cells)}")
    vals = dict(zip(COLUMNS, (c.strip() for c in cells)))
    label = vals["label"]
    if not label:
        raise ValueError("empty label")
    out: dict[str, Optional[int]] = {}
    for k in COLUMNS[1:]:
        if vals[k] == "":
            if k in OPTIONAL:
                out[k] = None
                continue
            raise ValueError(f"missing {k}")
        try:
            out[k] = int(vals[k])
        except ValueError:
            raise ValueError(f"{k} = {vals[k]!r} is not an integer") from None
    if out["conductor"] <= 0:
        raise ValueError("conductor must be positive")
    if out["rank"] < 0:
        raise ValueError("rank must be nonnegative")
    for k in OPTIONAL:
        if out[k] is not None and out[k] < (1 if k != "selmer2_rank" else 0):
            raise ValueError(f"{k} out of range")
    row = CurveRecordRow(
        label,
        tuple(out[k] for k in ("a1", "a2", "a3", "a4", "a6")),
        out["conductor"],
        out["rank"],
        out["torsion"],
        out["degree"],
        out["selmer2_rank"],
    )
    try:
        E = row.curve()
    except SingularCurveError as exc:
        raise ValueError(str(exc)) from None
    if validate:
        msg = _conductor_problem(E, row.conductor)
        if msg:
            raise ValueError(msg)
    return row


def parse_curves(text: str, source: str = "<string>", validate: bool = True) -> list[CurveRecordRow]:
    problems: list[tuple[int, str]] = []
    rows: list[CurveRecordRow] = []
    seen: dict[str, int] = {}
    header_seen = False
    for n, cells in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not cells or not "".join(cells).strip() or cells[0].lstrip().startswith("#"):
            continue
        if not header_seen:
            header_seen = True
            if tuple(c.strip() for c in cells) != COLUMNS:
                problems.append((n, f"header must be {','.join(COLUMNS)}"))
                break
            continue
        try:
            row = parse_row(cells, validate)
        except ValueError as exc:
            problems.append((n, str(exc)))
            continue
        if row.label in seen:
            problems.append((n, f"duplicate label {row.label} (first on line {seen[row.label]})"))
            continue
        seen[row.label] = n
        rows.append(row)
    if not header_seen:
        problems.append((1, "missing header"))
    if problems:
        raise TableError(source, problems)
    return rows


def load_curves(path: str | Path, validate: bool = True) -> list[CurveRecordRow]:
    """Read and validate a curve table; all bad rows are reported together."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise TableError(str(path), [(0, f"unreadable: {exc.strerror}")]) from None
    return parse_curves(text, str(path), validate)


def serialize(rows: Iterable[CurveRecordRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()


def shipped_table() -> Path:
    return Path(__file__).resolve().parent.parent / "data" / "curves.csv"
