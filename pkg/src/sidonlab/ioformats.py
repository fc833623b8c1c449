"""Text and JSON formats for point sets, count profiles, and records.

Point-set text format:
    # comments start with '#', blank lines are skipped
    n=7 d=1          <- header, first non-comment line
    0                <- one point per line, coordinates comma-separated
    1
    4
    6

The compact alternative is a rank-list JSON object
{"n": 7, "d": 1, "ranks": [0, 1, 4, 6]}.

All CSV uses '.' decimal separator, LF line endings, UTF-8.
"""

from __future__ import annotations

import json
import re
from typing import Iterable, Optional, Sequence, TextIO

from .grid import GridParams, Point, rank, unrank, validate_point
from .randomlab import ExperimentRecord

_HEADER_RE = re.compile(r"^n\s*=\s*(\d+)\s+d\s*=\s*(\d+)$")


class ParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_point_file(text: str) -> tuple[GridParams, list[Point]]:
    g: Optional[GridParams] = None
    points: list[Point] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if g is None:
            m = _HEADER_RE.match(line)
            if not m:
                raise ParseError(f"expected header 'n=<int> d=<int>', got {line!r}", lineno)
            g = GridParams(int(m.group(1)), int(m.group(2)))
            continue
        try:
            coords = tuple(int(c.strip()) for c in line.split(","))
            points.append(validate_point(coords, g))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from exc
    if g is None:
        raise ParseError("missing 'n=<int> d=<int>' header", 1)
    return g, points


def write_point_file(points: Iterable[Sequence[int]], g: GridParams) -> str:
    pts = sorted((validate_point(p, g) for p in points), key=lambda p: rank(p, g))
    lines = [f"n={g.n} d={g.d}"]
    lines += [",".join(str(c) for c in p) for p in pts]
    return "\n".join(lines) + "\n"


def parse_rank_json(text: str) -> tuple[GridParams, list[Point]]:
    obj = json.loads(text)
    g = GridParams(int(obj["n"]), int(obj["d"]))
    return g, [unrank(int(r), g) for r in obj["ranks"]]


def write_rank_json(points: Iterable[Sequence[int]], g: GridParams) -> str:
    ranks = sorted(rank(validate_point(p, g), g) for p in points)
    return json.dumps({"n": g.n, "d": g.d, "ranks": ranks})


# ---------------------------------------------------------------------------
# Experiment records

RECORD_HEADER = "n,d,p,a,seed,trial,sample_size,F_lower,F_exact,status,elapsed_s"


def record_to_csv_row(rec: ExperimentRecord, timings: bool = False) -> str:
    a = repr(rec.a) if rec.a is not None else ""
    f_exact = str(rec.F_exact) if rec.F_exact is not None else ""
    elapsed = repr(rec.elapsed_s) if timings else ""
    return (
        f"{rec.n},{rec.d},{rec.p!r},{a},{rec.seed},{rec.trial},"
        f"{rec.sample_size},{rec.F_lower},{f_exact},{rec.status},{elapsed}"
    )


def write_records_csv(records: Iterable[ExperimentRecord], fh: TextIO, timings: bool = False) -> None:
    fh.write(RECORD_HEADER + "\n")
    for rec in records:
        fh.write(record_to_csv_row(rec, timings) + "\n")


def record_to_json(rec: ExperimentRecord, timings: bool = False) -> str:
    return json.dumps(
        {
            "n": rec.n,
            "d": rec.d,
            "p": rec.p,
            "a": rec.a,
            "seed": rec.seed,
            "trial": rec.trial,
            "sample_size": rec.sample_size,
            "F_lower": rec.F_lower,
            "F_exact": rec.F_exact,
            "status": rec.status,
            "elapsed_s": rec.elapsed_s if timings else None,
        }
    )


def read_records_csv(text: str) -> list[ExperimentRecord]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != RECORD_HEADER:
        raise ValueError(f"bad records header: {lines[0] if lines else '<empty>'!r}")
    records = []
    for ln in lines[1:]:
        f = ln.split(",")
        records.append(
            ExperimentRecord(
                n=int(f[0]),
                d=int(f[1]),
                p=float(f[2]),
                a=float(f[3]) if f[3] else None,
                seed=int(f[4]),
                trial=int(f[5]),
                sample_size=int(f[6]),
                F_lower=int(f[7]),
                F_exact=int(f[8]) if f[8] else None,
                status=f[9],
                elapsed_s=float(f[10]) if f[10] else 0.0,
            )
        )
    return records
