"""Residual reports and their deterministic JSON / CSV rendering."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple, Union

from virlike.catalog import ModVector
from virlike.scalars import format_rational

E34 = "E34"
E35 = "E35"
E36 = "E36"
AXIOM = "AXIOM"
NORM = "NORM"
GRADING = "GRADING"
# classifier diagnostics
FIT_F = "FIT_F"
FIT_G = "FIT_G"
K510 = "K510"
K511 = "K511"

COORDS = ("h", "k", "r", "s", "m", "n")
CSV_HEADER = ["equation_id", *COORDS, "residual"]

Residual = Union[Fraction, ModVector]


@dataclass(frozen=True)
class ResidualEntry:
    equation_id: str
    point: Tuple[Tuple[str, int], ...]
    residual: Residual

    @classmethod
    def make(cls, equation_id: str, residual: Residual, **coords: int) -> "ResidualEntry":
        unknown = set(coords) - set(COORDS)
        if unknown:
            raise ValueError(f"unknown coordinates {sorted(unknown)}")
        point = tuple((c, coords[c]) for c in COORDS if c in coords)
        return cls(equation_id, point, residual)

    @property
    def coords(self) -> Dict[str, int]:
        return dict(self.point)

    def sort_key(self):
        d = self.coords
        return (self.equation_id, tuple((0, 0) if c not in d else (1, d[c]) for c in COORDS))

    def residual_text(self) -> str:
        if isinstance(self.residual, ModVector):
            return ";".join(f"v[{m},{n}]={format_rational(c)}" for (m, n), c in self.residual.items())
        return format_rational(self.residual)

    def to_dict(self) -> Dict[str, Any]:
        if isinstance(self.residual, ModVector):
            residual: Any = self.residual.to_dict()["terms"]
        else:
            residual = format_rational(self.residual)
        return {"equation_id": self.equation_id, "point": self.coords, "residual": residual}


@dataclass
class ResidualReport:
    entries: List[ResidualEntry] = field(default_factory=list)
    checked: int = 0
    incomplete: List[Tuple[str, Tuple[int, ...]]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.entries

    def sorted(self) -> "ResidualReport":
        return ResidualReport(sorted(self.entries, key=ResidualEntry.sort_key), self.checked, sorted(self.incomplete))

    def ids(self) -> List[str]:
        return [e.equation_id for e in self.entries]

    def count(self, equation_id: str) -> int:
        return sum(e.equation_id == equation_id for e in self.entries)

    def extend(self, other: "ResidualReport") -> "ResidualReport":
        self.entries.extend(other.entries)
        self.checked += other.checked
        self.incomplete.extend(other.incomplete)
        return self

    def to_dict(self) -> Dict[str, Any]:
        rep = self.sorted()
        out: Dict[str, Any] = {"pass": rep.passed, "entries": [e.to_dict() for e in rep.entries]}
        if rep.incomplete:
            out["incomplete"] = [{"table": name, "index": list(idx)} for name, idx in rep.incomplete]
        return out


def merge(reports) -> ResidualReport:
    out = ResidualReport()
    for r in reports:
        out.extend(r)
    return out.sorted()


def dumps(data: Any) -> str:
    """Compact, key-order preserving JSON used for every machine-readable output."""
    return json.dumps(data, separators=(",", ":"), ensure_ascii=False)


def emit_report(report: ResidualReport, fmt: str = "json") -> str:
    if fmt == "json":
        return dumps(report.to_dict())
    if fmt == "csv":
        return report_csv(report)
    raise ValueError(f"unknown format {fmt!r}")


def report_csv(report: ResidualReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for e in report.sorted().entries:
        d = e.coords
        writer.writerow([e.equation_id, *("" if c not in d else d[c] for c in COORDS), e.residual_text()])
    return buf.getvalue()


def optional_rational(x: Optional[Fraction]) -> Optional[str]:
    return None if x is None else format_rational(x)
