"""Exact residual checks for two-cell actions over finite index windows.

Two independent routes are provided:

* :func:`module_axiom_residual` computes ``[x,y].v - x.(y.v) + y.(x.v)``
  from the algebra bracket and the module action;
* :func:`fg_equation_residual` evaluates the three coefficient identities
  that the upper/lower split of the operators must satisfy.

Both quantify only over index tuples whose every lookup stays inside the
table domain, so window edges never produce spurious failures.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import jsonschema

from virlike._fastq import fast, slow
from virlike.algebra import CENTRAL, _bracket_terms
from virlike.catalog import FamilySpec, ModVector, act_generator, coeff_f, coeff_g, family_validity
from virlike.report import AXIOM, E34, E35, E36, GRADING, NORM, ResidualEntry, ResidualReport, merge
from virlike.scalars import format_rational, parse_rational, to_scalar

Key = Tuple[int, int, int, int]
Range = Tuple[int, int]


@dataclass(frozen=True)
class Window:
    m_range: Range
    n_range: Range
    r_range: Range
    s_range: Range

    def __post_init__(self):
        for name in ("m_range", "n_range", "r_range", "s_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} is empty: {lo} > {hi}")
            object.__setattr__(self, name, (int(lo), int(hi)))

    @classmethod
    def symmetric(cls, M: int, N: int, R: int, S: int) -> "Window":
        return cls((-M, M), (-N, N), (-R, R), (-S, S))

    @classmethod
    def parse(cls, text: str) -> "Window":
        """``"M,N,R,S"`` meaning m in [-M,M], n in [-N,N], r in [-R,R], s in [-S,S]."""
        parts = [int(p) for p in text.split(",")]
        if len(parts) != 4 or any(p < 0 for p in parts):
            raise ValueError("window must be four non-negative integers 'M,N,R,S'")
        return cls.symmetric(*parts)

    def ms(self) -> range:
        return range(self.m_range[0], self.m_range[1] + 1)

    def ns(self) -> range:
        return range(self.n_range[0], self.n_range[1] + 1)

    def rs(self) -> range:
        return range(self.r_range[0], self.r_range[1] + 1)

    def ss(self) -> range:
        return range(self.s_range[0], self.s_range[1] + 1)

    def keys(self) -> Iterable[Key]:
        return itertools.product(self.rs(), self.ss(), self.ms(), self.ns())

    def points(self) -> Iterable[Tuple[int, int]]:
        return itertools.product(self.ms(), self.ns())

    def to_dict(self):
        return {
            "m_range": list(self.m_range),
            "n_range": list(self.n_range),
            "r_range": list(self.r_range),
            "s_range": list(self.s_range),
        }

    @classmethod
    def from_dict(cls, d) -> "Window":
        return cls(tuple(d["m_range"]), tuple(d["n_range"]), tuple(d["r_range"]), tuple(d["s_range"]))


@dataclass
class ActionTable:
    """Tabulated coefficients ``f[(r,s,m,n)]`` (upper cell) and ``g[(r,s,m,n)]``
    (lower cell) with the declared normalization constants."""

    f: Dict[Key, Fraction]
    g: Dict[Key, Fraction]
    lam: Fraction
    mu: Fraction
    window: Window

    def __post_init__(self):
        self.lam = to_scalar(self.lam)
        self.mu = to_scalar(self.mu)

    def copy(self) -> "ActionTable":
        return ActionTable(dict(self.f), dict(self.g), self.lam, self.mu, self.window)

    def missing(self) -> List[Tuple[str, Key]]:
        out = []
        for key in self.window.keys():
            if key not in self.f:
                out.append(("f", key))
            if key not in self.g:
                out.append(("g", key))
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, ActionTable):
            return NotImplemented
        return (
            self.window == other.window
            and self.lam == other.lam
            and self.mu == other.mu
            and self.f == other.f
            and self.g == other.g
        )

    def to_dict(self):
        def rows(d):
            return [
                {"r": r, "s": s, "m": m, "n": n, "value": format_rational(v)}
                for (r, s, m, n), v in sorted(d.items())
            ]

        return {
            "lambda": format_rational(self.lam),
            "mu": format_rational(self.mu),
            "window": self.window.to_dict(),
            "f": rows(self.f),
            "g": rows(self.g),
        }

    @classmethod
    def from_dict(cls, data) -> "ActionTable":
        """Strict loader: schema, canonical rationals, no duplicates, total on the window."""
        jsonschema.validate(data, TABLE_SCHEMA)
        window = Window.from_dict(data["window"])
        maps = {}
        for name in ("f", "g"):
            d: Dict[Key, Fraction] = {}
            for row in data[name]:
                key = (row["r"], row["s"], row["m"], row["n"])
                if key in d:
                    raise TableFormatError(f"duplicate {name} entry at {key}")
                if not _in_window(window, key):
                    raise TableFormatError(f"{name} entry {key} lies outside the window")
                d[key] = parse_rational(row["value"])
            maps[name] = d
        table = cls(maps["f"], maps["g"], parse_rational(data["lambda"]), parse_rational(data["mu"]), window)
        missing = table.missing()
        if missing:
            name, key = missing[0]
            raise TableFormatError(f"table is not total on its window: {len(missing)} missing, first {name}{key}")
        return table


class TableFormatError(ValueError):
    pass


class IncompleteTable(ValueError):
    def __init__(self, missing):
        self.missing = missing
        super().__init__(f"{len(missing)} table entries missing inside the window")


_RANGE = {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}
_ENTRY = {
    "type": "object",
    "required": ["r", "s", "m", "n", "value"],
    "additionalProperties": False,
    "properties": {
        "r": {"type": "integer"},
        "s": {"type": "integer"},
        "m": {"type": "integer"},
        "n": {"type": "integer"},
        "value": {"type": "string"},
    },
}
TABLE_SCHEMA = {
    "type": "object",
    "required": ["lambda", "mu", "window", "f", "g"],
    "additionalProperties": False,
    "properties": {
        "lambda": {"type": "string"},
        "mu": {"type": "string"},
        "window": {
            "type": "object",
            "required": ["m_range", "n_range", "r_range", "s_range"],
            "additionalProperties": False,
            "properties": {k: _RANGE for k in ("m_range", "n_range", "r_range", "s_range")},
        },
        "f": {"type": "array", "items": _ENTRY},
        "g": {"type": "array", "items": _ENTRY},
    },
}


def _in_window(w: Window, key: Key) -> bool:
    r, s, m, n = key
    return (
        w.r_range[0] <= r <= w.r_range[1]
        and w.s_range[0] <= s <= w.s_range[1]
        and w.m_range[0] <= m <= w.m_range[1]
        and w.n_range[0] <= n <= w.n_range[1]
    )


def tabulate(spec: FamilySpec, w: Window) -> ActionTable:
    family_validity(spec)
    f = {}
    g = {}
    for key in w.keys():
        f[key] = coeff_f(spec, *key)
        g[key] = coeff_g(spec, *key)
    return ActionTable(f, g, spec.lam, spec.mu, w)


# ---------------------------------------------------------------------------
# actions: closed-form families and table-backed replays
# ---------------------------------------------------------------------------


@dataclass
class TableAction:
    """Module action read from an :class:`ActionTable`.

    ``extra`` injects additional output cells ``{(r,s,m,n): {(m2,n2): c}}``;
    a two-cell action never has any.  Lookups outside the table raise
    ``KeyError``.
    """

    table: ActionTable
    extra: Dict[Key, Dict[Tuple[int, int], Fraction]] = field(default_factory=dict)

    def cells(self, r: int, s: int, m: int, n: int):
        key = (r, s, m, n)
        out = [((m + r, n + s + 1), self.table.f[key]), ((m + r, n + s), self.table.g[key])]
        for cell, c in self.extra.get(key, {}).items():
            out.append((cell, to_scalar(c)))
        return out

    def act_generator(self, r: int, s: int, v: ModVector) -> ModVector:
        acc: Dict[Tuple[int, int], Fraction] = {}
        for (m, n), x in v.items():
            for cell, c in self.cells(r, s, m, n):
                acc[cell] = acc.get(cell, 0) + x * c
        return ModVector(acc)


Action = Union[FamilySpec, TableAction]


class _FastCells:
    """Memoized ``mpq`` cell lists for an action."""

    def __init__(self, action: Action):
        self.action = action
        self.cache: Dict[Key, list] = {}

    def __call__(self, r, s, m, n):
        key = (r, s, m, n)
        got = self.cache.get(key)
        if got is None:
            a = self.action
            if isinstance(a, FamilySpec):
                got = [
                    ((m + r, n + s + 1), fast(coeff_f(a, r, s, m, n))),
                    ((m + r, n + s), fast(coeff_g(a, r, s, m, n))),
                ]
            else:
                got = [(cell, fast(c)) for cell, c in a.cells(r, s, m, n)]
            self.cache[key] = got
        return got


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("VIRLIKE_THREADS", "1")))
    except ValueError:
        return 1


def _shard(values: Sequence[int], workers: int) -> List[List[int]]:
    shards = [list(values[i::workers]) for i in range(workers)]
    return [s for s in shards if s]


def _run_sharded(fn, action, w: Window, first_values: Sequence[int], workers: Optional[int]) -> ResidualReport:
    workers = default_workers() if workers is None else max(1, workers)
    if workers == 1 or len(first_values) == 1:
        return fn(action, w, list(first_values)).sorted()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(fn, *zip(*[(action, w, s) for s in _shard(first_values, workers)])))
    return merge(parts)


# ---------------------------------------------------------------------------
# module axiom
# ---------------------------------------------------------------------------


def _axiom_shard(action: Action, w: Window, r1_values: List[int]) -> ResidualReport:
    cells = _FastCells(action)
    report = ResidualReport()
    rs, ss, ms, ns = list(w.rs()), list(w.ss()), list(w.ms()), list(w.ns())
    for r1 in r1_values:
        for s1, r2, s2 in itertools.product(ss, rs, ss):
            br = [(i.alpha, i.beta, fast(c)) for i, c in _bracket_terms(r1, s1, r2, s2) if i is not CENTRAL]
            for m, n in itertools.product(ms, ns):
                acc: Dict[Tuple[int, int], object] = {}
                try:
                    # x.(y.v) - y.(x.v)
                    for (ra, sa), (rb, sb), sign in (((r1, s1), (r2, s2), 1), ((r2, s2), (r1, s1), -1)):
                        for (m2, n2), x in cells(rb, sb, m, n):
                            if not x:
                                continue
                            for cell, y in cells(ra, sa, m2, n2):
                                acc[cell] = acc.get(cell, 0) + sign * x * y
                    # - [x,y].v, central part acting as zero
                    for a, b, c in br:
                        for cell, y in cells(a, b, m, n):
                            acc[cell] = acc.get(cell, 0) - c * y
                except KeyError:
                    continue
                report.checked += 1
                defect = {k: slow(v) for k, v in acc.items() if v}
                if defect:
                    report.entries.append(
                        ResidualEntry.make(AXIOM, ModVector(defect), h=r1, k=s1, r=r2, s=s2, m=m, n=n)
                    )
    return report


def module_axiom_residual(action: Action, w: Window, workers: Optional[int] = None) -> ResidualReport:
    """Check ``[x,y].v = x.(y.v) - y.(x.v)`` for generators ``x = L[h,k]``,
    ``y = L[r,s]`` and basis vectors ``v[m,n]`` in ``w`` (``c`` acts as 0).

    Entries use coordinates ``(h,k)`` for ``x`` and ``(r,s)`` for ``y``.
    """
    if isinstance(action, FamilySpec):
        family_validity(action)
    return _run_sharded(_axiom_shard, action, w, list(w.rs()), workers)


# ---------------------------------------------------------------------------
# coefficient equations
# ---------------------------------------------------------------------------


def _fg_shard(table: ActionTable, w: Window, h_values: List[int]) -> ResidualReport:
    F = {k: fast(v) for k, v in table.f.items()}
    G = {k: fast(v) for k, v in table.g.items()}
    fget, gget = F.get, G.get
    report = ResidualReport()
    rs, ss, ms, ns = list(w.rs()), list(w.ss()), list(w.ms()), list(w.ns())
    out = report.entries
    for h in h_values:
        for k, r, s in itertools.product(ss, rs, ss):
            rh = r - h
            sk = s - k
            for m, n in itertools.product(ms, ns):
                f_rs = fget((r, s, m, n))
                g_rs = gget((r, s, m, n))
                f_hk = fget((h, k, m, n))
                g_hk = gget((h, k, m, n))
                if f_rs is None or f_hk is None:
                    continue
                # a lookup multiplied by a vanishing factor is not needed
                # upper-upper cell
                a1 = fget((h, k, m + r, n + s + 1)) if f_rs else 0
                a2 = fget((r, s, h + m, k + n + 1)) if f_hk else 0
                a3 = fget((r + h, s + k + 1, m, n)) if rh else 0
                if a1 is not None and a2 is not None and a3 is not None:
                    report.checked += 1
                    res = a1 * f_rs - a2 * f_hk - rh * a3
                    if res:
                        out.append(ResidualEntry.make(E34, slow(res), h=h, k=k, r=r, s=s, m=m, n=n))
                # mixed cell
                b1 = fget((h, k, r + m, s + n)) if g_rs else 0
                b2 = gget((h, k, m + r, s + n + 1)) if f_rs else 0
                b3 = fget((r, s, h + m, k + n)) if g_hk else 0
                b4 = gget((r, s, m + h, k + n + 1)) if f_hk else 0
                b5 = gget((h + r, k + s + 1, m, n)) if rh else 0
                b6 = fget((h + r, k + s, m, n)) if sk else 0
                if None not in (b1, b2, b3, b4, b5, b6):
                    report.checked += 1
                    res = b1 * g_rs + b2 * f_rs - b3 * g_hk - b4 * f_hk - rh * b5 - sk * b6
                    if res:
                        out.append(ResidualEntry.make(E35, slow(res), h=h, k=k, r=r, s=s, m=m, n=n))
                # lower-lower cell
                c1 = gget((h, k, m + r, s + n)) if g_rs else 0
                c2 = gget((r, s, m + h, n + k)) if g_hk else 0
                c3 = gget((h + r, k + s, m, n)) if sk else 0
                if c1 is not None and c2 is not None and c3 is not None:
                    report.checked += 1
                    res = c1 * g_rs - c2 * g_hk - sk * c3
                    if res:
                        out.append(ResidualEntry.make(E36, slow(res), h=h, k=k, r=r, s=s, m=m, n=n))
    return report


def fg_equation_residual(table: ActionTable, workers: Optional[int] = None) -> ResidualReport:
    """Evaluate left minus right of the three coefficient identities at every
    in-window ``(h,k,r,s,m,n)`` whose lookups all exist.  A lookup multiplied
    by a vanishing factor (``r-h``, ``s-k`` or a table value) is not needed,
    matching the terms the module-axiom route actually evaluates.

    Raises :class:`IncompleteTable` when the table is not total on its window.
    """
    missing = table.missing()
    if missing:
        raise IncompleteTable(missing)
    return _run_sharded(_fg_shard, table, table.window, list(table.window.rs()), workers)


def normalization_check(table: ActionTable) -> ResidualReport:
    """``f(0,-1,m,n) = lambda + m`` and ``g(0,0,m,n) = mu + n`` at every window point."""
    report = ResidualReport()
    for m, n in table.window.points():
        f = table.f.get((0, -1, m, n))
        if f is not None:
            report.checked += 1
            if f != table.lam + m:
                report.entries.append(ResidualEntry.make(NORM, f - table.lam - m, r=0, s=-1, m=m, n=n))
        g = table.g.get((0, 0, m, n))
        if g is not None:
            report.checked += 1
            if g != table.mu + n:
                report.entries.append(ResidualEntry.make(NORM, g - table.mu - n, r=0, s=0, m=m, n=n))
    return report.sorted()


def grading_check(action: Action, w: Window) -> ResidualReport:
    """Every ``L[r,s] v[m,n]`` must land in ``v[m+r,n+s+1]`` and ``v[m+r,n+s]``."""
    if isinstance(action, FamilySpec):
        family_validity(action)
    report = ResidualReport()
    for r, s, m, n in w.keys():
        if isinstance(action, FamilySpec):
            image = act_generator(action, r, s, ModVector.basis(m, n))
        else:
            try:
                image = action.act_generator(r, s, ModVector.basis(m, n))
            except KeyError:
                continue
        report.checked += 1
        allowed = {(m + r, n + s + 1), (m + r, n + s)}
        stray = {cell: c for cell, c in image.items() if cell not in allowed}
        if stray:
            report.entries.append(ResidualEntry.make(GRADING, ModVector(stray), r=r, s=s, m=m, n=n))
    return report.sorted()


def verify_family(spec: FamilySpec, w: Window, workers: Optional[int] = None) -> Dict[str, ResidualReport]:
    """All four checks for a catalog family on one window."""
    table = tabulate(spec, w)
    return {
        "axiom": module_axiom_residual(spec, w, workers),
        "equations": fg_equation_residual(table, workers),
        "normalization": normalization_check(table),
        "grading": grading_check(spec, w),
    }
