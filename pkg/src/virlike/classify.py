"""Recover a family from tabulated coefficients, check transfer factors, and
run rigidity sweeps over one-parameter deformations of catalog actions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from virlike.catalog import Family, FamilySpec, IntegerParameter, family_validity
from virlike.report import FIT_F, FIT_G, K510, K511, ResidualEntry, ResidualReport
from virlike.scalars import format_rational, to_scalar
from virlike.verify import ActionTable, Window, fg_equation_residual, normalization_check, tabulate


class ClassificationError(ValueError):
    pass


# rejected-family diagnostics list this many mismatches in JSON output
DIAGNOSTIC_ENTRIES = 10


@dataclass
class ClassifyResult:
    matches: List[FamilySpec]
    diagnostics: Dict[Family, object] = field(default_factory=dict)
    precheck: Dict[str, ResidualReport] = field(default_factory=dict)

    def to_dict(self, max_entries: int = DIAGNOSTIC_ENTRIES):
        diag = {}
        for fam, d in sorted(self.diagnostics.items(), key=lambda kv: kv[0].value):
            if isinstance(d, str):
                diag[fam.value] = {"pass": False, "reason": d}
                continue
            body = d.to_dict()
            body["mismatches"] = len(body["entries"])
            body["entries"] = body["entries"][:max_entries]
            diag[fam.value] = body
        return {
            "matches": [m.to_dict() for m in self.matches],
            "diagnostics": diag,
            "precheck": {name: rep.passed for name, rep in self.precheck.items()},
        }


def _anchor(t: ActionTable) -> Tuple[int, int]:
    """A window point to read parameters at, (0,0) when present."""
    w = t.window
    m = 0 if w.m_range[0] <= 0 <= w.m_range[1] else w.m_range[0]
    n = 0 if w.n_range[0] <= 0 <= w.n_range[1] else w.n_range[0]
    return m, n


def read_parameters(t: ActionTable) -> Tuple[Fraction, Fraction, Fraction]:
    """(lambda, mu, a) read from the normalization entries and one F1 slope."""
    m0, n0 = _anchor(t)
    try:
        lam = t.f[(0, -1, m0, n0)] - m0
        mu = t.g[(0, 0, m0, n0)] - n0
    except KeyError as exc:
        raise ClassificationError("window must contain r=0 and s in {-1, 0}") from exc
    a = None
    for r in sorted(t.window.rs(), key=lambda r: (abs(r), -r)):
        if r and (r, 0, m0, n0) in t.f:
            a = (t.f[(r, 0, m0, n0)] - lam - m0) / r
            break
    if a is None:
        for s in sorted(t.window.ss(), key=lambda s: (abs(s), -s)):
            if s and (0, s, m0, n0) in t.g:
                a = (t.g[(0, s, m0, n0)] - mu - n0) / s
                break
    return lam, mu, (Fraction(0) if a is None else a)


def _table_mismatch(expected: ActionTable, t: ActionTable) -> ResidualReport:
    report = ResidualReport()
    for key in t.window.keys():
        r, s, m, n = key
        report.checked += 2
        if expected.f[key] != t.f[key]:
            report.entries.append(ResidualEntry.make(FIT_F, t.f[key] - expected.f[key], r=r, s=s, m=m, n=n))
        if expected.g[key] != t.g[key]:
            report.entries.append(ResidualEntry.make(FIT_G, t.g[key] - expected.g[key], r=r, s=s, m=m, n=n))
    return report.sorted()


def fit_family(t: ActionTable, check: bool = True) -> ClassifyResult:
    """Every family whose tabulation on ``t.window`` equals ``t`` exactly.

    Parameters are read, not solved for: lambda and mu from the normalized
    entries, ``a`` from one F1 slope.  With ``check`` the normalization and
    coefficient equations are evaluated first and recorded in
    ``precheck``; matching runs regardless so that a broken table comes back
    with an empty match list and per-family diagnostics.
    """
    precheck = {}
    if check:
        precheck["normalization"] = normalization_check(t)
        precheck["equations"] = fg_equation_residual(t)
    lam, mu, a = read_parameters(t)
    matches: List[FamilySpec] = []
    diagnostics: Dict[Family, object] = {}
    for fam in Family:
        spec = FamilySpec(fam, lam=lam, mu=mu, a=a)
        try:
            family_validity(spec)
        except IntegerParameter as exc:
            diagnostics[fam] = str(exc)
            continue
        try:
            expected = tabulate(spec, t.window)
        except ZeroDivisionError:
            diagnostics[fam] = "coefficients undefined on the window"
            continue
        report = _table_mismatch(expected, t)
        if report.passed:
            matches.append(spec)
        else:
            diagnostics[fam] = report
    return ClassifyResult(matches, diagnostics, precheck)


# ---------------------------------------------------------------------------
# transfer factors
# ---------------------------------------------------------------------------


@dataclass
class TransferFactors:
    k: Dict[Tuple[int, int], Fraction]

    def __getitem__(self, key):
        return self.k[key]

    def to_dict(self):
        return [{"r": r, "m": m, "value": format_rational(v)} for (r, m), v in sorted(self.k.items())]


class TransferFactorError(ValueError):
    pass


def derive_transfer_factors(t: ActionTable) -> TransferFactors:
    """``k(r,m) = g(r,-1,m,n) / g(0,-1,m,n)``, required to be independent of n.

    Uses the smallest window ``n`` with a nonzero denominator and then checks
    ``g(r,-1,m,n) = k(r,m) g(0,-1,m,n)`` at every other ``n``.
    """
    ns = list(t.window.ns())
    k: Dict[Tuple[int, int], Fraction] = {}
    for m in t.window.ms():
        n0 = next((n for n in ns if t.g.get((0, -1, m, n))), None)
        if n0 is None:
            raise TransferFactorError(f"g(0,-1,{m},n) vanishes for every window n")
        base = t.g[(0, -1, m, n0)]
        for r in t.window.rs():
            if (r, -1, m, n0) not in t.g:
                continue
            ratio = t.g[(r, -1, m, n0)] / base
            for n in ns:
                lhs = t.g.get((r, -1, m, n))
                den = t.g.get((0, -1, m, n))
                if lhs is None or den is None:
                    continue
                if lhs != ratio * den:
                    raise TransferFactorError(
                        f"k({r},{m}) depends on n: n={n0} gives {format_rational(ratio)}, n={n} disagrees"
                    )
            k[(r, m)] = ratio
    return TransferFactors(k)


def transfer_cocycle_check(k: TransferFactors) -> ResidualReport:
    """``k(0,m) = 1``, ``k(r,m) k(-r,m+r) = 1`` and
    ``k(h,m+r) k(r,m) = k(r,m+h) k(h,m) = k(h+r,m)`` wherever defined."""
    report = ResidualReport()
    kk = k.k
    rs = sorted({r for r, _ in kk})
    ms = sorted({m for _, m in kk})
    for m in ms:
        if (0, m) in kk:
            report.checked += 1
            if kk[(0, m)] != 1:
                report.entries.append(ResidualEntry.make(K510, kk[(0, m)] - 1, h=0, r=0, m=m))
    for r in rs:
        for m in ms:
            a, b = kk.get((r, m)), kk.get((-r, m + r))
            if a is None or b is None:
                continue
            report.checked += 1
            if a * b != 1:
                report.entries.append(ResidualEntry.make(K510, a * b - 1, r=r, m=m))
    for h in rs:
        for r in rs:
            for m in ms:
                target = kk.get((h + r, m))
                left = (kk.get((h, m + r)), kk.get((r, m)))
                right = (kk.get((r, m + h)), kk.get((h, m)))
                if target is None:
                    continue
                if None not in left:
                    report.checked += 1
                    if left[0] * left[1] != target:
                        report.entries.append(ResidualEntry.make(K511, left[0] * left[1] - target, h=h, r=r, m=m))
                if None not in right:
                    report.checked += 1
                    if right[0] * right[1] != target:
                        # k=1 marks the second form of the identity
                        report.entries.append(
                            ResidualEntry.make(K511, right[0] * right[1] - target, h=h, k=1, r=r, m=m)
                        )
    return report.sorted()


# ---------------------------------------------------------------------------
# ansatz constancy
# ---------------------------------------------------------------------------


@dataclass
class ConstancyReport:
    a_values: Dict[Tuple[int, int], Fraction]
    b_values: Dict[Tuple[int, int], Fraction]

    @property
    def a_constant(self) -> bool:
        return len(set(self.a_values.values())) <= 1

    @property
    def b_constant(self) -> bool:
        return len(set(self.b_values.values())) <= 1

    @property
    def a(self) -> Optional[Fraction]:
        return next(iter(self.a_values.values())) if self.a_constant and self.a_values else None

    @property
    def b(self) -> Optional[Fraction]:
        return next(iter(self.b_values.values())) if self.b_constant and self.b_values else None

    def to_dict(self):
        return {
            "a_constant": self.a_constant,
            "b_constant": self.b_constant,
            "a": None if self.a is None else format_rational(self.a),
            "b": None if self.b is None else format_rational(self.b),
        }


def ansatz_constancy_check(t: ActionTable) -> ConstancyReport:
    """Slopes ``a_m = g(0,1,m,n) - g(0,0,m,n)`` and
    ``b_n = f(1,-1,m,n) - f(0,-1,m,n)``, keyed by ``(m, n)``."""
    a_values = {}
    b_values = {}
    for m, n in t.window.points():
        g1, g0 = t.g.get((0, 1, m, n)), t.g.get((0, 0, m, n))
        if g1 is not None and g0 is not None:
            a_values[(m, n)] = g1 - g0
        f1, f0 = t.f.get((1, -1, m, n)), t.f.get((0, -1, m, n))
        if f1 is not None and f0 is not None:
            b_values[(m, n)] = f1 - f0
    return ConstancyReport(a_values, b_values)


# ---------------------------------------------------------------------------
# rigidity sweeps
# ---------------------------------------------------------------------------


class Deformation(str, enum.Enum):
    # lower-cell A(a') column deformation: g(r,s,m,-mu) = s(1+(s+1)a'_m)
    D_APRIME = "D_APRIME"
    # lower-cell B(a') column deformation: g(r,s,m,-s-mu) = -s(1+(s+1)a'_{m+r})
    D_APRIME_B = "D_APRIME_B"


@dataclass(frozen=True)
class DeformationSpec:
    """``a'_m = t`` at ``m = 0`` and 0 elsewhere; ``t = 0`` is a catalog F1 action
    (``a = 1`` for ``D_APRIME``, ``a = 0`` for ``D_APRIME_B``).

    ``mu`` must be an integer: it only relabels which row carries the defect.
    """

    deformation: Deformation
    lam: Fraction
    mu: Fraction = Fraction(0)
    t: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "deformation", Deformation(self.deformation))
        for name in ("lam", "mu", "t"):
            object.__setattr__(self, name, to_scalar(getattr(self, name)))

    def validate(self) -> None:
        if self.lam.denominator == 1:
            raise ValueError("deformation tables need lambda not in Z")
        if self.mu.denominator != 1:
            raise ValueError("deformation tables need an integer mu")

    def undeformed(self) -> FamilySpec:
        a = 1 if self.deformation is Deformation.D_APRIME else 0
        return FamilySpec(Family.F1, lam=self.lam, mu=self.mu, a=a)

    def coefficients(self) -> Tuple[Callable, Callable]:
        self.validate()
        lam, t = self.lam, self.t
        shift = int(self.mu)

        def ap(m):
            return t if m == 0 else 0

        if self.deformation is Deformation.D_APRIME:

            def f(r, s, m, n):
                n += shift
                lm = lam + m
                if n == 0:
                    return r + lm + (s + 1) * (2 * r - s * lm) * ap(m)
                if n == -1:
                    return r + lm + s * (s + 1) * lm * ap(m)
                return r + lm

            def g(r, s, m, n):
                n += shift
                if n == 0:
                    return s * (1 + (s + 1) * ap(m))
                return Fraction(s + n)

        else:

            def f(r, s, m, n):
                n += shift
                lm = lam + m
                if n == -s - 1:
                    return lm - (s + 1) * (r * (s + 2) + lm * s) * ap(m + r)
                if n == -s:
                    return lm + (s + 1) * (lm + r) * ap(m + r)
                return lm

            def g(r, s, m, n):
                n += shift
                if n == -s:
                    return -s * (1 + (s + 1) * ap(m + r))
                return Fraction(n)

        return f, g

    def tabulate(self, w: Window) -> ActionTable:
        f, g = self.coefficients()
        F = {key: Fraction(f(*key)) for key in w.keys()}
        G = {key: Fraction(g(*key)) for key in w.keys()}
        return ActionTable(F, G, self.lam, self.mu, w)


@dataclass
class SweepPoint:
    t: Fraction
    passed: bool
    residuals: int

    def to_dict(self):
        return {"t": format_rational(self.t), "pass": self.passed, "residuals": self.residuals}


@dataclass
class SweepReport:
    deformation: Deformation
    lam: Fraction
    mu: Fraction
    points: List[SweepPoint]

    @property
    def rigid(self) -> bool:
        """True when the equations hold exactly at t = 0 and nowhere else."""
        return all(p.passed == (p.t == 0) for p in self.points)

    def to_list(self):
        return [p.to_dict() for p in self.points]


def rigidity_sweep(
    d: DeformationSpec, grid: Sequence, w: Window, workers: Optional[int] = None
) -> SweepReport:
    """Tabulate the deformation at every grid value and run the coefficient equations."""
    d.validate()
    grid = [to_scalar(x) for x in grid]
    if 0 not in grid:
        raise ValueError("grid must contain 0")
    points = []
    for t in grid:
        spec = DeformationSpec(d.deformation, d.lam, d.mu, t)
        report = fg_equation_residual(spec.tabulate(w), workers)
        points.append(SweepPoint(t, report.passed, len(report.entries)))
    return SweepReport(d.deformation, d.lam, d.mu, points)
