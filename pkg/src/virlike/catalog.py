"""The seven two-cell module families and the classical intermediate-series
Virasoro modules.

Every family acts on ``V = span{v[m,n]}`` by

    L[r,s] v[m,n] = f(r,s,m,n) v[m+r, n+s+1] + g(r,s,m,n) v[m+r, n+s]

and the central element acts as zero.  ``f`` is the coefficient of the upper
cell (the ``P`` part of the operator), ``g`` of the lower cell (``Q`` part).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, Iterator, Tuple, Union

from virlike.algebra import CENTRAL, LieElement
from virlike.scalars import RationalLike, format_rational, parse_rational, to_scalar


class Family(str, enum.Enum):
    F1 = "F1"
    F2 = "F2"
    F3 = "F3"
    F4 = "F4"
    F5 = "F5"
    F6 = "F6"
    F7 = "F7"


LABELS = {
    Family.F1: "A_{a,\\lambda,\\mu}",
    Family.F2: "A_{0,\\lambda,\\mu}",
    Family.F3: "A_{1,\\lambda,\\mu}",
    Family.F4: "A_{1,0,\\lambda,\\mu}",
    Family.F5: "B_{1,0,\\lambda,\\mu}",
    Family.F6: "A_{0,1,\\lambda,\\mu}",
    Family.F7: "B_{0,1,\\lambda,\\mu}",
}

# which parameters must be non-integers
_SIDE_CONDITIONS = {
    Family.F1: (),
    Family.F2: ("lambda", "mu"),
    Family.F3: ("lambda", "mu"),
    Family.F4: ("lambda",),
    Family.F5: ("mu",),
    Family.F6: ("lambda",),
    Family.F7: ("mu",),
}


class IntegerParameter(ValueError):
    """A family parameter that must avoid Z is an integer."""

    def __init__(self, which: str, family: Family, value: Fraction):
        self.which = which
        self.family = family
        self.value = value
        super().__init__(f"{family.value} requires {which} not in Z, got {format_rational(value)}")


@dataclass(frozen=True)
class FamilySpec:
    """One family with parameters; ``a`` is only meaningful for F1 and is
    normalized to 0 for the others."""

    family: Family
    lam: Fraction = Fraction(0)
    mu: Fraction = Fraction(0)
    a: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "lam", to_scalar(self.lam))
        object.__setattr__(self, "mu", to_scalar(self.mu))
        a = to_scalar(self.a) if self.family is Family.F1 else Fraction(0)
        object.__setattr__(self, "a", a)

    @property
    def label(self) -> str:
        return LABELS[self.family]

    def to_dict(self) -> Dict[str, str]:
        return {
            "family": self.family.value,
            "paper_label": self.label,
            "a": format_rational(self.a),
            "lambda": format_rational(self.lam),
            "mu": format_rational(self.mu),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FamilySpec":
        return cls(
            Family(data["family"]),
            lam=parse_rational(data["lambda"]),
            mu=parse_rational(data["mu"]),
            a=parse_rational(data.get("a", "0")),
        )

    def __repr__(self) -> str:
        parts = [f"lambda={format_rational(self.lam)}", f"mu={format_rational(self.mu)}"]
        if self.family is Family.F1:
            parts.insert(0, f"a={format_rational(self.a)}")
        return f"{self.family.value}({', '.join(parts)})"


def family_validity(spec: FamilySpec) -> None:
    """Raise :class:`IntegerParameter` if a side condition fails."""
    for which in _SIDE_CONDITIONS[spec.family]:
        value = spec.lam if which == "lambda" else spec.mu
        if value.denominator == 1:
            raise IntegerParameter(which, spec.family, value)


def is_valid(spec: FamilySpec) -> bool:
    try:
        family_validity(spec)
    except IntegerParameter:
        return False
    return True


def coeff_f(spec: FamilySpec, r: int, s: int, m: int, n: int) -> Fraction:
    """Coefficient of ``v[m+r, n+s+1]`` in ``L[r,s] v[m,n]``."""
    lm = spec.lam + m
    mn = spec.mu + n
    fam = spec.family
    if fam is Family.F1:
        return spec.a * r + lm
    if fam is Family.F2:
        return mn * lm / (mn + s + 1)
    if fam is Family.F3:
        return (mn + s + 1) * (r + lm) / mn
    if fam is Family.F4:
        return r + lm
    if fam is Family.F5:
        return mn * (r + lm) / (mn + s + 1)
    if fam is Family.F6:
        return lm
    return (mn + s + 1) * lm / mn


def coeff_g(spec: FamilySpec, r: int, s: int, m: int, n: int) -> Fraction:
    """Coefficient of ``v[m+r, n+s]`` in ``L[r,s] v[m,n]``."""
    lm = spec.lam + m
    mn = spec.mu + n
    fam = spec.family
    if fam is Family.F1:
        return spec.a * s + mn
    if fam is Family.F2:
        return lm * mn / (lm + r)
    if fam is Family.F3:
        return (lm + r) * (s + mn) / lm
    if fam is Family.F4:
        return (lm + r) * mn / lm
    if fam is Family.F5:
        return mn
    if fam is Family.F6:
        return lm * (s + mn) / (lm + r)
    return s + mn


class ModVector:
    """Finite combination of ``v[m,n]``; immutable and canonical."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Union[None, Dict, Iterable[Tuple[Tuple[int, int], RationalLike]]] = None):
        acc: Dict[Tuple[int, int], Fraction] = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for (m, n), coeff in items:
                key = (int(m), int(n))
                value = acc.get(key, 0) + to_scalar(coeff)
                if value:
                    acc[key] = value
                else:
                    acc.pop(key, None)
        self._terms = dict(sorted(acc.items()))

    @classmethod
    def basis(cls, m: int, n: int) -> "ModVector":
        return cls({(m, n): 1})

    @classmethod
    def _from_acc(cls, acc: Dict[Tuple[int, int], Fraction]) -> "ModVector":
        obj = cls.__new__(cls)
        obj._terms = dict(sorted((k, v) for k, v in acc.items() if v))
        return obj

    def items(self) -> Iterator[Tuple[Tuple[int, int], Fraction]]:
        return iter(self._terms.items())

    def coeff(self, m: int, n: int) -> Fraction:
        return self._terms.get((m, n), Fraction(0))

    def support(self):
        return list(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __add__(self, other: "ModVector") -> "ModVector":
        acc = dict(self._terms)
        for k, v in other._terms.items():
            acc[k] = acc.get(k, 0) + v
        return ModVector._from_acc(acc)

    def __sub__(self, other: "ModVector") -> "ModVector":
        acc = dict(self._terms)
        for k, v in other._terms.items():
            acc[k] = acc.get(k, 0) - v
        return ModVector._from_acc(acc)

    def __mul__(self, scalar: RationalLike) -> "ModVector":
        scalar = to_scalar(scalar)
        return ModVector._from_acc({k: v * scalar for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "ModVector":
        return self * -1

    def __eq__(self, other) -> bool:
        if isinstance(other, ModVector):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"{format_rational(c)}*v[{m},{n}]" for (m, n), c in self._terms.items())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "terms": [
                {"m": m, "n": n, "coeff": format_rational(c)} for (m, n), c in self._terms.items()
            ]
        }


def act_generator(spec: FamilySpec, r: int, s: int, v: ModVector) -> ModVector:
    """``L[r,s] . v`` for a catalog family."""
    acc: Dict[Tuple[int, int], Fraction] = {}
    for (m, n), x in v.items():
        up = (m + r, n + s + 1)
        low = (m + r, n + s)
        acc[up] = acc.get(up, 0) + x * coeff_f(spec, r, s, m, n)
        acc[low] = acc.get(low, 0) + x * coeff_g(spec, r, s, m, n)
    return ModVector._from_acc(acc)


def act_element(spec: FamilySpec, x: LieElement, v: ModVector) -> ModVector:
    """Linear extension of :func:`act_generator`; ``c`` acts as zero."""
    acc: Dict[Tuple[int, int], Fraction] = {}
    for index, coeff in x.items():
        if index is CENTRAL:
            continue
        for k, y in act_generator(spec, index.alpha, index.beta, v).items():
            acc[k] = acc.get(k, 0) + coeff * y
    return ModVector._from_acc(acc)


# ---------------------------------------------------------------------------
# intermediate-series Virasoro modules and restrictions
# ---------------------------------------------------------------------------


class SeriesKind(str, enum.Enum):
    Aab = "Aab"
    Aprime = "Aprime"
    Bprime = "Bprime"
    Ainf = "Ainf"
    Binf = "Binf"


@dataclass(frozen=True)
class IntermediateSeriesSpec:
    kind: SeriesKind
    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    aprime: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "kind", SeriesKind(self.kind))
        for name in ("a", "b", "aprime"):
            object.__setattr__(self, name, to_scalar(getattr(self, name)))


def intermediate_series_coeff(spec: IntermediateSeriesSpec, i: int, j: int) -> Fraction:
    """Coefficient of ``v[i+j]`` in ``L_i v_j``."""
    kind = spec.kind
    if kind is SeriesKind.Aab:
        return spec.a + spec.b * i + j
    if kind is SeriesKind.Aprime:
        if j != 0:
            return Fraction(i + j)
        return i * (1 + (i + 1) * spec.aprime)
    if kind is SeriesKind.Bprime:
        if j != -i:
            return Fraction(j)
        return -i * (1 + (i + 1) * spec.aprime)
    if kind is SeriesKind.Ainf:
        return Fraction(i + j) if j != 0 else Fraction(i * (i + 1))
    return Fraction(j) if j != -i else Fraction(-i * (i + 1))


ROW = "row"
COL = "col"


def restriction_coeff(spec: FamilySpec, direction: str, i: int, m_or_n: int, fixed: int) -> Fraction:
    """Action of ``P[i,-1]`` on the row ``n = fixed`` (``direction="row"``,
    index ``m``), or of ``Q[0,i]`` on the column ``m = fixed`` (``"col"``,
    index ``n``)."""
    if direction == ROW:
        return coeff_f(spec, i, -1, m_or_n, fixed)
    if direction == COL:
        return coeff_g(spec, 0, i, fixed, m_or_n)
    raise ValueError(f"direction must be 'row' or 'col', got {direction!r}")
