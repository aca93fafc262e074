"""The non-graded Virasoro-like algebra: basis symbols ``L[a,b]`` (a, b in Z)
plus a central element ``c``, with bracket

    [L[a1,b1], L[a2,b2]] = (a2-a1) L[a1+a2, b1+b2+1] + (b2-b1) L[a1+a2, b1+b2]
                           + psi(a1,b1,a2,b2) c,        [L[a,b], c] = 0,

where the central coefficient ``psi`` is supported on a1+a2 = 0 and
b1+b2 in {-3,-2,-1,0}.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from virlike.scalars import RationalLike, format_rational, parse_rational, to_scalar

_TWELFTH = Fraction(1, 12)


class Basis(NamedTuple):
    alpha: int
    beta: int

    def __repr__(self) -> str:
        return f"L[{self.alpha},{self.beta}]"


class _Central:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "c"

    def __reduce__(self):
        return (_Central, ())


CENTRAL = _Central()
GenIndex = Union[Basis, _Central]


def index_key(index: GenIndex) -> Tuple[int, int, int]:
    """Total order on generator indices: lexicographic (alpha, beta), central last."""
    if index is CENTRAL:
        return (1, 0, 0)
    return (0, index[0], index[1])


class LieElement:
    """Finite linear combination of ``L[a,b]`` and ``c`` with exact coefficients.

    Instances are immutable and always canonical: zero coefficients are never
    stored, and iteration follows :func:`index_key`.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Union[None, Dict, Iterable[Tuple[Any, RationalLike]]] = None):
        acc: Dict[GenIndex, Fraction] = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for index, coeff in items:
                index = _as_index(index)
                value = acc.get(index, 0) + to_scalar(coeff)
                if value:
                    acc[index] = value
                else:
                    acc.pop(index, None)
        self._terms = dict(sorted(acc.items(), key=lambda kv: index_key(kv[0])))
        self._hash = None

    @classmethod
    def _from_clean(cls, terms: Dict[GenIndex, Fraction]) -> "LieElement":
        obj = cls.__new__(cls)
        obj._terms = dict(sorted(terms.items(), key=lambda kv: index_key(kv[0])))
        obj._hash = None
        return obj

    @classmethod
    def generator(cls, alpha: int, beta: int, coeff: RationalLike = 1) -> "LieElement":
        return cls({Basis(alpha, beta): coeff})

    @classmethod
    def central(cls, coeff: RationalLike = 1) -> "LieElement":
        return cls({CENTRAL: coeff})

    @classmethod
    def zero(cls) -> "LieElement":
        return cls._from_clean({})

    # mapping-like access -------------------------------------------------
    def items(self) -> Iterator[Tuple[GenIndex, Fraction]]:
        return iter(self._terms.items())

    def coeff(self, index) -> Fraction:
        return self._terms.get(_as_index(index), Fraction(0))

    def support(self) -> List[GenIndex]:
        return list(self._terms)

    def leading(self) -> GenIndex:
        return next(iter(self._terms))

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __contains__(self, index) -> bool:
        return _as_index(index) in self._terms

    # arithmetic ------------------------------------------------------------
    def __add__(self, other: "LieElement") -> "LieElement":
        if not isinstance(other, LieElement):
            return NotImplemented
        return _combine([(1, self), (1, other)])

    def __sub__(self, other: "LieElement") -> "LieElement":
        if not isinstance(other, LieElement):
            return NotImplemented
        return _combine([(1, self), (-1, other)])

    def __neg__(self) -> "LieElement":
        return LieElement._from_clean({k: -v for k, v in self._terms.items()})

    def __mul__(self, scalar: RationalLike) -> "LieElement":
        scalar = to_scalar(scalar)
        if not scalar:
            return LieElement.zero()
        return LieElement._from_clean({k: v * scalar for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, LieElement):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for index, coeff in self._terms.items():
            if coeff == 1:
                parts.append(repr(index))
            elif coeff == -1:
                parts.append(f"-{index!r}")
            else:
                parts.append(f"{format_rational(coeff)}*{index!r}")
        return " + ".join(parts).replace("+ -", "- ")

    # serialization -----------------------------------------------------------
    def to_dict(self) -> Dict[str, Any]:
        return {
            "terms": [
                {"alpha": i.alpha, "beta": i.beta, "coeff": format_rational(v)}
                for i, v in self._terms.items()
                if i is not CENTRAL
            ],
            "central": format_rational(self._terms.get(CENTRAL, 0)),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LieElement":
        if not isinstance(data, dict) or "terms" not in data:
            raise ValueError("LieElement JSON needs a 'terms' array")
        terms = []
        seen = set()
        for t in data["terms"]:
            index = Basis(int(t["alpha"]), int(t["beta"]))
            if index in seen:
                raise ValueError(f"duplicate term {index!r}")
            seen.add(index)
            value = parse_rational(t["coeff"])
            if not value:
                raise ValueError(f"zero coefficient stored for {index!r}")
            terms.append((index, value))
        central = parse_rational(data.get("central", "0"))
        if central:
            terms.append((CENTRAL, central))
        return cls(terms)

    @classmethod
    def from_json(cls, text: str) -> "LieElement":
        return cls.from_dict(json.loads(text))


def _as_index(index) -> GenIndex:
    if index is CENTRAL or isinstance(index, Basis):
        return index
    if isinstance(index, tuple) and len(index) == 2:
        return Basis(int(index[0]), int(index[1]))
    raise TypeError(f"not a generator index: {index!r}")


def _combine(pairs: Iterable[Tuple[RationalLike, LieElement]]) -> LieElement:
    acc: Dict[GenIndex, Fraction] = {}
    for scalar, elem in pairs:
        scalar = to_scalar(scalar)
        if not scalar:
            continue
        for k, v in elem._terms.items():
            value = acc.get(k, 0) + scalar * v
            if value:
                acc[k] = value
            else:
                del acc[k]
    return LieElement._from_clean(acc)


def central_cocycle(a1: int, b1: int, a2: int, b2: int) -> Fraction:
    """The ``c``-coefficient of ``[L[a1,b1], L[a2,b2]]``."""
    if a1 + a2 != 0:
        return Fraction(0)
    t = b1 + b2
    if t == -3:
        raw = a1**3
    elif t == -2:
        raw = 3 * (b1 + 1) * a1**2
    elif t == -1:
        raw = 3 * b1 * (b1 + 1) * a1
    elif t == 0:
        raw = b1 * (b1 * b1 - 1)
    else:
        return Fraction(0)
    return raw * _TWELFTH


def _bracket_terms(a1: int, b1: int, a2: int, b2: int) -> List[Tuple[GenIndex, Fraction]]:
    out: List[Tuple[GenIndex, Fraction]] = []
    alpha = a1 + a2
    if a2 != a1:
        out.append((Basis(alpha, b1 + b2 + 1), a2 - a1))
    if b2 != b1:
        out.append((Basis(alpha, b1 + b2), b2 - b1))
    z = central_cocycle(a1, b1, a2, b2)
    if z:
        out.append((CENTRAL, z))
    return out


def bracket_basis(a1: int, b1: int, a2: int, b2: int) -> LieElement:
    return LieElement(_bracket_terms(a1, b1, a2, b2))


def bracket(x: LieElement, y: LieElement) -> LieElement:
    """Bilinear bracket; any term involving ``c`` contributes nothing."""
    acc: Dict[GenIndex, Fraction] = {}
    for i, u in x._terms.items():
        if i is CENTRAL:
            continue
        for j, w in y._terms.items():
            if j is CENTRAL:
                continue
            uw = u * w
            for k, v in _bracket_terms(i[0], i[1], j[0], j[1]):
                value = acc.get(k, 0) + uw * v
                if value:
                    acc[k] = value
                else:
                    del acc[k]
    return LieElement._from_clean(acc)


def jacobi_defect(x: LieElement, y: LieElement, z: LieElement) -> LieElement:
    """``[x,[y,z]] + [y,[z,x]] + [z,[x,y]]``; zero in a Lie algebra."""
    return _combine(
        [(1, bracket(x, bracket(y, z))), (1, bracket(y, bracket(z, x))), (1, bracket(z, bracket(x, y)))]
    )


def element_combine(coeffs: Sequence[RationalLike], elems: Sequence[LieElement]) -> LieElement:
    if len(coeffs) != len(elems):
        raise ValueError(f"length mismatch: {len(coeffs)} coefficients, {len(elems)} elements")
    return _combine(zip(coeffs, elems))


def generator_box(alpha_max: int, beta_max: int) -> List[LieElement]:
    """All ``L[a,b]`` with ``|a| <= alpha_max`` and ``|b| <= beta_max``."""
    return [
        LieElement.generator(a, b)
        for a in range(-alpha_max, alpha_max + 1)
        for b in range(-beta_max, beta_max + 1)
    ]


def jacobi_scan(alpha_max: int, beta_max: Optional[int] = None) -> Tuple[int, List[Tuple[Basis, Basis, Basis, "LieElement"]]]:
    """Jacobi defect over every ordered triple of generators in the box.

    Returns ``(checked, failures)``; brackets of basis pairs are cached.
    """
    beta_max = alpha_max if beta_max is None else beta_max
    idx = [Basis(a, b) for a in range(-alpha_max, alpha_max + 1) for b in range(-beta_max, beta_max + 1)]
    cache: Dict[Tuple[Basis, Basis], LieElement] = {}

    def br(x: Basis, y: Basis) -> LieElement:
        got = cache.get((x, y))
        if got is None:
            got = cache[(x, y)] = bracket_basis(x.alpha, x.beta, y.alpha, y.beta)
        return got

    def br_elem(x: Basis, e: LieElement) -> List[Tuple[Fraction, LieElement]]:
        return [(c, br(x, i)) for i, c in e.items() if i is not CENTRAL]

    failures = []
    checked = 0
    for x in idx:
        for y in idx:
            for z in idx:
                checked += 1
                terms = br_elem(x, br(y, z)) + br_elem(y, br(z, x)) + br_elem(z, br(x, y))
                d = _combine(terms)
                if d:
                    failures.append((x, y, z, d))
    return checked, failures


def antisymmetry_scan(alpha_max: int, beta_max: Optional[int] = None) -> Tuple[int, List[Tuple[Basis, Basis]]]:
    """Pairs in the box with ``[x,y] + [y,x] != 0``."""
    beta_max = alpha_max if beta_max is None else beta_max
    idx = [Basis(a, b) for a in range(-alpha_max, alpha_max + 1) for b in range(-beta_max, beta_max + 1)]
    bad = []
    for x in idx:
        for y in idx:
            if bracket_basis(*x, *y) + bracket_basis(*y, *x):
                bad.append((x, y))
    return len(idx) ** 2, bad
