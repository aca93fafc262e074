"""Exact spans of Lie elements, truncated subalgebra closure with membership
certificates, and the lattice utilities used to describe GHW annihilators.

The closure works inside a finite :class:`IndexBox`.  A bracket whose support
leaves the box is dropped whole, never truncated, so every row produced is a
genuine element of the generated subalgebra.  Every row carries a certificate:
a rational combination of entries of a :class:`CertificateLog`, where each
entry is either an input generator or the bracket of two earlier entries.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from virlike.algebra import CENTRAL, Basis, GenIndex, LieElement, bracket, index_key

DEFAULT_LOG_CAP = 10**6


@dataclass(frozen=True)
class IndexBox:
    alpha_min: int
    alpha_max: int
    beta_min: int
    beta_max: int

    def __post_init__(self):
        if self.alpha_min > self.alpha_max or self.beta_min > self.beta_max:
            raise ValueError(f"empty box {self}")

    def __contains__(self, index) -> bool:
        if index is CENTRAL:
            return True
        a, b = index
        return self.alpha_min <= a <= self.alpha_max and self.beta_min <= b <= self.beta_max

    def holds(self, x: LieElement) -> bool:
        return all(i in self for i in x.support())

    def size(self) -> int:
        """Number of basis symbols in the box, central element included."""
        return (self.alpha_max - self.alpha_min + 1) * (self.beta_max - self.beta_min + 1) + 1

    @classmethod
    def parse(cls, text: str) -> "IndexBox":
        parts = [int(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError("box must be 'a0,a1,b0,b1'")
        return cls(*parts)


@dataclass(frozen=True)
class LatticeBasis:
    alpha1: Tuple[int, int]
    alpha2: Tuple[int, int]

    def det(self) -> int:
        (p, q), (r, s) = self.alpha1, self.alpha2
        return p * s - q * r


def is_z_basis(b: LatticeBasis) -> bool:
    return abs(b.det()) == 1


def ghw_vanishing_set(b: LatticeBasis, k1_max: int, k2_max: int) -> List[Tuple[int, int]]:
    """Indices ``k1*alpha1 + k2*alpha2 + k*e2`` with ``0 <= k <= k1+k2``,
    the ``e2`` shift taken only when ``k1*k2 != 0``."""
    if not is_z_basis(b):
        raise ValueError(f"{b} is not a Z-basis (det = {b.det()})")
    if k1_max < 0 or k2_max < 0:
        raise ValueError("bounds must be non-negative")
    out = set()
    for k1, k2, k in ghw_witnesses(b, k1_max, k2_max):
        out.add(ghw_point(b, k1, k2, k))
    return sorted(out)


def ghw_witnesses(b: LatticeBasis, k1_max: int, k2_max: int) -> Iterable[Tuple[int, int, int]]:
    for k1 in range(k1_max + 1):
        for k2 in range(k2_max + 1):
            top = k1 + k2 if k1 * k2 != 0 else 0
            for k in range(top + 1):
                yield k1, k2, k


def ghw_point(b: LatticeBasis, k1: int, k2: int, k: int) -> Tuple[int, int]:
    shift = k if k1 * k2 != 0 else 0
    return (
        k1 * b.alpha1[0] + k2 * b.alpha2[0],
        k1 * b.alpha1[1] + k2 * b.alpha2[1] + shift,
    )


# ---------------------------------------------------------------------------
# certificates and echelon spans
# ---------------------------------------------------------------------------


class CertificateLogFull(RuntimeError):
    pass


@dataclass
class CertificateLog:
    """Append-only derivation log: ``("gen", i)`` or ``("bracket", j, k)``."""

    generators: List[LieElement]
    entries: List[Tuple] = field(default_factory=list)
    values: List[LieElement] = field(default_factory=list)
    cap: int = DEFAULT_LOG_CAP

    def add(self, entry: Tuple, value: LieElement) -> int:
        if len(self.entries) >= self.cap:
            raise CertificateLogFull(f"certificate log exceeds {self.cap} entries")
        self.entries.append(entry)
        self.values.append(value)
        return len(self.entries) - 1

    def replay(self) -> List[LieElement]:
        """Recompute every entry from the generators alone."""
        out: List[LieElement] = []
        for entry in self.entries:
            if entry[0] == "gen":
                out.append(self.generators[entry[1]])
            else:
                out.append(bracket(out[entry[1]], out[entry[2]]))
        return out


@dataclass(frozen=True)
class SpanRow:
    vector: LieElement
    certificate: Tuple[Tuple[int, Fraction], ...] = ()


class SpanBasis:
    """Row-echelon basis: leading indices strictly increase, leading coefficients are 1.

    Rows are never rewritten after insertion, so certificates stay valid.
    """

    def __init__(self, rows: Sequence[SpanRow] = ()):
        self._rows: List[SpanRow] = list(rows)
        self._pivots: Dict[GenIndex, int] = {r.vector.leading(): i for i, r in enumerate(self._rows)}

    @property
    def rows(self) -> List[LieElement]:
        return [r.vector for r in self._rows]

    @property
    def span_rows(self) -> List[SpanRow]:
        return list(self._rows)

    def __len__(self) -> int:
        return len(self._rows)

    def copy(self) -> "SpanBasis":
        return SpanBasis(self._rows)

    def reduce(self, v: LieElement, cert: Optional[Dict[int, Fraction]] = None):
        """Reduce ``v`` against the rows; returns the residual terms and certificate."""
        terms = dict(v.items())
        while terms:
            lead = min(terms, key=index_key)
            pos = self._pivots.get(lead)
            if pos is None:
                break
            row = self._rows[pos]
            scale = terms[lead]
            for k, x in row.vector.items():
                value = terms.get(k, 0) - scale * x
                if value:
                    terms[k] = value
                else:
                    del terms[k]
            if cert is not None:
                for e, x in row.certificate:
                    value = cert.get(e, 0) - scale * x
                    if value:
                        cert[e] = value
                    else:
                        del cert[e]
        return terms, cert

    def insert(self, v: LieElement, certificate: Optional[Dict[int, Fraction]] = None) -> bool:
        """Add ``v`` in place; returns True when ``v`` was already in the span."""
        cert = dict(certificate) if certificate is not None else None
        terms, cert = self.reduce(v, cert)
        if not terms:
            return True
        lead = min(terms, key=index_key)
        inv = 1 / terms[lead]
        vector = LieElement({k: x * inv for k, x in terms.items()})
        cert_items: Tuple[Tuple[int, Fraction], ...] = ()
        if cert is not None:
            cert_items = tuple(sorted((e, x * inv) for e, x in cert.items()))
        row = SpanRow(vector, cert_items)
        keys = [index_key(r.vector.leading()) for r in self._rows]
        pos = bisect_left(keys, index_key(lead))
        self._rows.insert(pos, row)
        self._pivots = {r.vector.leading(): i for i, r in enumerate(self._rows)}
        return False

    def contains_element(self, v: LieElement) -> bool:
        terms, _ = self.reduce(v)
        return not terms

    def contains(self, target: GenIndex) -> bool:
        if target is not CENTRAL:
            target = Basis(*target)
        return self.contains_element(LieElement({target: 1}))


def span_insert(s: SpanBasis, v: LieElement) -> Tuple[SpanBasis, bool]:
    out = s.copy()
    contained = out.insert(v)
    return out, contained


def span_contains(s: SpanBasis, target: GenIndex) -> bool:
    return s.contains(target)


# ---------------------------------------------------------------------------
# subalgebra closure
# ---------------------------------------------------------------------------


@dataclass
class ClosureResult:
    span: SpanBasis
    log: CertificateLog
    members: List[int]
    rounds_run: int
    saturated: bool
    fixed_point: bool

    def contains(self, target: GenIndex) -> bool:
        return self.span.contains(target)

    def verify_certificates(self) -> bool:
        """Replay the log from the generators and rebuild every row."""
        values = self.log.replay()
        if any(v != w for v, w in zip(values, self.log.values)):
            return False
        for row in self.span.span_rows:
            acc: Dict[GenIndex, Fraction] = {}
            for e, x in row.certificate:
                for k, y in values[e].items():
                    acc[k] = acc.get(k, 0) + x * y
            if LieElement(acc) != row.vector:
                return False
        return True


def subalgebra_closure(
    generators: Sequence[LieElement],
    box: IndexBox,
    max_rounds: int,
    log_cap: int = DEFAULT_LOG_CAP,
) -> ClosureResult:
    """Certified lower bound for the subalgebra generated by ``generators``.

    Each round brackets the members added in the previous round against all
    members.  Stops at a fixed point, when the span fills the box, or after
    ``max_rounds`` rounds.
    """
    for g in generators:
        if not box.holds(g):
            raise ValueError(f"generator {g!r} lies outside {box}")
    log = CertificateLog(list(generators), cap=log_cap)
    span = SpanBasis()
    members: List[int] = []
    for i, g in enumerate(generators):
        e = log.add(("gen", i), g)
        if not span.insert(g, {e: Fraction(1)}):
            members.append(e)

    fresh = list(members)
    rounds = 0
    saturated = len(span) >= box.size()
    while fresh and rounds < max_rounds and not saturated:
        rounds += 1
        added: List[int] = []
        done_pairs = set()
        for i in fresh:
            for j in members:
                if i == j or (j, i) in done_pairs:
                    continue
                done_pairs.add((i, j))
                value = bracket(log.values[i], log.values[j])
                if not value or not box.holds(value):
                    continue
                if span.contains_element(value):
                    continue
                e = log.add(("bracket", i, j), value)
                span.insert(value, {e: Fraction(1)})
                added.append(e)
        members.extend(added)
        fresh = added
        saturated = len(span) >= box.size()
    return ClosureResult(span, log, members, rounds, saturated, fixed_point=not fresh)


# ---------------------------------------------------------------------------
# generation witnesses
# ---------------------------------------------------------------------------

S = "S"
S_PRIME = "S_prime"
_OFFSETS = {
    S: ((1, 0, -1), (3, 0, -3)),
    S_PRIME: ((-1, 0, 1), (-2, 1, 4)),
}
TARGET_K = (-3, -2, 0, 1, 3, 4)


@dataclass(frozen=True)
class TargetStatus:
    alpha: int
    beta: int
    certified: bool
    status: str  # "certified", "not certified", "not certified (box)"
    group: str

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "certified": self.certified,
            "status": self.status,
            "group": self.group,
        }


@dataclass
class WitnessReport:
    m: int
    n: int
    variant: str
    box: IndexBox
    rounds: int
    targets: List[TargetStatus]
    lattice_basis: Optional[LatticeBasis]
    closure: ClosureResult

    @property
    def all_certified(self) -> bool:
        return all(t.certified for t in self.targets)

    def to_dict(self):
        lb = None
        if self.lattice_basis is not None:
            lb = {
                "alpha1": list(self.lattice_basis.alpha1),
                "alpha2": list(self.lattice_basis.alpha2),
                "z_basis": is_z_basis(self.lattice_basis),
            }
        return {
            "m": self.m,
            "n": self.n,
            "variant": self.variant,
            "box": [self.box.alpha_min, self.box.alpha_max, self.box.beta_min, self.box.beta_max],
            "rounds": self.rounds,
            "rounds_run": self.closure.rounds_run,
            "span_dim": len(self.closure.span),
            "lattice_basis": lb,
            "targets": [t.to_dict() for t in self.targets],
        }


def witness_generators(m: int, n: int, variant: str) -> List[LieElement]:
    di, dj = _OFFSETS[variant]
    return [LieElement.generator(m + i, n + j) for i in di for j in dj]


def witness_lattice_basis(m: int, n: int, variant: str) -> Optional[LatticeBasis]:
    """The Z-basis attached to (m, n) by the GHW argument, where one is given."""
    if variant == S:
        if m > 0 and n > 0:
            return LatticeBasis((n * m - 1, n * n), (m * m, m * n + 1))
        if m > 0 and n < 0:
            return LatticeBasis((1 - n * m, -n * n), (m * m, 1 + n * m))
        if m < 0 and n > 0:
            return LatticeBasis((1 + n * m, n * n), (-m * m, 1 - n * m))
        if m < 0 and n < 0:
            return LatticeBasis((-1 - n * m, -n * n), (-m * m, 1 - n * m))
    if variant == S_PRIME and m == 1 and n >= 3:
        return LatticeBasis((n - 1, n * n), (1, n + 1))
    return None


def witness_targets(m: int, n: int, variant: str, bands: Sequence[int] = ()) -> List[Tuple[str, Tuple[int, int]]]:
    out: List[Tuple[str, Tuple[int, int]]] = []
    if variant == S:
        for i in (-1, 0, 1):
            group = "2m-1" if i == -1 else ("2m" if i == 0 else "2m+1")
            for k in TARGET_K:
                out.append((group, (2 * m + i, 2 * n + k)))
        for k in bands:
            if k < 3:
                raise ValueError(f"band k must be >= 3, got {k}")
            for i in (-1, 0, 1):
                for j in range(-3 * (k - 1), 4 * (k - 1) + 1):
                    out.append((f"band k={k}", (k * m + i, k * n + j)))
    elif m == 1 and n >= 3:
        out += [
            ("corner", (n - 1, n * n)),
            ("corner", (n, n * n)),
            ("corner", (2, n + 1)),
            ("corner", (1, n + 1)),
        ]
    return out


def generation_witness(
    m: int,
    n: int,
    variant: str,
    box: IndexBox,
    rounds: int,
    bands: Sequence[int] = (),
) -> WitnessReport:
    """Run the closure around (m, n) and mark which claimed members are certified.

    ``S`` needs ``|m| >= 2, n != 0``; ``S_prime`` needs ``|m| <= 1, |n| >= 3``.
    Explicit ``S_prime`` targets exist only for ``m = 1, n >= 3``.
    """
    if variant == S:
        if abs(m) < 2 or n == 0:
            raise ValueError("variant S requires |m| >= 2 and n != 0")
    elif variant == S_PRIME:
        if abs(m) > 1 or abs(n) < 3:
            raise ValueError("variant S_prime requires |m| <= 1 and |n| >= 3")
    else:
        raise ValueError(f"unknown variant {variant!r}")
    gens = witness_generators(m, n, variant)
    for g in gens:
        if not box.holds(g):
            raise ValueError(f"box {box} too small to hold generator {g!r}")
    result = subalgebra_closure(gens, box, rounds)
    statuses = []
    seen = set()
    for group, (a, b) in witness_targets(m, n, variant, bands):
        if (a, b) in seen:
            continue
        seen.add((a, b))
        if Basis(a, b) not in box:
            statuses.append(TargetStatus(a, b, False, "not certified (box)", group))
        elif result.contains(Basis(a, b)):
            statuses.append(TargetStatus(a, b, True, "certified", group))
        else:
            statuses.append(TargetStatus(a, b, False, "not certified", group))
    return WitnessReport(m, n, variant, box, rounds, statuses, witness_lattice_basis(m, n, variant), result)
