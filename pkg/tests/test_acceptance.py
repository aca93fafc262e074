"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected and repeated in the pytest terminal summary.
Run alone with ``pytest tests/test_acceptance.py -v -s``.
"""

import functools
import io
import itertools
import time
from fractions import Fraction as Q

import pytest

from conftest import ACCEPTANCE_LINES
from oracles import naive_bracket
from virlike import CENTRAL, LieElement, bracket, bracket_basis, central_cocycle
from virlike.algebra import antisymmetry_scan, jacobi_scan
from virlike.catalog import (
    COL,
    ROW,
    Family,
    FamilySpec,
    IntermediateSeriesSpec,
    ModVector,
    SeriesKind,
    act_element,
    intermediate_series_coeff,
    restriction_coeff,
)
from virlike.classify import (
    Deformation,
    DeformationSpec,
    derive_transfer_factors,
    fit_family,
    rigidity_sweep,
    transfer_cocycle_check,
)
from virlike.cli import run_command, save_table
from virlike.span import S, S_PRIME, IndexBox, generation_witness
from virlike.verify import Window, fg_equation_residual, module_axiom_residual, normalization_check, tabulate

# three valid draws per family; F1 covers a in {0, 1/2, 1}
DRAWS = [
    FamilySpec("F1", 0, 0, a=0),
    FamilySpec("F1", Q(1, 3), Q(1, 5), a=Q(1, 2)),
    FamilySpec("F1", 2, Q(-7, 2), a=1),
    FamilySpec("F2", Q(1, 2), Q(1, 3)),
    FamilySpec("F2", Q(-5, 3), Q(7, 4)),
    FamilySpec("F2", Q(3, 2), Q(-2, 5)),
    FamilySpec("F3", Q(1, 2), Q(1, 3)),
    FamilySpec("F3", Q(-1, 4), Q(5, 3)),
    FamilySpec("F3", Q(7, 2), Q(-1, 6)),
    FamilySpec("F4", Q(1, 2), 0),
    FamilySpec("F4", Q(-4, 3), 2),
    FamilySpec("F4", Q(5, 7), Q(-1, 2)),
    FamilySpec("F5", 2, Q(1, 3)),
    FamilySpec("F5", 0, Q(-3, 2)),
    FamilySpec("F5", Q(1, 2), Q(5, 4)),
    FamilySpec("F6", Q(1, 2), 0),
    FamilySpec("F6", Q(-7, 3), Q(1, 3)),
    FamilySpec("F6", Q(3, 4), -3),
    FamilySpec("F7", 0, Q(1, 2)),
    FamilySpec("F7", -2, Q(-2, 3)),
    FamilySpec("F7", Q(1, 5), Q(7, 3)),
]
FIRST_DRAW = {fam: next(d for d in DRAWS if d.family is fam) for fam in Family}
W4 = Window.symmetric(4, 4, 3, 3)


def criterion(number, title, budget=None):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            ok = False
            detail = ""
            try:
                detail = fn(*args, **kwargs) or ""
                elapsed = time.perf_counter() - start
                if budget is not None:
                    assert elapsed <= budget, f"took {elapsed:.1f}s, budget {budget}s"
                ok = True
            finally:
                elapsed = time.perf_counter() - start
                extra = f" [{detail}]" if detail else ""
                line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'} ({elapsed:.1f}s): {title}{extra}"
                ACCEPTANCE_LINES.append(line)
                print(line)

        return run

    return wrap


@pytest.fixture(scope="module")
def tables():
    return {spec: tabulate(spec, W4) for spec in DRAWS}


def test_draws_are_distinct_and_cover_every_family():
    assert len(set(DRAWS)) == 21
    for fam in Family:
        assert sum(d.family is fam for d in DRAWS) == 3
    assert {d.a for d in DRAWS if d.family is Family.F1} == {0, Q(1, 2), 1}


@criterion(1, "Jacobi on |alpha|,|beta|<=3 and antisymmetry on |alpha|,|beta|<=4, exact", budget=60)
def test_c01_lie_algebra_validity():
    checked, failures = jacobi_scan(3, 3)
    assert checked == 49 ** 3 and failures == []
    pairs, bad = antisymmetry_scan(4, 4)
    assert pairs == 81 ** 2 and bad == []
    # every cocycle branch is nonzero somewhere in the box
    branches = set()
    for a1, b1, b2 in itertools.product(range(-3, 4), repeat=3):
        if central_cocycle(a1, b1, -a1, b2):
            branches.add(b1 + b2)
    assert branches == {-3, -2, -1, 0}
    return f"{checked} triples, {pairs} pairs"


@criterion(2, "bracket spot values bit-exact")
def test_c02_bracket_spot_values():
    L = LieElement.generator
    assert bracket_basis(2, 1, 1, 1) == -L(3, 3)
    assert bracket_basis(1, -1, -1, -2) == -2 * L(0, -2) - L(0, -3) + LieElement.central(Q(1, 12))
    assert bracket_basis(5, 7, 5, 7) == LieElement.zero()
    assert bracket_basis(0, 2, 0, -2) == -4 * L(0, 0) + LieElement.central(Q(1, 2))
    assert bracket_basis(1, -1, -1, -2).to_json() == (
        '{"terms":[{"alpha":0,"beta":-3,"coeff":"-1"},{"alpha":0,"beta":-2,"coeff":"-2"}],"central":"1/12"}'
    )
    for args in [(2, 1, 1, 1), (1, -1, -1, -2), (5, 7, 5, 7), (0, 2, 0, -2)]:
        got = {("c" if i is CENTRAL else tuple(i)): v for i, v in bracket_basis(*args).items()}
        assert got == naive_bracket(*args)


@criterion(3, "generation witnesses certify all targets", budget=120)
def test_c03_generation_witnesses():
    box = IndexBox(-8, 8, -12, 12)
    total = 0
    for m, n in [(2, 1), (2, -1), (-2, 1), (-2, -1)]:
        rep = generation_witness(m, n, S, box, 4)
        assert len(rep.targets) == 18
        assert rep.all_certified, [(t.alpha, t.beta) for t in rep.targets if not t.certified]
        assert rep.closure.verify_certificates()
        total += len(rep.targets)
    rep = generation_witness(1, 3, S_PRIME, box, 4)
    assert {(t.alpha, t.beta) for t in rep.targets} == {(2, 9), (3, 9), (2, 4), (1, 4)}
    assert rep.all_certified and rep.closure.verify_certificates()
    total += len(rep.targets)
    return f"{total} targets certified"


@criterion(4, "module axiom and coefficient equations vanish for 21 draws on m,n in [-4,4], r,s in [-3,3]", budget=180)
def test_c04_module_axioms(tables):
    instances = 0
    for spec, table in tables.items():
        ax = module_axiom_residual(spec, W4)
        fg = fg_equation_residual(table)
        assert ax.passed, (spec, ax.entries[:3])
        assert fg.passed, (spec, fg.entries[:3])
        instances += ax.checked + fg.checked
    return f"{instances} instances"


@criterion(5, "normalizations f(0,-1,m,n)=lambda+m, g(0,0,m,n)=mu+n on every catalog table")
def test_c05_normalizations(tables):
    for spec, table in tables.items():
        rep = normalization_check(table)
        assert rep.passed and rep.checked == 2 * 81


@criterion(6, "central element acts trivially: pairs with alpha1+alpha2=0, beta1+beta2 in [-3,0]")
def test_c06_central_triviality():
    L = LieElement.generator
    pairs = [
        (a1, b1, -a1, t - b1)
        for a1 in range(-3, 4)
        for b1 in range(-3, 4)
        for t in range(-3, 1)
        if -3 <= t - b1 <= 3
    ]
    central_hits = 0
    for spec in FIRST_DRAW.values():
        for a1, b1, a2, b2 in pairs:
            x, y = L(a1, b1), L(a2, b2)
            br = bracket(x, y)
            central_hits += br.coeff(CENTRAL) != 0
            for m, n in itertools.product(range(-2, 3), repeat=2):
                v = ModVector.basis(m, n)
                lhs = act_element(spec, br, v)
                rhs = act_element(spec, x, act_element(spec, y, v)) - act_element(spec, y, act_element(spec, x, v))
                assert lhs == rhs, (spec, (a1, b1, a2, b2), (m, n))
            assert act_element(spec, LieElement.central(), ModVector.basis(0, 0)) == 0
    assert central_hits > 0
    return f"{len(pairs)} pairs x 7 families, {central_hits} with nonzero central term"


@criterion(7, "single-entry corruption detected for every family")
def test_c07_sensitivity():
    w = Window.symmetric(3, 3, 2, 2)
    detected = 0
    for spec in FIRST_DRAW.values():
        for which, key in (("g", (0, 1, 0, 0)), ("f", (1, 0, 0, 0))):
            t = tabulate(spec, w)
            getattr(t, which)[key] += 1
            if not fg_equation_residual(t).passed:
                detected += 1
    assert detected == 14
    return f"{detected}/14 corruptions (7/7 families)"


@criterion(8, "classifier round trip recovers all 21 draws exactly")
def test_c08_classifier_round_trip(tables):
    for spec, table in tables.items():
        res = fit_family(table, check=False)
        assert res.matches, spec
        assert spec in res.matches, (spec, res.matches)
        for m in res.matches:
            assert tabulate(m, W4) == table


@criterion(9, "transfer factors satisfy both multiplicative identities on range +-4")
def test_c09_transfer_factors():
    w = Window.symmetric(4, 2, 4, 1)
    for spec in DRAWS:
        k = derive_transfer_factors(tabulate(spec, w))
        rep = transfer_cocycle_check(k)
        assert rep.passed and rep.checked > 0, spec
        assert all(k[(0, m)] == 1 for m in range(-4, 5))


@criterion(10, "both deformation sweeps pass exactly at t=0 only, window +-3")
def test_c10_rigidity():
    grid = [-1, Q(-1, 2), 0, Q(1, 2), 1]
    w = Window.symmetric(3, 3, 3, 3)
    for dep, lam in ((Deformation.D_APRIME, Q(1, 2)), (Deformation.D_APRIME_B, Q(1, 3))):
        rep = rigidity_sweep(DeformationSpec(dep, lam), grid, w)
        assert [p.passed for p in rep.points] == [t == 0 for t in grid], (dep, rep.to_list())


@criterion(11, "F1 row/col restrictions match the intermediate-series A_{a,b} coefficients on +-4")
def test_c11_restriction_consistency():
    for spec in (d for d in DRAWS if d.family is Family.F1):
        row = IntermediateSeriesSpec(SeriesKind.Aab, a=spec.lam, b=spec.a)
        col = IntermediateSeriesSpec(SeriesKind.Aab, a=spec.mu, b=spec.a)
        for i, j, fixed in itertools.product(range(-4, 5), repeat=3):
            assert restriction_coeff(spec, ROW, i, j, fixed) == intermediate_series_coeff(row, i, j)
            assert restriction_coeff(spec, COL, i, j, fixed) == intermediate_series_coeff(col, i, j)


@criterion(12, "every CLI command is byte-identical across runs and worker counts")
def test_c12_determinism(tmp_path, monkeypatch):
    table = tmp_path / "t.json"
    bad = tmp_path / "bad.json"
    save_table(tabulate(FamilySpec("F3", Q(1, 2), Q(1, 3)), Window.symmetric(2, 2, 2, 2)), str(table))
    t = tabulate(FamilySpec("F1", Q(1, 3), Q(1, 5), a=Q(1, 2)), Window.symmetric(2, 2, 2, 2))
    t.g[(0, 1, 0, 0)] += 1
    save_table(t, str(bad))
    commands = [
        ["bracket", "--a1", "1", "--b1", "-1", "--a2", "-1", "--b2", "-2"],
        ["jacobi", "--box", "1"],
        ["closure", "--m", "2", "--n", "1", "--box", "0,8,-8,12", "--rounds", "3"],
        ["closure", "--m", "2", "--n", "1", "--box", "0,8,-8,5", "--rounds", "3", "--format", "csv"],
        ["ghw-set", "--basis", "1,1,4,3", "--k1", "2", "--k2", "2"],
        ["act", "--family", "F6", "--lambda", "1/2", "--r", "2", "--s", "-1", "--m", "1", "--n", "3"],
        ["tabulate", "--family", "F2", "--lambda", "1/2", "--mu", "1/3", "--window", "1,1,1,1"],
        ["verify", "--family", "F2", "--lambda", "1/2", "--mu", "1/3", "--window", "2,2,2,2"],
        ["verify", "--table", str(bad)],
        ["verify", "--table", str(bad), "--format", "csv"],
        ["classify", "--table", str(table)],
        ["classify", "--table", str(bad)],
        ["sweep", "--deformation", "D_APRIME_B", "--lambda", "1/3", "--window", "2,2,2,2"],
    ]
    for argv in commands:
        outputs = set()
        for threads in ("1", "1", "2", "3"):
            monkeypatch.setenv("VIRLIKE_THREADS", threads)
            out = io.StringIO()
            run_command(argv, stdout=out, stderr=io.StringIO())
            outputs.add(out.getvalue())
        assert len(outputs) == 1, argv
    return f"{len(commands)} commands x 4 runs"
