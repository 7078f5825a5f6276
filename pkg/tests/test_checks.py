import random
from types import SimpleNamespace

import pytest

import oracles
from nilpieces import checks
from nilpieces.chevalley import algebra_for
from nilpieces.gfpoly import PolyRing


def _all_ok(found):
    bad = [c.line() for c in found if not c.ok]
    assert not bad, bad
    return found


def test_check_line_format():
    assert checks.Check("x", True).line() == "PASS  x"
    assert checks.Check("y", False, "failures: 3").line() == "FAIL  y  failures: 3"


@pytest.mark.parametrize("t, p", [("G2", 2), ("G2", 3)])
def test_algebra_suite_passes(t, p):
    _all_ok(checks.algebra_suite(t, p))


def test_jacobi_count_detects_a_flipped_structure_constant():
    A = algebra_for("G2", 3)
    rs = A.rs
    table = dict(A.integral_table)
    a, b = rs.index[(1, 0)], rs.index[(0, 1)]
    table[(a, b)] = tuple((t, -n) for t, n in table[(a, b)])
    table[(b, a)] = tuple((t, -n) for t, n in table[(b, a)])
    broken = SimpleNamespace(char=3, integral_table=table, dim=A.dim)
    assert checks.jacobi_residues(broken) > 0


def test_adjoint_suite_passes_on_g2():
    found = _all_ok(checks.adjoint_suite("G2", 3, seed=5, samples=20))
    assert any("weights" in c.name for c in found)


def test_automorphism_count_detects_a_non_automorphism(monkeypatch):
    A = algebra_for("G2", 3)
    assert checks.automorphism_failures(A, random.Random(1), 10) == 0
    # x -> 2x is linear but [2x, 2y] = 4[x, y] = [x, y] in characteristic 3
    monkeypatch.setattr(checks, "ad_word", lambda A, g, x: x.scaled(2))
    assert checks.automorphism_failures(A, random.Random(1), 10) > 0


@pytest.mark.parametrize("p, k", [(2, 2), (2, 3), (3, 2)])
def test_extension_field_is_a_field(p, k):
    F = checks.ExtensionField(p, k)
    q = F.q
    for a in range(1, q):
        assert sum(1 for b in range(q) if F.mul[a][b] == 1) == 1
    # the multiplicative group is cyclic
    assert any(len({F.power(g, e) for e in range(1, q)}) == q - 1 for g in range(2, q))
    for a in range(q):
        for b in range(q):
            assert F.add[a][b] == F.add[b][a] and F.mul[a][b] == F.mul[b][a]


@pytest.mark.parametrize("p", [2, 3])
def test_enumeration_agrees_with_the_test_field(p):
    rng = random.Random(p)
    for _ in range(60):
        ring, system = checks.random_system(rng, p)
        if ring.nvars > 2:
            continue
        terms = [[(c, ring.exps(m)) for m, c in f.items()] for f in system]
        for k in (1, 2):
            ours = checks.enumerate_zero(ring, system, checks.ExtensionField(p, k)) is not None
            assert ours == oracles.has_zero(terms, ring.nvars, oracles.Field(p, k))


def test_enumeration_finds_extension_zero():
    R = PolyRing(2, ["x"])
    (x,) = R.gens()
    f = (x**2 + x + 1).terms
    assert checks.enumerate_zero(R, [f], checks.ExtensionField(2, 1)) is None
    assert checks.enumerate_zero(R, [f], checks.ExtensionField(2, 2)) is not None


@pytest.mark.parametrize("p", [2, 3])
def test_groebner_suite_passes(p):
    found = _all_ok(checks.groebner_suite(p, seed=3, samples=40))
    assert found


def test_oracle_suite_passes_on_g2():
    _all_ok(checks.oracle_suite("G2", 2, seed=1, samples=10))
