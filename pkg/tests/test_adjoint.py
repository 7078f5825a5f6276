from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from nilpieces.adjoint import (
    H,
    N,
    SymbolicGroupElement,
    T,
    U,
    ad_torus,
    ad_unipotent,
    ad_weyl,
    ad_weyl_simple,
    ad_word,
    divided_powers,
)
from nilpieces.chevalley import algebra_for
from nilpieces.gfpoly import PolyRing


@pytest.mark.parametrize("t", ["G2", "F4"])
def test_divided_powers_match_repeated_brackets(t):
    A = algebra_for(t)
    for a in range(A.nroots):
        table = divided_powers(A, a)
        ea = A.basis_element(a)
        for b in range(A.dim):
            x = A.basis_element(b)
            k = 0
            expected = []
            while True:
                k += 1
                x = A.bracket(ea, x)
                if x.is_zero():
                    break
                for s, v in sorted(x.coeffs.items()):
                    assert v % factorial(k) == 0
                    expected.append((k, s, v // factorial(k)))
            assert list(table.get(b, ())) == expected


def test_g2_short_root_has_cubic_divided_power():
    A = algebra_for("G2")
    a = A.rs.index[(1, 0)]
    top = max(k for terms in divided_powers(A, a).values() for k, _, _ in terms)
    assert top == 3


@pytest.mark.parametrize("c", [2, -1, 3])
def test_unipotent_is_exponential_series(c):
    A = algebra_for("G2")
    for a in (0, 1, A.rs.index[(0, -1)]):
        m = ad_unipotent(A, a, c)
        for b in range(A.dim):
            got = m(A.basis_element(b)).coeffs

            def br(v, a=a):
                y = A.element({k: int(x) for k, x in v.items()})
                return dict(A.bracket(A.basis_element(a), y).coeffs)

            want = oracles.exp_series(br, {b: 1}, Fraction(c))
            assert {k: Fraction(v) for k, v in got.items()} == want


def test_n_alpha_sends_e_alpha_to_minus_e_minus_alpha():
    for t in ("G2", "F4"):
        A = algebra_for(t)
        rs = A.rs
        for i in range(rs.rank):
            a = rs.simple_index[i]
            img = ad_weyl_simple(A, i)(A.basis_element(a))
            assert img == A.basis_element(rs.negate(a)).scaled(-1)


def test_n_alpha_reflects_the_cartan_part():
    A = algebra_for("F4")
    rs = A.rs
    for i in range(rs.rank):
        m = ad_weyl_simple(A, i)
        for j in range(rs.rank):
            # s_i(a_j^vee) = a_j^vee - <a_i, a_j^vee> a_i^vee
            want = {A.h_index(j): 1}
            c = rs.pairing(rs.roots[rs.simple_index[i]], j)
            want[A.h_index(i)] = want.get(A.h_index(i), 0) - c
            assert m(A.h(j)) == A.element({k: v for k, v in want.items() if v})


@pytest.mark.parametrize("t", ["G2", "F4"])
def test_weyl_representatives_permute_root_spaces(t):
    A = algebra_for(t, 3)
    rs = A.rs
    for w in rs.weyl[:: 1 if t == "G2" else 37]:
        m = ad_weyl(A, w)
        for k in range(rs.n_roots):
            assert m(A.basis_element(k)).support() == [w.act(k)]


def test_torus_acts_by_characters():
    A = algebra_for("G2", 3)
    rs = A.rs
    R = A.coefficient_ring
    for k in range(rs.n_roots):
        for i in range(rs.rank):
            e = rs.pairing(rs.roots[k], i)
            img = ad_torus(A, i, 2)(A.basis_element(k))
            assert img == A.element({k: R.const(pow(2, e % 2, 3))})


@pytest.mark.parametrize("p", [2, 3])
def test_unipotent_group_law_with_symbolic_parameters(p):
    A = algebra_for("F4", p)
    R = PolyRing(p, ["s", "t"])
    s, t = R.gens()
    for a in (0, 5, 23, 30):
        x = A.element({b: R.const(1) for b in range(0, A.dim, 5)}, R)
        lhs = ad_unipotent(A, a, s)(ad_unipotent(A, a, t)(x))
        rhs = ad_unipotent(A, a, s + t)(x)
        assert lhs == rhs
        assert ad_unipotent(A, a, -s)(ad_unipotent(A, a, s)(x)) == x


def _element(A, data):
    R = A.coefficient_ring
    coeffs = {}
    for b in data.draw(st.sets(st.integers(0, A.dim - 1), max_size=8)):
        coeffs[b] = R.const(data.draw(st.integers(1, A.char - 1)))
    return A.element(coeffs)


def _group_element(A, data):
    rs = A.rs
    atoms = []
    for _ in range(data.draw(st.integers(1, 5))):
        kind = data.draw(st.sampled_from("UNHT"))
        if kind == "U":
            atoms.append(U(data.draw(st.integers(0, rs.n_roots - 1)), data.draw(st.integers(0, A.char - 1))))
        elif kind == "N":
            atoms.append(N(rs.weyl_from_word(data.draw(st.lists(st.integers(0, rs.rank - 1), max_size=4)))))
        elif kind == "H":
            atoms.append(H(data.draw(st.integers(0, rs.rank - 1)), data.draw(st.integers(1, A.char - 1))))
        else:
            atoms.append(T(tuple(data.draw(st.integers(1, A.char - 1)) for _ in range(rs.rank))))
    return SymbolicGroupElement(tuple(atoms))


@pytest.mark.parametrize("t, p", [("G2", 2), ("G2", 3), ("F4", 2), ("F4", 3)])
@settings(max_examples=40)
@given(data=st.data())
def test_adjoint_action_is_an_automorphism(t, p, data):
    A = algebra_for(t, p)
    g = _group_element(A, data)
    x, y = _element(A, data), _element(A, data)
    assert ad_word(A, g, A.bracket(x, y)) == A.bracket(ad_word(A, g, x), ad_word(A, g, y))


@settings(max_examples=30)
@given(data=st.data())
def test_symbolic_root_elements_preserve_brackets(data):
    A = algebra_for("G2", 3)
    R = PolyRing(3, ["c"])
    (c,) = R.gens()
    a = data.draw(st.integers(0, A.nroots - 1))
    x, y = _element(A, data), _element(A, data)
    x, y = (A.element({b: dict(v) for b, v in z.coeffs.items()}, R) for z in (x, y))
    m = ad_unipotent(A, a, c)
    assert m(A.bracket(x, y)) == A.bracket(m(x), m(y))


def test_torus_needs_units():
    A = algebra_for("G2", 3)
    with pytest.raises(ValueError):
        ad_torus(A, 0, 3)
