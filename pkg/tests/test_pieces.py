from dataclasses import dataclass

import pytest
from hypothesis import given, settings, strategies as st

import nilpieces.pieces as pieces
from nilpieces.adjoint import N, SymbolicGroupElement, T, U, ad_word
from nilpieces.chevalley import algebra_for, in_g_geq
from nilpieces.data import load_dataset
from nilpieces.gfpoly import Budget
from nilpieces.pieces import (
    Bang,
    MembershipVerdict,
    OrbitRep,
    Options,
    PartitionError,
    PieceTable,
    Verdict,
    bang_concrete,
    classify_all,
    classify_membership,
    meets_g_geq2,
    regular_piece_test,
    stabilizing_unipotent_indices,
)
from nilpieces.rootsys import WeightedDynkinDiagram, weight_zero_subgroup

FULL = Options(diagonal_shortcut=False, regular_shortcut=False)


@dataclass(frozen=True)
class GivenElement(OrbitRep):
    """An orbit entry whose element is supplied directly (any coefficients)."""

    given: object = None

    def element(self, A):
        return self.given


def _random_group_element(A, data, *, only_weight_zero=None, length=4):
    """A word in G(F_p); with a diagram, only atoms of its Levi (or of P
    when ``only_weight_zero`` is the string "parabolic")."""
    rs = A.rs
    atoms = []
    kinds = "UNT"
    for _ in range(data.draw(st.integers(1, length))):
        kind = data.draw(st.sampled_from(kinds))
        if kind == "U":
            if only_weight_zero is None:
                allowed = range(rs.n_roots)
            else:
                delta, mode = only_weight_zero
                allowed = [
                    k
                    for k in range(rs.n_roots)
                    if (delta.value(rs.roots[k]) >= 0 if mode == "parabolic" else delta.value(rs.roots[k]) == 0)
                ]
            if not allowed:
                continue
            atoms.append(U(data.draw(st.sampled_from(list(allowed))), data.draw(st.integers(1, A.char - 1))))
        elif kind == "N":
            if only_weight_zero is None:
                w = rs.weyl_from_word(data.draw(st.lists(st.integers(0, rs.rank - 1), max_size=4)))
            else:
                w = data.draw(st.sampled_from(weight_zero_subgroup(rs, only_weight_zero[0])))
            atoms.append(N(w))
        else:
            atoms.append(T(tuple(data.draw(st.integers(1, A.char - 1)) for _ in range(rs.rank))))
    return SymbolicGroupElement(tuple(atoms))


def _random_graded(A, delta, data, lowest):
    R = A.coefficient_ring
    rs = A.rs
    coeffs = {}
    for k in range(rs.n_positive):
        if delta.value(rs.roots[k]) >= lowest and data.draw(st.booleans()):
            coeffs[k] = R.const(data.draw(st.integers(1, A.char - 1)))
    return A.element(coeffs)


# -- the zero orbit and the zero diagram ------------------------------------------------


@pytest.mark.parametrize("p", [2, 3])
def test_zero_orbit_is_its_own_piece(p):
    ds = load_dataset("G2", p)
    A = algebra_for("G2", p)
    zero = ds.orbit("x1")
    d0 = ds.diagram("diagram1")
    assert d0.weights == (0, 0)
    for d in ds.diagrams:
        want = Verdict.IN_PIECE if d is d0 else Verdict.NOT_IN_PIECE
        assert classify_membership(A, zero, d, FULL).value is want
    for o in ds.orbits:
        if o is not zero:
            assert classify_membership(A, o, d0, FULL).value is Verdict.NOT_IN_PIECE


# -- P-stability of the filtration ---------------------------------------------------------


@pytest.mark.parametrize("t, p", [("G2", 2), ("G2", 3), ("F4", 2), ("F4", 3)])
@settings(max_examples=25)
@given(data=st.data())
def test_g_geq_is_stable_under_the_parabolic(t, p, data):
    A = algebra_for(t, p)
    ds = load_dataset(t, p)
    delta = data.draw(st.sampled_from(ds.diagrams))
    lowest = data.draw(st.integers(1, 3))
    x = _random_graded(A, delta, data, lowest)
    g = _random_group_element(A, data, only_weight_zero=(delta, "parabolic"))
    assert in_g_geq(ad_word(A, g, x), delta, lowest)


def test_negative_weight_root_elements_leave_g_geq2():
    A = algebra_for("G2", 3)
    rs = A.rs
    delta = WeightedDynkinDiagram("d", (0, 2))
    x = A.sum_of_roots([(0, 1)])
    g = SymbolicGroupElement((U(rs.index[(0, -1)], 1),))
    assert not in_g_geq(ad_word(A, g, x), delta, 2)


# -- bang verdicts --------------------------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3])
@settings(max_examples=15)
@given(data=st.data())
def test_bang_verdict_is_invariant_under_the_levi(p, data):
    A = algebra_for("G2", p)
    ds = load_dataset("G2", p)
    delta = data.draw(st.sampled_from([d for d in ds.diagrams if any(d.weights)]))
    y = _random_graded(A, delta, data, 2)
    y = A.element({k: c for k, c in y.coeffs.items() if delta.value(A.rs.roots[k]) == 2})
    g = _random_group_element(A, data, only_weight_zero=(delta, "levi"))
    gy = ad_word(A, g, y)
    assert in_g_geq(gy, delta, 2)
    a = bang_concrete(A, y, delta, FULL).value
    b = bang_concrete(A, gy, delta, FULL).value
    assert Bang.UNDECIDED not in (a, b)
    assert a is b


def test_regular_piece_test_examples():
    A = algebra_for("G2", 3)
    R = A.coefficient_ring
    idx = A.rs.index
    assert regular_piece_test(A, A.sum_of_roots([(1, 0), (0, 1)]))
    assert regular_piece_test(A, A.sum_of_roots([(1, 0), (0, 1), (1, 1), (3, 2)]))
    assert not regular_piece_test(A, A.sum_of_roots([(1, 0)]))
    assert not regular_piece_test(A, A.sum_of_roots([(1, 0), (1, 1)]))
    with_negative = A.element({idx[(1, 0)]: R.const(1), idx[(0, 1)]: R.const(2), idx[(-1, 0)]: R.const(1)})
    assert not regular_piece_test(A, with_negative)


def test_regular_shortcut_agrees_with_the_stabiliser_sweep():
    A = algebra_for("F4", 2)
    regular = WeightedDynkinDiagram("regular", (2, 2, 2, 2))
    rs = A.rs
    y = A.sum_of_roots([rs.roots[rs.simple_index[i]] for i in range(4)] + [(1, 1, 0, 0)])
    assert bang_concrete(A, y, regular, FULL).value is Bang.IN_BANG
    y = A.sum_of_roots([rs.roots[rs.simple_index[i]] for i in range(3)])
    assert bang_concrete(A, y, regular, FULL).value is Bang.NOT_IN_BANG


# -- membership -----------------------------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3])
@settings(max_examples=20)
@given(data=st.data())
def test_verdicts_do_not_depend_on_the_representative(p, data):
    A = algebra_for("G2", p)
    ds = load_dataset("G2", p)
    o = data.draw(st.sampled_from(ds.orbits))
    d = data.draw(st.sampled_from(ds.diagrams))
    g = _random_group_element(A, data)
    x = ad_word(A, g, o.element(A))
    moved = GivenElement(o.label, o.support, None, True, x)
    assert classify_membership(A, moved, d, FULL).value is classify_membership(A, o, d, FULL).value


def test_diagonal_shortcut_skips_exceptional_orbits():
    ds = load_dataset("G2", 3)
    A = algebra_for("G2", 3)
    v = classify_membership(A, ds.orbit("x4"), ds.diagram("diagram4"))
    assert v.witness.get("shortcut") == "diagonal"
    v = classify_membership(A, ds.orbit("x3"), ds.diagram("diagram3"))
    assert "shortcut" not in v.witness and v.value is Verdict.IN_PIECE


def test_in_piece_witness_names_a_weyl_class():
    ds = load_dataset("G2", 2)
    A = algebra_for("G2", 2)
    v = classify_membership(A, ds.orbit("x3"), ds.diagram("diagram4"), FULL)
    assert v.value is Verdict.IN_PIECE
    w = A.rs.weyl_from_word(v.witness["w"])
    assert w.word == tuple(v.witness["w"])


def test_tiny_budget_gives_undecided_not_a_wrong_verdict():
    ds = load_dataset("G2", 3)
    A = algebra_for("G2", 3)
    opts = Options(diagonal_shortcut=False, regular_shortcut=False, budget=Budget(max_pairs=1, max_monomials=1))
    seen = set()
    for o in ds.orbits:
        for d in ds.diagrams:
            v = classify_membership(A, o, d, opts).value
            seen.add(v)
            if v is not Verdict.UNDECIDED:
                assert v is classify_membership(A, o, d, FULL).value
    assert Verdict.UNDECIDED in seen


def test_pruning_keeps_every_g2_verdict():
    for p in (2, 3):
        A = algebra_for("G2", p)
        ds = load_dataset("G2", p)
        for o in ds.orbits:
            for d in ds.diagrams:
                a = classify_membership(A, o, d, FULL).value
                b = classify_membership(A, o, d, Options(False, False, pruning=False)).value
                assert a is b


def test_stabilizing_roots_of_the_highest_root_vector():
    A = algebra_for("F4", 3)
    x = A.sum_of_roots([(2, 3, 4, 2)])
    assert stabilizing_unipotent_indices(A, x) == frozenset(range(A.rs.n_positive))
    y = A.sum_of_roots([(1, 0, 0, 0)])
    assert A.rs.index[(1, 0, 0, 0)] in stabilizing_unipotent_indices(A, y)
    assert A.rs.index[(0, 1, 0, 0)] not in stabilizing_unipotent_indices(A, y)


def test_meets_g_geq2():
    ds = load_dataset("G2", 3)
    A = algebra_for("G2", 3)
    regular, long_root = ds.orbit("x2"), ds.orbit("x6")
    assert meets_g_geq2(A, long_root.element(A), ds.diagram("diagram4")) is True
    assert meets_g_geq2(A, regular.element(A), ds.diagram("diagram4")) is False
    assert meets_g_geq2(A, regular.element(A), ds.diagram("diagram5")) is True


# -- tables ---------------------------------------------------------------------------------


def test_piece_table_partition_bookkeeping():
    t = PieceTable("G2", 2, ["d1", "d2"], ["a", "b"])
    yes, no = MembershipVerdict(Verdict.IN_PIECE), MembershipVerdict(Verdict.NOT_IN_PIECE)
    t.cells = {("a", "d1"): yes, ("b", "d1"): no, ("a", "d2"): no}
    assert not t.is_complete()
    t.cells[("b", "d2")] = yes
    assert t.is_complete() and t.partition_ok()
    assert t.pieces() == {"d1": {"a"}, "d2": {"b"}}
    t.cells[("b", "d1")] = yes
    assert not t.partition_ok()
    t.cells[("b", "d1")] = MembershipVerdict(Verdict.UNDECIDED)
    assert not t.is_complete()


def test_classify_all_rejects_a_non_partition(monkeypatch):
    ds = load_dataset("G2", 2)
    A = algebra_for("G2", 2)
    monkeypatch.setattr(pieces, "classify_membership", lambda *a, **k: MembershipVerdict(Verdict.IN_PIECE))
    with pytest.raises(PartitionError) as info:
        classify_all(A, ds.orbits, ds.diagrams)
    assert info.value.table.is_complete()


def test_classify_all_cells_done_and_callback():
    ds = load_dataset("G2", 3)
    A = algebra_for("G2", 3)
    seen = []
    done = {("x2", "diagram5"): MembershipVerdict(Verdict.IN_PIECE, {"from": "earlier"})}
    t = classify_all(
        A,
        ds.orbits,
        ds.diagrams,
        FULL,
        cells=[("x2", "diagram5"), ("x3", "diagram3")],
        done=done,
        on_cell=lambda o, d, v, s: seen.append((o, d, v.value)),
    )
    assert set(t.cells) == {("x2", "diagram5"), ("x3", "diagram3")}
    assert t.cells[("x2", "diagram5")].witness == {"from": "earlier"}
    assert seen == [("x3", "diagram3", Verdict.IN_PIECE)]


def test_worker_pool_gives_the_same_table():
    ds = load_dataset("G2", 2)
    A = algebra_for("G2", 2)
    one = classify_all(A, ds.orbits, ds.diagrams, FULL)
    two = classify_all(A, ds.orbits, ds.diagrams, FULL, workers=2)
    assert {k: v.value for k, v in one.cells.items()} == {k: v.value for k, v in two.cells.items()}
