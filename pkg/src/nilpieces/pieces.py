"""Deciding which nilpotent orbits make up the piece of a weighted diagram.

For an orbit representative ``x`` and a diagram ``delta`` the orbit lies in
the piece exactly when some conjugate of ``x`` lies in ``g_{>=2}`` and has a
``g_2``-part whose full stabiliser sits inside the parabolic ``P = G_{>=0}``.
The search runs over Bruhat cells:

1. for ``w`` in a transversal of ``W_0 \\ W`` collect the parameters ``c`` of
   ``u(c)`` with ``Ad(n_w u(c)) x in g_{>=2}`` (a *family* of points);
2. pick a point of the family with prime field coordinates;
3. take the ``g_2``-part;
4. split the family into the part that is ``P``-conjugate to the point and
   the rest;
5. test stabilisers cell by cell: ``Ad(t n_w'' u) y = Ad(v) y`` for
   ``w''`` outside ``W_0``.

Statements that must hold for every point of a family are settled with
:func:`cover`, which uses Groebner bases for a block order (cell variables
above family parameters) and splits the family where the leading
coefficients vanish.
"""

from __future__ import annotations

import enum
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .adjoint import N, SymbolicGroupElement, U, ad_word, divided_powers
from .chevalley import (
    ChevalleyAlgebra,
    LieElement,
    build_algebra,
    g_geq_conditions,
    grade_part,
)
from .gfpoly import (
    DEFAULT_BUDGET,
    FMASK,
    Budget,
    GBBudgetExceeded,
    PolyDict,
    PolyRing,
    eliminate_linear,
    groebner,
    is_unit_ideal,
    normal_form,
    specialize_solution,
)
from .rootsys import (
    RootSystem,
    WeightedDynkinDiagram,
    WeylElement,
    build_root_system,
    right_transversal,
    weight_zero_subgroup,
)

log = logging.getLogger(__name__)


class Verdict(enum.Enum):
    IN_PIECE = "InPiece"
    NOT_IN_PIECE = "NotInPiece"
    UNDECIDED = "Undecided"


class Bang(enum.Enum):
    IN_BANG = "InBang"
    NOT_IN_BANG = "NotInBang"
    UNDECIDED = "Undecided"


class Reach(enum.Enum):
    REACHABLE = "Reachable"
    UNREACHABLE = "Unreachable"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class OrbitRep:
    """x = sum of e_a over the support (all coefficients one)."""

    label: str
    support: tuple[tuple[int, ...], ...]
    diagram_hint: str | None = None
    exceptional: bool = False

    def element(self, A: ChevalleyAlgebra) -> LieElement:
        for r in self.support:
            k = A.rs.index.get(tuple(r))
            if k is None or not A.rs.is_positive(k):
                raise ValueError(f"orbit {self.label}: {r} is not a positive root")
        return A.sum_of_roots(self.support)


@dataclass
class MembershipVerdict:
    value: Verdict
    witness: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"value": self.value.value, "witness": self.witness}


@dataclass
class Options:
    diagonal_shortcut: bool = True
    regular_shortcut: bool = True
    pruning: bool = True
    budget: Budget = DEFAULT_BUDGET
    max_families: int = 2000
    max_cover_steps: int = 4000


class PartitionError(AssertionError):
    """A completed table in which some orbit lies in no piece or in two."""

    def __init__(self, table: "PieceTable"):
        self.table = table
        super().__init__("completed piece table is not a partition of the orbits")


class Undecidable(Exception):
    """A resource limit stopped an argument; carries the reason."""


# -- small helpers --------------------------------------------------------------


def _var_name(prefix: str, rs: RootSystem, k: int) -> str:
    return f"{prefix}{rs.label(k)}"


def lift(x: LieElement, ring: PolyRing) -> LieElement:
    """Move coefficients into another ring, matching variables by name."""
    src = x.domain
    if src is ring:
        return x
    coeffs = {b: src.embed(c, ring) for b, c in x.coeffs.items()}
    return LieElement(x.algebra, ring, coeffs)


def _nf_element(x: LieElement, gb: Sequence[PolyDict]) -> LieElement:
    if not gb:
        return x
    ring = x.domain
    return LieElement(x.algebra, ring, {b: normal_form(ring, c, gb) for b, c in x.coeffs.items()})


def _is_descendant(rs: RootSystem, a: int, b: int) -> bool:
    """roots[a] - roots[b] is a nonzero nonnegative combination of simple roots."""
    ra, rb = rs.roots[a], rs.roots[b]
    return a != b and all(x >= y for x, y in zip(ra, rb))


def _upset(rs: RootSystem, support: Iterable[int]) -> set[int]:
    support = list(support)
    return {k for k in range(rs.n_positive) if any(k == s or _is_descendant(rs, k, s) for s in support)}


def _constant_unit(ring: PolyRing, f: PolyDict) -> bool:
    return len(f) == 1 and 0 in f


def stabilizing_unipotent_indices(A: ChevalleyAlgebra, x: LieElement, gb: Sequence[PolyDict] = ()) -> frozenset[int]:
    """Positive roots a with Ad(u_a(s)) x = x identically in s.

    This happens exactly when every divided power ad(e_a)^k/k! kills x; with
    a family ``gb`` the coefficients are read modulo that ideal.
    """
    rs = A.rs
    ring = x.domain
    out = []
    for a in range(rs.n_positive):
        table = divided_powers(A, a)
        fixed = True
        acc: dict[tuple[int, int], PolyDict] = {}
        for b, f in x.coeffs.items():
            for k, t, n in table.get(b, ()):
                v = ring.scale(f, n)
                key = (k, t)
                acc[key] = ring.add(acc[key], v) if key in acc else v
        for v in acc.values():
            if gb:
                v = normal_form(ring, v, gb)
            if v:
                fixed = False
                break
        if fixed:
            out.append(a)
    return frozenset(out)


def _coefficient_system(x: LieElement) -> list[PolyDict]:
    return [c for _, c in sorted(x.coeffs.items())]


# -- families ----------------------------------------------------------------------


@dataclass
class Family:
    """The points of V(gens) in the parameter ring, with the element y(params)."""

    ring: PolyRing
    gens: list[PolyDict]
    y: LieElement

    @property
    def concrete(self) -> bool:
        return self.ring.nvars == 0

    def restrict(self, extra: Sequence[PolyDict]) -> "Family":
        return Family(self.ring, list(self.gens) + [f for f in extra if f], self.y)

    def excluding(self, f: PolyDict) -> "Family":
        """The points where f does not vanish (one fresh variable z, z f = 1)."""
        k = 0
        while f"z{k}" in self.ring.index:
            k += 1
        names = self.ring.names + (f"z{k}",)
        ring = PolyRing(self.ring.p, names)
        gens = [self.ring.embed(g, ring) for g in self.gens]
        fz = ring.mul(self.ring.embed(f, ring), ring.var(len(names) - 1))
        gens.append(ring.sub(fz, ring.const(1)))
        return Family(ring, gens, lift(self.y, ring))


def concrete_family(A: ChevalleyAlgebra, y: LieElement) -> Family:
    ring = A.coefficient_ring if A.char else None
    if ring is None:
        raise ValueError("families need a positive characteristic")
    return Family(ring, [], lift(y, ring))


def _point_of(fam: Family, budget: Budget) -> LieElement | None:
    """A prime-field point of the family, or None."""
    ring = fam.ring
    if ring.nvars == 0:
        return fam.y
    try:
        chosen, left = specialize_solution(ring, fam.gens, list(range(ring.nvars)), budget)
    except GBBudgetExceeded:
        return None
    if left:
        return None
    point = [chosen[v] for v in range(ring.nvars)]
    if any(ring.evaluate(g, point) for g in fam.gens):
        return None
    const = PolyRing(ring.p)
    coeffs = {b: const.const(ring.evaluate(c, point)) for b, c in fam.y.coeffs.items()}
    return LieElement(fam.y.algebra, const, coeffs)


# -- cover -------------------------------------------------------------------------


@dataclass
class Cell:
    """A Bruhat cell system: variable names and a builder of equations.

    ``build(ring, y)`` receives the joint ring (cell variables first, then the
    family parameters) and the family element lifted into it.
    """

    label: str
    names: tuple[str, ...]
    build: object
    excluded: bool = False  # known unsolvable on the whole family
    word: tuple[int, ...] = ()


def _split_leading(ring: PolyRing, g: PolyDict, nx: int) -> PolyDict:
    """Coefficient (in the parameter variables) of the leading monomial of g
    in the cell variables, as a polynomial of the same joint ring."""
    xmono = 0
    for v in range(nx):
        xmono |= FMASK << ring.shift[v]
    xmono |= FMASK << ring.deg_shift[0]
    lm = ring.lm(g)
    top = lm & xmono
    return {m - top: c for m, c in g.items() if m & xmono == top}


def _has_cell_vars(ring: PolyRing, f: PolyDict, nx: int) -> bool:
    mask = 0
    for v in range(nx):
        mask |= FMASK << ring.shift[v]
    return any(m & mask for m in f)


def _reduce_monomial_content(ring: PolyRing, f: PolyDict) -> PolyDict:
    """f with its monomial content m replaced by the product of the
    variables of m; the zero set is unchanged."""
    ex = [ring.exps(m) for m in f]
    low = [min(col) for col in zip(*ex)] if ex else []
    if not any(e > 1 for e in low):
        return f
    keep = [min(e, 1) for e in low]
    out: PolyDict = {}
    for m, c in f.items():
        e = ring.exps(m)
        out[ring.mono([a - b + k for a, b, k in zip(e, low, keep)])] = c
    return out


@dataclass
class CellStatus:
    """How a cell system behaves on a family.

    ``none``: no solution at any point.  ``generic``: a solution at every
    point off the common zeros of each list in ``parts`` (each list, added
    to the family, gives a part still to be covered).  ``partial``:
    solutions only where the polynomials ``parts[0]`` vanish.
    """

    kind: str
    parts: list[list[PolyDict]] = field(default_factory=list)


def cell_status(fam: Family, cell: Cell, options: Options, stats: dict | None = None) -> CellStatus:
    """Groebner basis of the cell system plus the family ideal for the block
    order with the cell variables above the parameters.

    Where the elimination ideal is the family ideal itself, every point at
    which no leading coefficient vanishes has a solution (stability of
    Groebner bases under specialisation); otherwise the solutions project
    into the zeros of the extra eliminants.  ``fam.gens`` must be a Groebner
    basis.
    """
    if cell.excluded:
        return CellStatus("none")
    P = fam.ring
    gbJ = fam.gens
    nx = len(cell.names)
    joint = PolyRing(P.p, cell.names + P.names, [nx, P.nvars])
    pmap = [joint.index[n] for n in P.names]
    eqs, _ = eliminate_linear(joint, cell.build(joint, lift(fam.y, joint)), range(nx))
    system = eqs + [P.embed(g, joint, pmap) for g in gbJ]
    try:
        G = groebner(joint, system, options.budget)
    except GBBudgetExceeded as exc:
        raise Undecidable(f"groebner budget ({exc.reason}) in cell {cell.label}") from exc
    if stats is not None:
        stats["gb"] = stats.get("gb", 0) + 1
    if is_unit_ideal(G):
        return CellStatus("none")
    back = {joint.index[n]: P.index[n] for n in P.names}

    def to_param(f: PolyDict) -> PolyDict:
        out: PolyDict = {}
        for m, c in f.items():
            tm = 0
            for jv, pv in back.items():
                e = (m >> joint.shift[jv]) & FMASK
                if e:
                    tm += e * P.var_mono[pv]
            out[tm] = (out.get(tm, 0) + c) % P.p
        return {m: c for m, c in out.items() if c}

    elim = [to_param(g) for g in G if not _has_cell_vars(joint, g, nx)]
    outside = [e for e in elim if normal_form(P, e, gbJ)]
    if outside:
        return CellStatus("partial", [outside])
    lcs = []
    for g in G:
        if _has_cell_vars(joint, g, nx):
            lc = P.monic(_reduce_monomial_content(P, to_param(_split_leading(joint, g, nx))))
            if not _constant_unit(P, lc) and lc not in lcs:
                lcs.append(lc)
    if not lcs:
        return CellStatus("generic", [])
    H = lcs[0]
    for lc in lcs[1:]:
        H = P.mul(H, lc)
    if normal_form(P, H, gbJ):
        return CellStatus("generic", [[H]])
    return CellStatus("generic", [[lc] for lc in lcs])


@dataclass
class SweepResult:
    residual: list[Family]
    used: dict[str, int]
    in_bang_point: LieElement | None = None


def _solving_cell(cells: Sequence[Cell], z: LieElement, skip: set[int], options: Options, stats: dict | None) -> int | None:
    """Index of the first cell with a solution at the prime-field point z."""
    zf = Family(z.domain, [], z)
    for idx, cell in enumerate(cells):
        if idx in skip or cell.excluded:
            continue
        if cell_status(zf, cell, options, stats).kind != "none":
            return idx
    return None


def sweep(fam: Family, cells: Sequence[Cell], options: Options, stats: dict | None = None) -> SweepResult:
    """Cover the family by the cells.

    Either every point of the family has a solution in some cell (empty
    residual), or a point without one is returned, or the residual parts
    are ones on which no cell has a solution anywhere.  A family with a
    prime-field point is handled through the cell solving that point; the
    rest get a scan over all cells.  Raises :class:`Undecidable` on
    resource limits.
    """
    used: dict[str, int] = {}
    residual: list[Family] = []
    work: list[tuple[Family, frozenset[int]]] = [(fam, frozenset())]
    steps = 0
    while work:
        steps += 1
        if steps > options.max_cover_steps or len(work) + len(residual) > options.max_families:
            raise Undecidable("family split limit")
        F, dead = work.pop()
        if F.gens:
            try:
                gbJ = groebner(F.ring, F.gens, options.budget)
            except GBBudgetExceeded as exc:
                raise Undecidable(f"groebner budget ({exc.reason}) on a family") from exc
            if is_unit_ideal(gbJ):
                continue
            F = Family(F.ring, gbJ, F.y)
        dead_here = set(dead)
        chosen = None
        if F.concrete:
            order: Iterable[int] = range(len(cells))
        else:
            z = _point_of(F, options.budget)
            if z is not None:
                log.debug("sweep step %d: point %s", steps, z)
                idx = _solving_cell(cells, z, dead_here, options, stats)
                if idx is None:
                    return SweepResult([F], used, z)
                order = [idx]
            else:
                order = range(len(cells))
        for idx in order:
            if idx in dead_here or cells[idx].excluded:
                continue
            st = cell_status(F, cells[idx], options, stats)
            if st.kind == "none":
                dead_here.add(idx)
            elif st.kind == "generic":
                chosen = (idx, st)
                break
            elif chosen is None:
                chosen = (idx, st)
        if chosen is None:
            residual.append(F)
            if F.concrete:
                return SweepResult(residual, used, F.y)
            continue
        idx, st = chosen
        log.debug(
            "sweep step %d: %d parameters, cell %s is %s, parts %s",
            steps, F.ring.nvars, cells[idx].label, st.kind,
            [[F.ring.format(f) for f in part] for part in st.parts],
        )
        if st.kind == "generic":
            used[cells[idx].label] = used.get(cells[idx].label, 0) + 1
            for extra in st.parts:
                work.append((F.restrict(extra), frozenset(dead_here)))
        else:
            eliminants = st.parts[0]
            work.append((F.restrict(eliminants), frozenset(dead_here)))
            for e in eliminants:
                work.append((F.excluding(e), frozenset(dead_here | {idx})))
    return SweepResult(residual, used)


def _nonempty(fam: Family, options: Options) -> bool:
    if not fam.gens:
        return True
    try:
        return not is_unit_ideal(groebner(fam.ring, fam.gens, options.budget))
    except GBBudgetExceeded as exc:
        raise Undecidable(f"groebner budget ({exc.reason}) on a family") from exc


# -- cell systems ----------------------------------------------------------------------


def _cell_names(rs: RootSystem, left: Sequence[int], right: Sequence[int]) -> tuple[str, ...]:
    names = [_var_name("v", rs, a) for a in left]
    for i in range(rs.rank):
        names += [f"d{i + 1}", f"db{i + 1}"]
    names += [_var_name("u", rs, a) for a in right]
    return tuple(names)


def _minimal_constant_roots(A: ChevalleyAlgebra, y: LieElement) -> tuple[list[int], list[int]]:
    """(support root indices, minimal ones with a constant nonzero coefficient)."""
    rs = A.rs
    support = [b for b in y.coeffs if b < rs.n_roots]
    minimal = []
    for g in support:
        if not _constant_unit(y.domain, y.coeffs[g]):
            continue
        if any(_is_descendant(rs, g, b) for b in support):
            continue
        minimal.append(g)
    return support, minimal


class SupportFilter:
    """Decides, for a Weyl element w, when Ad(t n_w u)(source) = Ad(v)(target)
    has no solution for support reasons, for all t, u, v and all points of
    the family.

    The supports are read once; each :meth:`excludes` call is then cheap,
    which matters when there is one cell per element of W.
    """

    def __init__(self, A: ChevalleyAlgebra, source: LieElement, target: LieElement):
        rs = A.rs
        s_support, self.s_min = _minimal_constant_roots(A, source)
        t_support, self.t_min = _minimal_constant_roots(A, target)
        both = s_support + t_support
        # both elements must lie in the span of positive root vectors
        self.active = all(b < rs.n_roots and rs.is_positive(b) for b in both)
        if self.active:
            self.up_t = _upset(rs, t_support)
            self.up_s = sorted(_upset(rs, s_support))

    def excludes(self, w: WeylElement) -> bool:
        if not self.active:
            return False
        if any(w.act(g) not in self.up_t for g in self.s_min):
            return True
        image = {w.act(k) for k in self.up_s}
        return any(g not in image for g in self.t_min)


def _torus_units(joint: PolyRing, rank: int):
    return tuple((joint.var(f"d{i + 1}"), joint.var(f"db{i + 1}")) for i in range(rank))


def _torus_relations(joint: PolyRing, rank: int) -> list[PolyDict]:
    one = joint.const(1)
    return [
        joint.sub(joint.mul(joint.var(f"d{i + 1}"), joint.var(f"db{i + 1}")), one)
        for i in range(rank)
    ]


def stabiliser_cell(
    A: ChevalleyAlgebra, fam: Family, w: WeylElement, lu: frozenset[int], pruning: bool, support: SupportFilter | None = None
) -> Cell:
    """Cell system for g in B n_w B with Ad(g) y = y.

    With pruning: Ad(t n_w u) y = Ad(v) y with v over U and u over the roots
    inverted by w, both without the factors that fix y.  Without pruning: the
    unique Bruhat form u'(c') t n_w u(c) with u' over the roots a > 0 with
    w^{-1}(a) < 0 and u over all of U.
    """
    rs = A.rs
    npos = rs.n_positive
    if pruning:
        left = [a for a in range(npos) if a not in lu]
        right = [a for a in w.inversions(rs) if a not in lu]
    else:
        inv = w.inverse_perm()
        left = [a for a in range(npos) if not rs.is_positive(inv[a])]
        right = list(range(npos))
    names = _cell_names(rs, left, right)
    if pruning and support is None:
        support = SupportFilter(A, fam.y, fam.y)
    excluded = support.excludes(w) if pruning else False

    def build(joint: PolyRing, y: LieElement) -> list[PolyDict]:
        units = _torus_units(joint, rs.rank)
        right_atoms = [(a, joint.var(_var_name("u", rs, a))) for a in right]
        left_atoms = [(a, joint.var(_var_name("v", rs, a))) for a in left]
        if pruning:
            g = SymbolicGroupElement.bruhat([], units, w, right_atoms)
            lhs = ad_word(A, g, y)
            rhs = ad_word(A, SymbolicGroupElement(tuple(U(a, c) for a, c in left_atoms)), y)
        else:
            g = SymbolicGroupElement.bruhat(left_atoms, units, w, right_atoms)
            lhs = ad_word(A, g, y)
            rhs = y
        return _coefficient_system(lhs - rhs) + _torus_relations(joint, rs.rank)

    return Cell(f"stab:{''.join(str(i + 1) for i in w.word) or 'e'}", names, build, excluded, w.word)


def conjugacy_cell(
    A: ChevalleyAlgebra,
    fam: Family,
    z: LieElement,
    w0: WeylElement,
    lu_z: frozenset[int],
    lu_y: frozenset[int],
    support: SupportFilter | None = None,
) -> Cell:
    """Cell system for g in B n_w0 B with Ad(g)(z) = y: Ad(t n_w0 u) z = Ad(v) y."""
    rs = A.rs
    left = [a for a in range(rs.n_positive) if a not in lu_y]
    right = [a for a in w0.inversions(rs) if a not in lu_z]
    names = _cell_names(rs, left, right)
    support = support or SupportFilter(A, lift(z, fam.ring), fam.y)
    excluded = support.excludes(w0)

    def build(joint: PolyRing, y: LieElement) -> list[PolyDict]:
        zz = lift(z, joint)
        units = _torus_units(joint, rs.rank)
        right_atoms = [(a, joint.var(_var_name("u", rs, a))) for a in right]
        lhs = ad_word(A, SymbolicGroupElement.bruhat([], units, w0, right_atoms), zz)
        rhs = ad_word(A, SymbolicGroupElement(tuple(U(a, joint.var(_var_name("v", rs, a))) for a in left)), y)
        return _coefficient_system(lhs - rhs) + _torus_relations(joint, rs.rank)

    return Cell(f"conj:{''.join(str(i + 1) for i in w0.word) or 'e'}", names, build, excluded, w0.word)


# -- regular piece ---------------------------------------------------------------------


def regular_piece_test(A: ChevalleyAlgebra, x: LieElement) -> bool:
    """x lies in g_{>=2} of the regular diagram and every simple root
    coefficient is nonzero."""
    rs = A.rs
    regular = WeightedDynkinDiagram("regular", (2,) * rs.rank)
    if g_geq_conditions(x, regular, 2):
        return False
    return all(rs.simple_index[i] in x.coeffs for i in range(rs.rank))


# -- stabiliser test ---------------------------------------------------------------------


@dataclass
class BangResult:
    value: Bang
    witness: dict = field(default_factory=dict)


def _outside_cells(rs: RootSystem, delta: WeightedDynkinDiagram) -> list[WeylElement]:
    w0 = {w.perm for w in weight_zero_subgroup(rs, delta)}
    return [w for w in rs.weyl if w.perm not in w0]


def _family_lu(A: ChevalleyAlgebra, fam: Family, options: Options) -> frozenset[int]:
    gb = []
    if fam.gens:
        try:
            gb = groebner(fam.ring, fam.gens, options.budget)
        except GBBudgetExceeded as exc:
            raise Undecidable(f"groebner budget ({exc.reason}) on a family") from exc
    return stabilizing_unipotent_indices(A, fam.y, gb)


def stabiliser_cells(
    A: ChevalleyAlgebra, fam: Family, delta: WeightedDynkinDiagram, options: Options, first: Sequence[int] = ()
) -> list[Cell]:
    """One cell per w'' outside W_0, shortest first (``first`` leads)."""
    lu = _family_lu(A, fam, options) if options.pruning else frozenset()
    words = _outside_cells(A.rs, delta)
    if first:
        words = [w for w in words if w.word == tuple(first)] + [w for w in words if w.word != tuple(first)]
    support = SupportFilter(A, fam.y, fam.y)
    return [stabiliser_cell(A, fam, w, lu, options.pruning, support) for w in words]


def conjugacy_cells(A: ChevalleyAlgebra, fam: Family, z: LieElement, delta: WeightedDynkinDiagram, options: Options) -> list[Cell]:
    """One cell per w0 in W_0 for Ad(g) z = y with g in B n_w0 B."""
    lu_z = stabilizing_unipotent_indices(A, z) if options.pruning else frozenset()
    lu_y = _family_lu(A, fam, options) if options.pruning else frozenset()
    support = SupportFilter(A, lift(z, fam.ring), fam.y)
    return [conjugacy_cell(A, fam, z, w0, lu_z, lu_y, support) for w0 in weight_zero_subgroup(A.rs, delta)]


def bang_concrete(A: ChevalleyAlgebra, y: LieElement, delta: WeightedDynkinDiagram, options: Options, stats: dict | None = None) -> BangResult:
    """Is the stabiliser of the concrete y in g_2 contained in P?"""
    if options.regular_shortcut and delta.is_regular():
        ok = regular_piece_test(A, y)
        return BangResult(Bang.IN_BANG if ok else Bang.NOT_IN_BANG, {"shortcut": "regular"})
    fam = concrete_family(A, y)
    cells = stabiliser_cells(A, fam, delta, options)
    skipped = sum(1 for c in cells if c.excluded)
    try:
        res = sweep(fam, cells, options, stats)
    except Undecidable as exc:
        return BangResult(Bang.UNDECIDED, {"reason": str(exc)})
    if res.residual:
        return BangResult(Bang.IN_BANG, {"cells_solved": len(cells) - skipped, "cells_excluded_by_support": skipped})
    (label,) = res.used
    word = next(c.word for c in cells if c.label == label)
    return BangResult(Bang.NOT_IN_BANG, {"stabiliser_cell": list(word)})


def bang_membership(
    A: ChevalleyAlgebra,
    x2: LieElement | Family,
    delta: WeightedDynkinDiagram,
    options: Options | None = None,
    point: LieElement | None = None,
    stats: dict | None = None,
) -> BangResult:
    """Decide whether x2 (a g_2 element, possibly a family) lies in g_2^!.

    For a family the answer is InBang as soon as one point of it is, and
    NotInBang when no point is.
    """
    options = options or Options()
    if isinstance(x2, LieElement):
        if isinstance(x2.domain, PolyRing) and x2.domain.nvars:
            raise ValueError("pass a Family for symbolic elements")
        return bang_concrete(A, x2, delta, options, stats)
    fam = x2
    if fam.concrete:
        return bang_concrete(A, fam.y, delta, options, stats)

    # Steps 2 and 3: a prime field point and its verdict.
    z = point if point is not None else _point_of(fam, options.budget)
    witness: dict = {}
    first: Sequence[int] = ()
    cells: list[Cell] = []
    if z is not None:
        zb = bang_concrete(A, z, delta, options, stats)
        witness["point"] = _element_dict(z)
        witness["point_verdict"] = zb.value.value
        if zb.value is Bang.IN_BANG:
            witness.update(zb.witness)
            return BangResult(Bang.IN_BANG, witness)
        if zb.value is Bang.NOT_IN_BANG:
            first = tuple(zb.witness.get("stabiliser_cell", ()))
            # Step 4: whatever is P-conjugate to z shares its verdict.
            try:
                cells = conjugacy_cells(A, fam, z, delta, options)
            except Undecidable as exc:
                return BangResult(Bang.UNDECIDED, {**witness, "reason": str(exc)})
    try:
        if options.regular_shortcut and delta.is_regular():
            return _regular_family(A, fam, options, witness)
        # Step 5.
        cells = cells + stabiliser_cells(A, fam, delta, options, first)
        res = sweep(fam, cells, options, stats)
    except Undecidable as exc:
        return BangResult(Bang.UNDECIDED, {**witness, "reason": str(exc)})
    if not res.residual:
        witness["covering_cells"] = sorted(res.used)
        return BangResult(Bang.NOT_IN_BANG, witness)
    # every point of a residual part has its stabiliser inside P
    witness["in_bang_part"] = [fam.ring.format(g) for g in res.residual[0].gens]
    q = _point_of(res.residual[0], options.budget)
    if q is not None:
        witness["point"] = _element_dict(q)
    return BangResult(Bang.IN_BANG, witness)


def _regular_family(A: ChevalleyAlgebra, fam: Family, options: Options, witness: dict) -> BangResult:
    """Regular diagram: the family meets g_2^! iff the simple root
    coefficients vanish nowhere at some point."""
    rs = A.rs
    part = fam
    for i in range(rs.rank):
        c = part.y.coeffs.get(rs.simple_index[i])
        if c is None:
            return BangResult(Bang.NOT_IN_BANG, {**witness, "shortcut": "regular"})
        part = part.excluding(c)
    if _nonempty(part, options):
        return BangResult(Bang.IN_BANG, {**witness, "shortcut": "regular"})
    return BangResult(Bang.NOT_IN_BANG, {**witness, "shortcut": "regular"})


def _element_dict(x: LieElement) -> dict:
    labels = x.algebra.basis_labels
    return {labels[b]: x.domain.format(c) for b, c in sorted(x.coeffs.items())}


# -- reaching g_{>=2} ----------------------------------------------------------------------


@dataclass
class ReachResult:
    value: Reach
    family: Family | None = None
    witness: dict = field(default_factory=dict)


def reach_g2(
    A: ChevalleyAlgebra,
    x: LieElement,
    delta: WeightedDynkinDiagram,
    w: WeylElement,
    lu: frozenset[int] = frozenset(),
    options: Options | None = None,
) -> ReachResult:
    """Parameters c with Ad(n_w u(c)) x in g_{>=2}; u runs over the roots
    inverted by w (all positive roots without pruning) minus ``lu``."""
    options = options or Options()
    rs = A.rs
    if options.pruning:
        roots = [a for a in w.inversions(rs) if a not in lu]
    else:
        roots = [a for a in range(rs.n_positive) if a not in lu]
    names = [_var_name("c", rs, a) for a in roots]
    ring = PolyRing(A.char, names)
    xx = lift(x, ring)
    g = SymbolicGroupElement((N(w),) + tuple(U(a, ring.var(k)) for k, a in enumerate(roots)))
    xw = ad_word(A, g, xx)
    system = g_geq_conditions(xw, delta, 2)
    reduced, record = eliminate_linear(ring, system)
    if is_unit_ideal(reduced):
        return ReachResult(Reach.UNREACHABLE, None, {"w": list(w.word)})
    try:
        gb = groebner(ring, reduced, options.budget) if reduced else []
    except GBBudgetExceeded as exc:
        return ReachResult(Reach.UNDECIDED, None, {"w": list(w.word), "reason": exc.reason})
    if is_unit_ideal(gb):
        return ReachResult(Reach.UNREACHABLE, None, {"w": list(w.word)})
    y = grade_part(xw, delta, 2)
    if record:
        y = LieElement(A, ring, {b: ring.substitute(c, record) for b, c in y.coeffs.items()})
    y = _nf_element(y, gb)
    # keep only the parameters the family really depends on
    used = set()
    for f in list(gb) + list(y.coeffs.values()):
        used |= ring.variables_of(f)
    keep = [ring.names[v] for v in sorted(used)]
    small = PolyRing(A.char, keep)
    fam = Family(small, [ring.embed(f, small) for f in gb], _restrict_element(y, ring, small))
    return ReachResult(Reach.REACHABLE, fam, {"w": list(w.word), "parameters": list(keep)})


def meets_g_geq2(A: ChevalleyAlgebra, x: LieElement, delta: WeightedDynkinDiagram, options: Options | None = None) -> bool | None:
    """Does the G-orbit of x meet g_{>=2}?  None when a budget ran out.

    Two elements are certainly in different orbits when one lies in
    g_{>=2} of a diagram and the orbit of the other misses it.
    """
    options = options or Options()
    lu = stabilizing_unipotent_indices(A, x) if options.pruning else frozenset()
    words = right_transversal(A.rs, delta) if options.pruning else list(A.rs.weyl)
    undecided = False
    for w in words:
        r = reach_g2(A, x, delta, w, lu, options)
        if r.value is Reach.REACHABLE:
            return True
        undecided |= r.value is Reach.UNDECIDED
    return None if undecided else False


def _restrict_element(y: LieElement, ring: PolyRing, small: PolyRing) -> LieElement:
    return LieElement(y.algebra, small, {b: ring.embed(c, small) for b, c in y.coeffs.items()})


# -- membership --------------------------------------------------------------------------


def diagonal_shortcut(A: ChevalleyAlgebra, x: OrbitRep, delta: WeightedDynkinDiagram | None = None) -> MembershipVerdict | None:
    """InPiece for a non-exceptional orbit and its own diagram, else None."""
    if x.exceptional or x.diagram_hint is None:
        return None
    if delta is not None and delta.label != x.diagram_hint:
        return None
    return MembershipVerdict(Verdict.IN_PIECE, {"shortcut": "diagonal", "diagram": x.diagram_hint})


def classify_membership(
    A: ChevalleyAlgebra,
    x: OrbitRep,
    delta: WeightedDynkinDiagram,
    options: Options | None = None,
) -> MembershipVerdict:
    options = options or Options()
    if options.diagonal_shortcut:
        short = diagonal_shortcut(A, x, delta)
        if short is not None:
            return short
    rs = A.rs
    xe = x.element(A)
    stats: dict = {"gb": 0}
    lu = stabilizing_unipotent_indices(A, xe) if options.pruning else frozenset()
    words = right_transversal(rs, delta) if options.pruning else list(rs.weyl)
    w0_group = weight_zero_subgroup(rs, delta)
    excluded: set[tuple[int, ...]] = set()
    unreachable = 0
    not_bang: list[dict] = []
    undecided: list[dict] = []
    for w in words:
        if w.perm in excluded:
            continue
        r = reach_g2(A, xe, delta, w, lu, options)
        if r.value is Reach.UNREACHABLE:
            unreachable += 1
            continue
        if r.value is Reach.UNDECIDED:
            undecided.append(r.witness)
            continue
        b = bang_membership(A, r.family, delta, options, stats=stats)
        if b.value is Bang.IN_BANG:
            return MembershipVerdict(
                Verdict.IN_PIECE,
                {"w": list(w.word), "parameters": r.witness.get("parameters", []), **b.witness},
            )
        if b.value is Bang.UNDECIDED:
            undecided.append({"w": list(w.word), **b.witness})
            continue
        not_bang.append({"w": list(w.word), **{k: v for k, v in b.witness.items() if k != "point"}})
        if options.pruning:
            # the whole coset W_0 w is settled as well
            for w0 in w0_group:
                excluded.add(tuple(w0.perm[k] for k in w.perm))
    summary = {
        "classes": len(words),
        "unreachable": unreachable,
        "not_in_bang": not_bang,
        "groebner_calls": stats["gb"],
    }
    if undecided:
        return MembershipVerdict(Verdict.UNDECIDED, {**summary, "undecided": undecided})
    return MembershipVerdict(Verdict.NOT_IN_PIECE, summary)


# -- tables ---------------------------------------------------------------------------------


@dataclass
class PieceTable:
    type_label: str
    p: int
    diagrams: list[str]
    orbits: list[str]
    cells: dict[tuple[str, str], MembershipVerdict] = field(default_factory=dict)

    def pieces(self) -> dict[str, set[str]]:
        out = {d: set() for d in self.diagrams}
        for (o, d), v in self.cells.items():
            if v.value is Verdict.IN_PIECE:
                out[d].add(o)
        return out

    def is_complete(self) -> bool:
        return len(self.cells) == len(self.diagrams) * len(self.orbits) and all(
            v.value is not Verdict.UNDECIDED for v in self.cells.values()
        )

    def partition_ok(self) -> bool:
        seen: dict[str, int] = {o: 0 for o in self.orbits}
        for members in self.pieces().values():
            for o in members:
                seen[o] += 1
        return all(n == 1 for n in seen.values())


def _cell_task(args):
    type_label, p, orbit, delta, options = args
    A = build_algebra(build_root_system(type_label), p)
    t0 = time.monotonic()
    v = classify_membership(A, orbit, delta, options)
    return orbit.label, delta.label, v, time.monotonic() - t0


def classify_all(
    A: ChevalleyAlgebra,
    orbits: Sequence[OrbitRep],
    diagrams: Sequence[WeightedDynkinDiagram],
    options: Options | None = None,
    cells: Iterable[tuple[str, str]] | None = None,
    workers: int = 1,
    done: dict[tuple[str, str], MembershipVerdict] | None = None,
    on_cell=None,
) -> PieceTable:
    """Fill the table of verdicts; ``cells`` restricts the work, ``done``
    supplies verdicts from an earlier run and ``on_cell`` is called with
    (orbit, diagram, verdict, seconds) as cells finish."""
    options = options or Options()
    table = PieceTable(A.rs.type_label, A.char, [d.label for d in diagrams], [o.label for o in orbits])
    wanted = set(cells) if cells is not None else None
    tasks = []
    for d in diagrams:
        for o in orbits:
            key = (o.label, d.label)
            if wanted is not None and key not in wanted:
                continue
            if done and key in done:
                table.cells[key] = done[key]
                continue
            tasks.append((A.rs.type_label, A.char, o, d, options))
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_cell_task, tasks)
            for o, d, v, secs in results:
                table.cells[(o, d)] = v
                if on_cell:
                    on_cell(o, d, v, secs)
    else:
        for task in tasks:
            o, d, v, secs = _cell_task(task)
            table.cells[(o, d)] = v
            if on_cell:
                on_cell(o, d, v, secs)
    if table.is_complete() and not table.partition_ok():
        raise PartitionError(table)
    return table
