"""Self-checks behind ``nilpieces verify``.

Each suite returns a list of :class:`Check` records.  The suites exercise
the same invariants as the test suite but draw their random inputs from a
caller supplied seed, so a failing run can be replayed exactly.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from math import prod

from .adjoint import H, N, SymbolicGroupElement, U, ad_weyl, ad_word
from .chevalley import ChevalleyAlgebra, LieElement, algebra_for
from .gfpoly import PolyRing, Solvability, eliminate_linear, groebner, normal_form, solvable_over_closure
from .pieces import Bang, Options, bang_concrete, classify_all, regular_piece_test
from .rootsys import WeightedDynkinDiagram, build_root_system

SUITES = ("algebra", "adjoint", "groebner", "pruning", "oracle")

# degrees of the basic invariants; |W| is their product
WEYL_DEGREES = {"G2": (2, 6), "F4": (2, 6, 8, 12), "E6": (2, 5, 6, 8, 9, 12)}


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'}  {self.name}" + (f"  {self.detail}" if self.detail else "")


# -- algebra ---------------------------------------------------------------------------


def _sparse_bracket(table, u: dict[int, int], v: dict[int, int], p: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for a, x in u.items():
        for b, y in v.items():
            for c, n in table.get((a, b), ()):
                out[c] = (out.get(c, 0) + x * y * n) % p
    return {c: n for c, n in out.items() if n}


def jacobi_residues(A: ChevalleyAlgebra) -> int:
    """Number of ordered basis triples with a nonzero Jacobi sum."""
    p = A.char
    table = A.integral_table
    bad = 0
    dim = A.dim
    single = [{b: 1} for b in range(dim)]
    pair = {(a, b): _sparse_bracket(table, single[a], single[b], p) for a in range(dim) for b in range(dim)}
    for a, b, c in itertools.product(range(dim), repeat=3):
        total: dict[int, int] = {}
        for i, j, k in ((a, b, c), (b, c, a), (c, a, b)):
            for t, n in _sparse_bracket(table, single[i], pair[(j, k)], p).items():
                total[t] = (total.get(t, 0) + n) % p
        if any(total.values()):
            bad += 1
    return bad


def algebra_suite(type_label: str, p: int) -> list[Check]:
    rs = build_root_system(type_label)
    A = algebra_for(type_label, p)
    out = []
    order = prod(WEYL_DEGREES[type_label])
    out.append(Check(f"{type_label} |W| = product of degrees", len(rs.weyl) == order, f"|W|={len(rs.weyl)}"))
    anti = all(
        A.bracket(A.basis_element(a), A.basis_element(b)) == A.bracket(A.basis_element(b), A.basis_element(a)).scaled(-1)
        for a in range(A.dim)
        for b in range(a, A.dim)
    )
    out.append(Check(f"{type_label} p={p} antisymmetry", anti))
    bad = jacobi_residues(A)
    out.append(Check(f"{type_label} p={p} Jacobi on all {A.dim ** 3} basis triples", bad == 0, f"nonzero residues: {bad}"))
    return out


# -- adjoint ---------------------------------------------------------------------------


def _random_element(A: ChevalleyAlgebra, rng: random.Random, density: float = 0.3) -> LieElement:
    R = A.coefficient_ring
    coeffs = {b: R.const(rng.randrange(1, A.char)) for b in range(A.dim) if rng.random() < density}
    return A.element(coeffs)


def random_group_element(A: ChevalleyAlgebra, rng: random.Random, length: int = 4) -> SymbolicGroupElement:
    rs = A.rs
    atoms = []
    for _ in range(length):
        kind = rng.randrange(3)
        if kind == 0:
            atoms.append(U(rng.randrange(rs.n_roots), rng.randrange(1, A.char)))
        elif kind == 1:
            atoms.append(N(rs.weyl_from_word([rng.randrange(rs.rank)])))
        else:
            atoms.append(H(rng.randrange(rs.rank), rng.randrange(1, A.char)))
    return SymbolicGroupElement(tuple(atoms))


def automorphism_failures(A: ChevalleyAlgebra, rng: random.Random, samples: int) -> int:
    bad = 0
    for _ in range(samples):
        g = random_group_element(A, rng)
        x, y = _random_element(A, rng), _random_element(A, rng)
        lhs = ad_word(A, g, A.bracket(x, y))
        rhs = A.bracket(ad_word(A, g, x), ad_word(A, g, y))
        if lhs != rhs:
            bad += 1
    return bad


def _acted_diagram_value(rs, delta: WeightedDynkinDiagram, word, root) -> int:
    """(w.delta)(root) = delta(w^-1 root), reflecting the root by hand."""
    v = list(root)
    for i in word:  # w^-1 = s_ik ... s_i1 applies s_i1 first
        c = rs.pairing(v, i)
        v[i] -= c
    return delta.value(v)


def transport_failures(A: ChevalleyAlgebra) -> tuple[int, int]:
    """(root space failures, weight failures) over all w and all roots."""
    rs = A.rs
    root_bad = weight_bad = 0
    diagrams = [WeightedDynkinDiagram(f"d{k}", w) for k, w in enumerate(itertools.product((0, 1, 2), repeat=rs.rank))]
    for w in rs.weyl:
        m = ad_weyl(A, w)
        for k in range(rs.n_roots):
            img = m(A.basis_element(k))
            target = w.act(k)
            if img.support() != [target]:
                root_bad += 1
                continue
            for delta in diagrams:
                moved = _acted_diagram_value(rs, delta, w.word, rs.roots[target])
                if moved != delta.value(rs.roots[k]):
                    weight_bad += 1
        for i in range(rs.rank):
            img = m(A.h(i))
            if any(not A.is_cartan(b) for b in img.support()):
                weight_bad += 1
    return root_bad, weight_bad


def adjoint_suite(type_label: str, p: int, seed: int, samples: int = 200) -> list[Check]:
    A = algebra_for(type_label, p)
    rng = random.Random(f"adjoint:{type_label}:{p}:{seed}")
    bad = automorphism_failures(A, rng, samples)
    out = [Check(f"{type_label} p={p} Ad(g)[x,y] = [Ad(g)x, Ad(g)y] on {samples} triples", bad == 0, f"failures: {bad}")]
    if type_label == "G2":
        root_bad, weight_bad = transport_failures(A)
        out.append(Check(f"G2 p={p} Ad(n_w) e_b spans g_w(b)", root_bad == 0, f"failures: {root_bad}"))
        out.append(Check(f"G2 p={p} Ad(n_w) moves weights by w", weight_bad == 0, f"failures: {weight_bad}"))
    return out


# -- groebner ---------------------------------------------------------------------------


class ExtensionField:
    """GF(p^k) as integers 0..p^k-1 (base p digits of a residue polynomial)."""

    MODULI = {(2, 1): (0, 1), (2, 2): (1, 1, 1), (2, 3): (1, 1, 0, 1), (3, 1): (0, 1), (3, 2): (1, 0, 1), (3, 3): (1, 2, 0, 1)}

    def __init__(self, p: int, k: int):
        self.p, self.k, self.q = p, k, p**k
        modulus = self.MODULI[(p, k)]
        digits = [self._digits(a) for a in range(self.q)]
        self.add = [[self._number([(x + y) % p for x, y in zip(da, db)]) for db in digits] for da in digits]
        self.mul = [[self._number(self._poly_mul(da, db, modulus)) for db in digits] for da in digits]

    def _digits(self, a: int) -> list[int]:
        return [(a // self.p**i) % self.p for i in range(self.k)]

    def _number(self, digits) -> int:
        return sum(d * self.p**i for i, d in enumerate(digits))

    def _poly_mul(self, a, b, modulus) -> list[int]:
        p, k = self.p, self.k
        out = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
        for d in range(len(out) - 1, k - 1, -1):
            c = out[d]
            if c:
                for i in range(k + 1):
                    out[d - k + i] = (out[d - k + i] - c * modulus[i]) % p
        return out[:k]

    def power(self, a: int, e: int) -> int:
        r = 1
        for _ in range(e):
            r = self.mul[r][a]
        return r


def enumerate_zero(ring: PolyRing, system, field: ExtensionField):
    """A common zero of ``system`` with coordinates in GF(p^k), or None."""
    terms = [[(c % ring.p, ring.exps(m)) for m, c in f.items()] for f in system]
    top = max((max(e) for f in terms for _, e in f if e), default=0)
    powers = [[field.power(x, e) for e in range(top + 1)] for x in range(field.q)]
    add, mul = field.add, field.mul
    for point in itertools.product(range(field.q), repeat=ring.nvars):
        for f in terms:
            acc = 0
            for c, exps in f:
                t = c
                for v, e in enumerate(exps):
                    if e:
                        t = mul[t][powers[point[v]][e]]
                acc = add[acc][t]
            if acc:
                break
        else:
            return point
    return None


def random_system(rng: random.Random, p: int) -> tuple[PolyRing, list]:
    n = rng.randint(1, 4)
    ring = PolyRing(p, [f"v{i}" for i in range(n)])
    system = []
    for _ in range(rng.randint(1, 4)):
        f: dict = {}
        for _ in range(rng.randint(1, 4)):
            exps = [0] * n
            for _ in range(rng.randint(0, 3)):
                exps[rng.randrange(n)] += 1
            f = ring.add(f, {ring.mono(exps): rng.randrange(1, p)})
        if f:
            system.append(f)
    if rng.random() < 0.5 and system:
        # force a prime field zero so both verdicts occur
        z = [rng.randrange(p) for _ in range(n)]
        system = [ring.sub(f, ring.const(ring.evaluate(f, z))) for f in system]
        system = [f for f in system if f]
    return ring, system


def _field_sizes(p: int, n: int, limit: int = 4096):
    return [k for k in (1, 2, 3) if (p**k) ** n <= limit]


def groebner_suite(p: int, seed: int, samples: int = 500) -> list[Check]:
    rng = random.Random(f"groebner:{p}:{seed}")
    fields = {k: ExtensionField(p, k) for k in (1, 2, 3)}
    contradictions = []
    reduce_bad = idem_bad = elim_bad = 0
    counts = {"solvable": 0, "unsolvable": 0, "undecided": 0, "with enumerated zero": 0}
    for s in range(samples):
        ring, system = random_system(rng, p)
        verdict = solvable_over_closure(ring, system)
        counts[{Solvability.SOLVABLE: "solvable", Solvability.UNSOLVABLE: "unsolvable"}.get(verdict, "undecided")] += 1
        for k in _field_sizes(p, ring.nvars):
            z = enumerate_zero(ring, system, fields[k])
            if z is not None:
                counts["with enumerated zero"] += 1
                if verdict is Solvability.UNSOLVABLE:
                    contradictions.append(f"system {s}: zero over GF({p}^{k})")
                break
        gb = groebner(ring, system)
        if any(normal_form(ring, f, gb) for f in system):
            reduce_bad += 1
        if sorted(map(sorted, (f.items() for f in groebner(ring, gb)))) != sorted(map(sorted, (f.items() for f in gb))):
            idem_bad += 1
        reduced, subs = eliminate_linear(ring, system)
        before = enumerate_zero(ring, system, fields[1]) is not None
        after = enumerate_zero(ring, reduced, fields[1]) is not None
        if before != after:
            elim_bad += 1
    return [
        Check(
            f"p={p} groebner verdict vs GF(p^k) enumeration on {samples} systems",
            not contradictions,
            "; ".join(contradictions[:3]) or ", ".join(f"{k} {v}" for k, v in counts.items()),
        ),
        Check(f"p={p} generators reduce to zero modulo their basis", reduce_bad == 0, f"failures: {reduce_bad}"),
        Check(f"p={p} groebner basis of a basis is itself", idem_bad == 0, f"failures: {idem_bad}"),
        Check(f"p={p} linear elimination keeps prime field zeros", elim_bad == 0, f"failures: {elim_bad}"),
    ]


# -- pruning ---------------------------------------------------------------------------


def pruning_suite(type_label: str, p: int, workers: int = 1, dataset=None) -> list[Check]:
    from .data import load_dataset

    ds = dataset or load_dataset(type_label, p)
    A = algebra_for(type_label, p)
    base = dict(diagonal_shortcut=False, regular_shortcut=False)
    pruned = classify_all(A, ds.orbits, ds.diagrams, Options(pruning=True, **base), workers=workers)
    full = classify_all(A, ds.orbits, ds.diagrams, Options(pruning=False, **base), workers=workers)
    diffs = [f"{o}:{d}" for (o, d), v in pruned.cells.items() if full.cells[(o, d)].value is not v.value]
    undecided = [k for k, v in {**pruned.cells}.items() if v.value.value == "Undecided"]
    return [
        Check(f"{type_label} p={p} pruned and unpruned tables agree", not diffs, " ".join(diffs) or f"{len(pruned.cells)} cells"),
        Check(f"{type_label} p={p} pruned table has no Undecided cell", not undecided, " ".join(f"{o}:{d}" for o, d in undecided)),
    ]


# -- oracle ------------------------------------------------------------------------------


def oracle_suite(type_label: str, p: int, seed: int, samples: int = 50) -> list[Check]:
    A = algebra_for(type_label, p)
    rs = A.rs
    R = A.coefficient_ring
    rng = random.Random(f"oracle:{type_label}:{p}:{seed}")
    regular = WeightedDynkinDiagram("regular", (2,) * rs.rank)
    options = Options(regular_shortcut=False)
    bad = []
    for s in range(samples):
        # all simple coefficients nonzero half of the time
        allow_zero = rng.random() < 0.5
        cs = [rng.randrange(0 if allow_zero else 1, p) for _ in range(rs.rank)]
        y = A.element({rs.simple_index[i]: R.const(c) for i, c in enumerate(cs) if c})
        closed = regular_piece_test(A, y)
        b = bang_concrete(A, y, regular, options)
        if b.value is Bang.UNDECIDED or (b.value is Bang.IN_BANG) != closed:
            bad.append(f"{cs}: closed form {closed}, algorithm {b.value.value}")
    return [Check(f"{type_label} p={p} regular closed form vs stabiliser test on {samples} samples", not bad, "; ".join(bad[:3]))]
