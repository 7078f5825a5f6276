"""Chevalley basis of the Lie algebra attached to a root system.

Basis layout: index k < |Phi| is the root vector e_{roots[k]}; index
|Phi| + i is the Cartan element h_i = h_{alpha_i}.  Structure constants are
fixed by declaring N_{alpha,beta} = q_{beta,alpha} + 1 > 0 on every
extraspecial pair and propagating through the usual identities between the
N_{alpha,beta}.  All constants are integers; the algebra over GF(p) reduces
them modulo p.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .gfpoly import PolyRing
from .rootsys import RootSystem, WeightedDynkinDiagram, build_root_system


class IntegerDomain:
    """Coefficients in Z, used for the characteristic zero algebra."""

    p = 0

    def __init__(self):
        self.nvars = 0

    def const(self, c: int) -> int:
        return c

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def scale(self, a, c):
        return a * c

    def neg(self, a):
        return -a

    def is_zero(self, a) -> bool:
        return a == 0

    def format(self, a) -> str:
        return str(a)


ZZ = IntegerDomain()


def _domain_is_zero(domain, a) -> bool:
    return domain.is_zero(a) if isinstance(domain, IntegerDomain) else not a


def structure_constants(rs: RootSystem) -> dict[tuple[int, int], int]:
    """N_{a,b} for every ordered pair of root indices with a + b a root."""
    npos = rs.n_positive
    norm = [rs.norm(r) for r in rs.roots]
    table: dict[tuple[int, int], int] = {}  # positive a < b only

    def q_of(b: int, a: int) -> int:
        return rs.root_chain(rs.roots[b], rs.roots[a])[1]

    def N(a: int, b: int) -> Fraction:
        ap, bp = rs.is_positive(a), rs.is_positive(b)
        if ap and bp:
            return Fraction(table[(a, b)]) if a < b else -Fraction(table[(b, a)])
        if not ap and not bp:
            return -N(rs.negate(a), rs.negate(b))
        if not ap:
            return -N(b, a)
        # a positive, b negative, c = -(a + b)
        s = rs.add(a, b)
        c = rs.negate(s)
        if rs.is_positive(c):
            return Fraction(norm[c], norm[b]) * N(c, a)
        return Fraction(norm[c], norm[a]) * N(b, c)

    for xi in range(npos):
        pairs = [(a, b) for a in range(npos) for b in range(a + 1, npos) if rs.add(a, b) == xi]
        if not pairs:
            continue
        a0, b0 = min(pairs)
        table[(a0, b0)] = q_of(b0, a0) + 1
        for g, d in pairs:
            if (g, d) == (a0, b0):
                continue
            # four roots a0 + b0 - g - d = 0, none opposite
            total = Fraction(0)
            ng, nd = rs.negate(g), rs.negate(d)
            s1 = rs.add(b0, ng)
            if s1 is not None:
                total += N(b0, ng) * N(a0, nd) / norm[s1]
            s2 = rs.add(a0, ng)
            if s2 is not None:
                total += N(ng, a0) * N(b0, nd) / norm[s2]
            n_neg = -total * norm[xi] / table[(a0, b0)]
            value = -n_neg
            if value.denominator != 1:
                raise ArithmeticError("non-integral structure constant")  # pragma: no cover
            table[(g, d)] = int(value)

    full: dict[tuple[int, int], int] = {}
    for a in range(rs.n_roots):
        for b in range(rs.n_roots):
            if rs.add(a, b) is not None:
                v = N(a, b)
                if v.denominator != 1:
                    raise ArithmeticError("non-integral structure constant")  # pragma: no cover
                full[(a, b)] = int(v)
    return full


class ChevalleyAlgebra:
    """The Lie algebra with its Chevalley basis over Z (p = 0) or GF(p)."""

    def __init__(self, rs: RootSystem, p: int = 0):
        if p < 0 or p == 1:
            raise ValueError("characteristic must be 0 or a prime")
        self.rs = rs
        self.char = p
        self.nroots = rs.n_roots
        self.dim = rs.n_roots + rs.rank
        self.n_const_integral = structure_constants(rs)
        if p:
            self.n_const = {k: v % p for k, v in self.n_const_integral.items() if v % p}
        else:
            self.n_const = dict(self.n_const_integral)
        self.basis_labels = tuple(
            [f"e{rs.label(k)}" for k in range(rs.n_roots)] + [f"h{i + 1}" for i in range(rs.rank)]
        )
        self.integral_table = self._bracket_table()
        self.table = self._reduce_table(self.integral_table)
        self.coefficient_ring = PolyRing(p) if p else ZZ

    # -- basis data ---------------------------------------------------------
    def h_index(self, i: int) -> int:
        return self.nroots + i

    def is_cartan(self, b: int) -> bool:
        return b >= self.nroots

    def coroot_combination(self, k: int) -> list[tuple[int, int]]:
        """[e_a, e_{-a}] = h_a as an integer combination of the h_i."""
        co = self.rs.coroot(self.rs.roots[k])
        return [(self.nroots + i, c) for i, c in enumerate(co) if c]

    def _bracket_table(self) -> dict[tuple[int, int], tuple[tuple[int, int], ...]]:
        rs = self.rs
        table: dict[tuple[int, int], tuple[tuple[int, int], ...]] = {}
        n = self.nroots
        for a in range(n):
            for b in range(n):
                s = rs.add(a, b)
                if s is not None:
                    table[(a, b)] = ((s, self.n_const_integral[(a, b)]),)
                elif rs.negate(a) == b:
                    table[(a, b)] = tuple(self.coroot_combination(a))
            for i in range(rs.rank):
                c = rs.pairing(rs.roots[a], i)
                if c:
                    table[(n + i, a)] = ((a, c),)
                    table[(a, n + i)] = ((a, -c),)
        return table

    def _reduce_table(self, table):
        if not self.char:
            return table
        p = self.char
        out = {}
        for k, terms in table.items():
            red = tuple((b, c % p) for b, c in terms if c % p)
            if red:
                out[k] = red
        return out

    # -- elements --------------------------------------------------------------
    def element(self, coeffs: Mapping[int, object], domain=None) -> "LieElement":
        return LieElement(self, domain if domain is not None else self.coefficient_ring, coeffs)

    def zero(self, domain=None) -> "LieElement":
        return self.element({}, domain)

    def basis_element(self, b: int, domain=None) -> "LieElement":
        domain = domain if domain is not None else self.coefficient_ring
        return LieElement(self, domain, {b: domain.const(1)})

    def e(self, root: Sequence[int], domain=None) -> "LieElement":
        return self.basis_element(self.rs.index[tuple(root)], domain)

    def h(self, i: int, domain=None) -> "LieElement":
        return self.basis_element(self.nroots + i, domain)

    def sum_of_roots(self, roots: Iterable[Sequence[int]], domain=None) -> "LieElement":
        domain = domain if domain is not None else self.coefficient_ring
        coeffs = {}
        for r in roots:
            coeffs[self.rs.index[tuple(r)]] = domain.const(1)
        return LieElement(self, domain, coeffs)

    def bracket(self, x: "LieElement", y: "LieElement") -> "LieElement":
        if x.algebra is not self or y.algebra is not self:
            raise ValueError("elements belong to a different algebra")
        if x.domain is not y.domain:
            raise ValueError("coefficient ring mismatch")
        d = x.domain
        out: dict[int, object] = {}
        for a, ca in x.coeffs.items():
            for b, cb in y.coeffs.items():
                terms = self.table.get((a, b))
                if not terms:
                    continue
                prod = d.mul(ca, cb)
                for k, n in terms:
                    t = d.scale(prod, n)
                    out[k] = d.add(out[k], t) if k in out else t
        return LieElement(self, d, out)

    def __repr__(self) -> str:
        return f"ChevalleyAlgebra({self.rs.type_label}, p={self.char})"


class LieElement:
    """sum coeffs[b] * basis[b]; zero coefficients are never stored."""

    __slots__ = ("algebra", "domain", "coeffs")

    def __init__(self, algebra: ChevalleyAlgebra, domain, coeffs: Mapping[int, object]):
        self.algebra = algebra
        self.domain = domain
        clean = {}
        for b, c in coeffs.items():
            if isinstance(c, int) and not isinstance(domain, IntegerDomain):
                c = domain.const(c)
            if not _domain_is_zero(domain, c):
                clean[b] = c
        self.coeffs = clean

    def _check(self, other: "LieElement"):
        if other.algebra is not self.algebra or other.domain is not self.domain:
            raise ValueError("coefficient ring mismatch")

    def __add__(self, other: "LieElement") -> "LieElement":
        self._check(other)
        d = self.domain
        out = dict(self.coeffs)
        for b, c in other.coeffs.items():
            out[b] = d.add(out[b], c) if b in out else c
        return LieElement(self.algebra, d, out)

    def __sub__(self, other: "LieElement") -> "LieElement":
        return self + other.scaled(-1)

    def scaled(self, n: int) -> "LieElement":
        d = self.domain
        return LieElement(self.algebra, d, {b: d.scale(c, n) for b, c in self.coeffs.items()})

    def times(self, f) -> "LieElement":
        d = self.domain
        return LieElement(self.algebra, d, {b: d.mul(c, f) for b, c in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LieElement)
            and other.algebra is self.algebra
            and other.coeffs == self.coeffs
        )

    def __hash__(self):  # pragma: no cover - elements are not meant as keys
        raise TypeError("LieElement is unhashable")

    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self) -> list[int]:
        return sorted(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        labels = self.algebra.basis_labels
        parts = []
        for b in sorted(self.coeffs):
            c = self.domain.format(self.coeffs[b])
            parts.append(f"({c})*{labels[b]}" if c != "1" else labels[b])
        return " + ".join(parts)


def build_algebra(rs: RootSystem, p: int = 0) -> ChevalleyAlgebra:
    key = (rs.type_label, p)
    if key not in _ALGEBRAS:
        _ALGEBRAS[key] = ChevalleyAlgebra(rs, p)
    return _ALGEBRAS[key]


_ALGEBRAS: dict[tuple[str, int], ChevalleyAlgebra] = {}


def algebra_for(type_label: str, p: int = 0) -> ChevalleyAlgebra:
    return build_algebra(build_root_system(type_label), p)


def bracket(x: LieElement, y: LieElement) -> LieElement:
    return x.algebra.bracket(x, y)


def _weight(alg: ChevalleyAlgebra, b: int, delta: WeightedDynkinDiagram) -> int:
    if alg.is_cartan(b):
        return 0
    return delta.value(alg.rs.roots[b])


def grade_part(x: LieElement, delta: WeightedDynkinDiagram, i: int) -> LieElement:
    """Component of x in the delta-weight space of weight i."""
    alg = x.algebra
    keep = {b: c for b, c in x.coeffs.items() if _weight(alg, b, delta) == i}
    return LieElement(alg, x.domain, keep)


def g_geq_conditions(x: LieElement, delta: WeightedDynkinDiagram, i: int) -> list:
    """Coefficients that must vanish for x to lie in sum_{j >= i} g_j."""
    alg = x.algebra
    return [c for b, c in sorted(x.coeffs.items()) if _weight(alg, b, delta) < i]


def in_g_geq(x: LieElement, delta: WeightedDynkinDiagram, i: int) -> bool:
    return not g_geq_conditions(x, delta, i)


@dataclass(frozen=True)
class GradedBasis:
    """Basis indices of each weight space for one diagram."""

    by_weight: dict[int, tuple[int, ...]]

    @classmethod
    def of(cls, alg: ChevalleyAlgebra, delta: WeightedDynkinDiagram) -> "GradedBasis":
        out: dict[int, list[int]] = {}
        for b in range(alg.dim):
            out.setdefault(_weight(alg, b, delta), []).append(b)
        return cls({k: tuple(v) for k, v in sorted(out.items())})

    def dim(self, i: int) -> int:
        return len(self.by_weight.get(i, ()))
