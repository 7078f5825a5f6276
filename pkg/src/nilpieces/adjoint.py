"""The adjoint action of root elements, Weyl representatives and the torus.

Everything is first computed over the integers with the characteristic zero
Chevalley basis and reduced at the moment a map is built for a given
coefficient ring:

* ``Ad(u_a(c)) = sum_k c^k ad(e_a)^k / k!``; the divided powers of
  ``ad(e_a)`` are integer matrices.
* ``n_a(1) = u_a(1) u_{-a}(-1) u_a(1)`` is the product of three such maps.
* ``h_a(c)`` scales ``e_b`` by ``c^<b, a^vee>`` and fixes the Cartan part,
  so ``n_a(c) = h_a(c) n_a(1)``.

A unit ``c`` is handed over either as a nonzero integer or as a pair
``(c, c_inv)`` of ring elements whose product is one modulo the ideal in use.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from .chevalley import ChevalleyAlgebra, IntegerDomain, LieElement
from .gfpoly import Poly
from .rootsys import WeylElement

Column = tuple[tuple[int, object], ...]


class LinearMap:
    """Sparse linear endomorphism of the algebra over a coefficient domain.

    ``columns[b]`` is the image of basis vector ``b``; basis vectors without
    a column are fixed.
    """

    def __init__(self, algebra: ChevalleyAlgebra, domain, columns: Mapping[int, Sequence[tuple[int, object]]]):
        self.algebra = algebra
        self.domain = domain
        self.columns = {b: tuple(col) for b, col in columns.items()}

    def image(self, b: int) -> LieElement:
        col = self.columns.get(b)
        if col is None:
            return self.algebra.basis_element(b, self.domain)
        return LieElement(self.algebra, self.domain, _sum_terms(self.domain, col))

    def __call__(self, x: LieElement) -> LieElement:
        if x.domain is not self.domain:
            raise ValueError("coefficient ring mismatch")
        d = self.domain
        out: dict[int, object] = {}
        for b, f in x.coeffs.items():
            col = self.columns.get(b)
            if col is None:
                out[b] = d.add(out[b], f) if b in out else f
                continue
            for t, g in col:
                v = d.mul(f, g)
                out[t] = d.add(out[t], v) if t in out else v
        return LieElement(self.algebra, d, out)

    def then(self, other: "LinearMap") -> "LinearMap":
        """The composite ``other o self``."""
        cols = {}
        for b in set(self.columns) | set(other.columns):
            cols[b] = tuple(other(self.image(b)).coeffs.items())
        return LinearMap(self.algebra, self.domain, cols)


def _sum_terms(domain, terms) -> dict[int, object]:
    out: dict[int, object] = {}
    for t, g in terms:
        out[t] = domain.add(out[t], g) if t in out else g
    return out


# -- integer data --------------------------------------------------------------

_DIVIDED: dict[tuple[str, int], dict[int, tuple[tuple[int, int, int], ...]]] = {}
_NREP: dict[tuple[str, int], dict[int, tuple[tuple[int, int], ...]]] = {}
_WREP: dict[tuple[str, tuple[int, ...]], dict[int, tuple[tuple[int, int], ...]]] = {}


def _integral_bracket_with(alg: ChevalleyAlgebra, a: int, vec: Mapping[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for b, c in vec.items():
        for t, n in alg.integral_table.get((a, b), ()):
            out[t] = out.get(t, 0) + c * n
    return {t: v for t, v in out.items() if v}


def divided_powers(alg: ChevalleyAlgebra, a: int) -> dict[int, tuple[tuple[int, int, int], ...]]:
    """For every basis vector b moved by e_a: triples (k, target, n) with
    ad(e_a)^k(b)/k! = sum n * target, k >= 1."""
    key = (alg.rs.type_label, a)
    if key in _DIVIDED:
        return _DIVIDED[key]
    data: dict[int, tuple[tuple[int, int, int], ...]] = {}
    for b in range(alg.dim):
        vec = {b: 1}
        k = 0
        out = []
        while True:
            k += 1
            vec = _integral_bracket_with(alg, a, vec)
            if not vec:
                break
            for t, v in vec.items():
                if v % k:
                    raise ArithmeticError("divided power is not integral")  # pragma: no cover
            vec = {t: v // k for t, v in vec.items()}
            out.extend((k, t, v) for t, v in sorted(vec.items()))
        if out:
            data[b] = tuple(out)
    _DIVIDED[key] = data
    return data


def _integer_unipotent(alg: ChevalleyAlgebra, a: int, c: int) -> dict[int, dict[int, int]]:
    cols = {}
    for b, terms in divided_powers(alg, a).items():
        col = {b: 1}
        for k, t, n in terms:
            col[t] = col.get(t, 0) + n * c**k
        cols[b] = {t: v for t, v in col.items() if v}
    return cols


def _compose_int(alg, first: Mapping[int, Mapping[int, int]], second: Mapping[int, Mapping[int, int]]):
    """Integer matrices: the composite 'second after first' on every basis vector."""
    out = {}
    for b in range(alg.dim):
        img = first.get(b, {b: 1})
        res: dict[int, int] = {}
        for t, v in img.items():
            for s, w in second.get(t, {t: 1}).items():
                res[s] = res.get(s, 0) + v * w
        out[b] = {s: v for s, v in res.items() if v}
    return out


def weyl_simple_integral(alg: ChevalleyAlgebra, i: int) -> dict[int, tuple[tuple[int, int], ...]]:
    """Integer matrix of Ad(n_{a_i}(1)) with n = u_a(1) u_{-a}(-1) u_a(1)."""
    key = (alg.rs.type_label, i)
    if key not in _NREP:
        a = alg.rs.simple_index[i]
        na = alg.rs.negate(a)
        m = _integer_unipotent(alg, a, 1)
        m = _compose_int(alg, m, _integer_unipotent(alg, na, -1))
        m = _compose_int(alg, m, _integer_unipotent(alg, a, 1))
        _NREP[key] = {b: tuple(sorted(col.items())) for b, col in m.items()}
    return _NREP[key]


def weyl_integral(alg: ChevalleyAlgebra, word: Sequence[int]) -> dict[int, tuple[tuple[int, int], ...]]:
    """Integer matrix of Ad(n_w) for n_w = n_{i_1}(1) ... n_{i_k}(1)."""
    word = tuple(word)
    key = (alg.rs.type_label, word)
    if key in _WREP:
        return _WREP[key]
    if not word:
        m = {b: ((b, 1),) for b in range(alg.dim)}
    else:
        tail = weyl_integral(alg, word[1:])
        head = weyl_simple_integral(alg, word[0])
        m = {}
        for b in range(alg.dim):
            res: dict[int, int] = {}
            for t, v in tail[b]:
                for s, w in head[t]:
                    res[s] = res.get(s, 0) + v * w
            m[b] = tuple(sorted((s, v) for s, v in res.items() if v))
    if len(_WREP) < 200000:
        _WREP[key] = m
    return m


# -- coefficient helpers ----------------------------------------------------------

Unit = Union[int, tuple[object, object]]


def _resolve(A: ChevalleyAlgebra, c, domain):
    """Return (domain, element) for a coefficient given as int, Poly or dict."""
    if isinstance(c, Poly):
        return c.ring, dict(c.terms)
    if domain is None:
        domain = A.coefficient_ring
    if isinstance(c, int):
        return domain, domain.const(c)
    return domain, c


def _pow(domain, f, e: int):
    if isinstance(domain, IntegerDomain):
        return f**e
    return domain.pow(f, e)


def _unit_power(A: ChevalleyAlgebra, d: Unit, e: int, domain):
    """d^e for a unit d, negative exponents through the inverse."""
    if isinstance(d, int):
        if isinstance(domain, IntegerDomain):
            if d not in (1, -1):
                raise ValueError("only +-1 are units over the integers")
            return d ** abs(e)
        p = domain.p
        if d % p == 0:
            raise ValueError("torus coefficient must be a unit")
        return domain.const(pow(d, e, p) if e >= 0 else pow(pow(d, p - 2, p), -e, p))
    u, ubar = d
    if isinstance(u, Poly):
        u, ubar = u.terms, ubar.terms
    if e >= 0:
        return _pow(domain, u, e)
    return _pow(domain, ubar, -e)


def _domain_of_unit(A: ChevalleyAlgebra, d: Unit, domain):
    if domain is not None:
        return domain
    if not isinstance(d, int) and isinstance(d[0], Poly):
        return d[0].ring
    return A.coefficient_ring


def _reduce_int_matrix(A: ChevalleyAlgebra, domain, m) -> dict[int, tuple[tuple[int, object], ...]]:
    cols = {}
    const = domain.const
    for b, col in m.items():
        if col == ((b, 1),):
            continue
        terms = []
        for t, v in col:
            cv = const(v)
            if cv:
                terms.append((t, cv))
        cols[b] = tuple(terms)
    return cols


# -- the maps ----------------------------------------------------------------------


def root_index(A: ChevalleyAlgebra, alpha) -> int:
    if isinstance(alpha, int):
        return alpha
    return A.rs.index[tuple(alpha)]


def ad_unipotent(A: ChevalleyAlgebra, alpha, c, domain=None) -> LinearMap:
    """Ad(u_alpha(c)) = exp(c ad e_alpha)."""
    a = root_index(A, alpha)
    domain, c = _resolve(A, c, domain)
    powers = [None, c]
    cols = {}
    for b, terms in divided_powers(A, a).items():
        col: dict[int, object] = {b: domain.const(1)}
        for k, t, n in terms:
            while len(powers) <= k:
                powers.append(domain.mul(powers[-1], c))
            v = domain.scale(powers[k], n)
            col[t] = domain.add(col[t], v) if t in col else v
        cols[b] = tuple((t, v) for t, v in col.items() if not _is_zero(domain, v))
    return LinearMap(A, domain, cols)


def _is_zero(domain, v) -> bool:
    return v == 0 if isinstance(domain, IntegerDomain) else not v


def ad_torus(A: ChevalleyAlgebra, i: int, d: Unit, domain=None) -> LinearMap:
    """Ad(h_{a_i}(d)): e_b -> d^<b, a_i^vee> e_b, Cartan part fixed."""
    domain = _domain_of_unit(A, d, domain)
    rs = A.rs
    cols = {}
    for b in range(A.nroots):
        e = rs.pairing(rs.roots[b], i)
        if e:
            cols[b] = ((b, _unit_power(A, d, e, domain)),)
    return LinearMap(A, domain, cols)


def ad_torus_element(A: ChevalleyAlgebra, units: Sequence[Unit], domain=None) -> LinearMap:
    """Ad(prod_i h_{a_i}(d_i)) in one diagonal map."""
    if not units:
        raise ValueError("need one unit per simple root")
    domain = _domain_of_unit(A, units[0], domain)
    rs = A.rs
    cols = {}
    for b in range(A.nroots):
        coeff = None
        for i, d in enumerate(units):
            e = rs.pairing(rs.roots[b], i)
            if e:
                f = _unit_power(A, d, e, domain)
                coeff = f if coeff is None else domain.mul(coeff, f)
        if coeff is not None:
            cols[b] = ((b, coeff),)
    return LinearMap(A, domain, cols)


def ad_weyl_simple(A: ChevalleyAlgebra, i: int, c: Unit = 1, domain=None) -> LinearMap:
    """Ad(n_{a_i}(c)) = Ad(h_{a_i}(c)) o Ad(n_{a_i}(1))."""
    domain = _domain_of_unit(A, c, domain)
    base = LinearMap(A, domain, _reduce_int_matrix(A, domain, weyl_simple_integral(A, i)))
    if isinstance(c, int) and c == 1:
        return base
    return base.then(ad_torus(A, i, c, domain))


def ad_weyl(A: ChevalleyAlgebra, w: WeylElement | Sequence[int], domain=None) -> LinearMap:
    """Ad(n_w) for the representative composed along the stored word."""
    word = w.word if isinstance(w, WeylElement) else tuple(w)
    domain = domain if domain is not None else A.coefficient_ring
    return LinearMap(A, domain, _reduce_int_matrix(A, domain, weyl_integral(A, word)))


# -- words ------------------------------------------------------------------------


@dataclass(frozen=True)
class U:
    root: int
    coeff: object


@dataclass(frozen=True)
class N:
    w: WeylElement


@dataclass(frozen=True)
class H:
    index: int
    unit: object


@dataclass(frozen=True)
class T:
    """The torus element prod_i h_{a_i}(units[i])."""

    units: tuple


@dataclass(frozen=True)
class SymbolicGroupElement:
    """The product factors[0] * factors[1] * ... of atoms."""

    factors: tuple = ()

    def __mul__(self, other: "SymbolicGroupElement") -> "SymbolicGroupElement":
        return SymbolicGroupElement(self.factors + other.factors)

    @classmethod
    def bruhat(cls, left_u: Sequence[tuple[int, object]], torus, w: WeylElement, right_u: Sequence[tuple[int, object]]):
        """u'(c') t n_w u(c); the sequences list (root index, coefficient)."""
        atoms = [U(a, c) for a, c in left_u]
        if torus is not None:
            atoms.append(T(tuple(torus)))
        atoms.append(N(w))
        atoms.extend(U(a, c) for a, c in right_u)
        return cls(tuple(atoms))


def atom_map(A: ChevalleyAlgebra, atom, domain) -> LinearMap:
    if isinstance(atom, U):
        return ad_unipotent(A, atom.root, atom.coeff, domain)
    if isinstance(atom, N):
        return ad_weyl(A, atom.w, domain)
    if isinstance(atom, H):
        return ad_torus(A, atom.index, atom.unit, domain)
    if isinstance(atom, T):
        return ad_torus_element(A, atom.units, domain)
    raise TypeError(f"unknown group atom {atom!r}")


def ad_word(A: ChevalleyAlgebra, g: SymbolicGroupElement, x: LieElement) -> LieElement:
    """Ad(g)(x), applying the rightmost factor first."""
    for atom in reversed(g.factors):
        if isinstance(atom, U):
            c = atom.coeff
            if (isinstance(c, int) and c == 0) or (isinstance(c, dict) and not c):
                continue
        x = atom_map(A, atom, x.domain)(x)
    return x

