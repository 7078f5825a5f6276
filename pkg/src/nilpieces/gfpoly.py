"""Sparse multivariate polynomials over GF(p) and a Buchberger engine.

A monomial is packed into one Python integer.  Every variable owns a 16 bit
field and every block of variables owns one more field holding the total
degree of that block.  Multiplying monomials is integer addition, and
divisibility is a single subtraction against guard bits.  Blocks are laid out
from the most significant end, the degree field first and then the variables
from last to first.  XOR-ing the variable fields with all ones therefore turns
the packed integer into a sort key for the product of degree reverse
lexicographic orders, one per block.  With one block this is plain degrevlex.

Polynomials are dicts ``{monomial: coefficient}`` with coefficients in
``1 .. p-1``.  :class:`Poly` wraps such a dict for comfortable use; the
Groebner code works on the raw dicts.
"""

from __future__ import annotations

import enum
import heapq
import time
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

FIELD = 16
FMASK = (1 << FIELD) - 1
GUARD_BIT = 1 << (FIELD - 1)

PolyDict = dict[int, int]


class GBBudgetExceeded(RuntimeError):
    """Raised when a Groebner computation runs out of its resource budget."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class Budget:
    max_pairs: int = 20000
    max_monomials: int = 400000
    timeout_secs: float = 120.0

    def __post_init__(self):
        if self.max_pairs <= 0 or self.max_monomials <= 0 or self.timeout_secs <= 0:
            raise ValueError("budgets must be strictly positive")


DEFAULT_BUDGET = Budget()


class PolyRing:
    """GF(p)[names] with a block degrevlex order (one block by default).

    A ring with no variables is GF(p) itself; the constant c is ``{0: c}``.
    """

    def __init__(self, p: int, names: Sequence[str] = (), blocks: Sequence[int] | None = None):
        if p < 2:
            raise ValueError("characteristic must be a prime")
        self.p = p
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("variable names must be distinct")
        n = len(self.names)
        self.nvars = n
        if blocks is None:
            blocks = [n] if n else []
        blocks = [b for b in blocks if b]
        if sum(blocks) != n:
            raise ValueError("block sizes must add up to the number of variables")
        self.blocks = tuple(blocks)
        self.index = {name: k for k, name in enumerate(self.names)}

        nfields = n + len(blocks)
        field = nfields - 1
        self.shift = [0] * n
        self.block_of = [0] * n
        self.deg_shift = []
        start = 0
        for b, size in enumerate(blocks):
            self.deg_shift.append(field * FIELD)
            field -= 1
            for v in reversed(range(start, start + size)):
                self.shift[v] = field * FIELD
                self.block_of[v] = b
                field -= 1
            start += size
        self.var_mono = [(1 << self.shift[v]) + (1 << self.deg_shift[self.block_of[v]]) for v in range(n)]
        self.guard = sum(GUARD_BIT << (f * FIELD) for f in range(nfields))
        self.xmask = sum(FMASK << self.shift[v] for v in range(n))
        self._inv = [0] + [pow(a, p - 2, p) for a in range(1, p)]

    # -- monomials -----------------------------------------------------------
    def key(self, m: int) -> int:
        return m ^ self.xmask

    def exps(self, m: int) -> tuple[int, ...]:
        return tuple((m >> s) & FMASK for s in self.shift)

    def mono(self, exps: Sequence[int]) -> int:
        m = 0
        for v, e in enumerate(exps):
            if e:
                if e >= GUARD_BIT:
                    raise OverflowError("exponent too large")
                m += e * self.var_mono[v]
        return m

    def exp_of(self, m: int, v: int) -> int:
        return (m >> self.shift[v]) & FMASK

    def divides(self, a: int, b: int) -> bool:
        g = self.guard
        return ((b | g) - a) & g == g

    def lcm(self, a: int, b: int) -> int:
        r = 0
        for v in range(self.nvars):
            s = self.shift[v]
            ea = (a >> s) & FMASK
            eb = (b >> s) & FMASK
            e = ea if ea > eb else eb
            if e:
                r += e * self.var_mono[v]
        return r

    def support_mask(self, m: int) -> int:
        bits = 0
        for v in range(self.nvars):
            if (m >> self.shift[v]) & FMASK:
                bits |= 1 << v
        return bits

    def total_degree(self, m: int) -> int:
        return sum((m >> s) & FMASK for s in self.deg_shift)

    def block_degree(self, m: int, b: int) -> int:
        return (m >> self.deg_shift[b]) & FMASK

    def mono_str(self, m: int) -> str:
        parts = []
        for v, e in enumerate(self.exps(m)):
            if e == 1:
                parts.append(self.names[v])
            elif e:
                parts.append(f"{self.names[v]}^{e}")
        return "*".join(parts) if parts else "1"

    # -- polynomial dicts ----------------------------------------------------
    def const(self, c: int) -> PolyDict:
        c %= self.p
        return {0: c} if c else {}

    def var(self, name_or_index) -> PolyDict:
        v = self.index[name_or_index] if isinstance(name_or_index, str) else name_or_index
        return {self.var_mono[v]: 1}

    def add(self, f: PolyDict, g: PolyDict) -> PolyDict:
        if len(f) < len(g):
            f, g = g, f
        r = dict(f)
        p = self.p
        for m, c in g.items():
            v = (r.get(m, 0) + c) % p
            if v:
                r[m] = v
            else:
                r.pop(m, None)
        return r

    def sub(self, f: PolyDict, g: PolyDict) -> PolyDict:
        r = dict(f)
        p = self.p
        for m, c in g.items():
            v = (r.get(m, 0) - c) % p
            if v:
                r[m] = v
            else:
                r.pop(m, None)
        return r

    def neg(self, f: PolyDict) -> PolyDict:
        p = self.p
        return {m: p - c for m, c in f.items()}

    def scale(self, f: PolyDict, c: int) -> PolyDict:
        c %= self.p
        if not c:
            return {}
        if c == 1:
            return dict(f)
        p = self.p
        return {m: (a * c) % p for m, a in f.items()}

    def mul(self, f: PolyDict, g: PolyDict) -> PolyDict:
        if not f or not g:
            return {}
        if len(f) < len(g):
            f, g = g, f
        if len(g) == 1:
            (m2, c2), = g.items()
            p = self.p
            return {m + m2: (c * c2) % p for m, c in f.items()}
        r: dict[int, int] = {}
        for m2, c2 in g.items():
            for m1, c1 in f.items():
                m = m1 + m2
                r[m] = r.get(m, 0) + c1 * c2
        p = self.p
        return {m: c % p for m, c in r.items() if c % p}

    def pow(self, f: PolyDict, e: int) -> PolyDict:
        result = self.const(1)
        base = f
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def is_const(self, f: PolyDict) -> bool:
        return not f or (len(f) == 1 and 0 in f)

    def const_value(self, f: PolyDict) -> int:
        return f.get(0, 0)

    def lm(self, f: PolyDict) -> int:
        return max(f, key=self.key)

    def variables_of(self, f: PolyDict) -> set[int]:
        bits = 0
        for m in f:
            bits |= self.support_mask(m)
        return {v for v in range(self.nvars) if bits >> v & 1}

    def monic(self, f: PolyDict) -> PolyDict:
        if not f:
            return f
        return self.scale(f, self._inv[f[self.lm(f)]])

    def inv(self, c: int) -> int:
        c %= self.p
        if not c:
            raise ZeroDivisionError("zero has no inverse in GF(p)")
        return self._inv[c]

    def substitute(self, f: PolyDict, values: Mapping[int, PolyDict | int]) -> PolyDict:
        """Replace variables (by index) with polynomials or constants."""
        if not values:
            return dict(f)
        vals = {v: (self.const(x) if isinstance(x, int) else x) for v, x in values.items()}
        powers: dict[tuple[int, int], PolyDict] = {}
        r: PolyDict = {}
        for m, c in f.items():
            rest = m
            term: PolyDict = {0: c}
            for v, val in vals.items():
                e = (m >> self.shift[v]) & FMASK
                if e:
                    rest -= e * self.var_mono[v]
                    pw = powers.get((v, e))
                    if pw is None:
                        pw = self.pow(val, e)
                        powers[(v, e)] = pw
                    term = self.mul(term, pw)
                    if not term:
                        break
            if term:
                r = self.add(r, {mm + rest: cc for mm, cc in term.items()})
        return r

    def evaluate(self, f: PolyDict, point: Sequence[int]) -> int:
        p = self.p
        total = 0
        for m, c in f.items():
            t = c
            for v, s in enumerate(self.shift):
                e = (m >> s) & FMASK
                if e:
                    t = t * pow(point[v], e, p) % p
            total += t
        return total % p

    def embed(self, f: PolyDict, target: "PolyRing", mapping: Sequence[int] | None = None) -> PolyDict:
        """Move f into another ring; ``mapping[v]`` is the target index of
        variable v (defaults to matching by name)."""
        if mapping is None:
            mapping = [target.index.get(name) for name in self.names]
        out: PolyDict = {}
        for m, c in f.items():
            tm = 0
            for v, s in enumerate(self.shift):
                e = (m >> s) & FMASK
                if e:
                    if mapping[v] is None:
                        raise KeyError(f"variable {self.names[v]} is missing from the target ring")
                    tm += e * target.var_mono[mapping[v]]
            out[tm] = (out.get(tm, 0) + c) % target.p
        return {m: c for m, c in out.items() if c}

    def format(self, f: PolyDict) -> str:
        if not f:
            return "0"
        parts = []
        for m in sorted(f, key=self.key, reverse=True):
            c = f[m]
            ms = self.mono_str(m)
            if ms == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(ms)
            else:
                parts.append(f"{c}*{ms}")
        return " + ".join(parts)

    def wrap(self, f: PolyDict) -> "Poly":
        return Poly(self, f)

    def gens(self) -> list["Poly"]:
        return [Poly(self, self.var(v)) for v in range(self.nvars)]

    def __repr__(self) -> str:
        return f"PolyRing(GF({self.p}), {list(self.names)}, blocks={list(self.blocks)})"


class Poly:
    """Immutable polynomial over a :class:`PolyRing`."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: PolyDict | None = None):
        self.ring = ring
        self.terms = terms or {}

    def _coerce(self, other) -> PolyDict:
        if isinstance(other, Poly):
            if other.ring is not self.ring:
                raise ValueError("polynomials live in different rings")
            return other.terms
        if isinstance(other, int):
            return self.ring.const(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        g = self._coerce(other)
        if g is NotImplemented:
            return NotImplemented
        return Poly(self.ring, self.ring.add(self.terms, g))

    __radd__ = __add__

    def __sub__(self, other):
        g = self._coerce(other)
        if g is NotImplemented:
            return NotImplemented
        return Poly(self.ring, self.ring.sub(self.terms, g))

    def __rsub__(self, other):
        g = self._coerce(other)
        if g is NotImplemented:
            return NotImplemented
        return Poly(self.ring, self.ring.sub(g, self.terms))

    def __neg__(self):
        return Poly(self.ring, self.ring.neg(self.terms))

    def __mul__(self, other):
        g = self._coerce(other)
        if g is NotImplemented:
            return NotImplemented
        return Poly(self.ring, self.ring.mul(self.terms, g))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return Poly(self.ring, self.ring.pow(self.terms, e))

    def __eq__(self, other):
        if isinstance(other, int):
            return self.terms == self.ring.const(other)
        return isinstance(other, Poly) and other.ring is self.ring and other.terms == self.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def substitute(self, values: Mapping[str, "Poly | int"]) -> "Poly":
        conv = {}
        for name, val in values.items():
            conv[self.ring.index[name]] = val.terms if isinstance(val, Poly) else val
        return Poly(self.ring, self.ring.substitute(self.terms, conv))

    def __repr__(self):
        return self.ring.format(self.terms)


# -- linear elimination ---------------------------------------------------


def _linear_candidate(ring: PolyRing, f: PolyDict, among: frozenset[int] | None = None) -> tuple[int, int] | None:
    """A variable v (from ``among`` if given) such that f = a*v + g with g
    free of v."""
    counts: dict[int, int] = {}
    for m in f:
        for v in range(ring.nvars):
            if (m >> ring.shift[v]) & FMASK:
                counts[v] = counts.get(v, 0) + 1
    for v in sorted(counts):
        if among is not None and v not in among:
            continue
        if counts[v] == 1 and ring.var_mono[v] in f:
            return v, f[ring.var_mono[v]]
    return None


def eliminate_linear(
    ring: PolyRing, system: Iterable[PolyDict], among: Iterable[int] | None = None
) -> tuple[list[PolyDict], dict[int, PolyDict]]:
    """Solve away variables that occur linearly (only those in ``among``
    when it is given).

    Returns the reduced system and the substitution record ``{var: value}``;
    every recorded value is free of all eliminated variables.  An
    inconsistent system comes back as ``[{0: 1}]``.
    """
    gens = [dict(f) for f in system if f]
    allowed = None if among is None else frozenset(among)
    record: dict[int, PolyDict] = {}
    while True:
        if any(ring.is_const(f) for f in gens):
            return [{0: 1}], record
        best = None
        for k in sorted(range(len(gens)), key=lambda k: len(gens[k])):
            cand = _linear_candidate(ring, gens[k], allowed)
            if cand is not None:
                best = (k, cand)
                break
        if best is None:
            return gens, record
        k, (v, a) = best
        f = gens.pop(k)
        vm = ring.var_mono[v]
        rest = {m: c for m, c in f.items() if m != vm}
        value = ring.scale(rest, -ring.inv(a))
        sub = {v: value}
        gens = [g for g in (ring.substitute(g, sub) if _mentions(ring, g, v) else g for g in gens) if g]
        for u in record:
            if _mentions(ring, record[u], v):
                record[u] = ring.substitute(record[u], sub)
        record[v] = value


def _mentions(ring: PolyRing, f: PolyDict, v: int) -> bool:
    s = ring.shift[v]
    return any((m >> s) & FMASK for m in f)


# -- Groebner bases -------------------------------------------------------


class _Clock:
    def __init__(self, budget: Budget):
        self.budget = budget
        self.deadline = time.monotonic() + budget.timeout_secs
        self.pairs = 0

    def tick(self):
        if time.monotonic() > self.deadline:
            raise GBBudgetExceeded("timeout")


def reduce_full(ring: PolyRing, f: PolyDict, basis: Sequence[tuple[int, PolyDict]], clock: _Clock | None = None) -> PolyDict:
    """Normal form of f modulo monic polynomials ``(lm, poly)``."""
    if not f or not basis:
        return dict(f)
    key = ring.key
    g_bits = ring.guard
    p = ring.p
    acc = dict(f)
    heap = [-key(m) for m in acc]
    heapq.heapify(heap)
    queued = set(acc)
    rem: PolyDict = {}
    xm = ring.xmask
    steps = 0
    while heap:
        m = (-heapq.heappop(heap)) ^ xm
        queued.discard(m)
        c = acc.pop(m, 0)
        if not c:
            continue
        for lmg, g in basis:
            if ((m | g_bits) - lmg) & g_bits == g_bits:
                shift = m - lmg
                for t, gc in g.items():
                    if t == lmg:
                        continue
                    mt = t + shift
                    v = (acc.get(mt, 0) - c * gc) % p
                    if v:
                        acc[mt] = v
                        if mt not in queued:
                            queued.add(mt)
                            heapq.heappush(heap, -key(mt))
                    else:
                        acc.pop(mt, None)
                break
        else:
            rem[m] = c
        steps += 1
        if clock is not None and steps % 2048 == 0:
            clock.tick()
    return rem


def _spoly(ring: PolyRing, f: PolyDict, lf: int, g: PolyDict, lg: int) -> PolyDict:
    L = ring.lcm(lf, lg)
    a = L - lf
    b = L - lg
    p = ring.p
    r = {m + a: c for m, c in f.items()}
    for m, c in g.items():
        mb = m + b
        v = (r.get(mb, 0) - c) % p
        if v:
            r[mb] = v
        else:
            r.pop(mb, None)
    return r


def groebner(ring: PolyRing, polys: Iterable[PolyDict], budget: Budget = DEFAULT_BUDGET) -> list[PolyDict]:
    """Reduced Groebner basis (monic, sorted by decreasing leading monomial).

    Buchberger's algorithm with the Gebauer-Moeller pair update and the
    normal selection strategy.  Raises :class:`GBBudgetExceeded` when the
    budget runs out.
    """
    clock = _Clock(budget)
    key = ring.key
    G: list[PolyDict] = []
    LM: list[int] = []
    MASK: list[int] = []
    active: list[int] = []
    pairs: list[tuple[int, int, int, int]] = []  # (key(lcm), counter, i, j)
    counter = 0
    nmonos = 0

    def insert(h: PolyDict):
        nonlocal counter, nmonos
        lh = ring.lm(h)
        mh = ring.support_mask(lh)
        k = len(G)
        G.append(h)
        LM.append(lh)
        MASK.append(mh)
        nmonos += len(h)
        if nmonos > budget.max_monomials:
            raise GBBudgetExceeded("monomials")
        cands = []
        for i in active:
            cands.append((i, ring.lcm(LM[i], lh), not (MASK[i] & mh)))
        keep = []
        for idx, (i, L, coprime) in enumerate(cands):
            if coprime:
                keep.append((i, L, coprime))
                continue
            dominated = False
            for jdx, (j, L2, _) in enumerate(cands):
                if jdx != idx and L2 != L and ring.divides(L2, L):
                    dominated = True
                    break
                if jdx < idx and L2 == L:
                    dominated = True
                    break
            if not dominated:
                keep.append((i, L, coprime))
        # Drop old pairs that the new leading monomial makes redundant.
        if pairs:
            survivors = []
            for entry in pairs:
                _, _, i, j = entry
                Lij = entry[0] ^ ring.xmask
                if ring.divides(lh, Lij) and ring.lcm(LM[i], lh) != Lij and ring.lcm(LM[j], lh) != Lij:
                    continue
                survivors.append(entry)
            pairs[:] = survivors
            heapq.heapify(pairs)
        for i, L, coprime in keep:
            if coprime:
                continue
            counter += 1
            heapq.heappush(pairs, (key(L), counter, i, k))
        if len(pairs) > budget.max_pairs:
            raise GBBudgetExceeded("pairs")
        active[:] = [i for i in active if not ring.divides(lh, LM[i])]
        active.append(k)

    def current_basis():
        return [(LM[i], G[i]) for i in active]

    for f in polys:
        if not f:
            continue
        h = reduce_full(ring, f, current_basis(), clock)
        if not h:
            continue
        h = ring.monic(h)
        if ring.is_const(h):
            return [{0: 1}]
        insert(h)

    while pairs:
        _, _, i, j = heapq.heappop(pairs)
        clock.pairs += 1
        clock.tick()
        s = _spoly(ring, G[i], LM[i], G[j], LM[j])
        h = reduce_full(ring, s, current_basis(), clock)
        if not h:
            continue
        h = ring.monic(h)
        if ring.is_const(h):
            return [{0: 1}]
        insert(h)

    # Interreduce.
    basis = sorted(((LM[i], G[i]) for i in active), key=lambda t: key(t[0]))
    minimal = []
    for lm_, g in basis:
        if not any(ring.divides(l2, lm_) for l2, _ in minimal):
            minimal.append((lm_, g))
    reduced = []
    for idx, (lm_, g) in enumerate(minimal):
        others = [t for k2, t in enumerate(minimal) if k2 != idx]
        tail = {m: c for m, c in g.items() if m != lm_}
        tail = reduce_full(ring, tail, others, clock)
        tail[lm_] = g[lm_]
        reduced.append(ring.monic(tail))
    reduced.sort(key=lambda f: key(ring.lm(f)), reverse=True)
    return reduced


def normal_form(ring: PolyRing, f: PolyDict, gb: Sequence[PolyDict]) -> PolyDict:
    return reduce_full(ring, f, [(ring.lm(g), g) for g in gb])


def is_unit_ideal(gb: Sequence[PolyDict]) -> bool:
    return len(gb) == 1 and gb[0] == {0: 1}


class Solvability(enum.Enum):
    SOLVABLE = "Solvable"
    UNSOLVABLE = "Unsolvable"
    UNDECIDED = "Undecided"


@dataclass
class SolveResult:
    verdict: Solvability
    record: dict[int, PolyDict]
    basis: list[PolyDict]
    reason: str = ""


def solve_system(ring: PolyRing, system: Iterable[PolyDict], budget: Budget = DEFAULT_BUDGET) -> SolveResult:
    """Linear elimination followed by a Groebner basis of what is left."""
    reduced, record = eliminate_linear(ring, system)
    if is_unit_ideal(reduced):
        return SolveResult(Solvability.UNSOLVABLE, record, [{0: 1}])
    try:
        gb = groebner(ring, reduced, budget)
    except GBBudgetExceeded as exc:
        return SolveResult(Solvability.UNDECIDED, record, [], exc.reason)
    if is_unit_ideal(gb):
        return SolveResult(Solvability.UNSOLVABLE, record, gb)
    return SolveResult(Solvability.SOLVABLE, record, gb)


def solvable_over_closure(ring: PolyRing, system: Iterable[PolyDict], budget: Budget = DEFAULT_BUDGET) -> Solvability:
    """Weak Nullstellensatz: no common zero over the algebraic closure iff
    the reduced basis is {1}."""
    return solve_system(ring, system, budget).verdict


def specialize_solution(
    ring: PolyRing,
    system: Sequence[PolyDict],
    free_vars: Sequence[int],
    budget: Budget = DEFAULT_BUDGET,
) -> tuple[dict[int, int], list[int]]:
    """Give free variables prime-field values, trying 0, 1, ..., p-1 in that
    order, while keeping the system solvable.  Variables that admit no value
    stay symbolic and are returned in the second component."""
    current = [dict(f) for f in system]
    chosen: dict[int, int] = {}
    left: list[int] = []
    for v in free_vars:
        for value in range(ring.p):
            trial = [g for g in (ring.substitute(f, {v: value}) for f in current) if g]
            if solvable_over_closure(ring, trial, budget) is Solvability.SOLVABLE:
                current = trial
                chosen[v] = value
                break
        else:
            left.append(v)
    return chosen, left
