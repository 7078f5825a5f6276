"""Root systems of type G2, F4 and E6 together with their Weyl groups.

Roots are integer coordinate vectors in the basis of simple roots.  The
positive roots are kept in one fixed order (height first, then the heavier
coordinate vector first) and every root gets an index: positive roots take
``0 .. N-1`` in that order and their negatives take ``N .. 2N-1`` in the same
order.  Weyl group elements are stored as permutations of those indices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Iterable, Sequence

Root = tuple[int, ...]

# Entry (i, j) is <alpha_i, alpha_j^vee>.
CARTAN: dict[str, tuple[tuple[int, ...], ...]] = {
    # alpha_1 short, alpha_2 long
    "G2": ((2, -1), (-3, 2)),
    # alpha_1 - alpha_2 => alpha_3 - alpha_4, the first two long
    "F4": (
        (2, -1, 0, 0),
        (-1, 2, -2, 0),
        (0, -1, 2, -1),
        (0, 0, -1, 2),
    ),
    # 1 - 3 - 4 - 5 - 6 with 2 attached to 4
    "E6": (
        (2, 0, -1, 0, 0, 0),
        (0, 2, 0, -1, 0, 0),
        (-1, 0, 2, -1, 0, 0),
        (0, -1, -1, 2, -1, 0),
        (0, 0, 0, -1, 2, -1),
        (0, 0, 0, 0, -1, 2),
    ),
}

SUPPORTED_TYPES = tuple(CARTAN)


class RootSystemError(ValueError):
    pass


def root_label(root: Sequence[int]) -> str:
    """Compact label such as ``2342`` or ``-0121``; comma separated if a
    coordinate has more than one digit."""
    sign = "-" if any(c < 0 for c in root) else ""
    digits = [abs(c) for c in root]
    if all(d < 10 for d in digits):
        return sign + "".join(str(d) for d in digits)
    return sign + ",".join(str(d) for d in digits)


def _symmetrizer(cartan: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Half squared lengths d_j of the simple roots, so that
    (alpha_i, alpha_j) = cartan[i][j] * d_j is symmetric.  Shortest is 1."""
    r = len(cartan)
    d: list[Fraction | None] = [None] * r
    d[0] = Fraction(1)
    todo = [0]
    while todo:
        i = todo.pop()
        for j in range(r):
            if j != i and cartan[i][j] != 0 and d[j] is None:
                # cartan[i][j] d_j = cartan[j][i] d_i
                d[j] = d[i] * cartan[j][i] / cartan[i][j]
                todo.append(j)
    if any(v is None for v in d):
        raise RootSystemError("Cartan matrix is not connected")
    scale = lcm(*(v.denominator for v in d))
    ints = [int(v * scale) for v in d]
    low = min(ints)
    return tuple(v // low for v in ints)


class RootSystem:
    """Immutable root system data for one of the supported types."""

    def __init__(self, type_label: str):
        if type_label not in CARTAN:
            raise RootSystemError(f"unsupported root system type {type_label!r}")
        self.type_label = type_label
        self.cartan = CARTAN[type_label]
        self.rank = len(self.cartan)
        self.simple_roots = tuple(f"a{i + 1}" for i in range(self.rank))
        self.half_norms = _symmetrizer(self.cartan)

        positives = self._close_positive()
        positives.sort(key=lambda r: (sum(r), tuple(-c for c in r)))
        self.positive_order: tuple[Root, ...] = tuple(positives)
        self.n_positive = len(positives)
        self.roots: tuple[Root, ...] = self.positive_order + tuple(
            tuple(-c for c in r) for r in self.positive_order
        )
        self.index: dict[Root, int] = {r: k for k, r in enumerate(self.roots)}
        self.simple_index = tuple(
            self.index[tuple(int(i == j) for j in range(self.rank))]
            for i in range(self.rank)
        )

    # -- construction -------------------------------------------------
    def _close_positive(self) -> list[Root]:
        r = self.rank
        simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
        seen = set(simple)
        queue = deque(simple)
        while queue:
            beta = queue.popleft()
            for i in range(r):
                gamma = self._reflect_vector(i, beta)
                if all(c >= 0 for c in gamma) and gamma not in seen:
                    seen.add(gamma)
                    queue.append(gamma)
        return list(seen)

    def _reflect_vector(self, i: int, beta: Sequence[int]) -> Root:
        k = self.pairing(beta, i)
        return tuple(c - k * (j == i) for j, c in enumerate(beta))

    # -- basic queries --------------------------------------------------
    @property
    def n_roots(self) -> int:
        return len(self.roots)

    def is_root(self, v: Sequence[int]) -> bool:
        return tuple(v) in self.index

    def is_positive(self, k: int) -> bool:
        return k < self.n_positive

    def negate(self, k: int) -> int:
        return k + self.n_positive if k < self.n_positive else k - self.n_positive

    def height(self, root: Sequence[int]) -> int:
        return sum(root)

    def pairing(self, beta: Sequence[int], i: int) -> int:
        """<beta, alpha_i^vee>."""
        return sum(b * self.cartan[j][i] for j, b in enumerate(beta))

    def inner(self, a: Sequence[int], b: Sequence[int]) -> int:
        """Symmetric form with the short simple roots of squared length 2."""
        total = 0
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        total += ai * bj * self.cartan[i][j] * self.half_norms[j]
        return total

    def norm(self, root: Sequence[int]) -> int:
        return self.inner(root, root)

    def coroot(self, root: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of beta^vee in the simple coroot basis."""
        nb = self.norm(root)
        out = []
        for i, b in enumerate(root):
            num = b * 2 * self.half_norms[i]
            if num % nb:
                raise RootSystemError("coroot is not integral")  # pragma: no cover
            out.append(num // nb)
        return tuple(out)

    def add(self, a: int, b: int) -> int | None:
        """Index of roots[a] + roots[b] if that is a root, else None."""
        s = tuple(x + y for x, y in zip(self.roots[a], self.roots[b]))
        return self.index.get(s)

    def reflect(self, i: int, k: int) -> int:
        return self.index[self._reflect_vector(i, self.roots[k])]

    def root_chain(self, beta: Sequence[int], gamma: Sequence[int]) -> tuple[int, int]:
        """(p, q): the largest k with beta + k gamma a root, and the largest
        k with beta - k gamma a root."""
        beta, gamma = tuple(beta), tuple(gamma)
        if beta not in self.index or gamma not in self.index:
            raise RootSystemError("root_chain needs two roots")
        if beta == gamma or beta == tuple(-c for c in gamma):
            raise RootSystemError("root_chain is undefined for gamma = +-beta")

        def extent(sign: int) -> int:
            k = 0
            while tuple(b + sign * (k + 1) * g for b, g in zip(beta, gamma)) in self.index:
                k += 1
            return k

        return extent(1), extent(-1)

    def label(self, k: int) -> str:
        return root_label(self.roots[k])

    # -- Weyl group --------------------------------------------------------
    @cached_property
    def simple_reflection_perms(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(self.reflect(i, k) for k in range(self.n_roots)) for i in range(self.rank)
        )

    @cached_property
    def weyl(self) -> tuple["WeylElement", ...]:
        return tuple(_enumerate_closure(self, range(self.rank)))

    def identity(self) -> "WeylElement":
        return WeylElement((), tuple(range(self.n_roots)))

    def weyl_from_word(self, word: Iterable[int]) -> "WeylElement":
        word = tuple(word)
        perm = list(range(self.n_roots))
        for i in reversed(word):
            s = self.simple_reflection_perms[i]
            perm = [s[k] for k in perm]
        return WeylElement(word, tuple(perm))

    def __repr__(self) -> str:
        return f"RootSystem({self.type_label})"


@dataclass(frozen=True)
class WeylElement:
    """w = s_{word[0]} s_{word[1]} ...; perm[k] is the index of w(roots[k])."""

    word: tuple[int, ...]
    perm: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.word)

    def act(self, k: int) -> int:
        return self.perm[k]

    def inverse_perm(self) -> tuple[int, ...]:
        inv = [0] * len(self.perm)
        for k, v in enumerate(self.perm):
            inv[v] = k
        return tuple(inv)

    def inversions(self, rs: RootSystem) -> list[int]:
        """Positive root indices sent to negative roots, in positive order."""
        return [k for k in range(rs.n_positive) if not rs.is_positive(self.perm[k])]

    def is_identity(self) -> bool:
        return all(k == v for k, v in enumerate(self.perm))


def _enumerate_closure(rs: RootSystem, gens: Iterable[int]) -> list[WeylElement]:
    """Breadth first closure of the identity under left multiplication by the
    given simple reflections.  Words come out reduced (inside the subgroup)
    and the order is deterministic."""
    gens = tuple(gens)
    start = rs.identity()
    seen = {start.perm}
    out = [start]
    frontier = [start]
    while frontier:
        nxt = []
        for w in frontier:
            for i in gens:
                s = rs.simple_reflection_perms[i]
                perm = tuple(s[k] for k in w.perm)
                if perm not in seen:
                    seen.add(perm)
                    elt = WeylElement((i,) + w.word, perm)
                    out.append(elt)
                    nxt.append(elt)
        frontier = nxt
    return out


@dataclass(frozen=True)
class WeightedDynkinDiagram:
    label: str
    weights: tuple[int, ...]

    def __post_init__(self):
        if any(v not in (0, 1, 2) for v in self.weights):
            raise ValueError(f"diagram {self.label}: weights must lie in {{0, 1, 2}}")

    def value(self, root: Sequence[int]) -> int:
        return sum(c * v for c, v in zip(root, self.weights))

    def is_regular(self) -> bool:
        return all(v == 2 for v in self.weights)

    def is_zero(self) -> bool:
        return not any(self.weights)

    def zero_nodes(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.weights) if v == 0)


def build_root_system(type_label: str) -> RootSystem:
    return _cached_root_system(type_label)


_ROOT_SYSTEMS: dict[str, RootSystem] = {}


def _cached_root_system(type_label: str) -> RootSystem:
    if type_label not in _ROOT_SYSTEMS:
        _ROOT_SYSTEMS[type_label] = RootSystem(type_label)
    return _ROOT_SYSTEMS[type_label]


def root_chain(rs: RootSystem, beta: Sequence[int], gamma: Sequence[int]) -> tuple[int, int]:
    return rs.root_chain(beta, gamma)


def enumerate_weyl(rs: RootSystem) -> tuple[WeylElement, ...]:
    return rs.weyl


def _check_diagram(rs: RootSystem, delta: WeightedDynkinDiagram) -> None:
    if len(delta.weights) != rs.rank:
        raise ValueError(f"diagram {delta.label} has {len(delta.weights)} weights, rank is {rs.rank}")


def weight_zero_subgroup(rs: RootSystem, delta: WeightedDynkinDiagram) -> list[WeylElement]:
    _check_diagram(rs, delta)
    return _enumerate_closure(rs, delta.zero_nodes())


def right_transversal(rs: RootSystem, delta: WeightedDynkinDiagram) -> list[WeylElement]:
    """Minimal length representatives of the right cosets W_0 w.

    w is minimal in W_0 w exactly when w^{-1} keeps every weight-zero simple
    root positive.  The list follows the enumeration order of W.
    """
    _check_diagram(rs, delta)
    zero = delta.zero_nodes()
    reps = []
    for w in rs.weyl:
        inv = w.inverse_perm()
        if all(rs.is_positive(inv[rs.simple_index[i]]) for i in zero):
            reps.append(w)
    return reps
