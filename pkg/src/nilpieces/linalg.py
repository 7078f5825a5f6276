"""Dense linear algebra over prime fields, used to separate nilpotent orbits
by the ranks of powers of ad(x)."""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .chevalley import ChevalleyAlgebra


def rank_mod(rows: Iterable[Sequence[int]], q: int) -> int:
    """Rank of an integer matrix reduced modulo the prime q."""
    pivots: dict[int, list[int]] = {}  # leading column -> normalised row
    for row in rows:
        r = [v % q for v in row]
        for col, prow in sorted(pivots.items()):
            c = r[col]
            if c:
                r = [(a - c * b) % q for a, b in zip(r, prow)]
        lead = next((k for k, v in enumerate(r) if v), None)
        if lead is None:
            continue
        inv = pow(r[lead], q - 2, q)
        r = [v * inv % q for v in r]
        for col, prow in pivots.items():
            c = prow[lead]
            if c:
                pivots[col] = [(a - c * b) % q for a, b in zip(prow, r)]
        pivots[lead] = r
    return len(pivots)


def ad_matrix(A: ChevalleyAlgebra, coeffs: Mapping[int, int], q: int) -> list[list[int]]:
    """Columns are ad(x)(b) for the basis vectors b, entries modulo q, with
    the integral structure constants of A."""
    cols = []
    for b in range(A.dim):
        col = [0] * A.dim
        for a, c in coeffs.items():
            for t, n in A.integral_table.get((a, b), ()):
                col[t] = (col[t] + c * n) % q
        cols.append(col)
    return cols


def _compose(a: list[list[int]], b: list[list[int]], q: int) -> list[list[int]]:
    """Column lists: (a o b) column j is a applied to column j of b."""
    n = len(a)
    out = []
    for col in b:
        res = [0] * n
        for k, v in enumerate(col):
            if v:
                ak = a[k]
                for t in range(n):
                    if ak[t]:
                        res[t] = (res[t] + v * ak[t]) % q
        out.append(res)
    return out


def ad_power_ranks(A: ChevalleyAlgebra, coeffs: Mapping[int, int], q: int) -> tuple[int, ...]:
    """Ranks of ad(x), ad(x)^2, ... modulo q until the power vanishes."""
    m = ad_matrix(A, coeffs, q)
    ranks = []
    power = m
    while True:
        r = rank_mod(power, q)
        if r == 0:
            return tuple(ranks)
        ranks.append(r)
        power = _compose(m, power, q)


def row_basis(vectors: Iterable[Sequence[int]], q: int) -> list[list[int]]:
    """Reduced echelon basis of the span of the vectors modulo q."""
    pivots: dict[int, list[int]] = {}
    for vec in vectors:
        r = [v % q for v in vec]
        for col, prow in pivots.items():
            c = r[col]
            if c:
                r = [(a - c * b) % q for a, b in zip(r, prow)]
        lead = next((k for k, v in enumerate(r) if v), None)
        if lead is None:
            continue
        inv = pow(r[lead], q - 2, q)
        r = [v * inv % q for v in r]
        for col, prow in pivots.items():
            c = prow[lead]
            if c:
                pivots[col] = [(a - c * b) % q for a, b in zip(prow, r)]
        pivots[lead] = r
    return [pivots[k] for k in sorted(pivots)]


def kernel(columns: Sequence[Sequence[int]], q: int) -> list[list[int]]:
    """Basis of {v : sum_j v_j columns[j] = 0} modulo q."""
    n = len(columns)
    m = len(columns[0]) if columns else 0
    rows = row_basis(([columns[j][t] for j in range(n)] for t in range(m)), q)
    leads = {next(k for k, v in enumerate(r) if v): r for r in rows}
    out = []
    for free in range(n):
        if free in leads:
            continue
        v = [0] * n
        v[free] = 1
        for lead, r in leads.items():
            v[lead] = -r[free] % q
        out.append(v)
    return out


def bracket_vectors(A: ChevalleyAlgebra, u: Sequence[int], v: Sequence[int], q: int) -> list[int]:
    out = [0] * A.dim
    for a, ua in enumerate(u):
        if not ua:
            continue
        for b, vb in enumerate(v):
            if vb:
                for t, n in A.integral_table.get((a, b), ()):
                    out[t] = (out[t] + ua * vb * n) % q
    return out


def centralizer_invariants(A: ChevalleyAlgebra, coeffs: Mapping[int, int], q: int) -> tuple[int, ...]:
    """Dimensions attached to the centraliser c of x modulo q: c itself,
    its derived algebra, the third term of its lower central series and
    its centre."""
    c = kernel(ad_matrix(A, coeffs, q), q)
    derived = row_basis((bracket_vectors(A, u, v, q) for i, u in enumerate(c) for v in c[i + 1:]), q)
    third = row_basis((bracket_vectors(A, u, v, q) for u in c for v in derived), q)
    centre_cols = []
    # z(c): combinations of the basis of c killed by ad(u) for every u in c
    for w in c:
        centre_cols.append([t for u in c for t in bracket_vectors(A, w, u, q)])
    centre = kernel(centre_cols, q) if c else []
    return (len(c), len(derived), len(third), len(centre))
