"""Search 0/1 orbit representatives for the F4 and E6 data files.

For every weighted diagram the search takes the first support (fewest roots,
then lexicographic in the positive root order) of linearly independent roots
in g_2 such that

* the ad-rank modulo a large prime equals dim g - dim g_0 - dim g_1, so the
  element lies in the orbit labelled by the diagram in characteristic 0, and
* in characteristic p its stabiliser lies in the parabolic of the diagram.

In F4 one list serves both characteristics, so the second condition is
checked for p = 2 and p = 3.

In E6 the stabiliser test is slow (up to |W| = 51840 cells), so the search
first tries a cheaper certificate: when [g_{>=0}, x] = g_{>=2} modulo p the
P-orbit of x is open in g_{>=2}, so x lies in the dense orbit of G g_{>=2},
which is the orbit of the diagram.  For the regular diagram the sum of the
simple root vectors is used.  Only when neither applies does the stabiliser
test run, on the supports with the largest rank of [g_{>=0}, x] first.  The
certificate used is named in the trailing comment.  For the F4
characteristic 2 partners the search runs over all supports in g_{>=2}
(up to rank + 1 roots) meeting the first condition and keeps the first
whose characteristic 2 invariants (see ``invariants``) differ from those
of every class found so far, or, when they agree, for which one of
the two orbits misses g_{>=2} of the other's diagram.  The invariants are
printed as a trailing comment.

    python3 tools/find_representatives.py F4 2
    python3 tools/find_representatives.py E6 3
"""

from __future__ import annotations

import itertools
import sys

from nilpieces.chevalley import algebra_for
from nilpieces.data import load_diagrams, data_path
from nilpieces.linalg import ad_power_ranks, centralizer_invariants, rank_mod
from nilpieces.pieces import Bang, Options, bang_concrete, meets_g_geq2
from nilpieces.rootsys import root_label

BIG = 1000003
PARTNERS = {"F4": (3, 6, 8, 9, 10, 13)}


def independent(roots) -> bool:
    return rank_mod(roots, BIG) == len(roots)


def partner_candidates(A, delta, target):
    rs = A.rs
    upper = [k for k in range(rs.n_positive) if delta.value(rs.roots[k]) >= 2]
    for size in range(1, rs.rank + 2):
        for combo in itertools.combinations(upper, size):
            ranks = ad_power_ranks(A, {k: 1 for k in combo}, BIG)
            if ranks and ranks[0] == target:
                yield combo


def candidates(A, delta, target):
    rs = A.rs
    grade2 = [k for k in range(rs.n_positive) if delta.value(rs.roots[k]) == 2]
    for size in range(0, len(grade2) + 1):
        for combo in itertools.combinations(grade2, size):
            if size > rs.rank or not independent([rs.roots[k] for k in combo]):
                continue
            x = {k: 1 for k in combo}
            ranks = ad_power_ranks(A, x, BIG)
            if (ranks[0] if ranks else 0) == target:
                yield combo


def invariants(A, combo, p) -> tuple[int, ...]:
    x = {b: 1 for b in combo}
    return ad_power_ranks(A, x, p) + centralizer_invariants(A, x, p)


def in_bang(Ap, delta, combo) -> bool:
    one = Ap.coefficient_ring.const(1)
    y = Ap.element({b: one for b in combo})
    return bang_concrete(Ap, y, delta, Options(diagonal_shortcut=False)).value is Bang.IN_BANG


def separated(Ap, diagrams, a, b) -> bool:
    """a, b = (combo, hint index, invariants); True if provably different orbits."""
    if a[2] != b[2]:
        return True
    one = Ap.coefficient_ring.const(1)
    for (combo, _, _), (_, hint, _) in ((a, b), (b, a)):
        x = Ap.element({k: one for k in combo})
        if meets_g_geq2(Ap, x, diagrams[hint]) is False:
            return True
    return False


def target_dim(A, delta) -> int:
    rs = A.rs
    g0 = rs.rank + sum(1 for r in rs.roots if delta.value(r) == 0)
    g1 = sum(1 for r in rs.roots if delta.value(r) == 1)
    return A.dim - g0 - g1


def tangent_rank(A, delta, combo, p) -> tuple[int, int]:
    """Rank modulo p of y -> [y, x] from g_{>=0} to g_{>=2}, and dim g_{>=2}."""
    rs = A.rs
    x = A.sum_of_roots([rs.roots[k] for k in combo])

    def weight(b):
        return 0 if b >= rs.n_roots else delta.value(rs.roots[b])

    upper = [b for b in range(A.dim) if weight(b) >= 2]
    rows = []
    for b in range(A.dim):
        if weight(b) >= 0:
            y = A.bracket(A.basis_element(b), x)
            rows.append([y.coeffs.get(c, 0) % p for c in upper])
    return rank_mod(rows, p), len(upper)


def e6_representative(A, Ap, delta):
    rs = A.rs
    grade2 = [k for k in range(rs.n_positive) if delta.value(rs.roots[k]) == 2]
    subsets = [c for size in range(len(grade2) + 1) for c in itertools.combinations(grade2, size)]
    ranks = {}
    for combo in subsets:
        r, full = tangent_rank(A, delta, combo, Ap.char)
        if r == full:
            return combo, "tangent"
        ranks[combo] = r
    if delta.is_regular():
        return tuple(rs.simple_index[i] for i in range(rs.rank)), "regular"
    target = target_dim(A, delta)
    for combo in sorted(subsets, key=lambda c: (-ranks[c], len(c), c)):
        x = {k: 1 for k in combo}
        got = ad_power_ranks(A, x, BIG)
        if (got[0] if got else 0) != target:
            continue
        print(f"{delta.label}: stabiliser test on {combo}", file=sys.stderr, flush=True)
        if in_bang(Ap, delta, combo):
            return combo, "stabiliser"
    raise SystemExit(f"no representative for {delta.label}")


def main_e6(p: int) -> None:
    A, Ap = algebra_for("E6", 0), algebra_for("E6", p)
    rs = A.rs
    diagrams = load_diagrams(data_path("E6", p, "diagrams"))
    print("# nilpieces-orbits v1")
    for k, delta in enumerate(diagrams, 1):
        combo, how = e6_representative(A, Ap, delta)
        print(f"{delta.label}: {combo} ({how})", file=sys.stderr, flush=True)
        roots = " ".join(",".join(str(c) for c in rs.roots[b]) for b in combo)
        names = " ".join(root_label(rs.roots[b]) for b in combo)
        print(f"E6 {p} x{k} 0 {delta.label} {roots}".rstrip(), f"# {names or '0'} certified by {how}", sep="  ", flush=True)


def main(type_label: str, p: int) -> None:
    if type_label == "E6":
        return main_e6(p)
    A = algebra_for(type_label, 0)
    Ap = algebra_for(type_label, p)
    print("# nilpieces-orbits v1")
    diagrams = load_diagrams(data_path(type_label, p, "diagrams"))
    lines = []
    checks = [algebra_for(type_label, q) for q in ((2, 3) if type_label == "F4" else (p,))]
    for k, delta in enumerate(diagrams, 1):
        for combo in candidates(A, delta, target_dim(A, delta)):
            if all(in_bang(Aq, delta, combo) for Aq in checks):
                lines.append((f"x{k}", 0, k - 1, combo, invariants(A, combo, p)))
                print(f"{delta.label}: {combo}", file=sys.stderr, flush=True)
                break
        else:
            raise SystemExit(f"no representative for {delta.label}")
    for i in PARTNERS.get(type_label, ()) if p == 2 else ():
        delta = diagrams[i - 1]
        for combo in partner_candidates(A, delta, target_dim(A, delta)):
            new = (combo, i - 1, invariants(A, combo, p))
            if all(separated(Ap, diagrams, new, (c, h, inv)) for _, _, h, c, inv in lines):
                lines.append((f"x{i}_2", 1, i - 1, combo, new[2]))
                break
        else:
            raise SystemExit(f"no partner for diagram {i}")
    rs = A.rs
    for label, exc, hint, combo, inv in lines:
        roots = " ".join(",".join(str(c) for c in rs.roots[b]) for b in combo)
        names = " ".join(root_label(rs.roots[b]) for b in combo)
        print(f"{type_label} {p} {label} {exc} {diagrams[hint].label} {roots}".rstrip(), f"# {names or '0'} invariants {inv}", sep="  ")


if __name__ == "__main__":
    main(sys.argv[1], int(sys.argv[2]))
