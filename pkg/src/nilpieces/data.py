"""Line-oriented data files for weighted diagrams and orbit representatives.

Diagram lines read ``type p label w1 ... wr`` and orbit lines read
``type p label exceptional hint root root ...`` with each root written as its
comma separated coordinates in the simple roots (``1,1`` is a1 + a2).  A hint
of ``-`` means none.  The first non-blank line of a file is a version header
(``# nilpieces-diagrams v1`` or ``# nilpieces-orbits v1``); later ``#`` starts
a comment.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .pieces import OrbitRep
from .rootsys import CARTAN, RootSystem, WeightedDynkinDiagram, build_root_system

DIAGRAM_HEADER = "# nilpieces-diagrams v1"
ORBIT_HEADER = "# nilpieces-orbits v1"

# (diagrams, orbits) shipped for each type and characteristic
EXPECTED_COUNTS: dict[tuple[str, int], tuple[int, int]] = {
    ("G2", 2): (5, 5),
    ("G2", 3): (5, 6),
    ("F4", 2): (16, 22),
    ("F4", 3): (16, 16),
    ("E6", 2): (21, 21),
    ("E6", 3): (21, 21),
}


class DataError(ValueError):
    """A malformed data file; the message carries ``path:line``."""

    def __init__(self, path: str | Path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


def data_path(type_label: str, p: int, kind: str) -> Path:
    """Path of a shipped file; ``kind`` is ``diagrams`` or ``orbits``."""
    ref = resources.files("nilpieces") / "data" / f"{type_label.lower()}_p{p}_{kind}.txt"
    return Path(str(ref))


def file_hash(path: str | Path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _records(path: str | Path, header: str):
    """Yield (line number, tokens) for the content lines of a data file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(path, 0, f"cannot read file ({exc.strerror})") from exc
    seen_header = False
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if not seen_header:
            if line.split() != header.split():
                raise DataError(path, no, f"expected header {header!r}")
            seen_header = True
            continue
        body = line.split("#", 1)[0].split()
        if body:
            yield no, body
    if not seen_header:
        raise DataError(path, 1, f"empty file, expected header {header!r}")


def _type_and_p(path, no, tokens, want_type, want_p) -> tuple[str, int]:
    type_label = tokens[0]
    if type_label not in CARTAN:
        raise DataError(path, no, f"unknown type {type_label!r}")
    try:
        p = int(tokens[1])
    except ValueError:
        raise DataError(path, no, f"characteristic {tokens[1]!r} is not an integer") from None
    if p not in (2, 3):
        raise DataError(path, no, f"characteristic must be 2 or 3, got {p}")
    if want_type is not None and type_label != want_type:
        raise DataError(path, no, f"type {type_label} does not match {want_type}")
    if want_p is not None and p != want_p:
        raise DataError(path, no, f"characteristic {p} does not match {want_p}")
    return type_label, p


def load_diagrams(path: str | Path, type_label: str | None = None, p: int | None = None) -> list[WeightedDynkinDiagram]:
    out: list[WeightedDynkinDiagram] = []
    labels: set[str] = set()
    for no, tokens in _records(path, DIAGRAM_HEADER):
        if len(tokens) < 4:
            raise DataError(path, no, "expected: type p label w1 ... wr")
        type_label, p = _type_and_p(path, no, tokens, type_label, p)
        rank = len(CARTAN[type_label])
        label, weights = tokens[2], tokens[3:]
        if len(weights) != rank:
            raise DataError(path, no, f"{type_label} needs {rank} weights, got {len(weights)}")
        if any(w not in ("0", "1", "2") for w in weights):
            raise DataError(path, no, "weights must be 0, 1 or 2")
        if label in labels:
            raise DataError(path, no, f"duplicate diagram label {label!r}")
        labels.add(label)
        out.append(WeightedDynkinDiagram(label, tuple(int(w) for w in weights)))
    return out


def _parse_root(path, no, token: str, rs: RootSystem) -> tuple[int, ...]:
    try:
        root = tuple(int(c) for c in token.split(","))
    except ValueError:
        raise DataError(path, no, f"root {token!r} is not a comma separated integer vector") from None
    if len(root) != rs.rank:
        raise DataError(path, no, f"root {token!r} needs {rs.rank} coordinates")
    k = rs.index.get(root)
    if k is None or not rs.is_positive(k):
        raise DataError(path, no, f"{token!r} is not a positive root of {rs.type_label}")
    return root


def load_orbits(
    path: str | Path,
    type_label: str | None = None,
    p: int | None = None,
    diagram_labels: set[str] | None = None,
) -> list[OrbitRep]:
    out: list[OrbitRep] = []
    labels: set[str] = set()
    for no, tokens in _records(path, ORBIT_HEADER):
        if len(tokens) < 5:
            raise DataError(path, no, "expected: type p label exceptional hint root ...")
        type_label, p = _type_and_p(path, no, tokens, type_label, p)
        rs = build_root_system(type_label)
        label, flag, hint = tokens[2], tokens[3], tokens[4]
        if flag not in ("0", "1"):
            raise DataError(path, no, "exceptional flag must be 0 or 1")
        if label in labels:
            raise DataError(path, no, f"duplicate orbit label {label!r}")
        if hint != "-" and diagram_labels is not None and hint not in diagram_labels:
            raise DataError(path, no, f"diagram hint {hint!r} names no diagram")
        support = tuple(_parse_root(path, no, t, rs) for t in tokens[5:])
        if len(set(support)) != len(support):
            raise DataError(path, no, "repeated root in support")
        labels.add(label)
        out.append(OrbitRep(label, support, None if hint == "-" else hint, flag == "1"))
    return out


@dataclass(frozen=True)
class Dataset:
    type_label: str
    p: int
    diagrams: tuple[WeightedDynkinDiagram, ...]
    orbits: tuple[OrbitRep, ...]
    diagrams_path: str
    orbits_path: str
    hashes: dict

    def diagram(self, label: str) -> WeightedDynkinDiagram:
        for d in self.diagrams:
            if d.label == label:
                return d
        raise KeyError(label)

    def orbit(self, label: str) -> OrbitRep:
        for o in self.orbits:
            if o.label == label:
                return o
        raise KeyError(label)


def load_dataset(
    type_label: str,
    p: int,
    diagrams_path: str | Path | None = None,
    orbits_path: str | Path | None = None,
) -> Dataset:
    """Load and cross-check the diagram and orbit files for one type and
    characteristic (the shipped files unless paths are given)."""
    dpath = Path(diagrams_path) if diagrams_path else data_path(type_label, p, "diagrams")
    opath = Path(orbits_path) if orbits_path else data_path(type_label, p, "orbits")
    diagrams = load_diagrams(dpath, type_label, p)
    orbits = load_orbits(opath, type_label, p, {d.label for d in diagrams})
    expected = EXPECTED_COUNTS.get((type_label, p))
    if expected is not None:
        if len(diagrams) != expected[0]:
            raise DataError(dpath, 0, f"{type_label} p={p} needs {expected[0]} diagrams, found {len(diagrams)}")
        if len(orbits) != expected[1]:
            raise DataError(opath, 0, f"{type_label} p={p} needs {expected[1]} orbits, found {len(orbits)}")
    if len(set(d.weights for d in diagrams)) != len(diagrams):
        raise DataError(dpath, 0, "two diagrams share the same weights")
    return Dataset(
        type_label,
        p,
        tuple(diagrams),
        tuple(orbits),
        str(dpath),
        str(opath),
        {"diagrams": file_hash(dpath), "orbits": file_hash(opath)},
    )
