"""The ``nilpieces`` command line: ``info``, ``classify`` and ``verify``.

Every option can also come from an environment variable named
``NILPIECES_<OPTION>`` (``NILPIECES_P``, ``NILPIECES_GB_MAX_PAIRS``, ...);
a flag on the command line wins.  Exit status is 0 for a complete result,
2 when some cell stayed Undecided (or a verify check failed) and 1 for
usage or data errors.
"""

from __future__ import annotations

import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import click

from . import checks
from .chevalley import algebra_for
from .data import DataError, Dataset, load_dataset
from .gfpoly import Budget
from .pieces import MembershipVerdict, Options, PartitionError, PieceTable, Verdict, classify_all
from .rootsys import SUPPORTED_TYPES, build_root_system, weight_zero_subgroup

EXIT_OK, EXIT_ERROR, EXIT_UNDECIDED = 0, 1, 2
REPORT_FORMAT = "nilpieces-report v1"
ENV_PREFIX = "NILPIECES"


class UsageError(click.UsageError):
    exit_code = EXIT_ERROR


@dataclass(frozen=True)
class RunConfig:
    type_label: str
    p: int
    diagrams_path: str | None = None
    orbits_path: str | None = None
    workers: int = 1
    gb_max_pairs: int = Budget.max_pairs
    gb_max_monomials: int = Budget.max_monomials
    gb_timeout_secs: float = Budget.timeout_secs
    diagonal_shortcut: bool = True
    pruning: bool = True
    output_format: str = "tsv"
    seed: int = 0
    cells: tuple[tuple[str, str], ...] = field(default=())

    def __post_init__(self):
        if self.type_label not in SUPPORTED_TYPES:
            raise ValueError(f"unsupported type {self.type_label!r}")
        if self.p not in (2, 3):
            raise ValueError("p must be 2 or 3")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        # Budget validates positivity
        self.budget()

    def budget(self) -> Budget:
        return Budget(self.gb_max_pairs, self.gb_max_monomials, self.gb_timeout_secs)

    def options(self) -> Options:
        # switching the diagonal shortcut off also switches off the closed
        # form for the regular diagram, so every verdict comes from the cells
        return Options(
            diagonal_shortcut=self.diagonal_shortcut,
            regular_shortcut=self.diagonal_shortcut,
            pruning=self.pruning,
            budget=self.budget(),
        )

    def report_fields(self) -> dict:
        d = asdict(self)
        d["cells"] = [f"{o}:{g}" for o, g in self.cells]
        del d["diagrams_path"], d["orbits_path"]
        return d

    def checkpoint_key(self, hashes: dict) -> str:
        """Everything a verdict depends on; cell selection, workers and
        output format are left out so partial runs feed full ones."""
        key = {
            "type": self.type_label,
            "p": self.p,
            "data": hashes,
            "budget": [self.gb_max_pairs, self.gb_max_monomials, self.gb_timeout_secs],
            "diagonal_shortcut": self.diagonal_shortcut,
            "pruning": self.pruning,
        }
        return hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()[:16]


# -- checkpoints --------------------------------------------------------------------------


class Checkpoint:
    """One JSON line per finished cell; a torn last line is ignored."""

    def __init__(self, path: Path):
        self.path = path

    def load(self) -> dict[tuple[str, str], tuple[MembershipVerdict, float]]:
        out = {}
        if not self.path.exists():
            return out
        for line in self.path.read_text(encoding="utf-8").splitlines():
            try:
                rec = json.loads(line)
                v = MembershipVerdict(Verdict(rec["verdict"]["value"]), rec["verdict"]["witness"])
            except (ValueError, KeyError, TypeError):
                continue
            out[(rec["orbit"], rec["diagram"])] = (v, rec["seconds"])
        return out

    def append(self, orbit: str, diagram: str, v: MembershipVerdict, seconds: float) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        rec = {"orbit": orbit, "diagram": diagram, "verdict": v.to_dict(), "seconds": round(seconds, 3)}
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")

    def clear(self) -> None:
        if self.path.exists():
            self.path.unlink()


# -- reports --------------------------------------------------------------------------------


def _support_text(rs, support) -> str:
    return " + ".join(f"e{rs.label(rs.index[r])}" for r in support) or "0"


def structured_report(cfg: RunConfig, ds: Dataset, table: PieceTable, seconds: dict, total: float) -> str:
    rs = build_root_system(cfg.type_label)
    pieces = table.pieces()
    order = {o.label: k for k, o in enumerate(ds.orbits)}
    undecided = sorted((o, d) for (o, d), v in table.cells.items() if v.value is Verdict.UNDECIDED)
    complete = table.is_complete() if not cfg.cells else not undecided
    doc = {
        "format": REPORT_FORMAT,
        "config": cfg.report_fields(),
        "data": {
            "diagrams": {"file": Path(ds.diagrams_path).name, "hash": ds.hashes["diagrams"]},
            "orbits": {"file": Path(ds.orbits_path).name, "hash": ds.hashes["orbits"]},
        },
        "diagrams": [{"label": d.label, "weights": list(d.weights)} for d in ds.diagrams],
        "orbits": [
            {
                "label": o.label,
                "representative": _support_text(rs, o.support),
                "diagram_hint": o.diagram_hint,
                "exceptional": o.exceptional,
            }
            for o in ds.orbits
        ],
        "cells": [
            {"orbit": o, "diagram": d, "verdict": v.value.value, "witness": v.witness}
            for (o, d), v in _ordered_cells(table, ds)
        ],
        "pieces": {d: sorted(members, key=order.__getitem__) for d, members in pieces.items()},
        "undecided": [f"{o}:{d}" for o, d in undecided],
        "complete": complete,
        "partition": table.partition_ok() if table.is_complete() else None,
        "timings": {
            "total_secs": round(total, 3),
            "cells": {f"{o}:{d}": s for (o, d), s in sorted(seconds.items())},
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def _ordered_cells(table: PieceTable, ds: Dataset):
    for d in ds.diagrams:
        for o in ds.orbits:
            key = (o.label, d.label)
            if key in table.cells:
                yield key, table.cells[key]


def tsv_report(cfg: RunConfig, ds: Dataset, table: PieceTable) -> str:
    lines = [
        f"# nilpieces {cfg.type_label} p={cfg.p} seed={cfg.seed}",
        f"# diagrams {Path(ds.diagrams_path).name} {ds.hashes['diagrams']}",
        f"# orbits {Path(ds.orbits_path).name} {ds.hashes['orbits']}",
    ]
    if cfg.cells:
        lines.append("orbit\tdiagram\tverdict")
        for (o, d), v in _ordered_cells(table, ds):
            lines.append(f"{o}\t{d}\t{v.value.value}")
        return "\n".join(lines) + "\n"
    pieces = table.pieces()
    lines.append("diagram\tweights\tpiece\tundecided")
    for d in ds.diagrams:
        members = [o.label for o in ds.orbits if o.label in pieces[d.label]]
        cell = {o.label: table.cells.get((o.label, d.label)) for o in ds.orbits}
        open_ = [o for o, v in cell.items() if v is None or v.value is Verdict.UNDECIDED]
        weights = "".join(str(w) for w in d.weights)
        lines.append(f"{d.label}\t{weights}\t{' '.join(members) or '-'}\t{' '.join(open_) or '-'}")
    return "\n".join(lines) + "\n"


# -- click plumbing ---------------------------------------------------------------------------


def _env(name: str) -> str:
    return f"{ENV_PREFIX}_{name}"


def _type_option(f):
    return click.option("--type", "type_opt", type=click.Choice(SUPPORTED_TYPES), envvar=_env("TYPE"),
                        help="Group type (same as the positional TYPE).")(f)


def _resolve_type(positional: str | None, flag: str | None, required: bool = True) -> str | None:
    if positional and flag and positional != flag:
        raise UsageError(f"TYPE {positional} disagrees with --type {flag}")
    t = positional or flag
    if t is None and required:
        raise UsageError("a group type is required (TYPE or --type)")
    if t is not None and t not in SUPPORTED_TYPES:
        raise UsageError(f"unknown type {t!r}; choose from {', '.join(SUPPORTED_TYPES)}")
    return t


def _load(type_label: str, p: int, diagrams: str | None, orbits: str | None) -> Dataset:
    try:
        return load_dataset(type_label, p, diagrams, orbits)
    except DataError as exc:
        raise click.ClickException(str(exc)) from exc


def _parse_cell(text: str) -> tuple[str, str]:
    orbit, sep, diagram = text.partition(":")
    if not sep or not orbit or not diagram:
        raise UsageError(f"--cell expects ORBIT:DIAGRAM, got {text!r}")
    return orbit, diagram


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli():
    """Nilpotent pieces of exceptional groups in characteristic 2 and 3."""


@cli.command()
@click.argument("type_arg", metavar="[TYPE]", required=False)
@_type_option
@click.option("--p", type=click.IntRange(2, 3), default=2, show_default=True, envvar=_env("P"))
@click.option("--diagrams", "diagrams_path", type=click.Path(dir_okay=False), envvar=_env("DIAGRAMS"))
@click.option("--orbits", "orbits_path", type=click.Path(dir_okay=False), envvar=_env("ORBITS"))
@click.option("--roots", "show_roots", is_flag=True, help="Also list the positive roots.")
def info(type_arg, type_opt, p, diagrams_path, orbits_path, show_roots):
    """Root data, Weyl group order, diagrams and orbit representatives."""
    t = _resolve_type(type_arg, type_opt)
    rs = build_root_system(t)
    ds = _load(t, p, diagrams_path, orbits_path)
    echo = click.echo
    echo(f"type {t}  rank {rs.rank}  p={p}")
    echo(f"roots {rs.n_roots}  positive roots {rs.n_positive}")
    echo(f"Weyl group order {len(rs.weyl)}")
    if show_roots:
        for k in range(rs.n_positive):
            echo(f"  {rs.label(k)}\t{','.join(map(str, rs.roots[k]))}")
    echo(f"diagrams {len(ds.diagrams)}  ({Path(ds.diagrams_path).name} {ds.hashes['diagrams']})")
    for d in ds.diagrams:
        w0 = len(weight_zero_subgroup(rs, d))
        echo(f"  {d.label}\t{''.join(map(str, d.weights))}\t|W_0|={w0}")
    echo(f"orbits {len(ds.orbits)}  ({Path(ds.orbits_path).name} {ds.hashes['orbits']})")
    for o in ds.orbits:
        flag = "exceptional" if o.exceptional else ""
        echo(f"  {o.label}\t{o.diagram_hint or '-'}\t{_support_text(rs, o.support)}\t{flag}".rstrip())


@cli.command()
@click.argument("type_arg", metavar="[TYPE]", required=False)
@_type_option
@click.option("--p", type=click.IntRange(2, 3), default=2, show_default=True, envvar=_env("P"))
@click.option("--diagrams", "diagrams_path", type=click.Path(dir_okay=False), envvar=_env("DIAGRAMS"),
              help="Diagram data file (default: the shipped one).")
@click.option("--orbits", "orbits_path", type=click.Path(dir_okay=False), envvar=_env("ORBITS"),
              help="Orbit data file (default: the shipped one).")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True, envvar=_env("WORKERS"))
@click.option("--gb-max-pairs", type=click.IntRange(min=1), default=Budget.max_pairs, show_default=True,
              envvar=_env("GB_MAX_PAIRS"))
@click.option("--gb-max-monomials", type=click.IntRange(min=1), default=Budget.max_monomials, show_default=True,
              envvar=_env("GB_MAX_MONOMIALS"))
@click.option("--gb-timeout-secs", type=click.FloatRange(min=0, min_open=True), default=Budget.timeout_secs,
              show_default=True, envvar=_env("GB_TIMEOUT_SECS"))
@click.option("--no-diagonal-shortcut", is_flag=True, envvar=_env("NO_DIAGONAL_SHORTCUT"),
              help="Run the full algorithm on diagonal cells (and the regular diagram) too.")
@click.option("--no-pruning", is_flag=True, envvar=_env("NO_PRUNING"), help="Search all of W instead of a transversal.")
@click.option("--cell", "cells", multiple=True, metavar="ORBIT:DIAGRAM", help="Only these cells (repeatable).")
@click.option("--format", "output_format", type=click.Choice(["tsv", "structured"]), default="tsv",
              show_default=True, envvar=_env("FORMAT"))
@click.option("--seed", type=int, default=0, show_default=True, envvar=_env("SEED"))
@click.option("--fresh", is_flag=True, envvar=_env("FRESH"), help="Ignore and replace earlier checkpoints.")
@click.option("--checkpoint-dir", type=click.Path(file_okay=False), default=".nilpieces-checkpoints",
              show_default=True, envvar=_env("CHECKPOINT_DIR"))
@click.option("--output", "-o", "output", type=click.Path(dir_okay=False), help="Write the report here instead of stdout.")
@click.option("--quiet", "-q", is_flag=True, help="No per-cell progress on stderr.")
def classify(type_arg, type_opt, p, diagrams_path, orbits_path, workers, gb_max_pairs, gb_max_monomials,
             gb_timeout_secs, no_diagonal_shortcut, no_pruning, cells, output_format, seed, fresh,
             checkpoint_dir, output, quiet):
    """Decide which orbits lie in which piece."""
    t = _resolve_type(type_arg, type_opt)
    try:
        cfg = RunConfig(
            t, p, diagrams_path, orbits_path, workers, gb_max_pairs, gb_max_monomials, gb_timeout_secs,
            not no_diagonal_shortcut, not no_pruning, output_format, seed, tuple(_parse_cell(c) for c in cells),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    ds = _load(t, p, diagrams_path, orbits_path)
    labels_o = {o.label for o in ds.orbits}
    labels_d = {d.label for d in ds.diagrams}
    for o, d in cfg.cells:
        if o not in labels_o or d not in labels_d:
            raise UsageError(f"--cell {o}:{d} names no orbit/diagram of {t} p={p}")

    ckpt = Checkpoint(Path(checkpoint_dir) / f"{t.lower()}_p{p}_{cfg.checkpoint_key(ds.hashes)}.jsonl")
    if fresh:
        ckpt.clear()
    # Undecided cells are not finished work; a rerun tries them again
    previous = {k: r for k, r in ckpt.load().items() if r[0].value is not Verdict.UNDECIDED}
    seconds = {k: s for k, (_, s) in previous.items()}
    done = {k: v for k, (v, _) in previous.items()}

    def on_cell(o, d, v, secs):
        seconds[(o, d)] = round(secs, 3)
        ckpt.append(o, d, v, secs)
        if not quiet:
            click.echo(f"{o}:{d}\t{v.value.value}\t{secs:.2f}s", err=True)

    A = algebra_for(t, p)
    t0 = time.monotonic()
    try:
        table = classify_all(A, ds.orbits, ds.diagrams, cfg.options(), cfg.cells or None, workers, done, on_cell)
        partition_error = None
    except PartitionError as exc:
        table, partition_error = exc.table, exc
    total = time.monotonic() - t0
    seconds = {k: s for k, s in seconds.items() if k in table.cells}
    if output_format == "structured":
        text = structured_report(cfg, ds, table, seconds, total)
    else:
        text = tsv_report(cfg, ds, table)
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)
    if partition_error is not None:
        raise click.ClickException(str(partition_error))
    if any(v.value is Verdict.UNDECIDED for v in table.cells.values()):
        sys.exit(EXIT_UNDECIDED)


SUITE_DEFAULT_TYPES = {
    "algebra": ("G2", "F4"),
    "adjoint": ("G2", "F4"),
    "groebner": (None,),
    "pruning": ("G2",),
    "oracle": ("G2", "F4"),
}


@cli.command()
@click.argument("type_arg", metavar="[TYPE]", required=False)
@_type_option
@click.option("--suite", "suites", type=click.Choice(checks.SUITES), multiple=True,
              help="Suite to run (repeatable; default: all).")
@click.option("--p", type=click.IntRange(2, 3), default=None, envvar=_env("P"), help="Only this prime (default: 2 and 3).")
@click.option("--seed", type=int, default=0, show_default=True, envvar=_env("SEED"))
@click.option("--samples", type=click.IntRange(min=1), default=None, help="Override the sample count of random suites.")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True, envvar=_env("WORKERS"))
def verify(type_arg, type_opt, suites, p, seed, samples, workers):
    """Run the self-check suites."""
    t = _resolve_type(type_arg, type_opt, required=False)
    primes = (p,) if p else (2, 3)
    results: list[checks.Check] = []
    for suite in suites or checks.SUITES:
        for tl in ((t,) if t and suite != "groebner" else SUITE_DEFAULT_TYPES[suite]):
            for q in primes:
                extra = {"samples": samples} if samples else {}
                if suite == "algebra":
                    found = checks.algebra_suite(tl, q)
                elif suite == "adjoint":
                    found = checks.adjoint_suite(tl, q, seed, **extra)
                elif suite == "groebner":
                    found = checks.groebner_suite(q, seed, **extra)
                elif suite == "pruning":
                    found = checks.pruning_suite(tl, q, workers)
                else:
                    found = checks.oracle_suite(tl, q, seed, **extra)
                for c in found:
                    click.echo(f"[{suite}] {c.line()}")
                results.extend(found)
    failed = sum(1 for c in results if not c.ok)
    click.echo(f"{len(results) - failed} passed, {failed} failed (seed {seed})")
    if failed:
        sys.exit(EXIT_UNDECIDED)


def main(argv: list[str] | None = None) -> int:
    """Console entry point; returns the process exit status."""
    try:
        cli.main(args=argv, prog_name="nilpieces", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_ERROR
    except click.ClickException as exc:
        exc.show()
        return EXIT_ERROR
    except SystemExit as exc:
        return int(exc.code or 0)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
