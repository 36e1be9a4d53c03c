"""Command-line front end: classify, sweep, witness, dual and selftest."""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import qchannel
from .classify import auto, search
from .classify.verdict import EaVerdict, SearchBudget, Status
from .errors import DomainError, SpecParseError
from .families import parse_family_spec

EXIT_EA, EXIT_NOT_EA, EXIT_UNDECIDED = 0, 1, 2
EXIT_USAGE = 64
EXIT_CANTCREAT = 73
NOT_CHANNEL = "NotChannel"

_EXIT = {Status.EA: EXIT_EA, Status.NOT_EA: EXIT_NOT_EA, Status.UNDECIDED: EXIT_UNDECIDED}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# Sweep specification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Axis:
    name: str
    start: Fraction
    stop: Fraction
    num: int

    def values(self) -> list[Fraction]:
        step = (self.stop - self.start) / (self.num - 1)
        return [self.start + k * step for k in range(self.num)]


def parse_axis(text: str) -> Axis:
    """``NAME=START,STOP,NUM``; bounds may be fractions such as -1/3."""
    name, eq, rest = text.partition("=")
    name = name.strip()
    if not eq or not re.fullmatch(r"[A-Za-z_]\w*", name):
        raise SpecParseError(f"bad axis {text!r}; expected NAME=START,STOP,NUM", text)
    parts = rest.split(",")
    if len(parts) != 3:
        raise SpecParseError(f"axis {name} needs START,STOP,NUM", rest)
    try:
        start, stop = Fraction(parts[0].strip()), Fraction(parts[1].strip())
    except (ValueError, ZeroDivisionError):
        raise SpecParseError(f"bad axis bound in {rest!r}", rest) from None
    try:
        num = int(parts[2])
    except ValueError:
        raise SpecParseError(f"bad axis resolution {parts[2]!r}", parts[2]) from None
    if num < 2:
        raise SpecParseError(f"axis {name} needs at least 2 points", parts[2])
    return Axis(name, start, stop, num)


def _placeholders(template: str) -> set[str]:
    return set(re.findall(r"\{([A-Za-z_]\w*)\}", template))


def fill_template(template: str, values: dict[str, Fraction]) -> str:
    """Replace ``{name}`` by the exact value; other braces are left alone."""
    return re.sub(r"\{([A-Za-z_]\w*)\}",
                  lambda m: str(values[m.group(1)]) if m.group(1) in values else m.group(0),
                  template)


@dataclass(frozen=True)
class SweepSpec:
    templates: tuple[str, ...]
    axes: tuple[Axis, ...]
    budget: SearchBudget
    method: str = "auto"
    fmt: str = "csv"
    out: str = "-"

    def __post_init__(self):
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise SpecParseError("duplicate axis name", ",".join(names))
        used = set().union(*(_placeholders(t) for t in self.templates))
        unknown = used - set(names)
        if unknown:
            name = sorted(unknown)[0]
            raise SpecParseError(f"template placeholder {{{name}}} has no axis", name)

    def points(self):
        for combo in itertools.product(*(a.values() for a in self.axes)):
            yield dict(zip((a.name for a in self.axes), combo))


@dataclass
class RegionRow:
    params: dict[str, Fraction]
    status: str
    criterion: str
    min_pt_eig: float | None
    extra: dict[str, str] = field(default_factory=dict)


def _num(x: float | None) -> str:
    if x is None:
        return ""
    return repr(round(float(x), 12) + 0.0)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def classify_pair(ch1, ch2, budget: SearchBudget, method: str = "auto") -> EaVerdict:
    if method == "numeric":
        return search.ea_numeric(_pair_map(ch1, ch2, budget.tol), budget)
    return auto.ea_auto(ch1, ch2, budget)


def _parse_channel(spec: str):
    try:
        return parse_family_spec(spec)
    except DomainError as exc:
        if isinstance(exc, SpecParseError):
            raise
        raise DomainError(f"{spec}: {exc}") from None


_BLOCK = 64


def _pair_map(ch1, ch2, tol: float):
    return qchannel.tensor(qchannel.with_cp_flag(ch1, tol), qchannel.with_cp_flag(ch2, tol))


def _sweep_block(args):
    """Rows for a block of grid points; numeric points share one batched search."""
    templates, block, budget, method = args
    rows: list[RegionRow | None] = []
    pending = []
    for values in block:
        try:
            chans = [_parse_channel(fill_template(t, values)) for t in templates]
        except SpecParseError:
            raise
        except DomainError:
            rows.append(RegionRow(values, NOT_CHANNEL, "", None))
            continue
        if method == "numeric":
            pending.append((len(rows), values, _pair_map(*chans, budget.tol)))
            rows.append(None)
        else:
            v = classify_pair(chans[0], chans[1], budget, method)
            rows.append(RegionRow(values, v.status.value, v.criterion.value, v.min_pt_eig))
    # batched results equal the single-map ones, so blocking does not change the output
    verdicts = search.ea_numeric_batch([m for _, _, m in pending], budget)
    for (k, values, _), v in zip(pending, verdicts):
        rows[k] = RegionRow(values, v.status.value, v.criterion.value, v.min_pt_eig)
    return rows


def _dual_point(args):
    fixed, template, values, budget, method = args
    try:
        probe = _parse_channel(fill_template(template, values))
    except SpecParseError:
        raise
    except DomainError:
        return RegionRow(values, NOT_CHANNEL, "", None)
    verdicts = [classify_pair(f, probe, budget, method) for f in fixed]
    # intersection over the fixed set: any NotEA excludes, all EA includes
    deciding = next((v for v in verdicts if v.status is Status.NOT_EA), None)
    if deciding is None:
        deciding = next((v for v in verdicts if v.status is Status.UNDECIDED), verdicts[0])
    values_seen = [v.min_pt_eig for v in verdicts if v.min_pt_eig is not None]
    extra = {f"fixed{k}_status": v.status.value for k, v in enumerate(verdicts)}
    return RegionRow(values, deciding.status.value, deciding.criterion.value,
                     min(values_seen) if values_seen else None, extra)


def _map(fn, tasks, jobs: int):
    if jobs <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map keeps submission order, so output order is the grid order
        return list(pool.map(fn, tasks))


def render_rows(rows: list[RegionRow], axes: tuple[Axis, ...], fmt: str, meta: dict) -> str:
    names = [a.name for a in axes]
    extra_cols = list(rows[0].extra) if rows else []
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(names + ["status", "criterion", "min_pt_eig"] + extra_cols)
        for r in rows:
            w.writerow([_num(float(r.params[n])) for n in names]
                       + [r.status, r.criterion, _num(r.min_pt_eig)]
                       + [r.extra.get(c, "") for c in extra_cols])
        return buf.getvalue()
    records = []
    for r in rows:
        rec = {"params": {n: round(float(r.params[n]), 12) + 0.0 for n in names},
               "status": r.status, "criterion": r.criterion,
               "min_pt_eig": None if r.min_pt_eig is None else round(float(r.min_pt_eig), 12) + 0.0}
        rec.update(r.extra)
        records.append(rec)
    return json.dumps({**meta, "rows": records}, indent=1) + "\n"


# ---------------------------------------------------------------------------
# Output handling
# ---------------------------------------------------------------------------


def _open_out(path: str):
    """Open the output early so an unwritable path fails before any work."""
    if path == "-":
        return None
    try:
        return open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}", EXIT_CANTCREAT) from None


def _emit(handle, text: str):
    if handle is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with handle:
            handle.write(text)


def _budget(ns) -> SearchBudget:
    try:
        return SearchBudget(grid_points_per_axis=ns.budget_grid, refine_cells=ns.budget_cells,
                            refine_iters=ns.budget_iters, restarts=ns.budget_restarts,
                            seed=ns.seed, tol=ns.tol)
    except (DomainError, ValueError) as exc:
        raise CliError(f"bad budget: {exc}", EXIT_USAGE) from None


def _budget_meta(b: SearchBudget) -> dict:
    return asdict(b)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_classify(ns) -> int:
    budget = _budget(ns)
    handle = _open_out(ns.out)
    ch1, ch2 = _parse_channel(ns.ch1), _parse_channel(ns.ch2)
    v = classify_pair(ch1, ch2, budget, ns.method)
    rec = {"ch1": ns.ch1, "ch2": ns.ch2, **v.to_record()}
    _emit(handle, json.dumps(rec, indent=1) + "\n")
    return _EXIT[v.status]


def cmd_sweep(ns) -> int:
    budget = _budget(ns)
    axes = tuple(parse_axis(a) for a in ns.axis)
    spec = SweepSpec((ns.ch1, ns.ch2), axes, budget, ns.method, ns.format, ns.out)
    handle = _open_out(spec.out)
    points = list(spec.points())
    tasks = [(spec.templates, points[s:s + _BLOCK], budget, spec.method)
             for s in range(0, len(points), _BLOCK)]
    t0 = time.perf_counter()
    rows = [r for block in _map(_sweep_block, tasks, ns.jobs) for r in block]
    meta = {"ch1": ns.ch1, "ch2": ns.ch2, "method": spec.method, "axes": [a.name for a in axes],
            "budget": _budget_meta(budget)}
    _emit(handle, render_rows(rows, axes, spec.fmt, meta))
    print(f"sweep: {len(rows)} points in {time.perf_counter() - t0:.1f} s", file=sys.stderr)
    return 0


def cmd_witness(ns) -> int:
    budget = _budget(ns)
    handle = _open_out(ns.out)
    ch1, ch2 = _parse_channel(ns.ch1), _parse_channel(ns.ch2)
    m = qchannel.tensor(qchannel.with_cp_flag(ch1, budget.tol), qchannel.with_cp_flag(ch2, budget.tol))
    search._require_cp(m, budget.tol)
    res = search.search_min(m, budget, transpose=True)
    check = search.witness_value(m, res.params)
    found = res.value < -budget.tol and check < -budget.tol
    rec = {"ch1": ns.ch1, "ch2": ns.ch2, "witness_found": found,
           "params": res.params.to_record(), "min_pt_eig": res.value,
           "reverified_min_pt_eig": check,
           "reverified": bool(abs(check - res.value) <= 1e-8),
           "evaluations": res.evaluations}
    _emit(handle, json.dumps(rec, indent=1) + "\n")
    return EXIT_NOT_EA if found else EXIT_UNDECIDED


def cmd_dual(ns) -> int:
    budget = _budget(ns)
    axes = tuple(parse_axis(a) for a in ns.axis)
    spec = SweepSpec((ns.probe,), axes, budget, ns.method, ns.format, ns.out)
    handle = _open_out(spec.out)
    fixed = [_parse_channel(f) for f in ns.fixed]
    tasks = [(fixed, ns.probe, values, budget, spec.method) for values in spec.points()]
    rows = _map(_dual_point, tasks, ns.jobs)
    meta = {"fixed": list(ns.fixed), "probe": ns.probe, "method": spec.method,
            "axes": [a.name for a in axes], "budget": _budget_meta(budget)}
    _emit(handle, render_rows(rows, axes, spec.fmt, meta))
    return 0


def cmd_selftest(ns) -> int:
    from . import selftest

    results = selftest.run_selftest(ns.seed)
    for r in results:
        print(r.summary())
        print(f"{r.name}: {r.seconds:.2f} s", file=sys.stderr)
    ok = all(r.passed for r in results)
    print(f"selftest: {sum(r.passed for r in results)}/{len(results)} suites passed")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _budget_flags(p):
    d = SearchBudget()
    p.add_argument("--budget-grid", type=int, default=d.grid_points_per_axis, help="grid points per axis")
    p.add_argument("--budget-restarts", type=int, default=d.restarts, help="random restarts")
    p.add_argument("--budget-cells", type=int, default=d.refine_cells, help="grid cells refined")
    p.add_argument("--budget-iters", type=int, default=d.refine_iters, help="Nelder-Mead iterations")
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--tol", type=float, default=d.tol)
    p.add_argument("--method", choices=("auto", "numeric"), default="auto")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eachannels", description="Entanglement-annihilation checks for local qubit channels.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="classify one channel pair")
    p.add_argument("ch1")
    p.add_argument("ch2")
    p.add_argument("--out", default="-")
    _budget_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sweep", help="classify a parameter grid")
    p.add_argument("--ch1", required=True, help="family spec template, e.g. depol:q={q1}")
    p.add_argument("--ch2", required=True)
    p.add_argument("--axis", action="append", required=True, help="NAME=START,STOP,NUM")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="-")
    p.add_argument("--jobs", type=int, default=1)
    _budget_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("witness", help="search for an entangled-output input state")
    p.add_argument("ch1")
    p.add_argument("ch2")
    p.add_argument("--out", default="-")
    _budget_flags(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("dual", help="sampled EA-dual membership of a probe family")
    p.add_argument("--fixed", action="append", required=True)
    p.add_argument("--probe", required=True)
    p.add_argument("--axis", action="append", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="-")
    p.add_argument("--jobs", type=int, default=1)
    _budget_flags(p)
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("selftest", help="run the built-in consistency suites")
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        return ns.func(ns)
    except SpecParseError as exc:
        print(f"error: {exc} (token: {exc.token!r})", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
