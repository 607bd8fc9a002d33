"""Batch screening workflow and command line.

For each manifold file: solve the complete structure, evaluate each cusp's
parameter there, recognize its field by integer-relation detection, apply
the rigid-field test, and — only for rigid-compatible cusps — run the
isolation test.  The per-manifold verdict summarizes the two obstructions:

    FailsRigidField          every cusp fails the rigid-field test
    RigidFieldButNotIsolated some rigid-compatible cusp is certified
                             non-isolated
    Undetermined             anything else

Both verdicts bound the hidden-symmetry phenomenon for fillings; the tool
reports obstructions only and never claims a manifold *has* hidden
symmetries.  All numeric recognition is tagged "non-verified computation":
it is high-confidence evidence, not certified arithmetic.

Reports serialize deterministically (fixed seed and precision give
byte-identical JSON) and aggregate into a CSV summary.

The `cuspforge` executable exposes subcommands solve | shape | field |
isolate | fill | screen; run `cuspforge --help` for flags.  Bare manifold
names resolve against the bundled fixtures, or against the directory in
the CUSPFORGE_FIXTURES environment variable when set.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import pathlib
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from mpmath import mp

from . import __version__
from .holonomy import cusp_parameter, evaluate_cusp_parameter
from .isolation import IsolationEvidence, isolation_verdict
from .manifold import IdealTriangulation, parse_triangulation, TriangulationError
from .numberlab import FieldClass, MinPoly, classify_field, algdep, rigid_compatible
from .solver import SolveError, SolveResult, solve_complete, solve_filled

NON_VERIFIED_TAG = "non-verified computation"

FAILS_RIGID = "FailsRigidField"
RIGID_NOT_ISOLATED = "RigidFieldButNotIsolated"
UNDETERMINED = "Undetermined"


@dataclass
class ScreenOptions:
    precision_bits: int = 256
    max_degree: int = 12
    tolerance: float | None = None
    seed: int = 0
    parallelism: int = 1

    def provenance(self) -> dict:
        return {
            "tool": "cuspforge",
            "version": __version__,
            "precision_bits": self.precision_bits,
            "max_degree": self.max_degree,
            "seed": self.seed,
            "tag": NON_VERIFIED_TAG,
        }


@dataclass
class CuspRecord:
    name: str
    shape: dict | None = None            # {"re": ..., "im": ...} decimal strings
    minpoly: MinPoly | None = None
    field: FieldClass | None = None
    rigid: bool = False
    isolation: IsolationEvidence | None = None
    error: str | None = None

    def to_jsonable(self) -> dict:
        return {
            "cusp": self.name,
            "shape": self.shape,
            "minpoly": None if self.minpoly is None else self.minpoly.to_jsonable(),
            "field": None if self.field is None else self.field.to_jsonable(),
            "rigid_compatible": self.rigid,
            "isolation": None if self.isolation is None else self.isolation.to_jsonable(),
            "error": self.error,
        }


@dataclass
class ScreenReport:
    manifold: str
    source: str
    verdict: str
    cusps: list[CuspRecord] = field(default_factory=list)
    filling: list | None = None
    solve: dict | None = None
    provenance: dict = field(default_factory=dict)
    error: str | None = None

    def to_jsonable(self) -> dict:
        return {
            "manifold": self.manifold,
            "source": self.source,
            "verdict": self.verdict,
            "filling": self.filling,
            "cusps": [c.to_jsonable() for c in self.cusps],
            "solve": self.solve,
            "provenance": self.provenance,
            "error": self.error,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_jsonable(), sort_keys=True, indent=1)


def _audit(report: ScreenReport) -> ScreenReport:
    """Verdict consistency rules, enforced before any report is emitted."""
    records = [c for c in report.cusps if c.error is None]
    if report.verdict == FAILS_RIGID:
        assert records and all(not c.rigid for c in records), \
            "FailsRigidField requires every screened cusp to fail the rigid test"
    if report.verdict == RIGID_NOT_ISOLATED:
        assert any(
            c.rigid and c.isolation is not None and c.isolation.not_isolated
            for c in records
        ), "RigidFieldButNotIsolated requires certified non-isolation evidence"
    return report


def _verdict(records: list[CuspRecord]) -> str:
    usable = [c for c in records if c.error is None]
    if not usable:
        return UNDETERMINED
    if all(not c.rigid for c in usable):
        return FAILS_RIGID
    if any(c.rigid and c.isolation is not None and c.isolation.not_isolated for c in usable):
        return RIGID_NOT_ISOLATED
    return UNDETERMINED


def _shape_strings(value, precision_bits) -> dict:
    digits = max(8, int(precision_bits * 0.3010) - 2)
    return {"re": mp.nstr(value.real, digits), "im": mp.nstr(value.imag, digits)}


def screen_triangulation(tri: IdealTriangulation, source: str,
                         options: ScreenOptions,
                         run_isolation: bool = True,
                         solved: SolveResult | None = None,
                         filling: list | None = None) -> ScreenReport:
    """Screen one (possibly filled) triangulation; never raises on solver
    or recognition failure, recording errors in the report instead."""
    report = ScreenReport(
        manifold=tri.name, source=source, verdict=UNDETERMINED,
        filling=filling, provenance=options.provenance(),
    )
    with mp.workprec(options.precision_bits + 30):
        try:
            if solved is None:
                solved = solve_complete(tri, options.precision_bits, seed=options.seed)
            report.solve = solved.to_jsonable()
            if not solved.success:
                report.error = "solver did not reach the residual target"
                return _audit(report)
        except SolveError as exc:
            report.error = f"solve failed: {exc}"
            return _audit(report)

        unfilled = [i for i, c in enumerate(tri.cusps)
                    if filling is None or filling[i] in (None, "complete")]
        for i in unfilled:
            cusp = tri.cusps[i]
            rec = CuspRecord(name=cusp.name)
            report.cusps.append(rec)
            try:
                pair = cusp_parameter(tri, cusp)
                value = evaluate_cusp_parameter(pair, solved.shapes)
                rec.shape = _shape_strings(value, options.precision_bits)
                rec.minpoly = algdep(value, options.max_degree, options.precision_bits)
                rec.field = classify_field(rec.minpoly)
                rec.rigid = rigid_compatible(rec.field)
                if rec.rigid and run_isolation and filling is None:
                    rec.isolation = isolation_verdict(
                        tri, i, precision_bits=options.precision_bits,
                        seed=options.seed, start=solved)
            except (SolveError, ZeroDivisionError, ValueError) as exc:
                rec.error = str(exc)
    report.verdict = _verdict(report.cusps)
    return _audit(report)


def _screen_one(args):
    path, text, options = args
    try:
        tri = parse_triangulation(text)
    except TriangulationError as exc:
        report = ScreenReport(
            manifold=pathlib.Path(path).stem, source=str(path), verdict=UNDETERMINED,
            provenance=options.provenance(), error=f"parse failed: {exc}",
        )
        report.parse_failed = True
        return report
    return screen_triangulation(tri, str(path), options)


def screen(paths, options: ScreenOptions | None = None) -> list[ScreenReport]:
    """Screen a batch of triangulation files.  Parse failures and solver
    failures are recorded per report; the batch always completes."""
    options = options or ScreenOptions()
    jobs = []
    for path in paths:
        try:
            text = pathlib.Path(path).read_text()
        except OSError as exc:
            report = ScreenReport(
                manifold=pathlib.Path(path).stem, source=str(path),
                verdict=UNDETERMINED, provenance=options.provenance(),
                error=f"parse failed: cannot read file: {exc}",
            )
            report.parse_failed = True
            jobs.append(report)
            continue
        jobs.append((str(path), text, options))
    pending = [j for j in jobs if isinstance(j, tuple)]
    if options.parallelism > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=options.parallelism) as pool:
            results = {j[0]: r for j, r in zip(pending, pool.map(_screen_one, pending))}
    else:
        results = {j[0]: _screen_one(j) for j in pending}
    out = []
    for j in jobs:
        out.append(j if isinstance(j, ScreenReport) else results[j[0]])
    return out


def fill_and_screen(path_or_tri, cusp: int, n_values,
                    options: ScreenOptions | None = None) -> list[ScreenReport]:
    """Screen the remaining cusps of each (1, n) filling of one cusp.

    Solver failures for individual fillings become error reports; there is
    no isolation leg for a filled (one-cusped) result, so a filled report's
    verdict is FailsRigidField or Undetermined.
    """
    options = options or ScreenOptions()
    if isinstance(path_or_tri, IdealTriangulation):
        tri, source = path_or_tri, path_or_tri.name
    else:
        tri = parse_triangulation(pathlib.Path(path_or_tri).read_text())
        source = str(path_or_tri)
    reports = []
    for n in n_values:
        filling = [None] * len(tri.cusps)
        filling[cusp] = (1, n)
        label = f"{tri.name}({tri.cusps[cusp].name}=1/{n})"
        try:
            solved = solve_filled(tri, filling, options.precision_bits, seed=options.seed)
        except SolveError as exc:
            reports.append(ScreenReport(
                manifold=label, source=source, verdict=UNDETERMINED,
                filling=[list(f) if f else None for f in filling],
                provenance=options.provenance(),
                error=f"filled solve failed: {exc}",
            ))
            continue
        report = screen_triangulation(
            tri, source, options, run_isolation=False, solved=solved,
            filling=[list(f) if f else None for f in filling])
        report.manifold = label
        reports.append(report)
    return reports


# ---------------------------------------------------------------------------
# output formatting

CSV_COLUMNS = ["manifold", "cusp", "field", "rigid_compatible", "isolation", "verdict", "tag"]


def reports_to_csv(reports: list[ScreenReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rep in reports:
        if not rep.cusps:
            writer.writerow([rep.manifold, "", "", "", "", rep.verdict, NON_VERIFIED_TAG])
        for rec in rep.cusps:
            iso = ""
            if rec.isolation is not None:
                iso = rec.isolation.verdict
                if rec.isolation.order is not None:
                    iso += f"(order {rec.isolation.order})"
                elif rec.isolation.not_isolated:
                    iso += "(continuation)"
            writer.writerow([
                rep.manifold, rec.name,
                "" if rec.field is None else str(rec.field),
                rec.rigid, iso, rep.verdict, NON_VERIFIED_TAG,
            ])
    return buf.getvalue()


def reports_to_table(reports: list[ScreenReport]) -> str:
    lines = []
    for rep in reports:
        head = f"{rep.manifold}: {rep.verdict}"
        if rep.error:
            head += f"  [{rep.error}]"
        lines.append(head)
        for rec in rep.cusps:
            iso = "-"
            if rec.isolation is not None:
                iso = rec.isolation.verdict
                if rec.isolation.order is not None:
                    iso += f"(order {rec.isolation.order})"
            shape = "-"
            if rec.shape:
                shape = f"{rec.shape['re'][:12]}{'+' if not rec.shape['im'].startswith('-') else ''}{rec.shape['im'][:12]}i"
            field_name = str(rec.field) if rec.field else "-"
            err = f"  [{rec.error}]" if rec.error else ""
            lines.append(f"  {rec.name}: shape={shape} field={field_name} "
                         f"rigid={rec.rigid} isolation={iso}{err}")
        lines.append(f"  ({NON_VERIFIED_TAG})")
    return "\n".join(lines)


def write_reports(reports: list[ScreenReport], out_dir) -> None:
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for rep in reports:
        safe = rep.manifold.replace("/", "_").replace("(", "_").replace(")", "").replace("=", "_")
        (out / f"{safe}.report.json").write_text(rep.to_json() + "\n")
    (out / "summary.csv").write_text(reports_to_csv(reports))


# ---------------------------------------------------------------------------
# CLI

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def fixture_dir() -> pathlib.Path:
    env = os.environ.get("CUSPFORGE_FIXTURES")
    if env:
        return pathlib.Path(env)
    return pathlib.Path(__file__).parent / "fixtures"


def resolve_input(name: str) -> pathlib.Path:
    p = pathlib.Path(name)
    if p.exists():
        return p
    candidate = fixture_dir() / f"{name}.json"
    if candidate.exists():
        return candidate
    return p  # let downstream report the missing file


def _load(name: str) -> IdealTriangulation:
    return parse_triangulation(resolve_input(name).read_text())


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision-bits", type=int, default=256)
    common.add_argument("--max-degree", type=int, default=12)
    common.add_argument("--tolerance", type=float, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", type=str, default=None, help="directory for report files")
    common.add_argument("--format", choices=["json", "csv", "table"], default="table")
    common.add_argument("--parallel", type=int, default=1)

    parser = _Parser(prog="cuspforge", description=(
        "Hyperbolic structures, cusp fields, and hidden-symmetry "
        "obstructions for decorated ideal triangulations."))
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("solve", "complete hyperbolic structure"),
        ("shape", "cusp parameter values at the complete structure"),
        ("field", "cusp fields via integer-relation detection"),
        ("isolate", "geometric-isolation evidence per cusp"),
        ("screen", "full screening reports"),
    ]:
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.add_argument("manifolds", nargs="+")
        if name == "isolate":
            p.add_argument("--cusp", type=int, default=None)
    p = sub.add_parser("fill", help="screen (1, n) fillings of one cusp", parents=[common])
    p.add_argument("manifold")
    p.add_argument("--cusp", type=int, required=True)
    p.add_argument("--n-range", type=str, default="-3:3",
                   help="inclusive range a:b of filling integers n (0 skipped)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    options = ScreenOptions(
        precision_bits=args.precision_bits, max_degree=args.max_degree,
        tolerance=args.tolerance, seed=args.seed, parallelism=args.parallel)

    with mp.workprec(options.precision_bits + 30):
        try:
            code = _dispatch(args, options)
        except TriangulationError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    return code


def _dispatch(args, options: ScreenOptions) -> int:
    digits = max(8, int(options.precision_bits * 0.3010) - 2)

    if args.command == "solve":
        for name in args.manifolds:
            tri = _load(name)
            try:
                result = solve_complete(tri, options.precision_bits, seed=options.seed)
            except SolveError as exc:
                print(f"{tri.name}: solve failed: {exc}")
                continue
            print(f"{tri.name}: residual={mp.nstr(result.residual, 6)} "
                  f"geometric={result.geometric}")
            for i, z in enumerate(result.shapes.z):
                print(f"  z{i} = {mp.nstr(z, digits)}")
        return 0

    if args.command == "shape":
        for name in args.manifolds:
            tri = _load(name)
            result = solve_complete(tri, options.precision_bits, seed=options.seed)
            for cusp in tri.cusps:
                value = evaluate_cusp_parameter(cusp_parameter(tri, cusp), result.shapes)
                print(f"{tri.name}.{cusp.name}: {mp.nstr(value, digits)}")
        return 0

    if args.command == "field":
        for name in args.manifolds:
            tri = _load(name)
            result = solve_complete(tri, options.precision_bits, seed=options.seed)
            for cusp in tri.cusps:
                value = evaluate_cusp_parameter(cusp_parameter(tri, cusp), result.shapes)
                poly = algdep(value, options.max_degree, options.precision_bits)
                fc = classify_field(poly)
                print(f"{tri.name}.{cusp.name}: minpoly={poly} field={fc} "
                      f"rigid_compatible={rigid_compatible(fc)} ({NON_VERIFIED_TAG})")
        return 0

    if args.command == "isolate":
        for name in args.manifolds:
            tri = _load(name)
            indices = range(len(tri.cusps)) if args.cusp is None else [args.cusp]
            for i in indices:
                ev = isolation_verdict(tri, i, precision_bits=options.precision_bits,
                                       seed=options.seed)
                order = f" at order {ev.order}" if ev.order else ""
                print(f"{tri.name}.{tri.cusps[i].name}: {ev.verdict}{order} "
                      f"|d_tau|={mp.nstr(abs(ev.d_tau), 6)} "
                      f"|d2_tau|={'-' if ev.d2_tau is None else mp.nstr(abs(ev.d2_tau), 6)}")
        return 0

    if args.command == "fill":
        lo, hi = (int(t) for t in args.n_range.split(":"))
        n_values = [n for n in range(lo, hi + 1) if n != 0]
        tri = _load(args.manifold)
        reports = fill_and_screen(tri, args.cusp, n_values, options)
        return _emit(reports, args)

    if args.command == "screen":
        paths = [resolve_input(name) for name in args.manifolds]
        reports = screen(paths, options)
        code = 2 if any(getattr(r, "parse_failed", False) for r in reports) else 0
        emit_code = _emit(reports, args)
        return code or emit_code

    return 1


def _emit(reports, args) -> int:
    if args.out:
        write_reports(reports, args.out)
        print(f"wrote {len(reports)} report(s) to {args.out}")
    elif args.format == "json":
        print(json.dumps([r.to_jsonable() for r in reports], sort_keys=True, indent=1))
    elif args.format == "csv":
        sys.stdout.write(reports_to_csv(reports))
    else:
        print(reports_to_table(reports))
    return 0


if __name__ == "__main__":
    sys.exit(main())
