"""Command line interface: moddeg <subcommand> [options].

Exit codes: 0 when nothing failed, 1 when some verdict is a fail, 2 for
usage or data errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

import jsonschema

from .. import experiments, watkins
from ..elliptic import CurveQ, NotSemistableError
from ..gross import (
    DegreeMismatchError,
    InconsistentEigenvalueError,
    InvariantError,
    NeedsMoreHeckeError,
    brandt_matrix,
    enumerate_supersingular,
    genus_x0,
    hecke_eigenvector,
    sp_count,
)
from ..lfunc import DEFAULT_PRIME_BOUND, OutOfScopeError, moddeg_estimate
from ..numth import is_prime
from . import reports
from .lmfdb import MappingError, fetch_lmfdb
from .tables import CurveRecordRow, TableError, load_curves, serialize, shipped_table


class UsageError(Exception):
    pass


EIGEN_ERRORS = (InvariantError, InconsistentEigenvalueError, NeedsMoreHeckeError, DegreeMismatchError)


# -- helpers --------------------------------------------------------------


def _rows(args) -> list[CurveRecordRow]:
    rows = load_curves(args.db)
    lo = getattr(args, "min_conductor", None)
    hi = getattr(args, "max_conductor", None)
    return [r for r in rows if (lo is None or r.conductor >= lo) and (hi is None or r.conductor <= hi)]


def _curve(args) -> CurveQ:
    if getattr(args, "ainvs", None):
        try:
            ainvs = [int(x) for x in args.ainvs.split(",")]
        except ValueError:
            raise UsageError("--ainvs must be five comma-separated integers") from None
        if len(ainvs) != 5:
            raise UsageError("--ainvs must have five entries")
        return CurveQ.from_ainvs(ainvs)
    if not args.curve:
        raise UsageError("give --curve LABEL or --ainvs a1,a2,a3,a4,a6")
    for r in load_curves(args.db):
        if r.label == args.curve:
            return r.curve()
    raise UsageError(f"curve {args.curve} not in {args.db}")


def _fan_out(fn: Callable, items: Sequence, workers: int) -> list:
    """fn over items, results in item order whatever the worker count."""
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(fn, items, chunksize=max(1, len(items) // (8 * workers))))
    return [fn(x) for x in items]


def _emit(args, command: str, params: dict, results: list[dict], text: list[str],
          inputs: Sequence[Path] = ()) -> int:
    rep = reports.make_report(command, params, results, inputs)
    out = reports.dumps(rep)
    if args.out:
        Path(args.out).write_text(out)
    if args.json:
        sys.stdout.write(out)
    else:
        for line in text:
            print(line)
    return 1 if reports.failures(rep) else 0


def _summary_line(results: list[dict]) -> str:
    counts = {v: 0 for v in reports.VERDICTS}
    for r in results:
        if r.get("verdict") in counts:
            counts[r["verdict"]] += 1
    return f"{len(results)} checked: " + ", ".join(f"{counts[v]} {v}" for v in reports.VERDICTS)


def _verdict_lines(results: list[dict], verbose: bool) -> list[str]:
    lines = []
    for r in results:
        if verbose or r["verdict"] == "fail":
            wit = " ".join(f"{k}={json.dumps(v)}" for k, v in r["witnesses"])
            lines.append(f"{r['label']}\t{r['verdict']}\t{wit}")
    return lines + [_summary_line(results)]


# -- per-record jobs (top level so they pickle) ---------------------------


def _job_watkins(row: CurveRecordRow) -> dict:
    return watkins.check_watkins(row.curve()).as_json()


def _job_al(row: CurveRecordRow) -> dict:
    prof, rep = watkins.al_lower_bound(row.curve())
    return rep.as_json()


def _job_cp22(row: CurveRecordRow) -> dict:
    return watkins.check_cp22_cases(row.curve()).as_json()


def _job_sszero(row: CurveRecordRow) -> dict:
    E = row.curve()
    try:
        return watkins.supersingular_zeroes_scan(E).as_json()
    except EIGEN_ERRORS as exc:
        return watkins.VerdictReport("ss-zeroes", E.label, watkins.Verdict.FAIL,
                                     (("error", type(exc).__name__),), (str(exc),)).as_json()


# -- subcommands ----------------------------------------------------------


def cmd_ss_basis(args) -> int:
    p = args.p
    if not (is_prime(p) and p > 3):
        raise UsageError("--p must be a prime > 3")
    B = enumerate_supersingular(p)
    sp = sp_count(B)
    g = genus_x0(p)
    ok = B.mass() == Fraction(p - 1, 12) and B.n == g + 1
    res = {
        "verdict": "pass" if ok else "fail",
        "basis": B.as_json(),
        "mass": str(B.mass()),
        "genus": g,
        "s_p": sp.s_p,
        "s_p_predicted": sp.predicted,
        "s_p_literal": sp.literal,
        "digest": B.digest(),
    }
    text = [f"p = {p}: {B.n} classes, mass {B.mass()}, genus {g}, s_p = {sp.s_p}"]
    for e in B.entries:
        j = f"{e.j.a}" if e.j.b == 0 else f"{e.j.a} + {e.j.b}t"
        text.append(f"  j = {j}\tw = {e.w}")
    return _emit(args, "ss-basis", {"p": p}, [res], text)


def cmd_brandt(args) -> int:
    if not (is_prime(args.p) and args.p > 3):
        raise UsageError("--p must be a prime > 3")
    try:
        B = brandt_matrix(args.p, args.ell)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    basis = enumerate_supersingular(args.p)
    ok = all(s == args.ell + 1 for s in B.row_sums()) and B.is_self_adjoint(basis.weights)
    res = {"verdict": "pass" if ok else "fail", **B.as_json(), "row_sums": B.row_sums(),
           "weights": list(basis.weights)}
    text = [" ".join(f"{x:3d}" for x in row) for row in B.M]
    return _emit(args, "brandt", {"p": args.p, "ell": args.ell}, [res], text)


def cmd_eigenvector(args) -> int:
    E = _curve(args)
    try:
        rec = hecke_eigenvector(E)
        res = {"verdict": "pass", **rec.as_json()}
        text = [f"v = {list(rec.v)}", f"<v,v> = {rec.pairing}, torsion {rec.torsion}"]
    except EIGEN_ERRORS as exc:
        res = {"verdict": "fail", "label": E.label, "error": str(exc)}
        text = [str(exc)]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return _emit(args, "eigenvector", {"curve": E.label or list(E.ainvs)}, [res], text, [args.db])


def cmd_moddeg(args) -> int:
    E = _curve(args)
    known = E.ingested.modular_degree
    try:
        rec = hecke_eigenvector(E)
    except EIGEN_ERRORS as exc:
        res = {"verdict": "fail", "label": E.label, "error": str(exc)}
        return _emit(args, "moddeg", {"curve": E.label}, [res], [str(exc)], [args.db])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    m = rec.modular_degree
    verdict = "pass" if known is None or known == m else "fail"
    res = {"verdict": verdict, "label": E.label, "modular_degree": m, "table_degree": known,
           "pairing": rec.pairing, "torsion": rec.torsion}
    return _emit(args, "moddeg", {"curve": E.label or list(E.ainvs)}, [res], [str(m)], [args.db])


def cmd_moddeg_estimate(args) -> int:
    E = _curve(args)
    try:
        est = moddeg_estimate(E, args.prime_bound)
    except (OutOfScopeError, NotSemistableError) as exc:
        raise UsageError(str(exc)) from None
    known = E.ingested.modular_degree
    verdict = "needs-data" if known is None else ("pass" if known == est.rounded else "fail")
    res = {"verdict": verdict, "table_degree": known, **est.as_json()}
    text = [f"{est.estimate:.6f} -> {est.rounded}"]
    text += [f"  P = {cut}: {val:.6f}" for cut, val in est.diagnostic()]
    params = {"curve": E.label or list(E.ainvs), "prime_bound": args.prime_bound}
    return _emit(args, "moddeg-estimate", params, [res], text, [args.db])


def _record_scan(args, command: str, job: Callable, rows: list[CurveRecordRow], params: dict) -> int:
    results = _fan_out(job, rows, args.workers)
    return _emit(args, command, params, results, _verdict_lines(results, args.verbose), [args.db])


def cmd_watkins_scan(args) -> int:
    rows = _rows(args)
    params = {"min_conductor": args.min_conductor, "max_conductor": args.max_conductor}
    return _record_scan(args, "watkins-scan", _job_watkins, rows, params)


def _optimal_rows(args) -> list[CurveRecordRow]:
    rows = _rows(args)
    if args.curve:
        rows = [r for r in rows if r.label == args.curve]
        if not rows:
            raise UsageError(f"curve {args.curve} not in {args.db}")
        return rows
    return [r for r in rows if r.degree is not None]


def cmd_al_bound(args) -> int:
    params = {"curve": args.curve, "max_conductor": args.max_conductor}
    return _record_scan(args, "al-bound", _job_al, _optimal_rows(args), params)


def cmd_cp22(args) -> int:
    params = {"curve": args.curve, "max_conductor": args.max_conductor}
    return _record_scan(args, "cp22", _job_cp22, _optimal_rows(args), params)


def cmd_ss_zeroes(args) -> int:
    rows = [r for r in _optimal_rows(args) if is_prime(r.conductor) and r.conductor > 3
            and (args.curve or r.rank >= 1)]
    params = {"curve": args.curve, "max_conductor": args.max_conductor}
    return _record_scan(args, "ss-zeroes", _job_sszero, rows, params)


def cmd_odd_audit(args) -> int:
    curves = [r.curve() for r in _rows(args)]
    results = [r.as_json() for r in watkins.odd_degree_audit(curves)]
    results = [r for r in results if args.verbose or r["verdict"] != "inapplicable"]
    params = {"max_conductor": args.max_conductor}
    return _emit(args, "odd-audit", params, results, _verdict_lines(results, args.verbose), [args.db])


def cmd_twist_bound(args) -> int:
    E = _curve(args)
    curves = [r.curve() for r in load_curves(args.db)]
    results = []
    text = []
    for D in args.D:
        try:
            tb, rep = watkins.check_twist_bound(E, D, watkins.find_twist(E, D, curves))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        results.append(rep.as_json())
        text.append(f"D = {D}: bound {tb.bound} (floor {tb.floor}) {rep.verdict.value}")
    return _emit(args, "twist-bound", {"curve": E.label, "D": args.D}, results, text, [args.db])


def cmd_density_scan(args) -> int:
    if args.curve or args.ainvs:
        E = _curve(args)
        res, rep = watkins.even_ap_density(E, args.bound)
        out = rep.as_json()
        text = [f"{E.label}: {_summary_line([out])}"]
        if res:
            text.append(f"even a_p: {res.even}/{res.total} = {float(res.observed):.4f}, "
                        f"expected {res.expected}")
        params = {"curve": E.label or list(E.ainvs), "bound": args.bound}
        return _emit(args, "density-scan", params, [out], text, [args.db])
    try:
        s = experiments.density_omega_scan(args.x, args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = [f"x = {r['x']}: {r['omega_ge_2']}/{r['pairs']} = {float(r['proportion']):.6f}"
            for r in s.trend]
    return _emit(args, "density-scan", {"x": args.x}, [s.as_json()], text)


def cmd_avg_scan(args) -> int:
    s = experiments.avg_rank_vs_avg_nu2([r.curve() for r in _rows(args)], args.slices)
    text = [f"avg rank {float(s.ratios['avg_rank']):.6f} <= avg nu2 "
            f"{float(s.ratios['avg_nu2']):.6f}: {s.verdict}"]
    for row in s.trend:
        text.append(f"  N {row['conductor_min']}..{row['conductor_max']} ({row['records']}): "
                    f"{float(row['avg_rank']):.4f} vs {float(row['avg_nu2']):.4f}")
    params = {"max_conductor": args.max_conductor, "slices": args.slices}
    return _emit(args, "avg-scan", params, [s.as_json()], text, [args.db])


def cmd_growth_scan(args) -> int:
    s = experiments.growth_scan([r.curve() for r in _rows(args)], args.epsilon)
    st = s.statistics
    text = [f"slope {st['slope']:.4f}, max exponent {st['max_exponent']:.4f} "
            f"({s.extra['max_exponent_attained_by']}), above N^(2+eps): "
            f"{s.counters['above_upper']}: {s.verdict}"]
    params = {"max_conductor": args.max_conductor, "epsilon": args.epsilon}
    return _emit(args, "growth-scan", params, [s.as_json()], text, [args.db])


def cmd_fetch(args) -> int:
    try:
        got = fetch_lmfdb(args.min_conductor, args.max_conductor, network=args.network,
                          cache_dir=Path(args.cache_dir) if args.cache_dir else None)
    except MappingError as exc:
        raise UsageError(str(exc)) from None
    csv_text = serialize(got)
    if args.csv:
        Path(args.csv).write_text(csv_text)
    results = [
        {"verdict": None, "label": r.label, "ainvs": list(r.ainvs), "conductor": r.conductor,
         "rank": r.rank, "torsion": r.torsion, "degree": r.degree}
        for r in got
    ]
    results += [{"verdict": "needs-data", "conductor": N} for N in got.missing]
    params = {"min_conductor": args.min_conductor, "max_conductor": args.max_conductor}
    digest = reports.input_hash(extra=csv_text.encode())
    rep = reports.make_report("fetch", params, results, digest=digest)
    out = reports.dumps(rep)
    if args.out:
        Path(args.out).write_text(out)
    if args.json:
        sys.stdout.write(out)
    elif not args.csv:
        sys.stdout.write(csv_text)
    if got.missing:
        print(f"no cached data for conductors {got.missing}", file=sys.stderr)
    return 0


def cmd_report(args) -> int:
    worst = 0
    for path in args.files:
        try:
            rep = json.loads(Path(path).read_text())
            reports.validate(rep)
        except (OSError, ValueError, jsonschema.ValidationError) as exc:
            print(f"{path}: invalid report: {str(exc).splitlines()[0]}")
            worst = 2
            continue
        s = rep["summary"]
        print(f"{path}: {rep['command']} {json.dumps(rep['parameters'], sort_keys=True)} "
              + ", ".join(f"{s[v]} {v}" for v in reports.VERDICTS))
        if s["fail"] and worst == 0:
            worst = 1
    return worst


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="moddeg", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help, curve=False, db=True, conductors=False, workers=False):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=fn)
        p.add_argument("--json", action="store_true", help="print the JSON report")
        p.add_argument("--out", help="also write the JSON report to this file")
        p.add_argument("-v", "--verbose", action="store_true")
        if db:
            p.add_argument("--db", default=str(shipped_table()), help="curve table (CSV)")
        if curve:
            p.add_argument("--curve", help="label in the table")
            p.add_argument("--ainvs", help="a1,a2,a3,a4,a6 instead of a label")
        if conductors:
            p.add_argument("--min-conductor", type=int)
            p.add_argument("--max-conductor", type=int)
        p.add_argument("--workers", type=int, default=1)
        return p

    p = add("ss-basis", cmd_ss_basis, "supersingular basis mod p", db=False)
    p.add_argument("--p", type=int, required=True)
    p = add("brandt", cmd_brandt, "Brandt matrix B(l) mod p", db=False)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    add("eigenvector", cmd_eigenvector, "Hecke eigenvector v_E", curve=True)
    add("moddeg", cmd_moddeg, "exact modular degree (prime conductor)", curve=True)
    p = add("moddeg-estimate", cmd_moddeg_estimate, "symmetric-square estimate", curve=True)
    p.add_argument("--prime-bound", type=int, default=DEFAULT_PRIME_BOUND)
    add("watkins-scan", cmd_watkins_scan, "2^rank | m_E over a table", conductors=True)
    add("al-bound", cmd_al_bound, "Atkin-Lehner lower bound", curve=True, conductors=True)
    add("cp22", cmd_cp22, "case analysis for rational 2-torsion", curve=True, conductors=True)
    p = add("ss-zeroes", cmd_ss_zeroes, "parity of v_E on F_p-rational classes",
            curve=True, conductors=True)
    p.set_defaults(max_conductor=400)
    add("odd-audit", cmd_odd_audit, "audit odd modular degrees", conductors=True)
    p = add("twist-bound", cmd_twist_bound, "2-adic bound for quadratic twists", curve=True)
    p.add_argument("--D", type=int, nargs="+", required=True)
    p = add("density-scan", cmd_density_scan,
            "omega density of discriminants, or even a_p density with --curve", curve=True)
    p.add_argument("--x", type=int, default=8, help="height cutoff for the omega scan")
    p.add_argument("--bound", type=int, default=10**5, help="prime bound for even a_p")
    p = add("avg-scan", cmd_avg_scan, "average rank against average nu2(m_E)", conductors=True)
    p.add_argument("--slices", type=int, default=10)
    p = add("growth-scan", cmd_growth_scan, "growth of m_E in N", conductors=True)
    p.add_argument("--epsilon", type=float, default=experiments.GROWTH_EPSILON)
    p = add("fetch", cmd_fetch, "curves from the LMFDB (cache first)", db=False)
    p.add_argument("--min-conductor", type=int, required=True)
    p.add_argument("--max-conductor", type=int, required=True)
    p.add_argument("--network", action="store_true", help="allow network access")
    p.add_argument("--cache-dir")
    p.add_argument("--csv", help="write the records to this CSV file")
    p = sub.add_parser("report", help="validate and summarize saved reports")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, TableError) as exc:
        print(f"moddeg {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
