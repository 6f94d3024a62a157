"""Command line interface: ``lhmaass <command> ...``.

Exit codes: 0 success, 2 validation error, 3 numerical tolerance failure,
4 data or fixture error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .errors import DataError, DomainError, LhmaassError

EXIT_OK, EXIT_VALIDATION, EXIT_TOLERANCE, EXIT_DATA = 0, 2, 3, 4


def _frac(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from None


def _exact(v: Fraction) -> str:
    return str(v)


def _params(args, D: int):
    from .localpoly import LocalPolyParams

    if args.level is None or args.d0 is None:
        raise DomainError("--level and --d0 are required")
    return LocalPolyParams(args.k, args.level, D, args.d0, research=args.research)


def _ds(args) -> list[int]:
    if not args.d:
        raise DomainError("at least one --d is required")
    return args.d


def _poly(args):
    from .hecke import PRESET_FOR_LEVEL, HeckePolynomial, get_preset, parse_polynomial

    if getattr(args, "poly", None):
        return parse_polynomial(args.poly)
    name = getattr(args, "preset", None) or PRESET_FOR_LEVEL.get(args.level)
    return get_preset(name) if name else HeckePolynomial(())


def _pool_map(fn, jobs, threads):
    """Order preserving map, in worker processes when ``threads > 1``."""
    if threads <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as ex:
        return list(ex.map(fn, jobs))


# --- workers (top level so they pickle) ---------------------------------------


def _eval_job(job):
    from .localpoly import LocalPolyParams, c_infty_series, eval_P, eval_script_P

    (k, N, D, D0, research), xs, a_max = job
    params = LocalPolyParams(k, N, D, D0, research=research)
    series = c_infty_series(params, a_max) if a_max else None
    out = []
    for x in xs:
        rec = {"k": k, "N": N, "D0": D0, "D": D, "x": _exact(x), "script_P": _exact(eval_script_P(params, x))}
        if series is not None:
            rec["P"] = eval_P(params, x, series=series)
        out.append(rec)
    return out


def _hecke_job(job):
    from .hecke import hecke_function, detect_vanishing

    params, poly, xs, detect = job
    if detect:
        res = detect_vanishing(params, poly, xs)
        return [
            {"N": params.N, "D0": params.D0, "D": params.D, "x": _exact(x), "value": _exact(v), "verdict": res.verdict}
            for x, v in res.values.items()
        ]
    h = hecke_function(params, poly)
    return [{"N": params.N, "D0": params.D0, "D": params.D, "x": _exact(x), "value": _exact(h(x))} for x in xs]


def _table_column_job(job):
    from . import tables
    from .hecke import get_preset, hecke_function
    from .localpoly import LocalPolyParams

    level, D = job
    t = tables.table(level)
    params = LocalPolyParams(t["k"], t["N"], D, t["D0"])
    h = hecke_function(params, get_preset(t["preset"]))
    return [(x, h(x)) for x in t["xs"]]


# --- commands -----------------------------------------------------------------


def cmd_eval(args):
    from .localpoly import DEFAULT_A_MAX, LocalPolyParams, default_samples

    a_max = (args.a_max or DEFAULT_A_MAX) if args.with_P else 0
    jobs = []
    for D in _ds(args):
        params = _params(args, D)
        xs = args.x or default_samples(params)
        jobs.append(((params.k, params.N, D, params.D0, params.research), xs, a_max))
    records = [r for batch in _pool_map(_eval_job, jobs, args.threads) for r in batch]
    return records, None, EXIT_OK


def cmd_hecke(args):
    from . import tables
    from .localpoly import default_samples

    poly = _poly(args)
    jobs = []
    for D in _ds(args):
        params = _params(args, D)
        poly.validate(params.N)
        if args.table_samples:
            xs = tables.table(args.level)["xs"]
        else:
            xs = args.x or ([Fraction(1, 2)] if not args.detect else default_samples(params))
        jobs.append((params, poly, xs, args.detect))
    records = [r for batch in _pool_map(_hecke_job, jobs, args.threads) for r in batch]
    note = None
    if args.detect:
        verdicts = {}
        for r in records:
            verdicts[r["D"]] = r["verdict"]
        note = ", ".join(f"D={d}: {v}" for d, v in verdicts.items())
    return records, note, EXIT_OK


def cmd_verify_table(args):
    from . import tables

    try:
        t = tables.table(args.level)
    except KeyError:
        raise DataError(f"no embedded table for level {args.level}") from None
    cols = _pool_map(_table_column_job, [(args.level, D) for D in t["Ds"]], args.threads)
    records, bad = [], []
    printed = t.get("printed_x", {})
    for D, col in zip(t["Ds"], cols):
        for x, got in col:
            want = t["cells"][(D, x)]
            ok = got == want
            if not ok:
                bad.append((x, D))
            rec = {"level": args.level, "D": D, "x": _exact(x), "value": _exact(got), "expected": _exact(want), "ok": ok}
            if _exact(x) in printed:
                rec["printed_x"] = printed[_exact(x)]
            records.append(rec)
        constant = len({v for _, v in col}) == 1
        if constant != (D in t["vanishing"]):
            bad.append(("constancy", D))
    total = len(records)
    note = f"{total - sum(1 for r in records if not r['ok'])}/{total} cells pass"
    if bad:
        note += "; mismatches: " + ", ".join(f"(x={x}, D={D})" for x, D in bad)
    return records, note, EXIT_TOLERANCE if bad else EXIT_OK


def _gap_bound(N, D0, D):
    from . import tables

    for row in tables.load()["c_infty_gaps"]:
        if (row["N"], row["D0"], row["D"]) == (N, D0, D):
            return row["bound"]
    return None


def cmd_cinfty(args):
    from .classnumbers import c_infty_closed
    from .localpoly import DEFAULT_A_MAX, c_infty_series

    a_max = args.a_max or DEFAULT_A_MAX
    records, status = [], EXIT_OK
    for D in _ds(args):
        params = _params(args, D)
        ser = c_infty_series(params, a_max)
        rec = {
            "N": params.N, "D0": params.D0, "D": D, "a_max": a_max,
            "series_sum": ser.raw_sum, "c_infty": ser.c_infty, "gamma": ser.gamma,
            "tail_estimate": ser.tail_estimate,
        }
        if args.compare:
            cl = c_infty_closed(params)
            gap = abs(ser.raw_sum - cl.raw_sum)
            tol = args.tol if args.tol is not None else _gap_bound(params.N, params.D0, D)
            rec.update(closed_sum=cl.raw_sum, closed_c_infty=cl.c_infty, closed_gamma=cl.gamma, gap=gap)
            if tol is not None:
                rec["tol"] = tol
                rec["ok"] = gap < tol
                if not rec["ok"]:
                    status = EXIT_TOLERANCE
        records.append(rec)
    return records, None, status


def _residual_row(N, D0, D):
    from . import tables

    for row in tables.load()["splitting_residuals"]:
        if (row["N"], row["D0"], row["D"]) == (N, D0, D):
            return row
    return None


def _load_newform(args):
    from .lseries import fixture_for_level, ingest_coefficients, load_fixture

    if getattr(args, "fixture", None):
        p = Path(args.fixture)
        if p.exists():
            return ingest_coefficients(p)
        return load_fixture(args.fixture.removesuffix(".json.gz"))
    if getattr(args, "label", None):
        return load_fixture(args.label)
    if args.level is None:
        raise DomainError("give --fixture, --label or --level")
    return fixture_for_level(args.level)


def cmd_phi(args):
    from .analytic import coeffs_from_newform, extract_coeffs, phi, splitting_check

    xs = args.x or [Fraction(1, 5)]
    records, status = [], EXIT_OK
    for D in _ds(args):
        params = _params(args, D)
        row = _residual_row(params.N, params.D0, D)
        n_terms = args.n_terms or (row["n_terms"] if row else 30)
        if args.coeffs == "extract":
            coeffs = extract_coeffs(params, n_max=n_terms)
        else:
            data = _load_newform(args)
            if data.level != params.N or data.k != params.k:
                raise DataError(f"{data.label} does not match level {params.N} and weight {2 * params.k}")
            coeffs = coeffs_from_newform(data, n_terms)
        for x in xs:
            rec = {"N": params.N, "D0": params.D0, "D": D, "x": _exact(x), "n_terms": n_terms}
            if args.splitting_check:
                res = splitting_check(params, coeffs, x, poly=_poly(args), n_max=n_terms, a_max=args.a_max)
                rec.update(
                    gamma=res.gamma, delta=res.delta, phi=res.phi_x, predicted=res.predicted,
                    exact=_exact(res.exact), residual=res.residual, ok=abs(res.residual) < args.tol,
                )
                if not rec["ok"]:
                    status = EXIT_TOLERANCE
            else:
                rec["phi"] = phi(coeffs, float(x), n_terms)
            records.append(rec)
    return records, None, status


def cmd_lvalue(args):
    from .lseries import ZERO_TOL, twisted_L

    data = _load_newform(args)
    records = []
    for D in _ds(args):
        lv = twisted_L(data, D, args.depth)
        records.append(
            {
                "label": data.label, "D": D, "value": lv.value, "error": lv.error,
                "terms": lv.terms, "conductor": lv.conductor, "zero": lv.is_zero(args.tol or ZERO_TOL),
            }
        )
    return records, None, EXIT_OK


# --- parser -------------------------------------------------------------------


def _add_params(p):
    p.add_argument("--k", type=int, default=2, help="forms have weight 2k (default 2)")
    p.add_argument("--level", type=int, help="square-free level N")
    p.add_argument("--d0", type=int, help="fundamental discriminant D0")
    p.add_argument("--d", type=int, action="append", help="discriminant D (repeatable)")
    p.add_argument("--research", action="store_true", help="skip the admissibility checks")


def _add_poly(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--preset", help="named Hecke polynomial (default: the one for --level)")
    g.add_argument("--poly", help='custom polynomial, e.g. "11:32/1331,7:-24/343"')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lhmaass", description=__doc__.splitlines()[0])
    out = parser.add_mutually_exclusive_group()
    out.add_argument("--json", action="store_const", dest="fmt", const="json", help="JSON lines")
    out.add_argument("--tsv", action="store_const", dest="fmt", const="tsv", help="tab separated")
    parser.add_argument("--no-timing", action="store_true", help="omit timings (byte-stable output)")
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker processes")
    parser.add_argument("--config", help="JSON file of defaults; flags on the command line win")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="exact local polynomial sums at rationals")
    _add_params(p)
    p.add_argument("--x", type=_frac, action="append", help="evaluation point (repeatable)")
    p.add_argument("--with-P", action="store_true", help="also give P(x) with the series constant")
    p.add_argument("--a-max", type=int, help="series truncation for --with-P")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("hecke", help="Hecke-transported sums and the vanishing test")
    _add_params(p)
    _add_poly(p)
    p.add_argument("--x", type=_frac, action="append", help="evaluation point or sample (repeatable)")
    p.add_argument("--detect", action="store_true", help="run the constancy test")
    p.add_argument("--table-samples", action="store_true", help="use the x-values of the table for --level")
    p.set_defaults(func=cmd_hecke)

    p = sub.add_parser("verify-table", help="recompute an embedded table exactly")
    p.add_argument("level", type=int, choices=(7, 15, 22))
    p.set_defaults(func=cmd_verify_table)

    p = sub.add_parser("cinfty", help="the constant c_infinity by series (and closed form)")
    _add_params(p)
    p.add_argument("--a-max", type=int, help="series truncation (default 10^6)")
    p.add_argument("--compare", action="store_true", help="compare with the class number formula")
    p.add_argument("--tol", type=float, help="gap tolerance (default: embedded bound when known)")
    p.set_defaults(func=cmd_cinfty)

    p = sub.add_parser("phi", help="Phi(x) and the splitting check")
    _add_params(p)
    _add_poly(p)
    p.add_argument("--x", type=_frac, action="append", help="point (default 1/5)")
    p.add_argument("--splitting-check", action="store_true")
    p.add_argument("--n-terms", type=int, help="Fourier coefficients used")
    p.add_argument("--coeffs", choices=("newform", "extract"), default="newform")
    p.add_argument("--fixture", help="coefficient file or bundled label")
    p.add_argument("--label", help="bundled fixture label")
    p.add_argument("--a-max", type=int, help="use the truncated series constant instead of the closed form")
    p.add_argument("--tol", type=float, default=0.1)
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("lvalue", help="twisted central L-values from coefficient data")
    p.add_argument("--fixture", help="coefficient file (.json or .json.gz) or bundled label")
    p.add_argument("--label", help="bundled fixture label, e.g. 7.4.a.a")
    p.add_argument("--level", type=int, help="use the bundled newform of this level")
    p.add_argument("--d", type=int, action="append", help="discriminant D (repeatable)")
    p.add_argument("--depth", type=int, help="number of coefficients")
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_lvalue)

    parser._subs = sub.choices  # for the config overlay
    return parser


def _parse(parser, argv):
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise DataError("config must be a JSON object")
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    for key in ("x",):
        if key in cfg:
            cfg[key] = [Fraction(str(v)) for v in cfg[key]]
    if "d" in cfg and not isinstance(cfg["d"], list):
        cfg["d"] = [cfg["d"]]
    cfg = {k: v for k, v in cfg.items() if k in vars(args) and k not in ("command", "func", "config")}
    sp = parser._subs[args.command]
    given = {k for k in cfg if getattr(args, k) != _default(parser, sp, k)}
    # file values become defaults; reparse so explicit flags override them
    parser.set_defaults(**cfg)
    sp.set_defaults(**cfg)
    merged = parser.parse_args(argv)
    for k in given:
        # repeatable flags would otherwise append to the file's list
        setattr(merged, k, getattr(args, k))
    return merged


def _default(parser, sp, key):
    v = sp.get_default(key)
    return parser.get_default(key) if v is None else v


def _emit(records, note, fmt, stream):
    if fmt == "json":
        for r in records:
            stream.write(json.dumps(r, sort_keys=True) + "\n")
        if note:
            stream.write(json.dumps({"summary": note}) + "\n")
        return
    if not records:
        if note:
            stream.write(note + "\n")
        return
    keys = list(records[0])
    for r in records[1:]:
        keys += [k for k in r if k not in keys]
    rows = [[_cell(r.get(k, ""), k) for k in keys] for r in records]
    if fmt == "tsv":
        stream.write("\t".join(keys) + "\n")
        for row in rows:
            stream.write("\t".join(row) + "\n")
        if note:
            stream.write(f"# {note}\n")
        return
    widths = [max(len(k), *(len(row[i]) for row in rows)) for i, k in enumerate(keys)]
    stream.write("  ".join(k.ljust(w) for k, w in zip(keys, widths)).rstrip() + "\n")
    for row in rows:
        stream.write("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() + "\n")
    if note:
        stream.write(note + "\n")


def _cell(v, key: str = "") -> str:
    if isinstance(v, bool):
        if key == "ok":
            return "pass" if v else "FAIL"
        return "yes" if v else "no"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = _parse(parser, argv)
        if args.threads < 1:
            raise DomainError("--threads must be positive")
        t0 = time.perf_counter()
        records, note, status = args.func(args)
        elapsed = time.perf_counter() - t0
    except LhmaassError as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(err) + "\n")
        return exc.exit_code
    except ArithmeticError as exc:
        sys.stderr.write(json.dumps({"error": "ArithmeticError", "message": str(exc)}) + "\n")
        return EXIT_TOLERANCE
    if not args.no_timing:
        for r in records:
            r["elapsed_s"] = round(elapsed, 3)
    _emit(records, note, args.fmt, stdout)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
