"""Command-line front end: ``fsfw count``, ``fsfw closed-form`` and ``fsfw sample``.

Exit codes: 0 success, 2 invalid usage or parameters, 3 exact verification
mismatch, 4 statistical self-check failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

from .closed_form import closed_form_report
from .exact import CountTable, as_rational, exact_bag_distribution, formula_bag_classes
from .fibers import parse_fiber
from .graphs import K2, build_ball, build_perfect_tree, product
from .kirchhoff import count_through_path, matrix_tree_count
from .rng import RngStream, Tally
from . import estimators as est

DEFAULT_SEED = 20240917
SEED_ENV = "FSFW_SEED"
VERIFY_MAX_N = 3
SELF_CHECK_SIGMAS = 4.0
EXACT_REFERENCE_MAX_VERTICES = 4096

EXIT_USAGE = 2
EXIT_VERIFY = 3
EXIT_SELF_CHECK = 4


class UsageError(Exception):
    pass


# argument parsing ----------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _seed(text: str) -> int:
    val = int(text, 0)
    if not 0 <= val < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return val


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return DEFAULT_SEED
    try:
        return _seed(raw)
    except (ValueError, argparse.ArgumentTypeError) as exc:
        raise UsageError(f"{SEED_ENV}={raw!r} is not a valid seed") from exc


def _add_output(p: argparse.ArgumentParser, default_format: str) -> None:
    p.add_argument("--format", choices=("csv", "json"), default=default_format)
    p.add_argument("-o", "--output", help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fsfw", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="exact spanning-tree counts for the perfect tree and ball times K2")
    p.add_argument("-d", type=int, required=True)
    p.add_argument("-w", required=True, help="rational weight, e.g. 1, 1/2, 0.25")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--verify", action="store_true", help=f"check rows n <= {VERIFY_MAX_N} against determinants")
    _add_output(p, "csv")

    p = sub.add_parser("closed-form", help="limit constants and the bag-count law")
    p.add_argument("-d", type=_int_list, required=True, help="degree or comma list")
    p.add_argument("-w", type=_float_list, required=True, help="weight or comma list")
    p.add_argument("--m-max", type=int, default=16)
    _add_output(p, "json")

    p = sub.add_parser("sample", help="Monte Carlo experiments")
    p.add_argument("experiment", choices=("dist", "escape", "memorable", "phase"))
    p.add_argument("-d", type=int, required=True)
    p.add_argument("--H", default="K2", help="K2, K<k>, cycle-<k> or an edge-list file")
    p.add_argument("-w", type=float)
    p.add_argument("-n", type=int)
    p.add_argument("-m", type=_int_list, help="radius or comma list")
    p.add_argument("--w-grid", type=_float_list)
    p.add_argument("--n-grid", type=_int_list)
    p.add_argument("-N", type=int, default=10_000)
    p.add_argument("--seed", type=_seed)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--self-check", action="store_true", help="compare against exact values where available")
    _add_output(p, "json")
    return parser


# output ----------------------------------------------------------------------


def _render(config: dict, rows: list[dict], fmt: str, extra: dict | None = None) -> str:
    if fmt == "json":
        doc = {"config": config, "results": rows}
        if extra:
            doc.update(extra)
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    fields: list[str] = []
    for row in rows:
        for key in row:
            if key not in fields:
                fields.append(key)
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(v) for k, v in row.items()})
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (dict, list)):
        return json.dumps(v)
    return "" if v is None else v


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# count -------------------------------------------------------------------------


def _verify_rows(d: int, w: Fraction, n: int, table: CountTable) -> list[str]:
    problems = []
    for k in range(min(n, VERIFY_MAX_N) + 1):
        g = product(build_perfect_tree(d, k), K2, w)
        if matrix_tree_count(g) != table.a(k):
            problems.append(f"a_{k} disagrees with the determinant")
        if count_through_path(g, [g.vertex(0, 0), g.vertex(0, 1)]) != table.a_prime(k):
            problems.append(f"a'_{k} disagrees with the contracted determinant")
        if matrix_tree_count(product(build_ball(d, k), K2, w)) != table.ball(k):
            problems.append(f"t(ball {k}) disagrees with the determinant")
    return problems


def cmd_count(args) -> int:
    if args.d < 3:
        raise UsageError("d must be at least 3")
    if args.n < 0:
        raise UsageError("n must be nonnegative")
    try:
        w = as_rational(args.w)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"invalid -w: {exc}") from exc
    table = CountTable(args.d, w).extend(args.n)
    config = {"command": "count", "d": args.d, "w": _frac(w), "n": args.n, "verify": args.verify}
    rows = []
    for k in range(args.n + 1):
        rows.append({
            "n": k,
            "a_n": _frac(table.a(k)),
            "a_prime_n": _frac(table.a_prime(k)),
            "t_ball": _frac(table.ball(k)),
            "c_n": table.c(k),
            "s_n": table.s(k) if k >= 1 else None,
        })
    extra = None
    problems: list[str] = []
    if args.verify:
        problems = _verify_rows(args.d, w, args.n, table)
        extra = {"verified": not problems, "verified_up_to": min(args.n, VERIFY_MAX_N), "problems": problems}
    _emit(_render(config, rows, args.format, extra), args.output)
    if args.verify:
        print("verified" if not problems else "VERIFICATION FAILED: " + "; ".join(problems), file=sys.stderr)
    return EXIT_VERIFY if problems else 0


# closed form ---------------------------------------------------------------


def cmd_closed_form(args) -> int:
    if any(d < 3 for d in args.d):
        raise UsageError("d must be at least 3")
    if any(not (w > 0 and math.isfinite(w)) for w in args.w):
        raise UsageError("w must be positive and finite")
    if args.m_max < 1:
        raise UsageError("--m-max must be positive")
    config = {"command": "closed-form", "d": args.d, "w": args.w, "m_max": args.m_max}
    reports = [closed_form_report(d, w, args.m_max) for d in args.d for w in args.w]
    if args.format == "csv":
        rows = []
        for r in reports:
            row = {k: r[k] for k in ("d", "w", "c", "s", "r", "K", "tail")}
            row.update({f"q{m}": q for m, q in enumerate(r["q"], start=1)})
            row.update({f"residual_{k}": v for k, v in r["residuals"].items()})
            rows.append(row)
        text = _render(config, rows, "csv")
    else:
        text = _render(config, reports, "json")
    _emit(text, args.output)
    return 0


# sampling ------------------------------------------------------------------------


def _exact_weight(w: float) -> Fraction:
    # the decimal the user typed, not the binary float, is the exact reference
    return Fraction(repr(w))


def _rows_from_reports(key: str, reports: dict) -> list[dict]:
    return [{key: k, **r.as_dict()} for k, r in reports.items()]


def _within(rep, p: float) -> bool:
    sigma = math.sqrt(p * (1 - p) / rep.samples)
    return abs(rep.estimate - p) <= SELF_CHECK_SIGMAS * sigma + 1e-12


def _dist_reference(d, w, n, H):
    if H.vertex_count != 2:
        return None
    classes, tail = formula_bag_classes(d, _exact_weight(w), n)
    ref = {m: float(p) for m, p in classes.items()}
    ref["tail"] = float(tail)
    return ref


def _escape_reference(d, w, n, m, H):
    if H.vertex_count != 2:
        return None
    exact_w = _exact_weight(w)
    if m + 1 < n:
        classes, _ = formula_bag_classes(d, exact_w, n)
        return float(1 - sum(p for k, p in classes.items() if k <= m + 1))
    if 2 * len(build_ball(d, n).parent) > EXACT_REFERENCE_MAX_VERTICES:
        return None
    dist = exact_bag_distribution(d, exact_w, n)
    return float(sum(p for k, p in dist.items() if k > m + 1))


def _need(args, *names):
    missing = [f"-{n}" if len(n) == 1 else f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"sample {args.experiment} needs {', '.join(missing)}")


def cmd_sample(args) -> int:
    if args.d < 3:
        raise UsageError("d must be at least 3")
    if args.N <= 0:
        raise UsageError("-N must be positive")
    if args.workers < 1:
        raise UsageError("--workers must be positive")
    try:
        H = parse_fiber(args.H)
    except (ValueError, OSError) as exc:
        raise UsageError(str(exc)) from exc
    seed = args.seed if args.seed is not None else _default_seed()
    rng = RngStream(seed)
    config = {
        "command": "sample", "experiment": args.experiment, "d": args.d, "H": args.H,
        "w": args.w, "n": args.n, "m": args.m, "w_grid": args.w_grid, "n_grid": args.n_grid,
        "N": args.N, "seed": seed, "workers": args.workers, "self_check": args.self_check,
    }
    check: dict | None = None
    exp = args.experiment
    if exp == "dist":
        _need(args, "w", "n")
        dist = est.bag_count_distribution(args.d, H, args.w, args.n, args.N, rng, workers=args.workers)
        rows = _rows_from_reports("m", dist.reports)
        if args.self_check:
            check = _check_dist(dist, _dist_reference(args.d, args.w, args.n, H), args.n)
    elif exp == "escape":
        _need(args, "w", "n", "m")
        reports = _escape_curve(args, H, rng)
        rows = _rows_from_reports("m", reports)
        if args.self_check:
            refs = {m: _escape_reference(args.d, args.w, args.n, m, H) for m in reports}
            check = _check_reports(reports, refs)
    elif exp == "memorable":
        _need(args, "w", "n", "m")
        _check_radii(args.m, args.n)
        reports = est.memorable_tail_curve(args.d, H, args.w, args.n, args.m, args.N, rng, workers=args.workers)
        rows = _rows_from_reports("m", reports)
        if args.self_check:
            ms = sorted(reports)
            ok = all(reports[a].estimate >= reports[b].estimate for a, b in zip(ms, ms[1:]))
            check = {"passed": ok, "rule": "estimates non-increasing in m (shared trips)"}
    else:
        w_grid = args.w_grid or ([args.w] if args.w is not None else None)
        n_grid = args.n_grid or ([args.n] if args.n is not None else None)
        if not w_grid or not n_grid or not args.m:
            raise UsageError("sample phase needs --w-grid (or -w), --n-grid (or -n) and -m")
        if len(args.m) != 1:
            raise UsageError("sample phase takes a single -m")
        for n in n_grid:
            _check_radii(args.m, n)
        rows = est.phase_probe(args.d, H, w_grid, n_grid, args.m[0], args.N, rng, workers=args.workers)
        if args.self_check:
            check = {"passed": True, "rule": "exploratory output; nothing to compare against"}
    extra = {"self_check": check} if check is not None else None
    _emit(_render(config, rows, args.format, extra), args.output)
    if check is not None and not check["passed"]:
        print("SELF-CHECK FAILED: " + json.dumps(check), file=sys.stderr)
        return EXIT_SELF_CHECK
    return 0


def _check_radii(ms, n):
    for m in ms:
        if not 0 <= m < n:
            raise UsageError(f"need 0 <= m < n, got m={m}, n={n}")


def _escape_curve(args, H, rng) -> dict:
    _check_radii(args.m, args.n)
    _, deep = est.lerw_bag_samples(args.d, H, args.w, args.n, args.N, rng, workers=args.workers)
    return {m: est.indicator_report(deep > m) for m in args.m}


def _check_reports(reports: dict, refs: dict) -> dict:
    details = []
    ok = True
    for m, rep in reports.items():
        ref = refs.get(m)
        if ref is None:
            details.append({"m": m, "exact": None, "passed": None})
            continue
        passed = _within(rep, ref)
        ok &= passed
        details.append({"m": m, "exact": ref, "passed": passed})
    return {"passed": ok, "sigmas": SELF_CHECK_SIGMAS, "classes": details}


def _check_dist(dist, ref, n) -> dict:
    if ref is None:
        return {"passed": True, "sigmas": SELF_CHECK_SIGMAS, "classes": [], "note": "no exact reference for this fiber"}
    reports = {m: dist.reports[m] for m in ref if m != "tail"}
    check = _check_reports(reports, ref)
    tail_count = sum(c for m, c in dist.counts.items() if m not in ref)
    tail_rep = Tally(dist.samples, float(tail_count), float(tail_count)).report()
    passed = _within(tail_rep, ref["tail"])
    check["classes"].append({"m": f">={max(2, n)}", "exact": ref["tail"], "passed": passed})
    check["passed"] = check["passed"] and passed
    return check


COMMANDS = {"count": cmd_count, "closed-form": cmd_closed_form, "sample": cmd_sample}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, TypeError) as exc:
        print(f"fsfw: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
