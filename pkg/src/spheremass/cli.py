"""Command-line front end.

Subcommands: ``mass``, ``convergence``, ``t0``, ``verify``, ``cache``.
Exit status is 0 on success, 1 when a verification fails (or on an internal
error), 2 on bad usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
import warnings
from dataclasses import dataclass
from fractions import Fraction

from . import __version__, cache, kernels
from .exactnum import (
    ExactValue,
    RatInterval,
    decimal_ceil,
    decimal_floor,
    decimal_string,
    unbounded_int_digits,
)
from .mass import (
    Manifold,
    MassEstimate,
    float_partial_sum,
    mass_estimate,
    spectral_table,
    distinctness_table,
)
from .verify import SUITES, run_suites

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

# exact a + b*ln2 forms longer than this are only shown in json/csv
MAX_EXACT_CHARS = 160

CSV_COLUMNS = [
    "manifold",
    "N",
    "sum_a_num",
    "sum_a_den",
    "sum_b_num",
    "sum_b_den",
    "bound_num",
    "bound_den",
    "lo",
    "hi",
]


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    manifolds: tuple[Manifold, ...]
    n_values: tuple[int, ...]
    digits: int
    fmt: str
    mode: str
    bound: str
    threads: int
    cache_dir: str | None
    use_cache: bool


def parse_n_list(text: str) -> list[int]:
    """``"1..5"``, ``"1,2,10"`` or a mix such as ``"1..3,10"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                a, b = part.split("..", 1)
                lo, hi = int(a), int(b)
                if hi < lo:
                    raise UsageError(f"empty range {part!r}")
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise UsageError(f"bad N-list entry {part!r}") from None
    if not out:
        raise UsageError("empty N-list")
    return out


def _manifolds(sel: str) -> tuple[Manifold, ...]:
    return tuple(Manifold) if sel == "all" else (Manifold.parse(sel),)


def make_config(args) -> RunConfig:
    if getattr(args, "digits", 1) < 1:
        raise UsageError("--digits must be >= 1")
    if getattr(args, "threads", 1) < 1:
        raise UsageError("--threads must be >= 1")
    mode = getattr(args, "mode", "certified")
    if mode == "fast" and getattr(args, "certified_output", False):
        raise UsageError("--mode fast cannot produce --certified-output")
    if args.command == "convergence":
        n_values = tuple(parse_n_list(args.n_list))
    else:
        n_values = (args.n,)
    if any(n < 1 for n in n_values):
        raise UsageError("N must be >= 1")
    return RunConfig(
        command=args.command,
        manifolds=_manifolds(args.manifold or ("all" if args.command == "t0" else "s2xs2")),
        n_values=n_values,
        digits=args.digits,
        fmt=args.format,
        mode=mode,
        bound=getattr(args, "bound", "envelope"),
        threads=args.threads,
        cache_dir=args.cache_dir,
        use_cache=not args.no_cache,
    )


# --------------------------------------------------------------------------
# serialisation


def _frac(x: Fraction) -> dict:
    return {"num": str(x.numerator), "den": str(x.denominator)}


def _interval_json(i: RatInterval, places: int) -> dict:
    return {"lo": _frac(i.lo), "hi": _frac(i.hi), "decimal": decimal_string(i, places)}


def _exact_text(v: ExactValue) -> str | None:
    with unbounded_int_digits():
        s = str(v)
    return s if len(s) <= MAX_EXACT_CHARS else None


def estimate_record(e: MassEstimate) -> dict:
    s = e.partial_sum
    return {
        "manifold": e.manifold.value,
        "N": e.n,
        "mode": "certified",
        "bound_method": e.bound_method,
        "digits": e.digits,
        "sum_rational": {
            "a_num": str(s.a.numerator),
            "a_den": str(s.a.denominator),
            "b_num": str(s.b.numerator),
            "b_den": str(s.b.denominator),
        },
        "sum_interval": _interval_json(e.sum_interval, e.digits),
        "bound": _frac(e.error_bound),
        "interval": _interval_json(e.mass_interval, e.digits),
        "t0": _interval_json(e.t0_interval, e.digits),
        "t0_double": _interval_json(e.t0_double_interval, e.digits),
    }


def csv_row(e: MassEstimate) -> list[str]:
    s = e.partial_sum
    return [
        e.manifold.value,
        str(e.n),
        str(s.a.numerator),
        str(s.a.denominator),
        str(s.b.numerator),
        str(s.b.denominator),
        str(e.error_bound.numerator),
        str(e.error_bound.denominator),
        decimal_floor(e.mass_interval.lo, e.digits),
        decimal_ceil(e.mass_interval.hi, e.digits),
    ]


def _dump_json(obj) -> str:
    with unbounded_int_digits():
        return json.dumps(obj, indent=2) + "\n"


def _dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    with unbounded_int_digits():
        w.writerows(rows)
    return buf.getvalue()


# --------------------------------------------------------------------------
# commands


def _prepare(cfg: RunConfig, n: int) -> None:
    if cfg.use_cache:
        cache.table_for(n, cfg.cache_dir, threads=cfg.threads)
    else:
        spectral_table(n, cfg.threads)


def _estimates(cfg: RunConfig, n: int) -> list[MassEstimate]:
    _prepare(cfg, n)
    return [mass_estimate(m, n, cfg.digits, bound=cfg.bound, threads=cfg.threads) for m in cfg.manifolds]


def _text_estimate(e: MassEstimate) -> str:
    m = e.manifold
    d = e.digits
    exact = _exact_text(e.partial_sum)
    if exact is None:
        a_len = len(str(e.partial_sum.a.denominator))
        exact = f"(a + b*ln2, denominators of {a_len}+ digits; see --format json)"
    lines = [
        f"{m.label} ({m.symbol}), N={e.n}, bound={e.bound_method}",
        f"  S_N        = {exact}",
        f"  S_N       in {decimal_string(e.sum_interval, d)}",
        f"  |{m.symbol} - S_N| <= {decimal_ceil(e.error_bound, d)}",
        f"  {m.symbol}        in {decimal_string(e.mass_interval, d)}",
    ]
    return "\n".join(lines)


def _fast_records(cfg: RunConfig, n: int) -> list[dict]:
    return [
        {"manifold": m.value, "N": n, "mode": "fast", "sum_float": float_partial_sum(m, n)}
        for m in cfg.manifolds
    ]


def cmd_mass(cfg: RunConfig, out) -> int:
    n = cfg.n_values[0]
    if cfg.mode == "fast":
        recs = _fast_records(cfg, n)
        if cfg.fmt == "json":
            out.write(_dump_json(recs))
        elif cfg.fmt == "csv":
            out.write(_dump_csv(["manifold", "N", "sum_float"], [[r["manifold"], n, repr(r["sum_float"])] for r in recs]))
        else:
            for r in recs:
                out.write(f"{r['manifold']}, N={n}: S_N ~ {r['sum_float']!r} (fast-float, not certified)\n")
        return EXIT_OK
    ests = _estimates(cfg, n)
    if cfg.fmt == "json":
        out.write(_dump_json([estimate_record(e) for e in ests]))
    elif cfg.fmt == "csv":
        out.write(_dump_csv(CSV_COLUMNS, [csv_row(e) for e in ests]))
    else:
        out.write("\n\n".join(_text_estimate(e) for e in ests) + "\n")
    return EXIT_OK


def cmd_convergence(cfg: RunConfig, out) -> int:
    if cfg.mode == "fast":
        recs = [r for n in cfg.n_values for r in _fast_records(cfg, n)]
        if cfg.fmt == "json":
            out.write(_dump_json(recs))
        else:
            rows = [[r["manifold"], r["N"], repr(r["sum_float"])] for r in recs]
            if cfg.fmt == "csv":
                out.write(_dump_csv(["manifold", "N", "sum_float"], rows))
            else:
                for row in rows:
                    out.write(f"{row[0]:8s} N={row[1]:<5d} S_N ~ {row[2]}\n")
        return EXIT_OK
    _prepare(cfg, max(cfg.n_values))
    ests = [e for n in cfg.n_values for e in _estimates(cfg, n)]
    if cfg.fmt == "json":
        recs = []
        for e in ests:
            r = estimate_record(e)
            r["width"] = _frac(e.mass_interval.width)
            recs.append(r)
        out.write(_dump_json(recs))
    elif cfg.fmt == "csv":
        rows = [csv_row(e) + [decimal_ceil(e.mass_interval.width, e.digits)] for e in ests]
        out.write(_dump_csv(CSV_COLUMNS + ["width"], rows))
    else:
        d = cfg.digits
        out.write(f"{'manifold':8s} {'N':>5s}  {'S_N enclosure':^{2 * d + 10}s}  {'bound':>{d + 2}s}  {'width':>{d + 2}s}\n")
        for e in ests:
            out.write(
                f"{e.manifold.value:8s} {e.n:5d}  {decimal_string(e.sum_interval, d)}  "
                f"{decimal_ceil(e.error_bound, d)}  {decimal_ceil(e.mass_interval.width, d)}\n"
            )
    return EXIT_OK


def cmd_t0(cfg: RunConfig, out) -> int:
    if cfg.mode == "fast":
        raise UsageError("t0 reports certified intervals only; drop --mode fast")
    n = cfg.n_values[0]
    ests = _estimates(cfg, n)
    rows = distinctness_table({e.manifold: e for e in ests})
    d = cfg.digits
    if cfg.fmt == "json":
        out.write(
            _dump_json(
                {
                    "N": n,
                    "bound_method": cfg.bound,
                    "t0": [
                        {
                            "manifold": e.manifold.value,
                            "mass": _interval_json(e.mass_interval, d),
                            "t0": _interval_json(e.t0_interval, d),
                            "t0_double": _interval_json(e.t0_double_interval, d),
                        }
                        for e in ests
                    ],
                    "distinctness_table": [
                        {
                            "topology": r.topology,
                            "left": r.left_label,
                            "right": r.right_label,
                            "left_interval": _interval_json(r.left, d),
                            "right_interval": _interval_json(r.right, d),
                            "verdict": r.verdict,
                        }
                        for r in rows
                    ],
                }
            )
        )
    elif cfg.fmt == "csv":
        table = []
        for e in ests:
            for kind, iv in (("t0", e.t0_interval), ("t0_double", e.t0_double_interval)):
                table.append([e.manifold.value, n, kind, decimal_floor(iv.lo, d), decimal_ceil(iv.hi, d)])
        out.write(_dump_csv(["manifold", "N", "quantity", "lo", "hi"], table))
    else:
        out.write(f"t0 enclosures at N={n} (bound={cfg.bound})\n")
        for e in ests:
            i = e.manifold.symbol[1:]
            out.write(f"  -(9 m{i})^-1   in {decimal_string(e.t0_interval, d)}\n")
            out.write(f"  -2(9 m{i})^-1  in {decimal_string(e.t0_double_interval, d)}\n")
        if rows:
            out.write("distinctness\n")
            for r in rows:
                out.write(f"  {r.topology:18s} {r.left_label:>14s} vs {r.right_label:<14s} distinct: {r.verdict}\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    names = list(SUITES) if not args.suite or "all" in args.suite else args.suite
    results = run_suites(names, tol=args.tol)
    failed = any(not c.passed for _, checks, _ in results for c in checks)
    if args.format == "json":
        out.write(
            _dump_json(
                {
                    "backend": kernels.BACKEND,
                    "passed": not failed,
                    "suites": [
                        {
                            "suite": name,
                            "seconds": round(secs, 3),
                            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
                        }
                        for name, checks, secs in results
                    ],
                }
            )
        )
    else:
        for name, checks, secs in results:
            out.write(f"[{name}] ({secs:.2f}s)\n")
            for c in checks:
                tag = "PASS" if c.passed else "FAIL"
                extra = f"  ({c.detail})" if c.detail else ""
                out.write(f"  {tag}  {c.name}{extra}\n")
        out.write("all suites passed\n" if not failed else "VERIFICATION FAILED\n")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_cache(args, out) -> int:
    if args.action == "info":
        out.write(json.dumps(cache.info(args.cache_dir), indent=2) + "\n")
    elif args.action == "clear":
        removed = cache.clear(args.cache_dir)
        out.write(("removed " if removed else "nothing to remove at ") + str(cache.cache_path(args.cache_dir)) + "\n")
    else:
        if args.n < 1:
            raise UsageError("N must be >= 1")
        t0 = time.perf_counter()
        cf = cache.CacheFile.build(args.n, args.threads)
        path = cache.store(cf, args.cache_dir)
        if path is None:
            return EXIT_FAIL
        out.write(f"wrote {path} (N={args.n}, {time.perf_counter() - t0:.1f}s)\n")
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker threads for the exact tables")
    common.add_argument("--cache-dir", default=None, help=f"coefficient cache (default ${cache.CACHE_ENV} or ~/.cache/spheremass)")
    common.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")

    series = argparse.ArgumentParser(add_help=False)
    series.add_argument(
        "--manifold",
        choices=["s2xs2", "g24", "rp2xrp2", "all"],
        default=None,
        help="default s2xs2 (all for t0)",
    )
    series.add_argument("--digits", type=int, default=10, help="decimal places of the printed enclosures")
    series.add_argument("--format", choices=["text", "json", "csv"], default="text")
    series.add_argument("--mode", choices=["certified", "fast"], default="certified")
    series.add_argument("--certified-output", action="store_true", help="refuse to run unless output is certified")
    series.add_argument(
        "--bound",
        choices=["envelope", "refined"],
        default="envelope",
        help="truncation bound: closed-form F(N) envelope, or the direct tail bound",
    )

    p = argparse.ArgumentParser(prog="spheremass", description="Certified masses of S2xS2, G(2,4), RP2xRP2.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("mass", parents=[series, common], help="certified mass enclosure")
    sp.add_argument("--n", type=int, default=40, help="truncation order N (default 40)")

    sp = sub.add_parser("convergence", parents=[series, common], help="enclosures over a list of N")
    sp.add_argument("--n-list", default="1..5", help='e.g. "1..5" or "1,2,10,40"')

    sp = sub.add_parser("t0", parents=[series, common], help="t0 enclosures and distinctness verdicts")
    sp.add_argument("--n", type=int, default=40)

    sp = sub.add_parser("verify", help="run oracle suites")
    sp.add_argument("--suite", action="append", choices=sorted(SUITES) + ["all"], help="repeatable; default all")
    sp.add_argument("--tol", type=float, default=1e-6, help="quadrature concordance tolerance")
    sp.add_argument("--format", choices=["text", "json"], default="text")

    sp = sub.add_parser("cache", parents=[common], help="inspect, build or clear the coefficient cache")
    sp.add_argument("action", choices=["info", "build", "clear"])
    sp.add_argument("--n", type=int, default=100)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    warnings.simplefilter("default", cache.CacheWarning)
    try:
        with unbounded_int_digits():
            return _dispatch(args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - report, don't trace, at the CLI boundary
        print(f"{parser.prog}: internal error: {exc!r}", file=sys.stderr)
        return EXIT_FAIL


def _dispatch(args, out) -> int:
    if args.command == "verify":
        if not args.tol >= 1e-12:
            raise UsageError("--tol must be >= 1e-12")
        return cmd_verify(args, out)
    if args.command == "cache":
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        return cmd_cache(args, out)
    cfg = make_config(args)
    return {"mass": cmd_mass, "convergence": cmd_convergence, "t0": cmd_t0}[args.command](cfg, out)


if __name__ == "__main__":
    sys.exit(main())
