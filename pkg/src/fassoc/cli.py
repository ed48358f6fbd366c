"""Command-line front end.

Exit codes: 0 success, 1 unreadable or unparseable input, 2 validation
failure, 3 numerical failure (e.g. an empty cell under an unbounded f'(0)).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from fassoc.bvn import BvnSpec, discretize, discretize_array
from fassoc.divergence import parse_divergence
from fassoc.errors import AssociationError, NumericalError, ParameterRangeError, ValidationError
from fassoc.inference import MeasureEstimate, asy_variance, asy_variance_v3, confidence_interval, estimate
from fassoc.measures import HARMONIC, measure, parse_variant, variant_label
from fassoc.simulation import ExperimentSpec, coverage_experiment
from fassoc.table import ContingencyTable, format_grid, read_table

EXIT_INPUT, EXIT_VALIDATION, EXIT_NUMERICAL = 1, 2, 3
FAMILIES = ("power", "theta")


class InputError(Exception):
    pass


def _floats(text: str) -> list[float]:
    parts = [t for t in text.replace(" ", "").split(",") if t]
    try:
        return [float(t) for t in parts]
    except ValueError:
        raise InputError(f"cannot parse number list {text!r}") from None


def _dims(text: str) -> tuple[int, int]:
    try:
        r, c = (int(t) for t in text.lower().split("x"))
    except ValueError:
        raise InputError(f"dimensions must look like 4x4, got {text!r}") from None
    return r, c


def _divergence(text: str):
    """Parse a divergence string; malformed text is an input error, bad ranges are validation."""
    try:
        return parse_divergence(text)
    except ParameterRangeError:
        raise
    except ValidationError as exc:
        raise InputError(str(exc)) from exc


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


# --- record builders ---------------------------------------------------------


def _measure_record(spec, table, variant_text: str, level: float, clamp: bool, n: int | None) -> dict:
    variant, agg = parse_variant(variant_text)
    label = variant_label(variant, agg)
    if isinstance(table, ContingencyTable):
        est = estimate(spec, table, variant, agg, level, clamp)
        return _estimate_record(est, label, spec.label)
    value = measure(spec, table, variant, agg).value
    rec = {"divergence": spec.label, "variant": label, "estimate": value}
    if n is not None:
        var = asy_variance_v3(spec, table, agg or HARMONIC) if variant == "v3" else asy_variance(spec, table, variant)
        est = confidence_interval(value, var, n, level, clamp, label, spec.label)
        return _estimate_record(est, label, spec.label)
    return rec


def _estimate_record(est: MeasureEstimate, label: str, div: str) -> dict:
    return {
        "divergence": div,
        "variant": label,
        "estimate": est.estimate,
        "std_error": est.std_error,
        "ci_low": est.ci_low,
        "ci_high": est.ci_high,
        "level": est.level,
        "n": est.n,
    }


def _csv_cell(x):
    if x is None:
        return ""
    return repr(x) if isinstance(x, float) else x


def _display(rec: dict) -> str:
    if "error" in rec:
        return f"error: {rec['error']}"
    if "std_error" not in rec:
        return f"{rec['estimate']:.3f}"
    return f"{rec['estimate']:.3f} {rec['std_error']:.3f} ({rec['ci_low']:.3f}, {rec['ci_high']:.3f})"


def _emit_records(records: list[dict], fmt: str, keys: list[str], out) -> None:
    if fmt == "json":
        json.dump([{k: _clean(v) for k, v in r.items()} for r in records], out, indent=2)
        out.write("\n")
    else:
        writer = csv.DictWriter(out, fieldnames=keys, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for r in records:
            writer.writerow({k: _csv_cell(r.get(k)) for k in keys})


# --- subcommands ---------------------------------------------------------------


def _load(path: str, kind: str):
    try:
        return read_table(path, kind)
    except AssociationError:
        raise
    except (OSError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def cmd_measure(args, out) -> int:
    table = _load(args.table, args.kind)
    spec = _divergence(args.divergence)
    rec = _measure_record(spec, table, args.variant, args.level, args.clamp_ci, args.n)
    keys = ["divergence", "variant", "estimate", "std_error", "ci_low", "ci_high", "level", "n"]
    fmt = args.output or "text"
    if fmt == "text":
        out.write(_display(rec) + "\n")
    else:
        _emit_records([rec], fmt, keys, out)
    return 0


def _sweep_source(args):
    if (args.table is None) == (args.bvn_rho is None):
        raise ValidationError("give exactly one of a table path or --bvn-rho")
    if args.table is not None:
        return _load(args.table, args.kind)
    rows, cols = _dims(args.dims)
    return discretize(BvnSpec.uniform(args.bvn_rho, rows, cols))


def cmd_sweep(args, out) -> int:
    if args.family not in FAMILIES:
        raise ValidationError(f"family must be one of {FAMILIES}, got {args.family!r}")
    grid = sorted(set(_floats(args.grid)))
    if not grid:
        raise ValidationError("parameter grid is empty")
    variants = [v for v in args.variants.split(",") if v.strip()]
    if not variants:
        raise ValidationError("no variants requested")
    for v in variants:
        parse_variant(v)
    # validate the whole grid up front so range errors are not per-row noise
    specs = [_divergence(f"{args.family}:{g!r}") for g in grid]
    table = _sweep_source(args)
    records = []
    for g, spec in zip(grid, specs):
        for v in variants:
            try:
                rec = _measure_record(spec, table, v, args.level, args.clamp_ci, args.n)
            except AssociationError as exc:
                rec = {"divergence": spec.label, "variant": v, "error": f"{type(exc).__name__}: {exc}"}
            rec["param"] = g
            records.append(rec)
    keys = ["param", "variant", "estimate", "std_error", "ci_low", "ci_high", "error"]
    fmt = args.output or "text"
    if fmt == "text":
        for r in records:
            out.write(f"{r['param']:<6g} {r['variant']:<14} {_display(r)}\n")
    else:
        _emit_records(records, fmt, keys, out)
    return 0


def cmd_generate_bvn(args, out) -> int:
    cols = args.cols if args.cols is not None else args.rows
    spec = BvnSpec.uniform(args.rho, args.rows, cols)
    cells = discretize_array(spec)
    cells = cells / cells.sum()
    fmt = args.output or "csv"
    if fmt == "json":
        json.dump({"rho": spec.rho, "probs": cells.tolist()}, out, indent=2)
        out.write("\n")
    else:
        out.write(format_grid(cells, None if args.full_precision else 4))
    return 0


def cmd_coverage(args, out) -> int:
    rows, cols = _dims(args.dims)
    generator = discretize(BvnSpec.uniform(args.rho, rows, cols))
    variant, agg = parse_variant(args.variant)
    spec = ExperimentSpec(
        generator=generator,
        n=args.n,
        iterations=args.iters,
        divergence=_divergence(args.divergence),
        variant=variant,
        aggregator=agg,
        level=args.level,
        seed=args.seed,
    )
    result = coverage_experiment(spec, workers=args.workers)
    record = {"rho": args.rho, "dims": f"{rows}x{cols}", "n": args.n, "level": args.level, "seed": args.seed}
    record.update(result.to_dict())
    fmt = args.output or "json"
    if fmt == "json":
        json.dump({k: _clean(v) for k, v in record.items()}, out, indent=2)
        out.write("\n")
    elif fmt == "csv":
        writer = csv.DictWriter(out, fieldnames=list(record), lineterminator="\n")
        writer.writeheader()
        writer.writerow(record)
    else:
        out.write(
            f"coverage {result.coverage:.3f}  true {result.true_value:.3f}  "
            f"mean {result.mean_estimate:.3f}  failed {result.replicates_failed}/{result.iterations}\n"
        )
    return 0


# --- parser -------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", choices=("text", "csv", "json"), default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--level", type=float, default=0.95)
    common.add_argument("--clamp-ci", action="store_true", help="truncate intervals to [0, 1]")
    common.add_argument("--full-precision", action="store_true", help="write probabilities with full precision")

    parser = _Parser(prog="fassoc", description="f-divergence association measures for two-way tables")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("measure", parents=[common], help="estimate, SE and CI for one table")
    m.add_argument("table")
    m.add_argument("--divergence", "-d", default="power:0")
    m.add_argument("--variant", "-v", default="v1", help="v1, v2, v3, v3:harmonic or v3:geometric")
    m.add_argument("--kind", choices=("auto", "counts", "probs"), default="auto")
    m.add_argument("--n", type=int, default=None, help="sample size for a probability table")
    m.set_defaults(func=cmd_measure)

    s = sub.add_parser("sweep", parents=[common], help="measures over a parameter grid")
    s.add_argument("table", nargs="?")
    s.add_argument("--family", default="power")
    s.add_argument("--grid", required=True, help="comma-separated parameter values")
    s.add_argument("--variants", default="v1")
    s.add_argument("--kind", choices=("auto", "counts", "probs"), default="auto")
    s.add_argument("--bvn-rho", type=float, default=None, help="use a discretised BVN instead of a file")
    s.add_argument("--dims", default="4x4")
    s.add_argument("--n", type=int, default=None)
    s.set_defaults(func=cmd_sweep)

    g = sub.add_parser("generate-bvn", parents=[common], help="discretised bivariate normal table")
    g.add_argument("--rho", type=float, required=True)
    g.add_argument("--rows", type=int, default=4)
    g.add_argument("--cols", type=int, default=None)
    g.set_defaults(func=cmd_generate_bvn)

    c = sub.add_parser("coverage", parents=[common], help="Monte Carlo CI coverage on a discretised BVN")
    c.add_argument("--rho", type=float, required=True)
    c.add_argument("--dims", default="4x4")
    c.add_argument("--divergence", "-d", default="power:0")
    c.add_argument("--variant", "-v", default="v1")
    c.add_argument("--n", type=int, default=5000)
    c.add_argument("--iters", type=int, default=10000)
    c.add_argument("--workers", type=int, default=1)
    c.set_defaults(func=cmd_coverage)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except NumericalError as exc:
        print(f"numerical error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValidationError as exc:
        print(f"validation error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def run(argv) -> tuple[int, str]:
    """Run the CLI in-process and capture stdout."""
    buf = io.StringIO()
    try:
        code = main(argv, buf)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_INPUT
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
