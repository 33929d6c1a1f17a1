"""Command line interface: fit, select, experiment, and bench subcommands.

Exit codes: 0 success, 1 input error, 2 infeasible request or degenerate
selection (a flagged result document is still written), 64 usage error.
Results are canonical JSON (see :mod:`segbasis.io`); timing is reported only
when --timing is passed, keeping default output byte-deterministic.
"""

from __future__ import annotations

import argparse
import csv
import statistics
import sys
import time
from typing import Any, Sequence

import numpy as np

from .core import CostKind, FunctionalDataset, Segmentation, fit_model, reconstruct
from .costs import (
    CostTable,
    build_linear_table,
    build_sse_table,
    loo_table,
    partition_cost,
)
from .io import ResultDocument, read_csv, write_result
from .selection import (
    SelectionReport,
    SelectionStrategy,
    default_k_max,
    select_k_full_loo,
    select_k_standard,
)
from .solver import InfeasiblePartitionError, solve
from .synth import SynthSpec, add_noise, generate

USAGE_ERROR = 64


class _Parser(argparse.ArgumentParser):
    """argparse with the conventional 64 exit for usage mistakes."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _parse_bumps(text: str) -> tuple[tuple[float, float, float], ...]:
    """Bumps as comma-separated center:width:amplitude triples."""
    bumps = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        pieces = part.split(":")
        if len(pieces) != 3:
            raise ValueError(
                f"bad bump {part!r}: expected center:width:amplitude"
            )
        bumps.append(tuple(float(p) for p in pieces))
    return tuple(bumps)


_SYNTH_KEYS = {
    "n": int,
    "m": int,
    "jitter": float,
    "lo": float,
    "hi": float,
    "bumps": _parse_bumps,
}


def parse_synth_config(text: str) -> SynthSpec:
    """Resolve a --synth argument: "default" or a flat key=value config file.

    Recognized keys: n, m, jitter, lo, hi, bumps.  Unset keys keep their
    defaults; '#' starts a comment.
    """
    if text == "default":
        return SynthSpec()
    fields: dict[str, Any] = {}
    with open(text) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{text}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _SYNTH_KEYS:
                raise ValueError(f"{text}:{lineno}: unknown key {key!r}")
            try:
                fields[key] = _SYNTH_KEYS[key](value.strip())
            except ValueError as exc:
                raise ValueError(f"{text}:{lineno}: {exc}") from None
    spec = SynthSpec(**fields)
    spec.validate()
    return spec


def _spec_source(spec: SynthSpec, seed: int) -> dict[str, Any]:
    return {
        "kind": "synth",
        "n": spec.n,
        "m": spec.m,
        "bumps": [list(b) for b in spec.bumps],
        "jitter": spec.jitter,
        "lo": spec.lo,
        "hi": spec.hi,
        "seed": seed,
    }


def _load_dataset(args: argparse.Namespace) -> tuple[FunctionalDataset, dict[str, Any]]:
    if args.input is not None:
        dataset = read_csv(args.input, has_grid_row=args.grid_row)
        return dataset, {
            "kind": "csv", "path": args.input, "grid_row": bool(args.grid_row),
        }
    spec = parse_synth_config(args.synth)
    return generate(spec, args.seed), _spec_source(spec, args.seed)


def _totals(sse: CostTable, seg: Segmentation,
            kind: CostKind, objective: float) -> dict[str, Any]:
    """Reported totals for one segmentation row, keyed by cost kind.

    The leave-one-out total is omitted for the linear kind, where the
    per-segment inflation factor does not apply.
    """
    row: dict[str, Any] = {"ends": list(seg.ends)}
    if kind is CostKind.SSE:
        row["sse_total"] = objective
        row["loo_total"] = partition_cost(loo_table(sse), seg)
    elif kind is CostKind.LOO:
        row["loo_total"] = objective
        row["sse_total"] = partition_cost(sse, seg)
    else:
        row["objective_total"] = objective
        row["sse_total"] = partition_cost(sse, seg)
    return row


def cmd_fit(args: argparse.Namespace) -> int:
    dataset, source = _load_dataset(args)
    k = args.segments
    if not 1 <= k <= dataset.m:
        raise ValueError(f"k out of range: need 1 <= k <= {dataset.m}, got {k}")
    kind = CostKind(args.cost)
    t0 = time.perf_counter()
    sse = build_sse_table(dataset)
    if kind is CostKind.LINEAR:
        table: CostTable = build_linear_table(dataset)
    elif kind is CostKind.LOO:
        table = loo_table(sse)
    else:
        table = sse
    t1 = time.perf_counter()
    try:
        seg, total, _ = solve(table, k)
    except InfeasiblePartitionError:
        doc = ResultDocument(
            command="fit", source=source, cost=kind.value, k=k,
            records=(
                {"k": k, "ends": None, "sse_total": float("inf"),
                 "loo_total": float("inf"), "infeasible": True},
            ),
            infeasible=True,
        )
        write_result(doc, args.output)
        return 2
    t2 = time.perf_counter()
    record = {"k": k, **_totals(sse, seg, kind, total)}
    coefficients = None
    if args.emit_coefficients:
        model = fit_model(dataset, seg)
        coefficients = tuple(tuple(r) for r in model.coefficients.tolist())
    timing = None
    if args.timing:
        timing = {"build_ms": (t1 - t0) * 1e3, "dp_ms": (t2 - t1) * 1e3}
    doc = ResultDocument(
        command="fit", source=source, cost=kind.value, k=k,
        records=(record,), coefficients=coefficients, timing=timing,
    )
    write_result(doc, args.output)
    return 0


def _report_records(dataset: FunctionalDataset,
                    report: SelectionReport) -> list[dict[str, Any]]:
    rows = []
    for rec in report.records:
        if rec.segmentation is None:
            rows.append({
                "k": rec.k, "ends": None, "sse_total": float("inf"),
                "loo_total": float("inf"), "infeasible": True,
            })
            continue
        row: dict[str, Any] = {
            "k": rec.k,
            "ends": list(rec.segmentation.ends),
            "sse_total": rec.sse_total,
            "loo_total": rec.loo_total,
        }
        if not np.isfinite(rec.loo_total):
            # basis exists but is not selectable: its estimate is infinite
            row["infeasible"] = True
        rows.append(row)
    return rows


def cmd_select(args: argparse.Namespace) -> int:
    dataset, source = _load_dataset(args)
    k_max = args.max_segments
    if k_max is None:
        k_max = default_k_max(dataset.m)
    if not 1 <= k_max <= dataset.m:
        raise ValueError(
            f"k_max out of range: need 1 <= k_max <= {dataset.m}, got {k_max}"
        )
    strategy = SelectionStrategy(args.strategy)
    t0 = time.perf_counter()
    if strategy is SelectionStrategy.STANDARD_THEN_LOO:
        report = select_k_standard(dataset, k_max)
    else:
        report = select_k_full_loo(dataset, k_max)
    t1 = time.perf_counter()
    timing = {"total_ms": (t1 - t0) * 1e3} if args.timing else None
    doc = ResultDocument(
        command="select", source=source, k_max=k_max,
        strategy=strategy.value, selected_k=report.selected_k,
        records=tuple(_report_records(dataset, report)),
        degenerate=report.degenerate, timing=timing,
    )
    write_result(doc, args.output)
    return 2 if report.degenerate else 0


def _squared_error(values: np.ndarray, approx: np.ndarray) -> float:
    return float(((values - approx) ** 2).sum())


def cmd_experiment(args: argparse.Namespace) -> int:
    spec = parse_synth_config(args.synth)
    if args.sigma < 0:
        raise ValueError("sigma must be nonnegative")
    clean = generate(spec, args.seed)
    noise_seed = args.seed + 1
    noisy = add_noise(clean, args.sigma, noise_seed)
    k_max = args.max_segments
    if k_max is None:
        k_max = default_k_max(clean.m)
    if not 1 <= k_max <= clean.m:
        raise ValueError(
            f"k_max out of range: need 1 <= k_max <= {clean.m}, got {k_max}"
        )

    def basis_row(name: str, seg: Segmentation) -> dict[str, Any]:
        # coefficients are fitted on the noisy data; the clean error measures
        # how well that fit recovers the uncontaminated curves
        recon = reconstruct(noisy, fit_model(noisy, seg))
        return {
            "basis": name,
            "k": seg.k,
            "ends": list(seg.ends),
            "noisy_error": _squared_error(noisy.values, recon),
            "clean_error": _squared_error(clean.values, recon),
        }

    sse = build_sse_table(noisy)
    seg_fixed, _, _ = solve(sse, k_max)
    standard = select_k_standard(noisy, k_max)
    full_loo = select_k_full_loo(noisy, k_max)
    rows = [
        basis_row("fixed", seg_fixed),
        basis_row("standard-then-loo", standard.selected.segmentation),
        basis_row("full-loo", full_loo.selected.segmentation),
    ]
    rows[1]["selected_k"] = standard.selected_k
    rows[2]["selected_k"] = full_loo.selected_k
    if standard.degenerate:
        rows[1]["degenerate"] = True
    if full_loo.degenerate:
        rows[2]["degenerate"] = True
    source = _spec_source(spec, args.seed)
    source["sigma"] = args.sigma
    source["noise_seed"] = noise_seed
    doc = ResultDocument(
        command="experiment", source=source, k_max=k_max,
        records=tuple(rows),
    )
    write_result(doc, args.output)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    try:
        m_list = [int(part) for part in args.m_list.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"bad --m-list {args.m_list!r}: expected integers")
    if not m_list:
        raise ValueError("empty --m-list")
    if args.repeats < 1:
        raise ValueError("repeats must be at least 1")
    rows: list[list[Any]] = []
    for m in m_list:
        if not 1 <= args.k <= m:
            raise ValueError(f"k out of range: need 1 <= k <= {m}, got {args.k}")
        spec = SynthSpec(n=args.n, m=m)
        dataset = generate(spec, args.seed)
        solve(build_sse_table(dataset), args.k)  # warm-up, not reported
        build_times = []
        dp_times = []
        for rep in range(1, args.repeats + 1):
            t0 = time.perf_counter()
            table = build_sse_table(dataset)
            t1 = time.perf_counter()
            solve(table, args.k)
            t2 = time.perf_counter()
            build_times.append((t1 - t0) * 1e3)
            dp_times.append((t2 - t1) * 1e3)
            rows.append([m, args.n, args.k, str(rep),
                         build_times[-1], dp_times[-1]])
        rows.append([m, args.n, args.k, "median",
                     statistics.median(build_times),
                     statistics.median(dp_times)])
    out = sys.stdout if args.output is None else open(args.output, "w", newline="")
    try:
        writer = csv.writer(out)
        writer.writerow(["m", "n", "k", "repeat", "build_ms", "dp_ms"])
        for row in rows:
            writer.writerow(row)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--input", metavar="PATH",
                       help="CSV file: one function per row")
    group.add_argument("--synth", metavar="CONFIG",
                       help='"default" or a key=value synth config file')
    parser.add_argument("--grid-row", action="store_true",
                        help="first CSV row is the sampling grid")
    parser.add_argument("--seed", type=int, default=0,
                        help="synth generator seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="segbasis",
                     description="Optimal piecewise bases for sampled functions.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    fit = sub.add_parser("fit", help="best basis with a fixed segment count")
    _add_input_flags(fit)
    fit.add_argument("--segments", type=int, required=True, metavar="K")
    fit.add_argument("--cost", choices=[k.value for k in CostKind],
                     default=CostKind.SSE.value)
    fit.add_argument("--output", metavar="PATH")
    fit.add_argument("--emit-coefficients", action="store_true",
                     help="include the fitted per-segment means")
    fit.add_argument("--timing", action="store_true",
                     help="include timing (breaks byte determinism)")
    fit.set_defaults(func=cmd_fit)

    select = sub.add_parser("select", help="choose the segment count by "
                            "leave-one-out error")
    _add_input_flags(select)
    select.add_argument("--max-segments", type=int, default=None, metavar="K")
    select.add_argument("--strategy",
                        choices=[s.value for s in SelectionStrategy],
                        default=SelectionStrategy.FULL_LOO.value)
    select.add_argument("--output", metavar="PATH")
    select.add_argument("--timing", action="store_true",
                        help="include timing (breaks byte determinism)")
    select.set_defaults(func=cmd_select)

    experiment = sub.add_parser(
        "experiment",
        help="clean-vs-noisy comparison of the fixed, standard-then-loo, "
             "and full-loo bases",
    )
    experiment.add_argument("--synth", default="default", metavar="CONFIG",
                            help='"default" or a key=value synth config file')
    experiment.add_argument("--sigma", type=float, default=0.0,
                            help="noise standard deviation")
    experiment.add_argument("--seed", type=int, default=0)
    experiment.add_argument("--max-segments", type=int, default=None,
                            metavar="K")
    experiment.add_argument("--output", metavar="PATH")
    experiment.set_defaults(func=cmd_experiment)

    bench = sub.add_parser("bench", help="table-build and DP timing scaling")
    bench.add_argument("--m-list", default="256,512",
                       help="comma-separated grid sizes")
    bench.add_argument("--n", type=int, default=32)
    bench.add_argument("--k", type=int, default=16)
    bench.add_argument("--repeats", type=int, default=3)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--output", metavar="PATH",
                       help="CSV destination (default stdout)")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"segbasis: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
