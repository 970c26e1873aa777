"""Command-line interface.

Subcommands: predict, support, mplaw, simulate, reproduce, density-overlay.
Exit codes: 0 on success, 1 for invalid models or arguments, 2 for numerical
failures (root isolation, eigensolver).  CSV output uses '.' decimals, '\\n'
line endings, and always starts with a header row.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

from .config import ExperimentConfig
from .limits import limit_table, predict
from .model import SpikedModel, parse_spike
from .mplaw import mp_density, mp_edges
from .report import (
    reproduce_figure,
    reproduce_to_csv,
    reproduce_to_text,
    run_density_overlay,
    run_reproduce,
    write_json,
)
from .simulate import EigensolverError, monte_carlo
from .support import (
    InconsistentSupportError,
    RootIsolationError,
    support_complement,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argparse variant that reports usage problems through exit code 1."""

    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="spikedcov",
        description="Limiting eigenvalues of spiked sample covariance matrices: "
        "predictions, support analysis, and Monte Carlo verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["table", "csv", "json"], default=None,
                        help="output format (default depends on the subcommand)")
    common.add_argument("--out", default=None,
                        help="output file (or directory/prefix for multi-file reports)")
    common.add_argument("--seed", type=int, default=None, help="base RNG seed (default 0)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads for Monte Carlo (default $SPIKEDCOV_THREADS or 1)")
    common.add_argument("--config", default=None,
                        help="JSON experiment config supplying defaults for other flags")

    dims = _Parser(add_help=False)
    dims.add_argument("--p", type=int, default=None, help="matrix dimension p")
    dims.add_argument("--n", type=int, default=None, help="sample count n")
    dims.add_argument("--spike", action="append", default=None, metavar="VALUE[:MULT]",
                      help="population spike, repeatable")

    q = sub.add_parser("predict", parents=[common, dims],
                       help="closed-form limits of the ordered sample eigenvalues")
    q.add_argument("--c", type=float, default=None,
                   help="aspect ratio for a dimension-free query (instead of --p/--n)")

    sub.add_parser("support", parents=[common, dims],
                   help="complement of the limiting spectral support at finite n")

    q = sub.add_parser("mplaw", parents=[common],
                       help="tabulate the null limiting density")
    q.add_argument("--c", type=float, required=True, help="aspect ratio p/n")
    q.add_argument("--points", type=int, default=None, help="grid size (default 512)")

    q = sub.add_parser("simulate", parents=[common, dims],
                       help="Monte Carlo draws of the sample spectrum")
    q.add_argument("--dist", choices=["gaussian", "cgaussian", "rademacher"],
                   default=None, help="entry distribution (default gaussian)")
    q.add_argument("--trials", type=int, default=None, help="number of draws (default 5)")

    q = sub.add_parser("reproduce", parents=[common],
                       help="recompute a benchmark table of means vs limits")
    q.add_argument("table", choices=["c-half", "c-two"], help="which benchmark to run")
    q.add_argument("--trials", type=int, default=None, help="trials per row (default 5)")

    q = sub.add_parser("density-overlay", parents=[common, dims],
                       help="simulated spectrum vs limiting density, with figure")
    q.add_argument("--dist", choices=["gaussian", "cgaussian", "rademacher"],
                   default=None)
    q.add_argument("--points", type=int, default=None, help="density grid size (default 512)")
    q.add_argument("--hist-bins", type=int, default=None, help="histogram bins (default 60)")
    q.add_argument("--nonzero-only", action=argparse.BooleanOptionalAction, default=None,
                   help="drop the exact zero eigenvalues (p > n)")
    return parser


class _Resolved:
    """Flag values merged with --config defaults and hard-coded fallbacks."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.cfg = None
        if getattr(args, "config", None):
            with open(args.config) as fh:
                self.cfg = ExperimentConfig.from_json(fh.read())

    def get(self, name: str, default=None, cfg_name: str | None = None):
        val = getattr(self.args, name, None)
        if val is not None:
            return val
        if self.cfg is not None and hasattr(self.cfg, cfg_name or name):
            return getattr(self.cfg, cfg_name or name)
        return default

    @property
    def seed(self) -> int:
        return int(self.get("seed", 0))

    @property
    def threads(self) -> int:
        val = self.get("threads")
        if val is None:
            val = os.environ.get("SPIKEDCOV_THREADS", 1)
        return max(1, int(val))

    @property
    def out(self):
        return self.get("out")

    def fmt(self, default: str) -> str:
        return self.get("format", default)

    def spikes(self):
        raw = getattr(self.args, "spike", None)
        if raw is not None:
            return tuple(parse_spike(s) for s in raw)
        if self.cfg is not None:
            return tuple(self.cfg.model().spikes)
        return ()

    def model(self) -> SpikedModel:
        p = self.get("p")
        n = self.get("n")
        if p is None or n is None:
            raise UsageError("this query needs both --p and --n (or a --config providing them)")
        return SpikedModel(spikes=self.spikes(), p=int(p), n=int(n))


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _float_cell(v) -> str:
    return repr(float(v))


def _model_dict(model: SpikedModel) -> dict:
    return {
        "p": model.p,
        "n": model.n,
        "spikes": [[s.alpha, s.multiplicity] for s in model.spikes],
    }


def _cmd_predict(res: _Resolved) -> int:
    c = res.get("c")
    have_dims = res.get("p") is not None and res.get("n") is not None
    if c is not None and not have_dims:
        rows = limit_table(res.spikes(), float(c))
        fmt = res.fmt("table")
        if fmt == "json":
            _emit(json.dumps({"c": c, "rows": rows}, indent=2) + "\n", res.out)
        elif fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["alpha", "multiplicity", "regime", "limit", "note"])
            for r in rows:
                w.writerow([r["alpha"], r["multiplicity"], r["regime"],
                            "" if r["limit"] is None else _float_cell(r["limit"]),
                            r["note"] or ""])
            _emit(buf.getvalue(), res.out)
        else:
            lines = [f"c = {c:g}"]
            for r in rows:
                tag = (f"alpha={r['alpha']:g} (x{r['multiplicity']})"
                       if r["alpha"] is not None else r["regime"])
                val = f"{r['limit']:.5f}" if r["limit"] is not None else r["note"]
                reg = f"  [{r['regime']}]" if r["alpha"] is not None else ""
                lines.append(f"  {tag:<24} -> {val}{reg}")
            _emit("\n".join(lines) + "\n", res.out)
        return 0

    model = res.model()
    report = predict(model, None if c is None else float(c))
    fmt = res.fmt("table")
    if fmt == "json":
        payload = {
            "model": _model_dict(model),
            "c": report.c,
            "regime": report.regime,
            "zero_count": report.zero_count,
            "entries": [
                {"lo": e.lo, "hi": e.hi, "limit": e.limit, "kind": e.kind,
                 "alpha": e.alpha}
                for e in report.entries
            ],
        }
        _emit(json.dumps(payload, indent=2) + "\n", res.out)
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lo", "hi", "limit", "kind", "alpha"])
        for e in report.entries:
            w.writerow([e.lo, e.hi, _float_cell(e.limit), e.kind,
                        "" if e.alpha is None else _float_cell(e.alpha)])
        _emit(buf.getvalue(), res.out)
    else:
        lines = [f"p = {report.p}, n = {report.n}, c = {report.c:g} ({report.regime})"]
        for e in report.entries:
            span = f"s_{e.lo}" if e.lo == e.hi else f"s_{e.lo}..s_{e.hi}"
            extra = f"  (alpha = {e.alpha:g})" if e.alpha is not None else ""
            lines.append(f"  {span:<16} -> {e.limit:<12.5f} {e.kind}{extra}")
        _emit("\n".join(lines) + "\n", res.out)
    return 0


def _cmd_support(res: _Resolved) -> int:
    model = res.model()
    report = support_complement(model)
    fmt = res.fmt("table")

    def cell(v: float):
        return None if math.isinf(v) else v

    if fmt == "json":
        payload = {
            "model": _model_dict(model),
            "complement_intervals": [
                {"x_lo": cell(a), "x_hi": cell(b)}
                for a, b in report.complement_intervals
            ],
            "generating_m_intervals": [
                {"m_lo": cell(a), "m_hi": cell(b)}
                for a, b in report.generating_m_intervals
            ],
            "edges": report.edges,
        }
        _emit(json.dumps(payload, indent=2) + "\n", res.out)
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["interval", "x_lo", "x_hi", "m_lo", "m_hi"])
        for i, ((a, b), (ml, mh)) in enumerate(
            zip(report.complement_intervals, report.generating_m_intervals)
        ):
            w.writerow([i, repr(a), repr(b), repr(ml), repr(mh)])
        _emit(buf.getvalue(), res.out)
    else:
        lines = [f"support complement for p = {model.p}, n = {model.n}, c = {model.c_p:g}"]
        for a, b in report.complement_intervals:
            lines.append(f"  ({a:.6g}, {b:.6g})")
        lines.append("edges:")
        for k in sorted(report.edges):
            lines.append(f"  {k:<20} = {report.edges[k]:.8f}")
        _emit("\n".join(lines) + "\n", res.out)
    return 0


def _cmd_mplaw(res: _Resolved) -> int:
    c = float(res.args.c)
    points = int(res.get("points", 512))
    a, b = mp_edges(c)
    import numpy as np

    grid = np.linspace(a, b, points)
    dens = mp_density(grid, c)
    fmt = res.fmt("csv")
    if fmt == "json":
        _emit(json.dumps({"c": c, "a": a, "b": b, "x": grid.tolist(),
                          "density": dens.tolist()}, indent=2) + "\n", res.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "density"])
        for x, d in zip(grid, dens):
            w.writerow([repr(float(x)), repr(float(d))])
        _emit(buf.getvalue(), res.out)
    return 0


def _cmd_simulate(res: _Resolved) -> int:
    model = res.model()
    dist = res.get("dist", "gaussian", cfg_name="distribution")
    trials = int(res.get("trials", 5))
    mc = monte_carlo(model, dist, trials, res.seed, workers=res.threads)
    fmt = res.fmt("table")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "seed"] + [f"s_{i}" for i in mc.indices])
        for t in range(mc.trials):
            w.writerow([t, mc.base_seed + t] + [repr(float(v)) for v in mc.samples[t]])
        _emit(buf.getvalue(), res.out)
    elif fmt == "json":
        payload = {
            "model": _model_dict(model),
            "distribution": mc.distribution.value,
            "trials": mc.trials,
            "base_seed": mc.base_seed,
            "indices": list(mc.indices),
            "stats": mc.stats_rows(),
        }
        _emit(json.dumps(payload, indent=2) + "\n", res.out)
    else:
        lines = [
            f"p = {model.p}, n = {model.n}, c = {model.c_p:g}, "
            f"{mc.distribution.value}, {trials} trials, base seed {mc.base_seed}",
            f"{'index':>8}{'limit':>14}{'mean':>14}{'std':>12}{'min':>14}{'max':>14}",
        ]
        for row in mc.stats_rows():
            theo = "" if row["theoretical"] is None else f"{row['theoretical']:.5f}"
            lines.append(
                f"{row['index']:>8}{theo:>14}{row['mean']:>14.5f}"
                f"{row['std']:>12.2e}{row['min']:>14.5f}{row['max']:>14.5f}"
            )
        _emit("\n".join(lines) + "\n", res.out)
    return 0


def _cmd_reproduce(res: _Resolved) -> int:
    trials = int(res.get("trials", 5))
    result = run_reproduce(res.args.table, trials=trials, seed=res.seed,
                           workers=res.threads)
    out = res.out
    if out:
        os.makedirs(out, exist_ok=True)
        stem = os.path.join(out, f"reproduce_{result['table']}")
        with open(stem + ".txt", "w", newline="") as fh:
            fh.write(reproduce_to_text(result))
        with open(stem + ".csv", "w", newline="") as fh:
            fh.write(reproduce_to_csv(result))
        write_json(result, stem + ".json")
        reproduce_figure(result, stem + ".png")
        sys.stdout.write(
            "\n".join(stem + ext for ext in (".txt", ".csv", ".json", ".png")) + "\n"
        )
    else:
        fmt = res.fmt("table")
        if fmt == "json":
            sys.stdout.write(json.dumps(result, indent=2) + "\n")
        elif fmt == "csv":
            sys.stdout.write(reproduce_to_csv(result))
        else:
            sys.stdout.write(reproduce_to_text(result))
    return 0


def _cmd_density_overlay(res: _Resolved) -> int:
    model = res.model()
    paths = run_density_overlay(
        model,
        distribution=res.get("dist", "gaussian", cfg_name="distribution"),
        seed=res.seed,
        points=int(res.get("points", 512)),
        hist_bins=int(res.get("hist_bins", 60)),
        nonzero_only=bool(res.get("nonzero_only", False)),
        out_prefix=res.out or "overlay",
    )
    sys.stdout.write("\n".join(paths[k] for k in sorted(paths)) + "\n")
    return 0


_COMMANDS = {
    "predict": _cmd_predict,
    "support": _cmd_support,
    "mplaw": _cmd_mplaw,
    "simulate": _cmd_simulate,
    "reproduce": _cmd_reproduce,
    "density-overlay": _cmd_density_overlay,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](_Resolved(args))
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (RootIsolationError, InconsistentSupportError, EigensolverError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
