"""Report generation: benchmark tables and density-overlay artifacts.

Two canned benchmark tables compare Monte Carlo eigenvalue means against their
closed-form limits for reference models at aspect ratios 1/2 and 2; the
density-overlay report renders a simulated spectrum against the limiting
density, writing delimited data files and a matplotlib figure side by side.
All outputs are deterministic given the seed.
"""

from __future__ import annotations

import csv
import io
import json

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .limits import predict
from .model import EntryDistribution, SpikedModel, SpikeSpec
from .mplaw import MPLaw, mp_density
from .simulate import histogram, monte_carlo, sample_eigenvalues

#: Benchmark table definitions: reference spikes, the (p, n) pairs and entry
#: distributions to simulate, and which order statistics to report.
REPRODUCE_TABLES = {
    "c-half": {
        "spikes": ((4.0, 1), (3.0, 1), (0.1, 1)),
        "dims": ((1000, 2000), (100, 200)),
        "distributions": ("gaussian", "rademacher"),
        "columns": ("smallest", "second_largest", "largest"),
        # index of each column in the descending spectrum; "p" = last
        "column_index": ("p", 2, 1),
    },
    "c-two": {
        "spikes": ((4.0, 1), (3.0, 1)),
        "dims": ((2000, 1000),),
        "distributions": ("gaussian", "rademacher"),
        "columns": ("second_largest", "largest"),
        "column_index": (2, 1),
    },
}


def _column_indices(spec_idx, p: int) -> list[int]:
    return [p if i == "p" else int(i) for i in spec_idx]


def run_reproduce(
    table_id: str, trials: int = 5, seed: int = 0, workers: int = 1
) -> dict:
    """Recompute one benchmark table; returns a JSON-ready dict.

    Each (distribution, dimension) row gets its own disjoint seed block
    (``seed + row_number * trials``), so rows are independent but the whole
    table is reproducible from one seed.
    """
    if table_id not in REPRODUCE_TABLES:
        raise ValueError(
            f"unknown table {table_id!r}; available: {sorted(REPRODUCE_TABLES)}"
        )
    recipe = REPRODUCE_TABLES[table_id]
    spikes = tuple(SpikeSpec(a, k) for a, k in recipe["spikes"])

    p0, n0 = recipe["dims"][0]
    c = p0 / n0
    theoretical = []
    for col, idx in zip(recipe["columns"], recipe["column_index"]):
        model = SpikedModel(spikes=spikes, p=p0, n=n0)
        pred = predict(model)
        entry = pred.by_index(p0 if idx == "p" else idx)
        theoretical.append(entry.limit)

    rows = []
    row_no = 0
    for dist in recipe["distributions"]:
        for p, n in recipe["dims"]:
            model = SpikedModel(spikes=spikes, p=p, n=n)
            mc = monte_carlo(model, dist, trials, seed + row_no * trials, workers=workers)
            cols = _column_indices(recipe["column_index"], p)
            observed = []
            for i in cols:
                pos = mc.indices.index(i)
                observed.append(float(mc.mean[pos]))
            rows.append(
                {
                    "label": f"{dist} p={p}",
                    "distribution": dist,
                    "p": p,
                    "n": n,
                    "observed": observed,
                    "abs_error": [abs(o - t) for o, t in zip(observed, theoretical)],
                }
            )
            row_no += 1

    return {
        "table": table_id,
        "aspect_ratio": c,
        "columns": list(recipe["columns"]),
        "theoretical": theoretical,
        "rows": rows,
        "trials": trials,
        "base_seed": seed,
    }


def reproduce_to_text(result: dict) -> str:
    """Fixed-width rendering of a benchmark table (5-decimal values)."""
    cols = result["columns"]
    label_w = max(12, *(len(r["label"]) for r in result["rows"]))
    out = [f"table {result['table']}  (c = {result['aspect_ratio']:g}, "
           f"{result['trials']} trials, base seed {result['base_seed']})"]
    header = "".join(f"{c:>18}" for c in cols)
    out.append(f"{'':<{label_w}}{header}")
    theo = "".join(f"{v:>18.5f}" for v in result["theoretical"])
    out.append(f"{'theoretical':<{label_w}}{theo}")
    for r in result["rows"]:
        obs = "".join(f"{v:>18.5f}" for v in r["observed"])
        out.append(f"{r['label']:<{label_w}}{obs}")
    return "\n".join(out) + "\n"


def reproduce_to_csv(result: dict) -> str:
    """CSV rendering: one row per model/distribution plus the theoretical row."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "distribution", "p", "n"] + list(result["columns"]))
    w.writerow(["theoretical", "", "", ""] + [repr(v) for v in result["theoretical"]])
    for r in result["rows"]:
        w.writerow(
            [r["label"], r["distribution"], r["p"], r["n"]]
            + [repr(v) for v in r["observed"]]
        )
    return buf.getvalue()


def reproduce_figure(result: dict, path: str) -> None:
    """Observed-vs-theoretical scatter, one panel per reported order statistic."""
    cols = result["columns"]
    fig, axes = plt.subplots(1, len(cols), figsize=(4 * len(cols), 3.5), squeeze=False)
    for k, (ax, col) in enumerate(zip(axes[0], cols)):
        theo = result["theoretical"][k]
        ax.axhline(theo, color="k", lw=1, label=f"limit {theo:.5f}")
        for i, r in enumerate(result["rows"]):
            ax.plot(i, r["observed"][k], "+", ms=12, mew=2, label=r["label"])
        ax.set_title(col.replace("_", " "))
        ax.set_xticks(range(len(result["rows"])))
        ax.set_xticklabels([r["label"] for r in result["rows"]], rotation=30, ha="right",
                           fontsize=7)
        if k == 0:
            ax.set_ylabel("eigenvalue")
    fig.suptitle(f"benchmark {result['table']}: Monte Carlo means vs limits")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def run_density_overlay(
    model: SpikedModel,
    distribution: EntryDistribution | str = "gaussian",
    seed: int = 0,
    points: int = 512,
    hist_bins: int = 60,
    nonzero_only: bool = False,
    out_prefix: str = "overlay",
) -> dict:
    """Simulate one spectrum and write it against the limiting law.

    Writes four files next to each other and returns their paths:

    - ``<prefix>_density.csv``: (x, density) of the continuous limiting law on
      ``points`` grid nodes across its bulk support;
    - ``<prefix>_histogram.csv``: bin edges, counts, and normalized height of
      the simulated spectrum;
    - ``<prefix>_markers.csv``: predicted positions of the separated
      eigenvalues (the spike limits);
    - ``<prefix>.png``: the overlay figure.

    With ``nonzero_only`` (for p > n) the exact zeros are dropped and the
    figure's curve is rescaled by c so both panels remain density-normalized.
    """
    law = MPLaw(model.c_p)
    sample = sample_eigenvalues(model, distribution, seed)
    pred = predict(model)
    markers = [
        (e.limit, e.alpha, e.lo, e.hi) for e in pred.entries if e.kind == "spike"
    ]

    grid = np.linspace(law.a, law.b, points)
    dens = mp_density(grid, model.c_p)

    vals = sample.eigenvalues
    used = vals[vals > 0.0] if nonzero_only else vals
    lo = min(float(used.min()), law.a)
    hi = max(float(used.max()), law.b)
    counts, edges = histogram(sample, hist_bins, (lo, hi), nonzero_only=nonzero_only)
    widths = np.diff(edges)
    norm = counts / (len(used) * widths)

    paths = {
        "density": f"{out_prefix}_density.csv",
        "histogram": f"{out_prefix}_histogram.csv",
        "markers": f"{out_prefix}_markers.csv",
        "figure": f"{out_prefix}.png",
    }

    with open(paths["density"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "density"])
        for x, d in zip(grid, dens):
            w.writerow([repr(float(x)), repr(float(d))])

    with open(paths["histogram"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "count", "normalized"])
        for blo, bhi, cnt, nm in zip(edges[:-1], edges[1:], counts, norm):
            w.writerow([repr(float(blo)), repr(float(bhi)), int(cnt), repr(float(nm))])

    with open(paths["markers"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["position", "alpha", "index_lo", "index_hi"])
        for pos, alpha, ilo, ihi in markers:
            w.writerow([repr(float(pos)), repr(float(alpha)), ilo, ihi])

    curve_scale = model.c_p if (nonzero_only and model.c_p > 1.0) else 1.0
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(edges[:-1], norm, width=widths, align="edge", alpha=0.45,
           color="#4477aa", label=f"simulated spectrum (seed {seed})")
    ax.plot(grid, curve_scale * dens, "k-", lw=1.5, label="limiting density")
    if markers:
        ax.plot([m[0] for m in markers], [0.0] * len(markers), "r+", ms=14, mew=2,
                label="predicted separated eigenvalues")
    shown = vals[vals > law.b * 1.0000001]
    if len(shown):
        ax.plot(shown, [0.0] * len(shown), "bx", ms=7, label="observed above bulk")
    ax.set_xlabel("eigenvalue")
    ax.set_ylabel("density")
    ax.set_title(f"p={model.p}, n={model.n}, c={model.c_p:g}, {sample.distribution.value}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(paths["figure"], dpi=150)
    plt.close(fig)

    return paths


def write_json(obj: dict, path: str) -> None:
    with open(path, "w", newline="") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")
