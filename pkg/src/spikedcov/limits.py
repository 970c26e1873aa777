"""Almost-sure limits of the ordered sample eigenvalues of a spiked model.

Given spikes alpha_1 > ... > alpha_M with multiplicities k_1, ..., k_M and
cumulative counts K_j = k_1 + ... + k_j, the ordered sample eigenvalues
converge blockwise: each supercritical spike pulls its k_j eigenvalues (at the
top of the spectrum) to alpha_j + c alpha_j/(alpha_j - 1); the next eigenvalue
down sticks to the upper bulk edge (1 + sqrt(c))^2; symmetrically at the bottom
for subcritical spikes and the lower bulk edge; and for p > n the smallest
p - n eigenvalues are exactly 0 at every finite dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import Regime, SpikedModel, classify, require_valid


def spike_limit(alpha: float, c: float) -> float:
    """The separated-eigenvalue limit alpha + c * alpha / (alpha - 1).

    Defined for alpha != 1; meaningful (equal to an actual eigenvalue limit)
    only when alpha is outside the critical window [1 - sqrt(c), 1 + sqrt(c)].
    """
    if alpha == 1.0:
        raise ValueError("alpha = 1 is a pole of the limit formula (not a spike)")
    return alpha + c * alpha / (alpha - 1.0)


@dataclass(frozen=True)
class PredictionEntry:
    """Limit of the sample eigenvalues s_lo, ..., s_hi (1-based, descending order).

    ``kind`` is one of ``spike``, ``bulk-upper-edge``, ``bulk-lower-edge``,
    ``zero``; ``alpha`` is set for spike entries only.
    """

    lo: int
    hi: int
    limit: float
    kind: str
    alpha: float | None = None


@dataclass(frozen=True)
class PredictionReport:
    """All predicted eigenvalue limits of a model, ordered by index."""

    entries: tuple[PredictionEntry, ...]
    c: float
    regime: str
    p: int
    n: int

    @property
    def zero_count(self) -> int:
        return sum(e.hi - e.lo + 1 for e in self.entries if e.kind == "zero")

    def by_index(self, i: int) -> PredictionEntry | None:
        """The entry covering sample eigenvalue s_i, if any."""
        for e in self.entries:
            if e.lo <= i <= e.hi:
                return e
        return None


def predict(model: SpikedModel, c: float | None = None) -> PredictionReport:
    """Predict the limits of all tracked ordered sample eigenvalues.

    ``c`` defaults to the model's own aspect ratio p/n; overriding it changes
    the thresholds and limit values but never the index bookkeeping, which
    always follows the finite dimensions.  Eigenvalue indices that fall outside
    [1, p] (possible only in corner cases like r = p) are dropped.
    """
    require_valid(model)
    if c is None:
        c = model.c_p
    if not (c > 0) or not math.isfinite(c):
        raise ValueError(f"aspect ratio c must be positive and finite, got {c}")
    p, n, r = model.p, model.n, model.r
    bounds = model.block_bounds()
    classes = [classify(s.alpha, c) for s in model.spikes]
    upper_edge = (1.0 + math.sqrt(c)) ** 2
    lower_edge = (1.0 - math.sqrt(c)) ** 2

    entries: list[PredictionEntry] = []
    n_super = sum(1 for cl in classes if cl.regime is Regime.SUPERCRITICAL)
    n_sub = sum(1 for cl in classes if cl.regime is Regime.SUBCRITICAL)

    # Top of the spectrum: supercritical blocks occupy indices K_{j-1}+1 .. K_j,
    # then the next eigenvalue sticks to the upper bulk edge.
    for j, (s, cl) in enumerate(zip(model.spikes, classes)):
        if cl.regime is Regime.SUPERCRITICAL:
            entries.append(
                PredictionEntry(
                    lo=bounds[j] + 1,
                    hi=bounds[j + 1],
                    limit=float(cl.limit),
                    kind="spike",
                    alpha=s.alpha,
                )
            )
    entries.append(
        PredictionEntry(
            lo=bounds[n_super] + 1, hi=bounds[n_super] + 1, limit=upper_edge,
            kind="bulk-upper-edge",
        )
    )

    # Bottom of the spectrum.  For c < 1 the subcritical blocks sit just above
    # the smallest r - K_{j-1} eigenvalues, with the lower bulk edge directly
    # above them; for c = 1 the smallest eigenvalue tends to 0; for c > 1 the
    # smallest p - n eigenvalues vanish identically and s_n meets the lower edge.
    if c < 1.0 and p <= n:
        m1 = model.num_spikes - n_sub  # spikes not subcritical
        entries.append(
            PredictionEntry(
                lo=p - r + bounds[m1], hi=p - r + bounds[m1], limit=lower_edge,
                kind="bulk-lower-edge",
            )
        )
        for j, (s, cl) in enumerate(zip(model.spikes, classes)):
            if cl.regime is Regime.SUBCRITICAL:
                entries.append(
                    PredictionEntry(
                        lo=p - r + bounds[j] + 1,
                        hi=p - r + bounds[j + 1],
                        limit=float(cl.limit),
                        kind="spike",
                        alpha=s.alpha,
                    )
                )
        regime = "c<1"
    elif c == 1.0 and p == n:
        entries.append(
            PredictionEntry(lo=min(n, p), hi=min(n, p), limit=0.0, kind="bulk-lower-edge")
        )
        regime = "c=1"
    else:
        entries.append(
            PredictionEntry(
                lo=min(n, p), hi=min(n, p), limit=lower_edge, kind="bulk-lower-edge"
            )
        )
        regime = "c<1" if c < 1.0 else ("c=1" if c == 1.0 else "c>1")

    if p > n:
        entries.append(PredictionEntry(lo=n + 1, hi=p, limit=0.0, kind="zero"))

    entries = [
        PredictionEntry(e.lo, min(e.hi, p), e.limit, e.kind, e.alpha)
        for e in entries
        if 1 <= e.lo <= p
    ]
    entries.sort(key=lambda e: e.lo)
    return PredictionReport(entries=tuple(entries), c=c, regime=regime, p=p, n=n)


def limit_table(spikes, c: float) -> list[dict]:
    """Dimension-free limit summary for a set of spikes at aspect ratio c.

    One row per spike (regime and limit or bulk-edge marker) plus the two bulk
    edges; used by the command-line ``predict`` when only --c is given.
    """
    rows = []
    for s in spikes:
        cl = classify(s.alpha, c)
        rows.append(
            {
                "alpha": s.alpha,
                "multiplicity": s.multiplicity,
                "regime": cl.regime.value,
                "limit": cl.limit if isinstance(cl.limit, float) else None,
                "note": None if isinstance(cl.limit, float) else cl.limit,
            }
        )
    upper = (1.0 + math.sqrt(c)) ** 2
    lower = (1.0 - math.sqrt(c)) ** 2
    rows.append({"alpha": None, "multiplicity": None, "regime": "bulk-upper-edge",
                 "limit": upper, "note": None})
    rows.append({"alpha": None, "multiplicity": None, "regime": "bulk-lower-edge",
                 "limit": lower, "note": None})
    return rows
