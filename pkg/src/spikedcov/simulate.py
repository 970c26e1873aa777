"""Finite-sample eigenvalue simulation for spiked covariance models.

Draws Z with i.i.d. entries (mean 0, E|Z|^2 = 1), forms the sample covariance
(1/n) T^{1/2} Z Z* T^{1/2} with T the model's population diagonal, and returns
its ordered spectrum.  For p > n the p x p matrix is rank deficient, so the
spectrum is computed from the n x n companion matrix (1/n) Z* T Z — which
shares the nonzero eigenvalues — and padded with exactly p - n zeros.

Streams are seeded counter-style: trial t of a Monte Carlo run uses
``base_seed + t``, so any trial can be reproduced in isolation and results do
not depend on worker scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .limits import PredictionReport, predict
from .model import EntryDistribution, SpikedModel, require_valid

# Relative floor below which a computed eigenvalue is snapped to exact zero.
_ZERO_CLAMP = 1e-10


class EigensolverError(RuntimeError):
    """The dense symmetric eigensolver failed or returned eigenvalues more
    negative than rounding can explain."""


@dataclass(frozen=True)
class EigenSample:
    """One simulated spectrum: eigenvalues sorted descending, length p."""

    model: SpikedModel
    distribution: EntryDistribution
    seed: int
    eigenvalues: np.ndarray


def _draw_entries(rng: np.random.Generator, dist: EntryDistribution, p: int, n: int):
    if dist is EntryDistribution.GAUSSIAN:
        return rng.standard_normal((p, n))
    if dist is EntryDistribution.COMPLEX_GAUSSIAN:
        return (rng.standard_normal((p, n)) + 1j * rng.standard_normal((p, n))) / np.sqrt(2.0)
    if dist is EntryDistribution.RADEMACHER:
        return (rng.integers(0, 2, size=(p, n)) * 2 - 1).astype(float)
    raise ValueError(f"unknown entry distribution {dist!r}")


def eigenvalues_given_entries(model: SpikedModel, entries: np.ndarray) -> np.ndarray:
    """Ordered sample-covariance spectrum for an explicit (p, n) entry matrix.

    Computes the smaller of the p x p matrix and its n x n companion; the two
    share all nonzero eigenvalues, and the companion route makes the p - n
    null eigenvalues exact zeros instead of eigensolver noise.
    """
    p, n = model.p, model.n
    if entries.shape != (p, n):
        raise ValueError(f"entry matrix has shape {entries.shape}, expected {(p, n)}")
    scaled = np.sqrt(model.population_diagonal())[:, None] * entries
    try:
        if p <= n:
            mat = scaled @ scaled.conj().T / n
            mat = (mat + mat.conj().T) / 2.0
            vals = np.linalg.eigvalsh(mat)
            spectrum = vals[::-1].copy()
        else:
            mat = scaled.conj().T @ scaled / n
            mat = (mat + mat.conj().T) / 2.0
            vals = np.linalg.eigvalsh(mat)
            spectrum = np.concatenate([vals[::-1], np.zeros(p - n)])
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"dense eigensolver failed: {exc}") from exc

    top = spectrum[0] if spectrum[0] > 0.0 else 0.0
    if spectrum[-1] < -_ZERO_CLAMP * max(1.0, top):
        raise EigensolverError(
            f"eigensolver returned {spectrum[-1]}, more negative than rounding allows"
        )
    spectrum[spectrum < _ZERO_CLAMP * top] = 0.0
    return spectrum


def sample_eigenvalues(
    model: SpikedModel, distribution: EntryDistribution | str, seed: int
) -> EigenSample:
    """Draw one spectrum with a fresh PCG64 stream seeded by ``seed``."""
    require_valid(model)
    dist = EntryDistribution(distribution) if isinstance(distribution, str) else distribution
    rng = np.random.default_rng(seed)
    entries = _draw_entries(rng, dist, model.p, model.n)
    return EigenSample(
        model=model,
        distribution=dist,
        seed=int(seed),
        eigenvalues=eigenvalues_given_entries(model, entries),
    )


def tracked_indices(prediction: PredictionReport) -> tuple[int, ...]:
    """Eigenvalue indices worth recording per trial: every index covered by a
    spike or bulk-edge entry, plus only the endpoints of a zero block."""
    idx: set[int] = set()
    for e in prediction.entries:
        if e.kind == "zero":
            idx.update((e.lo, e.hi))
        else:
            idx.update(range(e.lo, e.hi + 1))
    return tuple(sorted(idx))


@dataclass(frozen=True)
class MonteCarloSummary:
    """Per-index statistics of repeated spectrum draws.

    ``samples[t, i]`` is eigenvalue ``indices[i]`` of trial t (seed
    ``base_seed + t``); ``theoretical`` maps each tracked index to its
    predicted limit.
    """

    model: SpikedModel
    distribution: EntryDistribution
    trials: int
    base_seed: int
    indices: tuple[int, ...]
    samples: np.ndarray
    theoretical: dict[int, float]

    @property
    def mean(self) -> np.ndarray:
        return self.samples.mean(axis=0)

    @property
    def std(self) -> np.ndarray:
        return self.samples.std(axis=0, ddof=1 if self.trials > 1 else 0)

    @property
    def min(self) -> np.ndarray:
        return self.samples.min(axis=0)

    @property
    def max(self) -> np.ndarray:
        return self.samples.max(axis=0)

    def stats_rows(self) -> list[dict]:
        rows = []
        for i, idx in enumerate(self.indices):
            rows.append(
                {
                    "index": idx,
                    "theoretical": self.theoretical.get(idx),
                    "mean": float(self.mean[i]),
                    "std": float(self.std[i]),
                    "min": float(self.min[i]),
                    "max": float(self.max[i]),
                }
            )
        return rows


def monte_carlo(
    model: SpikedModel,
    distribution: EntryDistribution | str,
    trials: int,
    base_seed: int,
    workers: int = 1,
) -> MonteCarloSummary:
    """Run ``trials`` independent draws and aggregate the tracked indices.

    Trial t always uses seed ``base_seed + t``, and results are written into a
    preallocated slot by trial number, so the summary is identical for any
    ``workers`` count (the eigensolver releases the interpreter lock, so
    threads parallelize the LAPACK work).
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    dist = EntryDistribution(distribution) if isinstance(distribution, str) else distribution
    pred = predict(model)
    idx = tracked_indices(pred)
    take = np.array(idx, dtype=int) - 1
    samples = np.empty((trials, len(idx)))

    def one(t: int) -> None:
        s = sample_eigenvalues(model, dist, base_seed + t)
        samples[t] = s.eigenvalues[take]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one, range(trials)))
    else:
        for t in range(trials):
            one(t)

    theor = {}
    for i in idx:
        entry = pred.by_index(i)
        if entry is not None:
            theor[i] = entry.limit
    return MonteCarloSummary(
        model=model,
        distribution=dist,
        trials=trials,
        base_seed=int(base_seed),
        indices=idx,
        samples=samples,
        theoretical=theor,
    )


@dataclass(frozen=True)
class SeparationCheck:
    """Exact-separation verdict for one draw: does the open interval (a, b)
    split the spectrum with exactly i_p eigenvalues strictly above it?

    Requires s_{i_p} > b and s_{i_p + 1} < a, with the conventions
    s_0 = +inf (i_p = 0 demands the whole spectrum below a) and
    s_{p+1} = -inf (i_p = p demands it all above b).
    """

    interval: tuple[float, float]
    i_p: int
    passed: bool
    upper_value: float
    lower_value: float


def separation_check(sample: EigenSample, a: float, b: float, i_p: int) -> SeparationCheck:
    """Check exact separation of ``sample``'s spectrum by (a, b) at split i_p."""
    if not (a <= b):
        raise ValueError(f"interval bounds out of order: ({a}, {b})")
    p = sample.model.p
    if not (0 <= i_p <= p):
        raise ValueError(f"i_p must be in [0, {p}], got {i_p}")
    vals = sample.eigenvalues
    upper = math.inf if i_p == 0 else float(vals[i_p - 1])
    lower = -math.inf if i_p == p else float(vals[i_p])
    return SeparationCheck(
        interval=(a, b),
        i_p=i_p,
        passed=bool(upper > b and lower < a),
        upper_value=upper,
        lower_value=lower,
    )


def histogram(
    sample: EigenSample,
    bins: int,
    value_range: tuple[float, float] | None = None,
    nonzero_only: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Bin counts and edges of one spectrum; ``nonzero_only`` drops the exact
    zeros (useful for p > n, where they would dwarf the continuous bulk)."""
    vals = sample.eigenvalues
    if nonzero_only:
        vals = vals[vals > 0.0]
    return np.histogram(vals, bins=bins, range=value_range)
