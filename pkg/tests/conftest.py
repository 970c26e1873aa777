"""Shared fixtures and independent numerical oracles for the test suite."""

import numpy as np
import pytest

from spikedcov import SpikedModel, SpikeSpec


@pytest.fixture
def chalf_model():
    """Reference model at c = 1/2: spikes 4, 3, 0.1, p = 1000, n = 2000."""
    return SpikedModel(spikes=(SpikeSpec(4.0), SpikeSpec(3.0), SpikeSpec(0.1)),
                       p=1000, n=2000)


@pytest.fixture
def ctwo_model():
    """Reference model at c = 2: spikes 4, 3, p = 2000, n = 1000."""
    return SpikedModel(spikes=(SpikeSpec(4.0), SpikeSpec(3.0)), p=2000, n=1000)


def random_nondegenerate_model(rng, n_lo=1000, n_hi=100000, max_spikes=3):
    """Draw a model with c_p in [0.1, 5] \\ (0.99, 1.01) and every spike well
    clear of the critical thresholds, so the root pattern is unambiguous."""
    while True:
        n = int(np.exp(rng.uniform(np.log(n_lo), np.log(n_hi))))
        cp_target = rng.uniform(0.1, 5.0)
        p = int(round(cp_target * n))
        if p < 1:
            continue
        cp = p / n
        if not (0.1 <= cp <= 5.0) or 0.99 < cp < 1.01:
            continue
        root = np.sqrt(cp)
        margin = 0.35 * max(1.0, root)
        spikes = []
        ok = True
        for _ in range(rng.integers(0, max_spikes + 1)):
            a = float(np.exp(rng.uniform(np.log(0.08), np.log(10.0))))
            if (abs(a - (1 + root)) < margin or abs(a - (1 - root)) < margin
                    or abs(a - 1.0) < 0.05):
                ok = False
                break
            if any(abs(a - s.alpha) < 0.05 * a for s in spikes):
                ok = False
                break
            spikes.append(SpikeSpec(a, int(rng.integers(1, 4))))
        if not ok:
            continue
        model = SpikedModel(spikes=tuple(spikes), p=p, n=n)
        if model.r > model.p:
            continue
        return model


def _zprime_vec(model, m):
    """Vectorized z'(m), written independently of the library implementation."""
    m = np.asarray(m, dtype=float)
    cp = model.p / model.n
    out = 1.0 / m**2 - cp / (1.0 + m) ** 2 + (model.r / model.n) / (1.0 + m) ** 2
    for s in model.spikes:
        out -= (s.multiplicity / model.n) * s.alpha**2 / (1.0 + s.alpha * m) ** 2
    return out


def sign_scan_oracle(model, uniform_points=1_000_000):
    """Independent critical-point oracle: dense sign scan of z' plus bisection.

    Builds a grid of ``uniform_points`` equally spaced values spanning all
    poles and asymptotic root locations, augmented with geometric clusters
    around each of them (to resolve the O(1/sqrt(n)) root pairs), and refines
    every sign change of z' by plain interval bisection.
    """
    cp = model.p / model.n
    root = np.sqrt(cp)
    qs = sorted([0.0, -1.0] + [-1.0 / s.alpha for s in model.spikes])
    anchors = qs + [-1.0 / (1.0 + root), -1.0 / (1.0 - root)]
    lo = min(anchors) - 20.0
    hi = max(anchors) + 20.0

    pieces = [np.linspace(lo, hi, uniform_points)]
    ladder = np.geomspace(1e-12, 1.0, 300)
    for q in anchors:
        s = max(1.0, abs(q))
        pieces.append(q + ladder * s)
        pieces.append(q - ladder * s)
    grid = np.unique(np.concatenate(pieces))
    for q in qs:
        grid = grid[np.abs(grid - q) > 1e-13 * max(1.0, abs(q))]

    with np.errstate(divide="ignore", over="ignore"):
        vals = _zprime_vec(model, grid)
    good = np.isfinite(vals)
    grid, vals = grid[good], vals[good]
    sgn = np.sign(np.where(vals == 0.0, 1e-300, vals))
    flips = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]

    roots = []
    for i in flips:
        a, b = float(grid[i]), float(grid[i + 1])
        fa = float(_zprime_vec(model, np.array([a]))[0])
        for _ in range(200):
            mid = 0.5 * (a + b)
            if mid == a or mid == b:
                break
            fm = float(_zprime_vec(model, np.array([mid]))[0])
            if fa * fm <= 0.0:
                b = mid
            else:
                a, fa = mid, fm
            if b - a <= 1e-14 * max(1.0, abs(a)):
                break
        roots.append(0.5 * (a + b))
    return sorted(roots)
