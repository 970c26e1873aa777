"""Spiked population covariance models and phase classification.

The population covariance is diagonal: a fixed number of "spike" eigenvalues
alpha_1 > alpha_2 > ... > alpha_M (each with a finite multiplicity) followed by
ones.  Sample eigenvalue behaviour is governed by the aspect ratio c = p/n and
by where each alpha sits relative to the critical window [1 - sqrt(c), 1 + sqrt(c)].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

#: Sentinel limit for spikes whose sample eigenvalue sticks to the bulk edge.
BULK_EDGE = "bulk-edge"


class EntryDistribution(Enum):
    """Admissible i.i.d. entry laws: mean zero, unit absolute second moment,
    finite fourth moment."""

    GAUSSIAN = "gaussian"
    COMPLEX_GAUSSIAN = "cgaussian"
    RADEMACHER = "rademacher"

    @property
    def is_complex(self) -> bool:
        return self is EntryDistribution.COMPLEX_GAUSSIAN


class Regime(Enum):
    """Phase of a single spike relative to the critical window."""

    SUPERCRITICAL = "supercritical"
    BULK = "bulk"
    SUBCRITICAL = "subcritical"


@dataclass(frozen=True)
class SpikeSpec:
    """One population spike: an eigenvalue ``alpha`` repeated ``multiplicity`` times."""

    alpha: float
    multiplicity: int = 1

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise ValueError(f"spike value must be finite, got {self.alpha}")
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise ValueError(f"multiplicity must be a positive integer, got {self.multiplicity}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "multiplicity", int(self.multiplicity))


def parse_spike(text: str) -> SpikeSpec:
    """Parse ``"value"`` or ``"value:multiplicity"`` into a :class:`SpikeSpec`."""
    parts = text.split(":")
    if len(parts) == 1:
        return SpikeSpec(float(parts[0]))
    if len(parts) == 2:
        return SpikeSpec(float(parts[0]), int(parts[1]))
    raise ValueError(f"malformed spike {text!r}; expected 'value' or 'value:multiplicity'")


def format_spike(spike: SpikeSpec) -> str:
    """Inverse of :func:`parse_spike`."""
    if spike.multiplicity == 1:
        return repr(spike.alpha)
    return f"{spike.alpha!r}:{spike.multiplicity}"


@dataclass(frozen=True)
class SpikedModel:
    """A finite-dimensional spiked model: dimensions (p, n) plus the spike list.

    Spikes are canonicalized on construction: sorted in strictly decreasing
    order of alpha, with duplicate alphas merged by summing multiplicities.
    """

    spikes: tuple[SpikeSpec, ...]
    p: int
    n: int

    def __post_init__(self):
        normalized = []
        for s in self.spikes:
            if not isinstance(s, SpikeSpec):
                s = SpikeSpec(*s) if isinstance(s, (tuple, list)) else SpikeSpec(s)
            normalized.append(s)
        merged: dict[float, int] = {}
        for s in normalized:
            merged[s.alpha] = merged.get(s.alpha, 0) + s.multiplicity
        canon = tuple(
            SpikeSpec(a, k) for a, k in sorted(merged.items(), key=lambda t: -t[0])
        )
        object.__setattr__(self, "spikes", canon)
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "n", int(self.n))

    @property
    def c_p(self) -> float:
        """Finite-sample aspect ratio p/n."""
        return self.p / self.n

    @property
    def r(self) -> int:
        """Total number of spiked population eigenvalues (with multiplicity)."""
        return sum(s.multiplicity for s in self.spikes)

    @property
    def num_spikes(self) -> int:
        """Number of distinct spike values."""
        return len(self.spikes)

    @property
    def alphas(self) -> tuple[float, ...]:
        return tuple(s.alpha for s in self.spikes)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(s.multiplicity for s in self.spikes)

    def block_bounds(self) -> tuple[int, ...]:
        """Cumulative multiplicities K_0 = 0 <= K_1 <= ... <= K_M = r."""
        out = [0]
        for s in self.spikes:
            out.append(out[-1] + s.multiplicity)
        return tuple(out)

    def population_diagonal(self) -> np.ndarray:
        """Diagonal of the population covariance, length p, spikes first."""
        diag = np.ones(self.p)
        pos = 0
        for s in self.spikes:
            diag[pos : pos + s.multiplicity] = s.alpha
            pos += s.multiplicity
        return diag


@dataclass(frozen=True)
class ValidationResult:
    """Outcome of :func:`validate`: ``ok`` plus human-readable violations."""

    ok: bool
    violations: tuple[str, ...] = field(default=())


def validate(model: SpikedModel) -> ValidationResult:
    """Check a model against the admissibility rules.

    Rules: positive integer dimensions; every alpha positive, finite, and not
    exactly 1; multiplicities positive integers; distinct alphas (guaranteed by
    canonicalization but re-checked); total spike count r <= p.
    """
    bad: list[str] = []
    if model.p < 1:
        bad.append(f"p must be >= 1, got {model.p}")
    if model.n < 1:
        bad.append(f"n must be >= 1, got {model.n}")
    for s in model.spikes:
        if not (s.alpha > 0):
            bad.append(f"spike {s.alpha} must be positive")
        elif s.alpha == 1.0:
            bad.append("spike value 1 is not a spike (it coincides with the base eigenvalue)")
        if s.multiplicity < 1:
            bad.append(f"multiplicity {s.multiplicity} must be >= 1")
    alphas = model.alphas
    if len(set(alphas)) != len(alphas) or list(alphas) != sorted(alphas, reverse=True):
        bad.append("spike values must be distinct and strictly decreasing")
    if model.r > model.p:
        bad.append(f"total spike multiplicity {model.r} exceeds p = {model.p}")
    return ValidationResult(ok=not bad, violations=tuple(bad))


def require_valid(model: SpikedModel) -> None:
    """Raise ``ValueError`` listing all violations if the model is inadmissible."""
    result = validate(model)
    if not result.ok:
        raise ValueError("invalid model: " + "; ".join(result.violations))


@dataclass(frozen=True)
class SpikeClassification:
    """Phase of one spike together with its almost-sure sample-eigenvalue limit.

    ``limit`` is a float for separated (super/subcritical) spikes and the
    string :data:`BULK_EDGE` for spikes inside the critical window.
    """

    regime: Regime
    limit: float | str


def classify(alpha: float, c: float) -> SpikeClassification:
    """Classify a spike ``alpha`` at aspect ratio ``c``.

    Strictly above ``1 + sqrt(c)`` the matching sample eigenvalues separate
    above the bulk and converge to ``alpha + c * alpha / (alpha - 1)``; strictly
    below ``1 - sqrt(c)`` they separate below it (same limit formula); on either
    boundary or inside the window they stick to a bulk edge.  For c >= 1 the
    lower threshold is <= 0, so no positive spike is ever subcritical.
    """
    if not (alpha > 0) or not math.isfinite(alpha):
        raise ValueError(f"alpha must be a positive finite number, got {alpha}")
    if not (c > 0) or not math.isfinite(c):
        raise ValueError(f"c must be a positive finite number, got {c}")
    root = math.sqrt(c)
    if alpha > 1.0 + root:
        return SpikeClassification(Regime.SUPERCRITICAL, alpha + c * alpha / (alpha - 1.0))
    if alpha < 1.0 - root:
        return SpikeClassification(Regime.SUBCRITICAL, alpha + c * alpha / (alpha - 1.0))
    return SpikeClassification(Regime.BULK, BULK_EDGE)
