"""The Marchenko-Pastur law: the limiting spectral distribution of a null
(identity-covariance) sample covariance matrix at aspect ratio c = p/n.

Continuous density on [a, b] with a = (1 - sqrt(c))^2 and b = (1 + sqrt(c))^2:

    f(x) = sqrt((b - x) (x - a)) / (2 pi x c),

plus, when c > 1, an atom at 0 of mass 1 - 1/c.  The companion law (the
spectral law of the n x n matrix sharing the nonzero eigenvalues) has the same
continuous part scaled by c and an atom at 0 of mass max(0, 1 - c).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate


def mp_edges(c: float) -> tuple[float, float]:
    """Bulk support edges ``((1 - sqrt(c))**2, (1 + sqrt(c))**2)``."""
    if not (c > 0) or not math.isfinite(c):
        raise ValueError(f"aspect ratio c must be positive and finite, got {c}")
    root = math.sqrt(c)
    return (1.0 - root) ** 2, (1.0 + root) ** 2


@dataclass(frozen=True)
class MPLaw:
    """Marchenko-Pastur law at aspect ratio ``c``.

    ``atom_mass_at_zero`` is the point mass of the p x p law at 0, i.e.
    ``max(0, 1 - 1/c)``; the companion (n x n) law instead carries
    ``max(0, 1 - c)`` at 0.
    """

    c: float
    a: float = field(init=False)
    b: float = field(init=False)
    atom_mass_at_zero: float = field(init=False)

    def __post_init__(self):
        lo, hi = mp_edges(self.c)
        object.__setattr__(self, "a", lo)
        object.__setattr__(self, "b", hi)
        object.__setattr__(self, "atom_mass_at_zero", max(0.0, 1.0 - 1.0 / self.c))

    @property
    def companion_atom_mass(self) -> float:
        return max(0.0, 1.0 - self.c)


def mp_density(x, c: float):
    """Continuous Marchenko-Pastur density at ``x`` (scalar or array).

    Vanishes outside the open interval (a, b); the atom at 0 (present for
    c > 1) is *not* included here -- see :func:`mp_cdf` for the full law.
    """
    a, b = mp_edges(c)
    arr = np.asarray(x, dtype=float)
    out = np.zeros_like(arr)
    inside = (arr > a) & (arr < b)
    xi = arr[inside]
    out[inside] = np.sqrt((b - xi) * (xi - a)) / (2.0 * np.pi * xi * c)
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out)
    return out


def mp_cdf(x: float, c: float) -> float:
    """Distribution function of the full Marchenko-Pastur law (atom included).

    The continuous part is integrated with the substitution
    x = a + (b - a) sin^2(theta), under which the integrand is smooth on
    [0, pi/2] (the edge square roots become sin * cos, and the 1/x pole that
    appears at c = 1 is cancelled); adaptive quadrature then resolves it to
    near machine precision.
    """
    a, b = mp_edges(c)
    law = MPLaw(c)
    if x < 0.0 or (x == 0.0 and c <= 1.0):
        return 0.0
    if x >= b:
        return 1.0
    atom = law.atom_mass_at_zero
    if x <= a:
        return atom
    span = b - a
    theta_hi = math.asin(min(1.0, math.sqrt((x - a) / span)))
    if theta_hi <= 0.0:
        return atom

    def integrand(theta):
        s, co = math.sin(theta), math.cos(theta)
        xt = a + span * s * s
        # density * dx/dtheta; sqrt((b-x)(x-a)) = span * s * co exactly.
        return (span * s * co) / (2.0 * math.pi * xt * c) * (2.0 * span * s * co)

    val, _ = integrate.quad(integrand, 0.0, theta_hi, epsabs=1e-13, epsrel=1e-13, limit=200)
    return min(1.0, atom + val)


def companion_law_convert(f_companion: float, c: float, x: float) -> float:
    """Convert a companion-law (n x n side) CDF value at ``x`` to the p x p law.

    The two distribution functions are linked by
    ``F(x) = (F_companion(x) - (1 - c) * [x >= 0]) / c``; a value outside
    [0, 1] after conversion signals an inconsistent input and raises.
    """
    if not (c > 0):
        raise ValueError(f"aspect ratio c must be positive, got {c}")
    step = 1.0 if x >= 0.0 else 0.0
    out = (f_companion - (1.0 - c) * step) / c
    if out < -1e-12 or out > 1.0 + 1e-12:
        raise ValueError(
            f"converted CDF value {out} falls outside [0, 1]; "
            f"input {f_companion} is not a valid companion-law value at x = {x}"
        )
    return min(1.0, max(0.0, out))
