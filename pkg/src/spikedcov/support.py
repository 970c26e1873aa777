"""Finite-n spectral support analysis through the inverse Stieltjes transform.

The limiting law of the *nonzero* sample eigenvalues is characterized by the
rational function

    z(m) = -1/m + c_p/(1 + m)
           + (1/n) * (sum_j k_j alpha_j / (1 + alpha_j m) - r / (1 + m)),

the functional inverse of the Stieltjes transform of the companion spectral
law.  A real x lies *outside* the support exactly when x = z(m) for some real
m with z'(m) > 0 (and -1/m off the population spectrum); sweeping the real
m-line, testing the sign of z' between its poles and critical points, and
mapping the increasing pieces through z therefore yields the complement of the
support.  Each spike that sits strictly outside the critical window
[1 - sqrt(c_p), 1 + sqrt(c_p)] contributes a pair of critical points near
-1/alpha_j whose images delimit a separated support island of width O(1/sqrt(n))
around the spike's limit.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import brentq

from .model import Regime, SpikedModel, classify, require_valid

# Relative guard radius around poles of z(m).
_POLE_GUARD = 1e-12
# |c_p - 1| or |alpha - (1 +/- sqrt(c_p))| below this is a hard error ...
_DEGENERACY_TOL = 1e-9
# ... and below this only a warning: results degrade continuously.
_NEAR_DEGENERACY_TOL = 1e-6
# Agreement required between the two independent root-finding methods.
_ROOT_AGREEMENT = 1e-8
_BRENTQ_RTOL = 8.9e-16


class PoleEvaluationError(ValueError):
    """z(m) or z'(m) evaluated at (or within guard distance of) a pole."""


class DegenerateModelError(ValueError):
    """c_p = 1 or a spike on a critical threshold: the analysis breaks down."""


class RootIsolationError(RuntimeError):
    """The two root-finding methods disagree, or the root pattern does not
    match the phase classification (n too small or nearly degenerate)."""


class InconsistentSupportError(RuntimeError):
    """Assembled support intervals violate a structural invariant."""


class NearDegeneracyWarning(UserWarning):
    """Model is within 1e-6 of a degenerate configuration; accuracy degrades."""


def poles(model: SpikedModel) -> tuple[float, ...]:
    """Poles of z(m) on the real line: 0, -1, and -1/alpha_j, ascending."""
    qs = [0.0, -1.0] + [-1.0 / a for a in model.alphas]
    return tuple(sorted(set(qs)))


def _guard_pole(model: SpikedModel, m: float) -> None:
    for q in poles(model):
        if abs(m - q) <= _POLE_GUARD * max(1.0, abs(q)):
            raise PoleEvaluationError(
                f"m = {m} is within guard distance of the pole at {q}; "
                "evaluate strictly inside a pole-free interval"
            )


def z_p(model: SpikedModel, m: float) -> float:
    """Evaluate the inverse Stieltjes transform z(m) at real m (not a pole)."""
    _guard_pole(model, m)
    cp = model.c_p
    inv_n = 1.0 / model.n
    val = -1.0 / m + cp / (1.0 + m) - inv_n * model.r / (1.0 + m)
    for s in model.spikes:
        val += inv_n * s.multiplicity * s.alpha / (1.0 + s.alpha * m)
    return val


def z_p_prime(model: SpikedModel, m: float) -> float:
    """Derivative z'(m); its sign drives the support criterion."""
    _guard_pole(model, m)
    cp = model.c_p
    inv_n = 1.0 / model.n
    val = 1.0 / m**2 - cp / (1.0 + m) ** 2 + inv_n * model.r / (1.0 + m) ** 2
    for s in model.spikes:
        val -= inv_n * s.multiplicity * s.alpha**2 / (1.0 + s.alpha * m) ** 2
    return val


def _check_nondegenerate(model: SpikedModel) -> None:
    require_valid(model)
    cp = model.c_p
    if abs(cp - 1.0) < _DEGENERACY_TOL:
        raise DegenerateModelError(
            f"c_p = {cp} is (numerically) 1; the critical-point polynomial degenerates"
        )
    if abs(cp - 1.0) < _NEAR_DEGENERACY_TOL:
        warnings.warn(
            f"c_p = {cp} is within {_NEAR_DEGENERACY_TOL} of 1; "
            "support analysis is ill-conditioned",
            NearDegeneracyWarning,
            stacklevel=3,
        )
    root = math.sqrt(cp)
    for s in model.spikes:
        for thr in (1.0 + root, 1.0 - root):
            gap = abs(s.alpha - thr)
            if gap < _DEGENERACY_TOL:
                raise DegenerateModelError(
                    f"spike {s.alpha} sits (numerically) on the critical threshold {thr}"
                )
            if gap < _NEAR_DEGENERACY_TOL:
                warnings.warn(
                    f"spike {s.alpha} is within {_NEAR_DEGENERACY_TOL} of the "
                    f"critical threshold {thr}; support analysis is ill-conditioned",
                    NearDegeneracyWarning,
                    stacklevel=3,
                )


def numerator_polynomial(model: SpikedModel) -> np.ndarray:
    """Numerator of z'(m) over the common denominator, ascending coefficients.

    z'(m) = N(m) / (m^2 (1+m)^2 prod_l (1 + alpha_l m)^2) with

        N(m) = ((1+m)^2 - c_p m^2) * prod_l (1 + alpha_l m)^2
               + (1/n) * [ sum_j (-k_j alpha_j^2) m^2 (1+m)^2 prod_{l != j} (1 + alpha_l m)^2
                           + r m^2 prod_l (1 + alpha_l m)^2 ].

    The degree-(2M+2) terms of the bracketed part cancel identically, so N has
    degree exactly 2M + 2 with leading coefficient (1 - c_p) prod_j alpha_j^2;
    the cancellation is enforced exactly rather than left to floating point.
    """
    _check_nondegenerate(model)
    alphas = model.alphas
    M = len(alphas)
    cp = model.c_p

    sq = [P.polymul([1.0, a], [1.0, a]) for a in alphas]  # (1 + alpha m)^2
    prod_all = np.array([1.0])
    for s_ in sq:
        prod_all = P.polymul(prod_all, s_)

    f_poly = P.polymul([1.0, 2.0, 1.0 - cp], prod_all)

    m2 = [0.0, 0.0, 1.0]
    m2_1m2 = [0.0, 0.0, 1.0, 2.0, 1.0]  # m^2 (1+m)^2
    g_poly = np.array([0.0])
    for j, s in enumerate(model.spikes):
        prod_except = np.array([1.0])
        for l, s_ in enumerate(sq):
            if l != j:
                prod_except = P.polymul(prod_except, s_)
        term = P.polymul(m2_1m2, prod_except) * (-s.multiplicity * s.alpha**2)
        g_poly = P.polyadd(g_poly, term)
    g_poly = P.polyadd(g_poly, P.polymul(m2, prod_all) * model.r)

    deg = 2 * M + 2
    g_poly = np.concatenate([g_poly, np.zeros(max(0, deg + 1 - len(g_poly)))])
    # The coefficient of m^(2M+2) in g cancels algebraically; zero the
    # floating-point residue so N keeps its exact degree and leading term.
    lead_scale = model.r * float(np.prod(np.array(alphas) ** 2)) + 1.0
    if abs(g_poly[deg]) > 1e-9 * lead_scale:
        raise InconsistentSupportError(
            f"expected cancellation of the leading correction coefficient, got {g_poly[deg]}"
        )
    g_poly[deg] = 0.0

    num = P.polyadd(f_poly, g_poly[: deg + 1] / model.n)
    num = np.asarray(num, dtype=float)
    if len(num) != deg + 1 or num[-1] == 0.0:
        raise InconsistentSupportError(
            f"critical-point polynomial has degree {len(num) - 1}, expected {deg}"
        )
    return num


@dataclass(frozen=True)
class AsymptoticRoots:
    """Closed-form large-n approximations of the critical points of z(m).

    ``m_plus`` and ``m_minus`` (-1/(1 +/- sqrt(c_p))) generate the bulk edges.
    For each spike (in model order), ``pair_coefficient`` holds the value g such
    that the two critical points near -1/alpha_j sit at -1/alpha_j +/- sqrt(g/n);
    a negative g means the pair is complex and the spike does not separate.
    ``spike_pairs`` holds the (minus, plus) pair for separated spikes, else None.
    """

    m_plus: float
    m_minus: float
    pair_coefficient: tuple[float, ...]
    spike_pairs: tuple[tuple[float, float] | None, ...]

    def labeled(self) -> list[tuple[str, float]]:
        """Real approximate roots with their labels, ascending by position."""
        out = [("m_plus", self.m_plus), ("m_minus", self.m_minus)]
        for j, pair in enumerate(self.spike_pairs, start=1):
            if pair is not None:
                out.append((f"spike_minus({j})", pair[0]))
                out.append((f"spike_plus({j})", pair[1]))
        return sorted(out, key=lambda t: t[1])


def _pair_coefficient(model: SpikedModel, alpha: float, k: int) -> float:
    cp = model.c_p
    root = math.sqrt(cp)
    m_plus = -1.0 / (1.0 + root)
    m_minus = -1.0 / (1.0 - root)
    q = -1.0 / alpha
    return (
        k
        * (alpha - 1.0) ** 2
        / (alpha**4 * (1.0 - cp) * (q - m_plus) * (q - m_minus))
    )


def asymptotic_roots(model: SpikedModel) -> AsymptoticRoots:
    """Large-n critical-point approximations (first order in 1/sqrt(n))."""
    _check_nondegenerate(model)
    cp = model.c_p
    root = math.sqrt(cp)
    coeffs = []
    pairs = []
    for s in model.spikes:
        g = _pair_coefficient(model, s.alpha, s.multiplicity)
        coeffs.append(g)
        if classify(s.alpha, cp).regime is Regime.BULK:
            pairs.append(None)
        else:
            if g <= 0.0:
                raise InconsistentSupportError(
                    f"separated spike {s.alpha} produced a non-positive pair coefficient {g}"
                )
            half = math.sqrt(g / model.n)
            pairs.append((-1.0 / s.alpha - half, -1.0 / s.alpha + half))
    return AsymptoticRoots(
        m_plus=-1.0 / (1.0 + root),
        m_minus=-1.0 / (1.0 - root),
        pair_coefficient=tuple(coeffs),
        spike_pairs=tuple(pairs),
    )


def _cauchy_root_bound(coeffs: np.ndarray) -> float:
    lead = abs(coeffs[-1])
    return 1.0 + float(np.max(np.abs(coeffs[:-1]))) / lead


def _sign_scan_roots(model: SpikedModel, coeffs: np.ndarray) -> list[float]:
    """Bracket real roots by sign changes on the pole-partitioned line."""
    qs = poles(model)
    bound = _cauchy_root_bound(coeffs)
    grids: list[np.ndarray] = []

    ladder = np.geomspace(1e-15, 0.5, 120)
    for lo, hi in zip(qs[:-1], qs[1:]):
        span = hi - lo
        pts = np.concatenate(
            [lo + span * ladder, hi - span * ladder, np.linspace(lo, hi, 65)[1:-1]]
        )
        grids.append(np.unique(pts))
    scale_lo = max(1.0, abs(qs[0]))
    outer_lo = np.geomspace(1e-15 * scale_lo, 10.0 * (bound + scale_lo), 400)
    grids.append(np.unique(qs[0] - outer_lo)[::1])
    scale_hi = max(1.0, abs(qs[-1]))
    outer_hi = np.geomspace(1e-15 * scale_hi, 10.0 * (bound + scale_hi), 400)
    grids.append(np.unique(qs[-1] + outer_hi))

    def f(t: float) -> float:
        return float(P.polyval(t, coeffs))

    roots: list[float] = []
    for grid in grids:
        vals = P.polyval(grid, coeffs)
        vals = np.where(vals == 0.0, 1e-300, vals)
        flips = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
        for i in flips:
            roots.append(
                brentq(f, grid[i], grid[i + 1], rtol=_BRENTQ_RTOL, maxiter=200)
            )
    return sorted(roots)


@dataclass(frozen=True)
class CriticalPoints:
    """Real critical points of z(m) with labels, plus the complex-pair count.

    Labels name what each root generates: ``m_minus``/``m_plus`` map to the
    lower/upper bulk edges, ``spike_minus(j)``/``spike_plus(j)`` (1-based, in
    model order) to the lower/upper edges of spike j's support island.
    """

    model: SpikedModel
    real_roots: np.ndarray
    labels: tuple[str, ...]
    complex_pair_count: int
    polynomial: np.ndarray

    def labeled(self) -> dict[str, float]:
        return dict(zip(self.labels, self.real_roots.tolist()))


def critical_points(model: SpikedModel) -> CriticalPoints:
    """Isolate all real roots of the critical-point polynomial.

    Two independent methods must agree: sign-change bracketing on the
    pole-partitioned real line refined by Brent's method, and the eigenvalues
    of the polynomial's companion matrix.  A count or location disagreement
    (beyond 1e-8 relative), or a real/complex pattern that contradicts the
    phase classification, raises :class:`RootIsolationError`.
    """
    coeffs = numerator_polynomial(model)
    scan = _sign_scan_roots(model, coeffs)

    allroots = P.polyroots(coeffs)
    real_mask = np.abs(allroots.imag) <= _ROOT_AGREEMENT * np.maximum(1.0, np.abs(allroots))
    companion_real = np.sort(allroots.real[real_mask])

    if len(scan) != len(companion_real):
        raise RootIsolationError(
            f"sign scan isolated {len(scan)} real roots but the companion-matrix "
            f"method found {len(companion_real)}"
        )
    for a, b in zip(scan, companion_real):
        if abs(a - b) > _ROOT_AGREEMENT * max(1.0, abs(a)):
            raise RootIsolationError(
                f"root-finding methods disagree: {a} (scan) vs {b} (companion)"
            )

    cp = model.c_p
    separated = sum(
        1 for s in model.spikes if classify(s.alpha, cp).regime is not Regime.BULK
    )
    expected_real = 2 + 2 * separated
    if len(scan) != expected_real:
        raise RootIsolationError(
            f"found {len(scan)} real critical points but the phase classification "
            f"predicts {expected_real}; n may be too small for this configuration"
        )

    approx = asymptotic_roots(model).labeled()
    labels = tuple(name for name, _ in approx)
    degree = len(coeffs) - 1
    return CriticalPoints(
        model=model,
        real_roots=np.asarray(scan),
        labels=labels,
        complex_pair_count=(degree - len(scan)) // 2,
        polynomial=coeffs,
    )


@dataclass(frozen=True)
class SupportReport:
    """Support complement of the limiting law of the nonzero eigenvalues.

    ``complement_intervals`` are the maximal open x-intervals carrying no
    spectral mass, ascending (+/-inf for unbounded ends); for p <= n the point
    x = 0 separates the two lowest intervals because the companion law keeps an
    atom there.  ``generating_m_intervals`` are the matching increasing pieces
    of z(m), and ``edges`` names each finite endpoint (``z_minus``/``z_plus``
    for the bulk edges, ``z_spike_minus(j)``/``z_spike_plus(j)`` for spike j's
    island edges).
    """

    model: SpikedModel
    complement_intervals: tuple[tuple[float, float], ...]
    generating_m_intervals: tuple[tuple[float, float], ...]
    edges: dict[str, float]
    critical: CriticalPoints


def support_complement(model: SpikedModel) -> SupportReport:
    """Assemble the support complement by the increasing-piece criterion.

    Partitions the real m-line by the poles and real critical points of z,
    keeps the pieces where z' > 0 (tested at midpoints), and maps each through
    z.  Structural checks: the intervals must be pairwise disjoint and their
    number must match the phase classification (#subcritical + #supercritical
    + 3 for c_p < 1, #supercritical + 2 for c_p > 1).
    """
    crit = critical_points(model)
    qs = poles(model)
    root_list = crit.real_roots.tolist()
    cut = sorted(set(qs).union(root_list))
    pieces = [(-math.inf, cut[0])] + list(zip(cut[:-1], cut[1:])) + [(cut[-1], math.inf)]

    root_label = {r: lab for r, lab in zip(root_list, crit.labels)}

    def edge_key(label: str) -> str:
        return "z_" + (label[2:] if label.startswith("m_") else label)

    intervals: list[tuple[float, float]] = []
    m_intervals: list[tuple[float, float]] = []
    edges: dict[str, float] = {}

    for lo, hi in pieces:
        if math.isinf(lo):
            mid = hi - max(1.0, abs(hi))
        elif math.isinf(hi):
            mid = lo + max(1.0, abs(lo))
        else:
            mid = 0.5 * (lo + hi)
        if z_p_prime(model, mid) <= 0.0:
            continue
        for end in (lo, hi):
            if not math.isinf(end) and end != 0.0 and end not in root_label:
                raise InconsistentSupportError(
                    f"increasing piece ({lo}, {hi}) abuts the pole at {end}"
                )
        if math.isinf(lo):
            x_lo = 0.0  # z -> 0+ as m -> -inf
        elif lo == 0.0:
            x_lo = -math.inf  # z -> -inf as m -> 0+
        else:
            x_lo = z_p(model, lo)
            edges[edge_key(root_label[lo])] = x_lo
        if math.isinf(hi):
            x_hi = 0.0  # z -> 0- as m -> +inf
        elif hi == 0.0:
            x_hi = math.inf  # z -> +inf as m -> 0-
        else:
            x_hi = z_p(model, hi)
            edges[edge_key(root_label[hi])] = x_hi
        intervals.append((x_lo, x_hi))
        m_intervals.append((lo, hi))

    order = sorted(range(len(intervals)), key=lambda i: intervals[i][0])
    intervals = [intervals[i] for i in order]
    m_intervals = [m_intervals[i] for i in order]

    for (a1, b1), (a2, b2) in zip(intervals[:-1], intervals[1:]):
        if b1 > a2 + 1e-12 * max(1.0, abs(b1)):
            raise InconsistentSupportError(
                f"complement intervals overlap: ({a1}, {b1}) and ({a2}, {b2})"
            )

    cp = model.c_p
    supers = sum(
        1 for s in model.spikes if classify(s.alpha, cp).regime is Regime.SUPERCRITICAL
    )
    subs = sum(
        1 for s in model.spikes if classify(s.alpha, cp).regime is Regime.SUBCRITICAL
    )
    expected = subs + supers + 3 if cp < 1.0 else supers + 2
    if len(intervals) != expected:
        raise InconsistentSupportError(
            f"assembled {len(intervals)} complement intervals, expected {expected} "
            f"({supers} supercritical, {subs} subcritical, c_p = {cp})"
        )

    return SupportReport(
        model=model,
        complement_intervals=tuple(intervals),
        generating_m_intervals=tuple(m_intervals),
        edges=edges,
        critical=crit,
    )


def spike_gap_edges(model: SpikedModel, j: int) -> tuple[float, float]:
    """Closed-form edges of spike j's support island (1-based, model order).

    For a separated spike the island is centered at the spike's limit
    l_j = alpha_j + c_p alpha_j/(alpha_j - 1) with half-width A_j/sqrt(n),
    where, writing g for the pair coefficient and C = sqrt(g),

        A_j = (C^2 alpha_j^2 (1 - c_p/(alpha_j - 1)^2) + k_j) / C.

    Bulk spikes have no island and are rejected with ``ValueError``.
    """
    _check_nondegenerate(model)
    if not (1 <= j <= model.num_spikes):
        raise ValueError(f"spike index {j} out of range [1, {model.num_spikes}]")
    s = model.spikes[j - 1]
    cp = model.c_p
    cls = classify(s.alpha, cp)
    if cls.regime is Regime.BULK:
        raise ValueError(
            f"spike {s.alpha} lies inside the critical window at c_p = {cp}; "
            "it generates no separated support island"
        )
    g = _pair_coefficient(model, s.alpha, s.multiplicity)
    if g <= 0.0:
        raise InconsistentSupportError(
            f"separated spike {s.alpha} produced a non-positive pair coefficient {g}"
        )
    cbig = math.sqrt(g)
    amp = (cbig**2 * s.alpha**2 * (1.0 - cp / (s.alpha - 1.0) ** 2) + s.multiplicity) / cbig
    center = s.alpha + cp * s.alpha / (s.alpha - 1.0)
    half = amp / math.sqrt(model.n)
    return (center - half, center + half)


def invert_on_interval(
    model: SpikedModel, x: float, m_lo: float, m_hi: float, max_steps: int = 2000
) -> float:
    """Solve z(m) = x on one increasing piece (m_lo, m_hi) of the m-line.

    The piece may be unbounded or end at the pole m = 0; a finite bracket is
    grown geometrically toward the relevant end before Brent refinement.
    Intended for pieces produced by :func:`support_complement`, whose image
    contains x.
    """

    def f(m: float) -> float:
        return z_p(model, m) - x

    lo_b: float | None = None
    hi_b: float | None = None
    if math.isfinite(m_lo) and m_lo != 0.0:
        span = (m_hi - m_lo) if math.isfinite(m_hi) else max(1.0, abs(m_lo))
        t = 0.25
        for _ in range(max_steps):
            cand = m_lo + t * span
            if f(cand) < 0.0:
                lo_b = cand
                break
            t *= 0.25
    elif m_lo == 0.0:
        step = m_hi / 2.0 if math.isfinite(m_hi) else 1.0
        for _ in range(max_steps):
            if f(step) < 0.0:
                lo_b = step
                break
            step *= 0.5
    else:  # m_lo = -inf: z -> 0+, so far enough left f < 0 for any x > 0
        step = max(1.0, abs(m_hi))
        for _ in range(max_steps):
            cand = m_hi - step
            if f(cand) < 0.0:
                lo_b = cand
                break
            step *= 2.0

    if math.isfinite(m_hi) and m_hi != 0.0:
        span = (m_hi - m_lo) if math.isfinite(m_lo) else max(1.0, abs(m_hi))
        t = 0.25
        for _ in range(max_steps):
            cand = m_hi - t * span
            if f(cand) > 0.0:
                hi_b = cand
                break
            t *= 0.25
    elif math.isfinite(m_hi):  # m_hi = 0, approached from the left: z -> +inf
        step = -m_lo / 2.0 if math.isfinite(m_lo) else 1.0
        for _ in range(max_steps):
            if f(-step) > 0.0:
                hi_b = -step
                break
            step *= 0.5
    else:  # m_hi = +inf: z -> 0-, so far enough right f > 0 for any x < 0
        step = max(1.0, abs(m_lo)) if math.isfinite(m_lo) else 1.0
        base = m_lo if math.isfinite(m_lo) else 0.0
        for _ in range(max_steps):
            cand = base + step
            if f(cand) > 0.0:
                hi_b = cand
                break
            step *= 2.0

    if lo_b is None or hi_b is None or not (lo_b < hi_b):
        raise RootIsolationError(
            f"could not bracket z(m) = {x} on the piece ({m_lo}, {m_hi}); "
            "is x inside the piece's image?"
        )
    return brentq(f, lo_b, hi_b, rtol=_BRENTQ_RTOL, maxiter=200)
