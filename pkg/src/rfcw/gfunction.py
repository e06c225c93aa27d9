"""Free-energy landscape analysis.

The central object is the real-analytic function

    G(x) = beta*x^2/2 - E[ln cosh(beta*(x+h))]

whose global minima are the law-of-large-numbers points of the magnetization
per spin.  A minimum m has type k and strength lam when the leading Taylor
term at m is lam*(x-m)^(2k)/(2k)!.  This module evaluates G and its exact
derivatives of any order up to 16, locates and classifies all minima (type,
strength, height, broadness, conditioning radius, local-minimum condition),
and assigns the phase from the structure of the set of global minima.

Derivatives use the recurrence Q_1(t) = t, Q_{n+1}(t) = Q_n'(t)*(1 - t^2),
which turns the n-th x-derivative of ln cosh(beta*(x+h)) into
beta^n * Q_n(tanh(beta*(x+h))) with exact integer coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P

from .fields import FieldDistribution, FieldRealization, expect_lncosh, expect_tanh_poly

__all__ = [
    "GFunction",
    "MinimumInfo",
    "PhaseClassification",
    "GridResolutionError",
    "ClassificationError",
    "q_polynomial",
    "g_deriv",
    "find_minima",
    "classify_minimum",
    "classify_phase",
]

MAX_DERIV_ORDER = 16
GRID_STEP = 1e-3
NEWTON_TOL = 1e-13
DEDUP_TOL = 1e-9
GLOBAL_HEIGHT_TOL = 1e-10
BROADNESS_BISECT_TOL = 1e-10

PHASES = ("paramagnetic", "ferromagnetic", "first_order", "second_order", "tricritical", "other")


class GridResolutionError(RuntimeError):
    """The scan grid is too coarse for the sign structure of G'."""


class ClassificationError(RuntimeError):
    """A stationary point could not be classified as a finite-type minimum."""


@lru_cache(maxsize=MAX_DERIV_ORDER)
def q_polynomial(order: int) -> np.ndarray:
    """Ascending coefficients of Q_order; exact small integers."""
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if order > MAX_DERIV_ORDER:
        raise ValueError(f"order {order} exceeds supported depth {MAX_DERIV_ORDER}")
    if order == 1:
        return np.array([0.0, 1.0])
    prev = q_polynomial(order - 1)
    return P.polymul(P.polyder(prev), np.array([1.0, 0.0, -1.0]))


@dataclass(frozen=True, eq=False)
class GFunction:
    """G for a given inverse temperature and disorder law.

    Passing the empirical law of a field realization gives the finite-size
    quenched function G_n^h; both share every code path below.
    """

    beta: float
    dist: FieldDistribution

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    @classmethod
    def from_fields(cls, beta: float, fields: FieldRealization) -> "GFunction":
        return cls(beta=beta, dist=fields.as_distribution())

    def value(self, x):
        return self.beta * np.asarray(x, dtype=float) ** 2 / 2.0 - expect_lncosh(
            self.dist, self.beta, x
        )

    def deriv(self, order: int, x):
        """Exact derivative of any order (0..16) at x (scalar or array)."""
        if order < 0 or order > MAX_DERIV_ORDER:
            raise ValueError(f"order must be in 0..{MAX_DERIV_ORDER}, got {order}")
        b = self.beta
        if order == 0:
            return self.value(x)
        q = expect_tanh_poly(self.dist, q_polynomial(order), b, x)
        if order == 1:
            return b * np.asarray(x, dtype=float) - b * q
        if order == 2:
            return b - b**2 * q
        return -(b**order) * q


def g_deriv(g: GFunction, order: int, x):
    return g.deriv(order, x)


@dataclass(frozen=True)
class MinimumInfo:
    """A classified minimum of G.

    height      G(m) - inf G (0 exactly for global minima)
    broadness   distance to the nearest strictly lower point (inf if none)
    cond_radius largest symmetric window half-width usable for conditioning,
                min of (broadness - sqrt(2*height/beta))/2 and the distance to
                the nearest other minimum; 0 when the local-minimum condition
                fails
    mdp_condition_ok  whether beta > 2*height/broadness^2 (true for inf
                broadness)
    """

    location: float
    k: int
    strength: float
    height: float
    broadness: float
    cond_radius: float
    is_global: bool
    mdp_condition_ok: bool


@dataclass(frozen=True)
class PhaseClassification:
    phase: str
    minima: tuple[MinimumInfo, ...]  # global minima only
    all_minima: tuple[MinimumInfo, ...]


def default_search_bound(g: GFunction) -> float:
    # |E tanh| <= 1, so every root of G'(x) = beta*(x - E tanh) lies in [-1, 1].
    return 2.0


def find_minima(g: GFunction, search_bound: float | None = None, step: float = GRID_STEP) -> np.ndarray:
    """All local minima of G inside [-search_bound, search_bound], ascending."""
    bound = default_search_bound(g) if search_bound is None else float(search_bound)
    if not (g.deriv(1, -bound) < 0 < g.deriv(1, bound)):
        raise ValueError(f"search_bound {bound} too small: G' does not enclose all roots")
    npts = 2 * int(round(bound / step)) + 1
    grid = np.linspace(-bound, bound, npts)
    d = np.asarray(g.deriv(1, grid))

    brackets = []
    i = 0
    while i < npts - 1:
        if d[i] < 0 and d[i + 1] > 0:
            brackets.append((grid[i], grid[i + 1]))
            i += 1
        elif d[i + 1] == 0.0:
            j = i + 1
            while j < npts and d[j] == 0.0:
                j += 1
            if j < npts and d[i] < 0 and d[j] > 0:
                brackets.append((grid[i], grid[j]))
            i = j
        else:
            i += 1

    minima = [_refine_minimum(g, lo, hi) for lo, hi in brackets]
    minima.sort()
    out = []
    for m in minima:
        if out and abs(m - out[-1]) < DEDUP_TOL:
            continue
        out.append(m)
    for a, b in zip(out, out[1:]):
        if b - a < 3 * step:
            raise GridResolutionError(
                f"minima at {a!r} and {b!r} closer than 3 grid steps; rerun with smaller step"
            )
    return np.array(out)


def _refine_minimum(g: GFunction, lo: float, hi: float) -> float:
    """Safeguarded Newton on G' inside a sign-change bracket."""
    x = 0.5 * (lo + hi)
    for _ in range(200):
        fp = float(g.deriv(1, x))
        if abs(fp) < NEWTON_TOL:
            return x
        if fp > 0:
            hi = x
        else:
            lo = x
        fpp = float(g.deriv(2, x))
        step_ok = False
        if fpp > 0:
            xn = x - fp / fpp
            if lo < xn < hi:
                x = xn
                step_ok = True
        if not step_ok:
            x = 0.5 * (lo + hi)
        if hi - lo < 1e-16 * max(1.0, abs(x)):
            return x
    return x


def _zero_tolerance(beta: float, order: int) -> float:
    # Newton-refined locations carry ~1e-13 error that amplifies through
    # high-order derivatives; treat anything below this as an exact zero.
    return 1e-7 * max(1.0, beta**order)


def classify_minimum(
    g: GFunction,
    m: float,
    minima: np.ndarray | None = None,
    search_bound: float | None = None,
) -> MinimumInfo:
    """Type, strength, height, broadness and conditioning data for minimum m."""
    bound = default_search_bound(g) if search_bound is None else float(search_bound)
    if abs(float(g.deriv(1, m))) > 1e-10 * max(1.0, g.beta):
        raise ValueError(f"{m!r} is not a refined stationary point of G")

    # Ascending scan: the first derivative order to clear its zero tolerance
    # must be even; everything below it counted as an exact zero.
    k = None
    strength = None
    for j in range(2, MAX_DERIV_ORDER + 1):
        dj = float(g.deriv(j, m))
        if abs(dj) <= _zero_tolerance(g.beta, j):
            continue
        if j % 2 != 0:
            raise ClassificationError(
                f"inconsistent derivative pattern at {m!r}: leading nonzero order {j} is odd"
            )
        k, strength = j // 2, dj
        break
    if k is None:
        raise ClassificationError(
            f"no nonzero even derivative up to order {MAX_DERIV_ORDER} at {m!r}"
        )
    if strength < 0:
        raise ClassificationError(f"{m!r} has negative leading even derivative: not a minimum")

    if minima is None:
        minima = find_minima(g, search_bound=bound)
    g_m = float(g.value(m))
    g_inf = float(np.min(g.value(minima)))
    height = g_m - g_inf
    is_global = height <= GLOBAL_HEIGHT_TOL
    if is_global:
        height = 0.0
        broadness = math.inf
    else:
        broadness = _broadness(g, m, g_m, bound)

    others = minima[np.abs(minima - m) > DEDUP_TOL]
    nearest = float(np.min(np.abs(others - m))) if others.size else math.inf
    if broadness == math.inf:
        upper = math.inf
    else:
        upper = (broadness - math.sqrt(2.0 * height / g.beta)) / 2.0
    cond_radius = min(upper, nearest) if upper > 0 else 0.0

    mdp_ok = broadness == math.inf or g.beta > 2.0 * height / broadness**2
    return MinimumInfo(
        location=float(m),
        k=k,
        strength=strength,
        height=height,
        broadness=broadness,
        cond_radius=cond_radius,
        is_global=is_global,
        mdp_condition_ok=mdp_ok,
    )


def _broadness(g: GFunction, m: float, g_m: float, bound: float) -> float:
    """Outward march + bisection for the nearest strictly lower point."""
    best = math.inf
    for direction in (-1.0, 1.0):
        y = m
        crossed = None
        while True:
            y_next = y + direction * GRID_STEP
            if abs(y_next) > bound + 1.0:
                break
            if float(g.value(y_next)) < g_m:
                crossed = (y, y_next)
                break
            y = y_next
        if crossed is None:
            continue
        lo, hi = crossed  # G(lo) >= g_m > G(hi)
        while abs(hi - lo) > BROADNESS_BISECT_TOL:
            mid = 0.5 * (lo + hi)
            if float(g.value(mid)) < g_m:
                hi = mid
            else:
                lo = mid
        best = min(best, abs(hi - m))
    if best == math.inf:
        raise ClassificationError(
            f"no strictly lower point found for non-global minimum at {m!r}"
        )
    return best


def classify_phase(g: GFunction, search_bound: float | None = None) -> PhaseClassification:
    """Apply the phase taxonomy to the set of global minima of G."""
    minima = find_minima(g, search_bound=search_bound)
    infos = tuple(classify_minimum(g, m, minima=minima, search_bound=search_bound) for m in minima)
    glob = tuple(i for i in infos if i.is_global)
    types = {i.k for i in glob}
    if len(glob) == 1:
        phase = {1: "paramagnetic", 2: "second_order", 3: "tricritical"}.get(glob[0].k, "other")
    elif types == {1}:
        phase = "ferromagnetic" if len(glob) == 2 else "first_order"
    else:
        phase = "other"
    return PhaseClassification(phase=phase, minima=glob, all_minima=infos)
