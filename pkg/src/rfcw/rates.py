"""Deviation rate functions and scaling exponents.

For a minimum of type k and strength lam the moderate-deviation rate of the
rescaled magnetization is

    I(x) = x^2 / (2 sigma^2)        (k = 1, sigma^2 = 1/lam - 1/beta)
    I(x) = lam x^{2k} / (2k)!       (k >= 2)

at speed n^{1 - 2k(1 - alpha)} for alpha in (1 - 1/(2(2k-1)), 1).  The
Gaussian-smoothed variable obeys the simpler J(x) = lam x^{2k} / (2k)! at the
same speed; for k = 1 the two are linked by the inf-convolution identity

    sup_x [J(x) - beta (x - y)^2 / 2] = y^2 / (2 sigma^2).

The large-deviation rate of the magnetization per spin is the numerical
supremum  I_ldp(x) = sup_y {G(y) - beta (x - y)^2 / 2} - inf G.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .gfunction import GFunction, MinimumInfo, find_minima

__all__ = [
    "RateSpec",
    "ScalingInfo",
    "mdp_rate",
    "hs_rate",
    "ldp_rate",
    "scaling",
]

LDP_GRID_STEP = 1e-3
LDP_REFINE_TOL = 1e-10
NEGATIVE_CLAMP = -1e-10
MAX_K = 8


@dataclass(frozen=True)
class RateSpec:
    """Type, strength and inverse temperature of the minimum driving a rate."""

    k: int
    strength: float
    beta: float

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not self.strength > 0:
            raise ValueError(f"strength must be positive, got {self.strength}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    @classmethod
    def from_minimum(cls, info: MinimumInfo, beta: float) -> "RateSpec":
        return cls(k=info.k, strength=info.strength, beta=beta)

    @property
    def sigma2(self) -> float:
        """Gaussian variance 1/strength - 1/beta; defined only for k = 1."""
        if self.k != 1:
            raise ValueError(f"sigma^2 is defined only for k = 1, got k = {self.k}")
        if self.strength >= self.beta:
            raise ValueError(
                f"sigma^2 undefined: strength {self.strength} >= beta {self.beta}"
            )
        return 1.0 / self.strength - 1.0 / self.beta


def mdp_rate(spec: RateSpec, x):
    """Moderate-deviation rate at x (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    if spec.k == 1:
        out = xa**2 / (2.0 * spec.sigma2)
    else:
        out = spec.strength * xa ** (2 * spec.k) / math.factorial(2 * spec.k)
    return float(out) if np.isscalar(x) else out


def hs_rate(k: int, strength: float, x):
    """Rate of the Gaussian-smoothed rescaled magnetization."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not strength > 0:
        raise ValueError(f"strength must be positive, got {strength}")
    xa = np.asarray(x, dtype=float)
    out = strength * xa ** (2 * k) / math.factorial(2 * k)
    return float(out) if np.isscalar(x) else out


@lru_cache(maxsize=64)
def _inf_g(g: GFunction) -> float:
    minima = find_minima(g)
    return float(np.min(g.value(minima)))


def ldp_rate(g: GFunction, x):
    """Large-deviation rate of S_n/n at |x| <= 1.

    The inner objective y -> G(y) - beta (x-y)^2 / 2 is strictly concave
    (its second derivative is -beta^2 E[1 - tanh^2] < 0), so a coarse grid
    scan plus bounded local refinement finds the supremum.
    """
    scalar = np.isscalar(x)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(xa) > 1.0):
        raise ValueError("ldp_rate requires |x| <= 1 (magnetization per spin)")
    ygrid = np.arange(-2.0, 2.0 + LDP_GRID_STEP, LDP_GRID_STEP)
    g_on_grid = np.asarray(g.value(ygrid))
    inf_g = _inf_g(g)
    out = np.empty(xa.shape)
    for idx, xv in enumerate(xa):
        vals = g_on_grid - g.beta * (xv - ygrid) ** 2 / 2.0
        j = int(np.argmax(vals))
        lo = ygrid[max(0, j - 1)]
        hi = ygrid[min(ygrid.size - 1, j + 1)]
        res = minimize_scalar(
            lambda y: -(float(g.value(y)) - g.beta * (xv - y) ** 2 / 2.0),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": LDP_REFINE_TOL},
        )
        val = -res.fun - inf_g
        if val < NEGATIVE_CLAMP:
            raise FloatingPointError(f"ldp_rate({xv}) = {val} below the negativity clamp")
        out[idx] = max(val, 0.0)
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class ScalingInfo:
    """Speed and admissibility data for the (k, alpha) rescaling."""

    k: int
    alpha: float
    n: int
    speed_exponent: float
    alpha_min: float
    clt_exponent: float
    speed: float


def alpha_min(k: int) -> float:
    return 1.0 - 1.0 / (2.0 * (2 * k - 1))


def scaling(k: int, alpha: float, n: int) -> ScalingInfo:
    if k < 1 or k > MAX_K:
        raise ValueError(f"k must be in 1..{MAX_K}, got {k}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    lo = alpha_min(k)
    if not lo < alpha < 1.0:
        raise ValueError(f"alpha = {alpha} outside the admissible range ({lo}, 1) for k = {k}")
    exponent = 1.0 - 2.0 * k * (1.0 - alpha)
    return ScalingInfo(
        k=k,
        alpha=alpha,
        n=n,
        speed_exponent=exponent,
        alpha_min=lo,
        clt_exponent=lo,
        speed=float(n) ** exponent,
    )
