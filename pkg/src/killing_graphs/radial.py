"""One-dimensional radial reductions of the minimal-graph equation.

On a rotationally symmetric warped plane (flat base, radial Killing length
mu(r)) the minimal graph equation reduces to constancy of the radial flux,
giving the one-parameter slope family

    u_c'(r) = 1 / sqrt(c r^2 mu(r)^4 - mu(r)^2),     c >= 1  (+ branch).

The quadrature handles the inverse-square-root endpoint singularity that
appears when the graph leaves the inner boundary vertically, classifies
boundedness of the profiles, and evaluates the rotational CMC profile in
the hyperbolic-base unit-Killing-field space.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from . import expressions as ex


class VerticalSlopeError(ValueError):
    """Radicand <= 0: the profile is vertical (or c is invalid) there."""


def as_radial(mu) -> Callable:
    """Coerce an expression in r, a constant, or a callable to mu(r)."""
    if isinstance(mu, str):
        ast = ex.parse_expr(mu)
        return lambda r: ex.evaluate(ast, np.asarray(r, dtype=np.float64), 0.0)
    if callable(mu):
        return lambda r: np.asarray(mu(np.asarray(r, dtype=np.float64)), dtype=np.float64)
    c = float(mu)
    return lambda r: np.full(np.shape(np.asarray(r)), c) if np.ndim(r) else c


def _radicand(c: float, r, mu_fn: Callable):
    m = np.asarray(mu_fn(r), dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    return c * r ** 2 * m ** 4 - m ** 2


def radial_slope(c: float, r: float, mu) -> float:
    """du/dr of the + branch; signals a vertical slope when the radicand
    is not strictly positive."""
    mu_fn = as_radial(mu)
    rad = float(_radicand(c, float(r), mu_fn))
    if rad <= 0.0:
        raise VerticalSlopeError(f"vertical slope at r={r}: radicand {rad:.3e} <= 0")
    return 1.0 / np.sqrt(rad)


@dataclass
class RadialProfile:
    c: float
    r0: float
    radii: np.ndarray
    values: np.ndarray      # u(r_i), u(r0) = 0
    sup_estimate: float     # lim u(r), +inf when the tail integral diverges


def _quad(f, a, b):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, epsabs=1e-12, epsrel=1e-12, limit=400)
    return val, err


def radial_profile(c: float, mu, r0: float = 1.0, r1: float = 2.0,
                   n_samples: int = 50) -> RadialProfile:
    """Quadrature of the + branch slope from r0, sampled at n_samples radii.

    A vanishing radicand at r0 (vertical tangent at the inner boundary) is
    integrable; the substitution s = r0 + t^2 removes the 1/sqrt singularity.
    A nonpositive radicand in the open interior means c is invalid.
    """
    if c < 1.0:
        raise ValueError("c < 1 rejected: the slope family needs c >= 1")
    if not r1 > r0 >= 0.0:
        raise ValueError("need r1 > r0 >= 0")
    mu_fn = as_radial(mu)
    radii = np.linspace(r0, r1, n_samples)
    probe = np.linspace(r0, r1, 4 * n_samples + 1)[1:]
    if np.any(_radicand(c, probe, mu_fn) <= 0.0):
        raise VerticalSlopeError("radicand nonpositive in the interior (invalid c)")

    def slope(s):
        return 1.0 / np.sqrt(_radicand(c, s, mu_fn))

    rad0 = float(_radicand(c, r0, mu_fn))
    scale = float(_radicand(c, r1, mu_fn))
    singular_start = rad0 <= 1e-12 * max(1.0, scale)

    values = np.zeros(n_samples)
    for k in range(1, n_samples):
        a, b = radii[k - 1], radii[k]
        if k == 1 and singular_start:
            # s = r0 + t^2 turns the inverse-sqrt endpoint into a smooth integrand
            val, _ = _quad(lambda t: 2.0 * t * slope(r0 + t * t), 0.0, np.sqrt(b - a))
        else:
            val, _ = _quad(slope, a, b)
        values[k] = values[k - 1] + val

    tail, tail_err = _quad(slope, r1, np.inf)
    if not np.isfinite(tail) or tail_err > 1e-6 * (1.0 + abs(tail)):
        sup = np.inf
    else:
        sup = values[-1] + tail
    return RadialProfile(c=c, r0=r0, radii=radii, values=values, sup_estimate=sup)


# ---------------------------------------------------------------------------
# Boundedness classification

@dataclass
class BoundednessVerdict:
    verdict: str                 # "bounded" | "unbounded" | "inconclusive"
    window_radii: np.ndarray
    increments: np.ndarray
    ratios: np.ndarray


def boundedness_classify(mu, c: float, r_max: float = 1e6,
                         window: float = 1.5, r_base: float = 2.0) -> BoundednessVerdict:
    """Heuristic tail classification of the profile u_c.

    Windows are geometric in log r (r_{k+1} = r_k^window).  Window increments
    of u that keep decaying geometrically mean a convergent tail (bounded);
    non-decreasing increments mean divergence; anything else is inconclusive.
    """
    mu_fn = as_radial(mu)

    def slope(s):
        return 1.0 / np.sqrt(_radicand(c, s, mu_fn))

    pts = [r_base]
    while pts[-1] ** window <= r_max:
        pts.append(pts[-1] ** window)
    pts = np.asarray(pts)
    if len(pts) < 4:
        return BoundednessVerdict("inconclusive", pts, np.array([]), np.array([]))
    incs = np.array([_quad(slope, a, b)[0] for a, b in zip(pts[:-1], pts[1:])])
    ratios = incs[1:] / incs[:-1]
    tail = ratios[-3:]
    if np.all(tail < 0.9):
        verdict = "bounded"
    elif np.all(tail >= 0.98):
        verdict = "unbounded"
    else:
        verdict = "inconclusive"
    return BoundednessVerdict(verdict, pts, incs, ratios)


# ---------------------------------------------------------------------------
# Rotational CMC profile over the hyperbolic base with unit Killing length

@dataclass
class PenafielSample:
    slope: float     # u'(rho) of the rotational profile
    h_value: float   # (a~^2 + b~^2)(rho) after the gauge absorbing the profile


def penafiel_h(H: float, tau: float, rho: float) -> float:
    t2 = np.tanh(rho / 2.0) ** 2
    if H == 0.5:
        # 1 - 4H^2 t^2 = sech^2(rho/2): analytic simplification stays finite
        return float((1.0 + 4.0 * tau ** 2) * np.sinh(rho / 2.0) ** 2)
    return float(4.0 * (H ** 2 + tau ** 2) * t2 / (1.0 - 4.0 * H ** 2 * t2))


def penafiel_slope(H: float, tau: float, rho: float) -> PenafielSample:
    """Slope of the rotational constant-mean-curvature profile at geodesic
    radius rho, for H in [0, 1/2]."""
    if not 0.0 <= H <= 0.5:
        raise ValueError("H must lie in [0, 1/2]")
    if rho <= 0.0:
        raise ValueError("rho must be positive")
    num = (2.0 * H * np.cosh(rho) - 2.0 * H) * np.sqrt(
        1.0 + 4.0 * tau ** 2 * np.tanh(rho / 2.0) ** 2)
    rad = np.sinh(rho) ** 2 - (2.0 * H * np.cosh(rho) - 2.0 * H) ** 2
    if rad <= 0.0:
        raise VerticalSlopeError(f"denominator radicand {rad:.3e} <= 0")
    return PenafielSample(slope=float(num / np.sqrt(rad)),
                          h_value=penafiel_h(H, tau, rho))


def penafiel_slope_disk(H: float, tau: float, r: float) -> float:
    """The same profile as a function of the euclidean disk radius r:
    du/dr = 4 H r sqrt(1 + 4 tau^2 r^2) / ((1 - r^2) sqrt(1 - 4 H^2 r^2))."""
    if not 0.0 <= H <= 0.5:
        raise ValueError("H must lie in [0, 1/2]")
    if not 0.0 < r < 1.0:
        raise ValueError("r must lie in (0, 1)")
    rad = 1.0 - 4.0 * H ** 2 * r ** 2
    if rad <= 0.0:
        raise VerticalSlopeError("1 - 4 H^2 r^2 <= 0")
    return float(4.0 * H * r * np.sqrt(1.0 + 4.0 * tau ** 2 * r ** 2)
                 / ((1.0 - r ** 2) * np.sqrt(rad)))
