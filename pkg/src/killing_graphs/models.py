"""Local models of Killing submersions and length/polygon utilities.

A model stores the data (lambda, mu, a, b) of the metric

    ds^2 = lambda^2 (dx^2 + dy^2) + mu^2 [dz - lambda (a dx + b dy)]^2

on a rectangular chart.  Sign convention: the vertical one-form is
dz - lambda (a dx + b dy), so the classical Heisenberg form
tau (y dx - x dy) + dz maps to a = -tau*y, b = tau*x.

Built-in presets carry hand-coded partial derivatives of lambda, a, b so
that bundle-curvature recovery is exact; user-specified expression fields
fall back to numeric differentiation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .fields import ScalarField, as_field, callable_field, const_field

_DEFAULT_MARGIN = 1e-9


@dataclass(frozen=True)
class Rect:
    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("chart rectangle must have positive area")

    def contains(self, x, y, margin: float = 0.0):
        return ((x >= self.x0 + margin) & (x <= self.x1 - margin)
                & (y >= self.y0 + margin) & (y <= self.y1 - margin))


@dataclass
class MetricModel:
    """Local-model data (lambda, mu, a, b) on a coordinate chart."""

    chart: Rect
    lam: ScalarField
    mu: ScalarField
    a: ScalarField
    b: ScalarField
    name: str = "custom"
    params: tuple = ()
    margin: float = _DEFAULT_MARGIN
    # Validity guard beyond the rectangle (singular loci such as the unit
    # circle for disk models); None means the whole rectangle is valid.
    guard: Optional[Callable] = None
    # Base geometry tag used for closed-form geodesic circles:
    # "flat" (lambda == 1), "hyperbolic-disk", "hyperbolic-halfplane", "generic".
    base_kind: str = "generic"

    def __post_init__(self):
        self._validate()

    def valid(self, x, y):
        ok = self.chart.contains(x, y, self.margin)
        if self.guard is not None:
            ok = ok & self.guard(x, y)
        return ok

    def _validate(self, n: int = 21):
        xs = np.linspace(self.chart.x0, self.chart.x1, n)
        ys = np.linspace(self.chart.y0, self.chart.y1, n)
        X, Y = np.meshgrid(xs, ys)
        m = self.valid(X, Y)
        if not np.any(m):
            raise ValueError("chart contains no valid sample points")
        lam = self.lam.value(X[m], Y[m])
        mu = self.mu.value(X[m], Y[m])
        if not (np.all(np.isfinite(lam)) and np.all(lam > 0)):
            raise ValueError("lambda must be positive and finite on the chart")
        if not (np.all(np.isfinite(mu)) and np.all(mu > 0)):
            raise ValueError("mu must be positive and finite on the chart")


# ---------------------------------------------------------------------------
# Presets

def _euclidean(chart):
    return MetricModel(chart=chart or Rect(-1e6, 1e6, -1e6, 1e6),
                       lam=const_field(1.0), mu=const_field(1.0),
                       a=const_field(0.0), b=const_field(0.0),
                       name="euclidean", base_kind="flat")


def _nil3(tau, chart):
    z = lambda x, y: np.zeros(np.broadcast(x, y).shape)
    a = callable_field(lambda x, y: -tau * y + 0.0 * x, fx=z,
                       fy=lambda x, y: np.full(np.broadcast(x, y).shape, -tau))
    b = callable_field(lambda x, y: tau * x + 0.0 * y,
                       fx=lambda x, y: np.full(np.broadcast(x, y).shape, tau), fy=z)
    return MetricModel(chart=chart or Rect(-1e6, 1e6, -1e6, 1e6),
                       lam=const_field(1.0), mu=const_field(1.0), a=a, b=b,
                       name="nil3", params=(tau,), base_kind="flat")


def _sol3_halfplane(chart):
    z = lambda x, y: np.zeros(np.broadcast(x, y).shape)
    lam = callable_field(lambda x, y: 1.0 / y + 0.0 * x, fx=z,
                         fy=lambda x, y: -1.0 / y ** 2 + 0.0 * x)
    mu = callable_field(lambda x, y: y + 0.0 * x, fx=z,
                        fy=lambda x, y: np.ones(np.broadcast(x, y).shape))
    chart = chart or Rect(-1e6, 1e6, _DEFAULT_MARGIN, 1e6)
    return MetricModel(chart=chart, lam=lam, mu=mu,
                       a=const_field(0.0), b=const_field(0.0),
                       name="sol3-halfplane",
                       guard=lambda x, y: y > _DEFAULT_MARGIN,
                       base_kind="hyperbolic-halfplane")


def _disk_lambda():
    # lambda = 2/(1 - r^2);  lambda_x = lambda^2 x, lambda_y = lambda^2 y.
    def lam(x, y):
        return 2.0 / (1.0 - (x ** 2 + y ** 2))

    return callable_field(lam,
                          fx=lambda x, y: lam(x, y) ** 2 * x,
                          fy=lambda x, y: lam(x, y) ** 2 * y)


def _sol3_disk(chart):
    def mu_fn(x, y):
        return (1.0 - x ** 2 - y ** 2) / ((x - 1.0) ** 2 + y ** 2)

    def mu_fx(x, y):
        D = (x - 1.0) ** 2 + y ** 2
        N = 1.0 - x ** 2 - y ** 2
        return (-2.0 * x * D - N * 2.0 * (x - 1.0)) / D ** 2

    def mu_fy(x, y):
        D = (x - 1.0) ** 2 + y ** 2
        N = 1.0 - x ** 2 - y ** 2
        return (-2.0 * y * D - N * 2.0 * y) / D ** 2

    return MetricModel(chart=chart or Rect(-1, 1, -1, 1),
                       lam=_disk_lambda(),
                       mu=callable_field(mu_fn, fx=mu_fx, fy=mu_fy),
                       a=const_field(0.0), b=const_field(0.0),
                       name="sol3-disk",
                       guard=lambda x, y: x ** 2 + y ** 2 < (1.0 - _DEFAULT_MARGIN) ** 2,
                       base_kind="hyperbolic-disk")


def _e_minus1_tau(tau, chart):
    z = lambda x, y: np.zeros(np.broadcast(x, y).shape)
    a = callable_field(lambda x, y: -2.0 * tau * y + 0.0 * x, fx=z,
                       fy=lambda x, y: np.full(np.broadcast(x, y).shape, -2.0 * tau))
    b = callable_field(lambda x, y: 2.0 * tau * x + 0.0 * y,
                       fx=lambda x, y: np.full(np.broadcast(x, y).shape, 2.0 * tau), fy=z)
    return MetricModel(chart=chart or Rect(-1, 1, -1, 1),
                       lam=_disk_lambda(), mu=const_field(1.0), a=a, b=b,
                       name="e-minus1-tau", params=(tau,),
                       guard=lambda x, y: x ** 2 + y ** 2 < (1.0 - _DEFAULT_MARGIN) ** 2,
                       base_kind="hyperbolic-disk")


def _warped_plane(mu_spec, chart):
    # radial warping factors such as mu = r vanish at the pole; usage is on
    # annular/exterior domains, so the origin is guarded out
    mu = as_field(mu_spec)
    return MetricModel(chart=chart or Rect(-1e6, 1e6, -1e6, 1e6),
                       lam=const_field(1.0), mu=mu,
                       a=const_field(0.0), b=const_field(0.0),
                       name="warped-plane",
                       guard=lambda x, y: x ** 2 + y ** 2 > _DEFAULT_MARGIN ** 2,
                       base_kind="flat")


def builtin_model(name: str, params: Sequence = (), chart: Optional[Rect] = None) -> MetricModel:
    """Construct a preset model.

    Presets: euclidean; nil3(tau); sol3-halfplane; sol3-disk;
    e-minus1-tau(tau); warped-plane(mu) where mu is an expression in r
    (or x, y), a number, or a callable.
    """
    if name == "euclidean":
        return _euclidean(chart)
    if name == "nil3":
        return _nil3(float(params[0]), chart)
    if name == "sol3-halfplane":
        return _sol3_halfplane(chart)
    if name == "sol3-disk":
        return _sol3_disk(chart)
    if name == "e-minus1-tau":
        return _e_minus1_tau(float(params[0]), chart)
    if name == "warped-plane":
        return _warped_plane(params[0], chart)
    raise ValueError(f"unknown preset {name!r}")


# ---------------------------------------------------------------------------
# Bundle curvature and gauge changes

def tau_of_model(model: MetricModel, p) -> float:
    """Bundle curvature tau = mu/(2 lambda^2) * [(lambda b)_x - (lambda a)_y]."""
    x, y = float(p[0]), float(p[1])
    lam = float(model.lam.value(x, y))
    mu = float(model.mu.value(x, y))
    a = float(model.a.value(x, y))
    b = float(model.b.value(x, y))
    lam_x, lam_y = (float(v) for v in model.lam.partials(x, y))
    _, a_y = (float(v) for v in model.a.partials(x, y))
    b_x, _ = (float(v) for v in model.b.partials(x, y))
    curl = lam_x * b + lam * b_x - lam_y * a - lam * a_y
    return mu / (2.0 * lam ** 2) * curl


def gauge_change(model: MetricModel, d) -> MetricModel:
    """Shift the connection data by an exact form: a' = a + d_x/lambda,
    b' = b + d_y/lambda.  lambda and mu are unchanged, and so is tau."""
    d = as_field(d)
    lam, a, b = model.lam, model.a, model.b

    def a_new(x, y):
        dx, _ = d.partials(x, y)
        return a.value(x, y) + dx / lam.value(x, y)

    def b_new(x, y):
        _, dy = d.partials(x, y)
        return b.value(x, y) + dy / lam.value(x, y)

    # Partials via the product rule, using d's second partials (analytic when
    # available, wide-step fourth-order differences otherwise).  This keeps
    # the exact-form cancellation in tau_of_model at ~1e-9 instead of the
    # catastrophic nested-difference roundoff.
    def a_new_x(x, y):
        lam_v = lam.value(x, y)
        lam_x, _ = lam.partials(x, y)
        a_x, _ = a.partials(x, y)
        dx, _ = d.partials(x, y)
        dxx, _, _ = d.second_partials(x, y)
        return a_x + dxx / lam_v - dx * lam_x / lam_v ** 2

    def a_new_y(x, y):
        lam_v = lam.value(x, y)
        _, lam_y = lam.partials(x, y)
        _, a_y = a.partials(x, y)
        dx, _ = d.partials(x, y)
        _, dxy, _ = d.second_partials(x, y)
        return a_y + dxy / lam_v - dx * lam_y / lam_v ** 2

    def b_new_x(x, y):
        lam_v = lam.value(x, y)
        lam_x, _ = lam.partials(x, y)
        b_x, _ = b.partials(x, y)
        _, dy = d.partials(x, y)
        _, dxy, _ = d.second_partials(x, y)
        return b_x + dxy / lam_v - dy * lam_x / lam_v ** 2

    def b_new_y(x, y):
        lam_v = lam.value(x, y)
        _, lam_y = lam.partials(x, y)
        _, b_y = b.partials(x, y)
        _, dy = d.partials(x, y)
        _, _, dyy = d.second_partials(x, y)
        return b_y + dyy / lam_v - dy * lam_y / lam_v ** 2

    return replace(model,
                   a=callable_field(a_new, fx=a_new_x, fy=a_new_y),
                   b=callable_field(b_new, fx=b_new_x, fy=b_new_y),
                   name=f"{model.name}+gauge")


# ---------------------------------------------------------------------------
# Polylines, mu-length, Jenkins-Serrin check

@dataclass
class Polyline:
    points: np.ndarray  # (n, 2)
    closed: bool = False

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim != 2 or self.points.shape[1] != 2 or len(self.points) < 2:
            raise ValueError("polyline needs at least 2 chart points")
        seg = np.diff(np.vstack([self.points, self.points[:1]]) if self.closed
                      else self.points, axis=0)
        if np.any(np.hypot(seg[:, 0], seg[:, 1]) == 0.0):
            raise ValueError("consecutive polyline points must be distinct")

    def segments(self):
        pts = self.points
        if self.closed:
            pts = np.vstack([pts, pts[:1]])
        return list(zip(pts[:-1], pts[1:]))


# 5-point Gauss-Legendre nodes/weights on [-1, 1]
_GL5_X = np.array([-0.9061798459386640, -0.5384693101056831, 0.0,
                   0.5384693101056831, 0.9061798459386640])
_GL5_W = np.array([0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                   0.4786286704993665, 0.2369268850561891])


def _gl5(f, a: float, b: float) -> float:
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * float(np.sum(_GL5_W * f(mid + half * _GL5_X)))


def _adaptive_gl5(f, a: float, b: float, rtol: float, whole=None, depth: int = 0) -> float:
    if whole is None:
        whole = _gl5(f, a, b)
    mid = 0.5 * (a + b)
    left = _gl5(f, a, mid)
    right = _gl5(f, mid, b)
    if depth >= 48 or abs(left + right - whole) <= rtol * (abs(left + right) + 1e-300):
        return left + right
    return (_adaptive_gl5(f, a, mid, rtol, left, depth + 1)
            + _adaptive_gl5(f, mid, b, rtol, right, depth + 1))


def mu_length(model: MetricModel, line: Polyline, rtol: float = 1e-10) -> float:
    """Length of a polyline in the mu-metric mu^2 * lambda^2 (dx^2 + dy^2)."""
    total = 0.0
    for p0, p1 in line.segments():
        dx, dy = p1[0] - p0[0], p1[1] - p0[1]
        speed = float(np.hypot(dx, dy))

        def integrand(t, p0=p0, dx=dx, dy=dy, speed=speed):
            x = p0[0] + t * dx
            y = p0[1] + t * dy
            return model.mu.value(x, y) * model.lam.value(x, y) * speed

        total += _adaptive_gl5(integrand, 0.0, 1.0, rtol)
    return total


@dataclass
class JsPolygon:
    """Closed polygon with each edge labeled 'A', 'B' or 'N' (neither)."""

    boundary: Polyline
    labels: Sequence[str]

    def __post_init__(self):
        if not self.boundary.closed:
            raise ValueError("Jenkins-Serrin polygon must be closed")
        n_edges = len(self.boundary.points)
        if len(self.labels) != n_edges:
            raise ValueError(f"need one label per edge ({n_edges}), got {len(self.labels)}")
        bad = set(self.labels) - {"A", "B", "N"}
        if bad:
            raise ValueError(f"labels must be 'A', 'B' or 'N'; got {bad}")


@dataclass
class JsVerdict:
    alpha: float
    beta: float
    gamma: float
    alpha_ok: bool      # 2 alpha < gamma, strictly
    beta_ok: bool       # 2 beta < gamma, strictly
    passed: bool


def js_check(model: MetricModel, poly: JsPolygon, rtol: float = 1e-10) -> JsVerdict:
    """Check the strict length condition 2*alpha < gamma and 2*beta < gamma."""
    alpha = beta = gamma = 0.0
    for (p0, p1), lab in zip(poly.boundary.segments(), poly.labels):
        seg_len = mu_length(model, Polyline(np.array([p0, p1])), rtol=rtol)
        gamma += seg_len
        if lab == "A":
            alpha += seg_len
        elif lab == "B":
            beta += seg_len
    alpha_ok = 2 * alpha < gamma
    beta_ok = 2 * beta < gamma
    return JsVerdict(alpha=alpha, beta=beta, gamma=gamma,
                     alpha_ok=alpha_ok, beta_ok=beta_ok,
                     passed=alpha_ok and beta_ok)
