"""Damped Newton solver for the Dirichlet problem F(u) = 0.

The Jacobian is the exact derivative of the flux-form residual.  A rejected
backtracking search falls back to a Picard sweep (frozen area element) and
the initial iterate always comes from one Picard solve with the area
element frozen at the zero-section value W0.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import scipy.sparse.linalg as spla

from .grids import BOUNDARY, GridDomain, ScalarGrid
from .models import MetricModel
from .operator import AssemblyCache, nodal_rhs, raw_grid


@dataclass
class SolveConfig:
    max_iters: int = 60
    tol_factor: float = 1e-10          # residual tol = tol_factor * (1 + |2 mu H|_inf)
    armijo: float = 1e-4
    min_step: float = 2.0 ** -20
    picard_after: int = 5              # consecutive rejected steps before a Picard sweep
    linear_rtol: float = 1e-12


@dataclass
class SolveReport:
    u: ScalarGrid
    converged: bool
    iterations: int
    residual_norm: float
    tolerance: float
    damping_history: List[float] = field(default_factory=list)
    picard_sweeps: int = 0
    message: str = ""
    runtime: float = 0.0


def _linear_solve(J, rhs, rtol):
    delta = spla.spsolve(J.tocsc(), rhs)
    if not np.all(np.isfinite(delta)):
        raise np.linalg.LinAlgError("singular Jacobian")
    nr = np.linalg.norm(rhs)
    if nr > 0:
        res = np.linalg.norm(J @ delta - rhs) / nr
        if res > rtol:
            # one step of iterative refinement
            delta = delta + spla.spsolve(J.tocsc(), rhs - J @ delta)
    return delta


def _full_grid(dom: GridDomain, interior_vec, cache: AssemblyCache) -> np.ndarray:
    u = np.where(dom.status == BOUNDARY, dom.bdata, 0.0)
    u[~dom.carried()] = np.nan
    u.ravel()[cache.flat_unknown] = interior_vec
    return u


def _picard_solve(cache: AssemblyCache, u_grid: np.ndarray, rhs: np.ndarray,
                  frozen_W: list) -> np.ndarray:
    """Solve the affine frozen-coefficient system exactly (one linear solve)."""
    J = cache.jacobian(u_grid, frozen_W=frozen_W)
    vec = u_grid.ravel()[cache.flat_unknown].copy()
    F = _frozen_residual(cache, u_grid, rhs, frozen_W)
    delta = _linear_solve(J, -F, 1e-12)
    return vec + delta


def _frozen_residual(cache: AssemblyCache, u_grid, rhs, frozen_W):
    u_flat = u_grid.ravel()
    F = np.zeros(cache.n_unknowns)
    for fam, Wf in zip((cache.fam_i, cache.fam_j), frozen_W):
        d = (u_flat[fam.B] - u_flat[fam.A]) / fam.len_n
        G1 = d / fam.lam - fam.an
        flux = fam.gmul * fam.lam * fam.mu2 * G1 / Wf
        mA = fam.rowA >= 0
        np.add.at(F, fam.rowA[mA], flux[mA] * fam.cA[mA])
        mB = fam.rowB >= 0
        np.add.at(F, fam.rowB[mB], -flux[mB] * fam.cB[mB])
    F[cache.pde_row_mask] -= rhs.ravel()[cache.flat_unknown[cache.pde_row_mask]]
    for row, p, q1, q2 in cache.bridge_rows:
        F[row] = u_flat[p] - 0.5 * (u_flat[q1] + u_flat[q2])
    return F


def solve_dirichlet(model: MetricModel, dom: GridDomain, H=None,
                    config: Optional[SolveConfig] = None,
                    init: Optional[ScalarGrid] = None,
                    cache: Optional[AssemblyCache] = None) -> SolveReport:
    """Solve the prescribed-mean-curvature Dirichlet problem on ``dom``.

    Newton iteration with backtracking line search; the default initial
    iterate is one Picard solve with the area element frozen at the
    zero-section value W0 = sqrt(1 + mu^2 (a^2 + b^2)).
    """
    t0 = time.perf_counter()
    cfg = config or SolveConfig()
    if cache is None:
        cache = AssemblyCache(model, dom)
    rhs = nodal_rhs(model, dom, H)
    tol = cfg.tol_factor * (1.0 + float(np.max(np.abs(rhs[dom.carried()]))))

    if init is not None:
        vec = init.values.ravel()[cache.flat_unknown].copy()
    else:
        zero_grid = _full_grid(dom, np.zeros(cache.n_unknowns), cache)
        zeros_everywhere = np.where(dom.carried(), 0.0, np.nan)
        W0 = cache.frozen_W(zeros_everywhere)
        vec = _picard_solve(cache, zero_grid, rhs, W0)

    damping: List[float] = []
    picard_sweeps = 0
    rejected = 0
    message = ""
    converged = False
    iters = 0
    u = _full_grid(dom, vec, cache)
    F = cache.residual(u, rhs)
    fnorm = float(np.max(np.abs(F))) if F.size else 0.0

    while iters < cfg.max_iters:
        if fnorm <= tol:
            converged = True
            break
        iters += 1
        try:
            J = cache.jacobian(u)
            delta = _linear_solve(J, -F, cfg.linear_rtol)
        except (np.linalg.LinAlgError, RuntimeError):
            message = "singular Jacobian; Picard fallback"
            vec = _picard_solve(cache, u, rhs, cache.frozen_W(u))
            picard_sweeps += 1
            u = _full_grid(dom, vec, cache)
            F = cache.residual(u, rhs)
            fnorm = float(np.max(np.abs(F)))
            continue

        phi0 = float(F @ F)
        t = 1.0
        accepted = False
        while t >= cfg.min_step:
            trial = vec + t * delta
            u_try = _full_grid(dom, trial, cache)
            F_try = cache.residual(u_try, rhs)
            if float(F_try @ F_try) <= (1.0 - 2.0 * cfg.armijo * t) * phi0:
                accepted = True
                break
            t *= 0.5
        if accepted:
            vec, u, F = trial, u_try, F_try
            fnorm = float(np.max(np.abs(F)))
            damping.append(t)
            rejected = 0
        else:
            rejected += 1
            damping.append(0.0)
            if rejected >= cfg.picard_after:
                vec = _picard_solve(cache, u, rhs, cache.frozen_W(u))
                picard_sweeps += 1
                u = _full_grid(dom, vec, cache)
                F = cache.residual(u, rhs)
                fnorm = float(np.max(np.abs(F)))
                rejected = 0
                message = "Picard fallback after rejected Newton steps"

    if not converged and fnorm <= tol:
        converged = True
    if not converged and not message:
        message = f"no convergence in {cfg.max_iters} iterations"

    sol = raw_grid(dom, u)
    return SolveReport(u=sol, converged=converged, iterations=iters,
                       residual_norm=fnorm, tolerance=tol,
                       damping_history=damping, picard_sweeps=picard_sweeps,
                       message=message, runtime=time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# Exhaustion of unbounded domains by truncation

@dataclass
class ExhaustionReport:
    reports: List[SolveReport]
    cauchy: List[float]        # sup |u_n - u_{n-1}| over the common core


def _common_value_map(dom: GridDomain, values: np.ndarray) -> dict:
    X, Y = dom.coords()
    m = dom.carried()
    out = {}
    for x, y, v in zip(X[m], Y[m], values[m]):
        out[(round(float(x), 9), round(float(y), 9))] = float(v)
    return out


def exhaustion_solve(model: MetricModel, domains: Sequence[GridDomain], H=None,
                     config: Optional[SolveConfig] = None) -> ExhaustionReport:
    """Solve an increasing family of truncated domains and monitor the
    pointwise change between consecutive solutions.

    The Cauchy monitor is taken over the core common to every domain of the
    family (the smallest truncation, for nested families): a fixed compact
    region, so successive changes measure genuine convergence rather than
    the moving artificial-boundary layers.
    """
    reports = []
    maps = []
    for dom in domains:
        rep = solve_dirichlet(model, dom, H=H, config=config)
        reports.append(rep)
        maps.append(_common_value_map(dom, rep.u.values))
    core = set(maps[0].keys()) if maps else set()
    for m in maps[1:]:
        core &= m.keys()
    cauchy = []
    for prev, cur in zip(maps[:-1], maps[1:]):
        if core:
            cauchy.append(max(abs(prev[k] - cur[k]) for k in core))
        else:
            cauchy.append(float("nan"))
    return ExhaustionReport(reports=reports, cauchy=cauchy)


# ---------------------------------------------------------------------------
# Discrete comparison principle

@dataclass
class MaxPrincipleVerdict:
    passed: bool
    worst_violation: float
    node: tuple
    boundary_ordered: bool


def check_max_principle(model: MetricModel, dom: GridDomain, H,
                        u_report, v_report,
                        tol_mp: Optional[float] = None) -> MaxPrincipleVerdict:
    """Check min(v - u) >= -tol_mp over the interior for solutions whose
    boundary data satisfy u <= v (H(u) >= H(v) is the caller's contract)."""
    u = u_report.u.values if isinstance(u_report, SolveReport) else u_report.values
    v = v_report.u.values if isinstance(v_report, SolveReport) else v_report.values
    if tol_mp is None:
        base = 1e-10
        if isinstance(u_report, SolveReport):
            base = max(base, u_report.tolerance)
        if isinstance(v_report, SolveReport):
            base = max(base, v_report.tolerance)
        tol_mp = 10.0 * base
    bnd = dom.status == BOUNDARY
    boundary_ordered = bool(np.all(u[bnd] <= v[bnd] + 1e-14))
    inter = dom.interior_mask()
    diff = np.where(inter, v - u, np.inf)
    j, i = np.unravel_index(int(np.argmin(diff)), diff.shape)
    worst = float(diff[j, i])
    return MaxPrincipleVerdict(passed=boundary_ordered and worst >= -tol_mp,
                               worst_violation=worst, node=(int(j), int(i)),
                               boundary_ordered=boundary_ordered)
