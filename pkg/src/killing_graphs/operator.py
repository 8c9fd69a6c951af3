"""Discrete Killing-graph geometry on lattice domains.

Pointwise operations (generalized gradient, area element, angle function,
factorization pairing) use second-order central differences at interior
nodes.  The mean-curvature residual uses a conservative flux form: fluxes
live on half-edges, coefficients are arithmetic node averages, the normal
derivative is the one-sided difference across the edge, and the area
element at the half-edge is computed from the half-edge gradient.

The same edge tables drive the residual, the exact Jacobian and the
discrete divergence-theorem check, so the three are consistent by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .fields import as_field
from .grids import BOUNDARY, BRIDGE, INTERIOR, GridDomain, ScalarGrid
from .models import MetricModel

_CARRIED = (INTERIOR, BOUNDARY, BRIDGE)


def raw_grid(dom: GridDomain, values: np.ndarray) -> ScalarGrid:
    """ScalarGrid wrapper that skips finiteness validation (diagnostic grids
    legitimately carry NaN at non-interior nodes)."""
    g = object.__new__(ScalarGrid)
    g.domain = dom
    g.values = values
    return g


class NodeFields:
    """Metric data sampled at the carried nodes of a lattice."""

    def __init__(self, model: MetricModel, dom: GridDomain):
        self.model = model
        self.dom = dom
        n1, n0 = dom.shape
        X, Y = dom.coords()
        self.X, self.Y = X, Y
        carried = dom.carried()

        def at(f):
            out = np.full((n1, n0), np.nan)
            out[carried] = f.value(X[carried], Y[carried])
            return out

        self.LAM = at(model.lam)
        self.MU = at(model.mu)
        A = at(model.a)
        B = at(model.b)
        if dom.kind == "polar":
            t = dom.ht * np.arange(n1)[:, None]
            ct, st = np.cos(t), np.sin(t)
            self.AN1 = A * ct + B * st      # radial connection component
            self.AT1 = -A * st + B * ct     # angular connection component
            self.R = np.broadcast_to(dom.r_values()[None, :], (n1, n0)).copy()
        else:
            self.AN1, self.AT1 = A, B
            self.R = None

    def gradient_arrays(self, values: np.ndarray):
        """Orthonormal (G1, G2) of the generalized gradient at interior nodes."""
        dom = self.dom
        n1, n0 = dom.shape
        v = values
        G1 = np.full((n1, n0), np.nan)
        G2 = np.full((n1, n0), np.nan)
        jj, ii = np.nonzero(dom.interior_mask())
        if dom.kind == "cartesian":
            du1 = (v[jj, ii + 1] - v[jj, ii - 1]) / (2 * dom.hx)
            du0 = (v[(jj + 1), ii] - v[(jj - 1), ii]) / (2 * dom.hy)
        else:
            jp = (jj + 1) % n1 if dom.periodic else jj + 1
            jm = (jj - 1) % n1 if dom.periodic else jj - 1
            du1 = (v[jj, ii + 1] - v[jj, ii - 1]) / (2 * dom.hr)
            du0 = (v[jp, ii] - v[jm, ii]) / (2 * dom.ht * self.R[jj, ii])
        lam = self.LAM[jj, ii]
        G1[jj, ii] = du1 / lam - self.AN1[jj, ii]
        G2[jj, ii] = du0 / lam - self.AT1[jj, ii]
        return G1, G2


# ---------------------------------------------------------------------------
# Assembly cache

@dataclass
class _EdgeFamily:
    A: np.ndarray          # flat node index, minus side
    B: np.ndarray          # flat node index, plus side
    lam: np.ndarray        # edge-averaged lambda
    mu2: np.ndarray        # edge-averaged mu, squared
    an: np.ndarray         # normal connection component (edge-averaged)
    at: np.ndarray         # tangential connection component (edge-averaged)
    len_n: np.ndarray      # normal length scale (denominator of du)
    gmul: np.ndarray       # geometric flux multiplier (rbar on radial edges)
    t_ids: np.ndarray      # (m, 4) stencil ids of the tangential form
    t_w: np.ndarray        # (m, 4) weights of the tangential form
    cA: np.ndarray         # +coefficient into the PDE row of A (0 if none)
    cB: np.ndarray         # -coefficient into the PDE row of B (0 if none)
    rowA: np.ndarray       # unknown row of A (-1 when not a PDE row)
    rowB: np.ndarray
    htrans: np.ndarray     # transverse length for boundary-flux bookkeeping


class AssemblyCache(NodeFields):
    """Static tables binding a MetricModel to a GridDomain."""

    def __init__(self, model: MetricModel, dom: GridDomain):
        super().__init__(model, dom)
        n1, n0 = dom.shape
        self.n1, self.n0 = n1, n0
        st = dom.status

        self.unknown_mask = (st == INTERIOR) | (st == BRIDGE)
        self.unknown_ids = np.full(n1 * n0, -1, dtype=np.int64)
        flat_unknown = np.nonzero(self.unknown_mask.ravel())[0]
        self.unknown_ids[flat_unknown] = np.arange(flat_unknown.size)
        self.n_unknowns = flat_unknown.size
        self.flat_unknown = flat_unknown
        self.pde_row_mask = st.ravel()[flat_unknown] == INTERIOR

        lam2 = self.LAM ** 2
        if dom.kind == "polar":
            self.inv_fac = 1.0 / (lam2 * self.R)
            self.cell = lam2 * self.R * dom.hr * dom.ht
        else:
            self.inv_fac = 1.0 / lam2
            self.cell = lam2 * dom.hx * dom.hy

        self._node_slope_forms()
        self.fam_i = self._build_family(axis=1)
        self.fam_j = self._build_family(axis=0)
        self.bridge_rows = []
        for (j, i), ((j1, i1), (j2, i2)) in dom.bridges.items():
            row = self.unknown_ids[j * n0 + i]
            self.bridge_rows.append((row, j * n0 + i, j1 * n0 + i1, j2 * n0 + i2))

    # -- per-node directional slope forms -----------------------------------

    def _node_slope_forms(self):
        dom = self.dom
        n1, n0 = self.n1, self.n0
        st = dom.status

        def build(axis):
            ids = np.zeros((n1, n0, 2), dtype=np.int64)
            w = np.zeros((n1, n0, 2))
            dj, di = (1, 0) if axis == 0 else (0, 1)
            for j in range(n1):
                for i in range(n0):
                    if st[j, i] not in _CARRIED:
                        continue
                    nb_p = dom.neighbor(j, i, dj, di)
                    nb_m = dom.neighbor(j, i, -dj, -di)
                    ok_p = nb_p is not None and st[nb_p] in _CARRIED
                    ok_m = nb_m is not None and st[nb_m] in _CARRIED
                    if axis == 0:
                        d = dom.hy if dom.kind == "cartesian" else dom.ht * (dom.r_start + dom.hr * i)
                    else:
                        d = dom.hx if dom.kind == "cartesian" else dom.hr
                    if ok_p and ok_m:
                        ids[j, i] = (nb_p[0] * n0 + nb_p[1], nb_m[0] * n0 + nb_m[1])
                        w[j, i] = (0.5 / d, -0.5 / d)
                    elif ok_p:
                        ids[j, i] = (nb_p[0] * n0 + nb_p[1], j * n0 + i)
                        w[j, i] = (1.0 / d, -1.0 / d)
                    elif ok_m:
                        ids[j, i] = (j * n0 + i, nb_m[0] * n0 + nb_m[1])
                        w[j, i] = (1.0 / d, -1.0 / d)
                    else:
                        # no usable neighbor: zero-weight form anchored on the
                        # node itself so padded entries never touch NaN values
                        ids[j, i] = (j * n0 + i, j * n0 + i)
            return ids, w

        self.slope0_ids, self.slope0_w = build(axis=0)
        self.slope1_ids, self.slope1_w = build(axis=1)

    # -- edge families -------------------------------------------------------

    def _build_family(self, axis: int) -> _EdgeFamily:
        dom = self.dom
        n1, n0 = self.n1, self.n0
        sflat = dom.status.ravel()

        if axis == 1:
            jA, iA = np.meshgrid(np.arange(n1), np.arange(n0 - 1), indexing="ij")
            jB, iB = jA, iA + 1
        elif dom.kind == "polar" and dom.periodic:
            jA, iA = np.meshgrid(np.arange(n1), np.arange(n0), indexing="ij")
            jB, iB = (jA + 1) % n1, iA
        else:
            jA, iA = np.meshgrid(np.arange(n1 - 1), np.arange(n0), indexing="ij")
            jB, iB = jA + 1, iA

        Af = (jA * n0 + iA).ravel()
        Bf = (jB * n0 + iB).ravel()
        stA, stB = sflat[Af], sflat[Bf]
        active = (np.isin(stA, _CARRIED) & np.isin(stB, _CARRIED)
                  & ((stA == INTERIOR) | (stB == INTERIOR)))
        Af, Bf = Af[active], Bf[active]
        stA, stB = stA[active], stB[active]

        avg = lambda arr: 0.5 * (arr.ravel()[Af] + arr.ravel()[Bf])
        lam_e = avg(self.LAM)
        mu2_e = avg(self.MU) ** 2
        an_e = avg(self.AN1) if axis == 1 else avg(self.AT1)
        at_e = avg(self.AT1) if axis == 1 else avg(self.AN1)

        if dom.kind == "cartesian":
            len_n = np.full(Af.shape, dom.hx if axis == 1 else dom.hy)
            gmul = np.ones(Af.shape)
            div = dom.hx if axis == 1 else dom.hy
            htrans = np.full(Af.shape, dom.hy if axis == 1 else dom.hx)
        elif axis == 1:
            rA = self.R.ravel()[Af]
            len_n = np.full(Af.shape, dom.hr)
            gmul = rA + 0.5 * dom.hr
            div = dom.hr
            htrans = np.full(Af.shape, dom.ht)
        else:
            rA = self.R.ravel()[Af]
            len_n = dom.ht * rA
            gmul = np.ones(Af.shape)
            div = dom.ht
            htrans = np.full(Af.shape, dom.hr)

        s_ids = (self.slope0_ids if axis == 1 else self.slope1_ids).reshape(-1, 2)
        s_w = (self.slope0_w if axis == 1 else self.slope1_w).reshape(-1, 2)
        t_ids = np.concatenate([s_ids[Af], s_ids[Bf]], axis=1)
        t_w = 0.5 * np.concatenate([s_w[Af], s_w[Bf]], axis=1)

        inv = self.inv_fac.ravel()
        rowA = self.unknown_ids[Af].copy()
        rowB = self.unknown_ids[Bf].copy()
        rowA[stA != INTERIOR] = -1
        rowB[stB != INTERIOR] = -1
        cA = np.where(rowA >= 0, inv[Af] / div, 0.0)
        cB = np.where(rowB >= 0, inv[Bf] / div, 0.0)

        return _EdgeFamily(A=Af, B=Bf, lam=lam_e, mu2=mu2_e, an=an_e, at=at_e,
                           len_n=len_n, gmul=gmul, t_ids=t_ids, t_w=t_w,
                           cA=cA, cB=cB, rowA=rowA, rowB=rowB, htrans=htrans)

    # -- flux evaluation -------------------------------------------------------

    def _edge_state(self, fam: _EdgeFamily, u_flat: np.ndarray):
        d = (u_flat[fam.B] - u_flat[fam.A]) / fam.len_n
        t = np.einsum("ek,ek->e", fam.t_w, u_flat[fam.t_ids])
        G1 = d / fam.lam - fam.an
        G2 = t / fam.lam - fam.at
        W = np.sqrt(1.0 + fam.mu2 * (G1 * G1 + G2 * G2))
        coef = fam.gmul * fam.lam * fam.mu2
        flux = coef * G1 / W
        return G1, G2, W, coef, flux

    def residual(self, u_grid: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        """PDE residual + bridge constraints over the unknown rows.

        ``u_grid`` is the full lattice array (Dirichlet values baked in);
        ``rhs`` is the nodal 2*mu*H array.
        """
        u_flat = u_grid.ravel()
        F = np.zeros(self.n_unknowns)
        for fam in (self.fam_i, self.fam_j):
            flux = self._edge_state(fam, u_flat)[4]
            mA = fam.rowA >= 0
            np.add.at(F, fam.rowA[mA], flux[mA] * fam.cA[mA])
            mB = fam.rowB >= 0
            np.add.at(F, fam.rowB[mB], -flux[mB] * fam.cB[mB])
        F[self.pde_row_mask] -= rhs.ravel()[self.flat_unknown[self.pde_row_mask]]
        for row, p, q1, q2 in self.bridge_rows:
            F[row] = u_flat[p] - 0.5 * (u_flat[q1] + u_flat[q2])
        return F

    def jacobian(self, u_grid: np.ndarray, frozen_W: Optional[list] = None) -> sp.csr_matrix:
        """Exact Jacobian of :meth:`residual`.

        With ``frozen_W`` (per-family W arrays) the flux is linearized as
        coef * G1 / W_frozen: the Picard operator.
        """
        u_flat = u_grid.ravel()
        rows, cols, vals = [], [], []
        for k, fam in enumerate((self.fam_i, self.fam_j)):
            G1, G2, W, coef, _ = self._edge_state(fam, u_flat)
            if frozen_W is not None:
                Wf = frozen_W[k]
                dF_dG1 = coef / Wf
                dF_dG2 = np.zeros_like(dF_dG1)
            else:
                dF_dG1 = coef * (W * W - fam.mu2 * G1 * G1) / W ** 3
                dF_dG2 = -coef * fam.mu2 * G1 * G2 / W ** 3

            stencil = [(fam.B, dF_dG1 / (fam.len_n * fam.lam)),
                       (fam.A, -dF_dG1 / (fam.len_n * fam.lam))]
            for k2 in range(4):
                stencil.append((fam.t_ids[:, k2], dF_dG2 * fam.t_w[:, k2] / fam.lam))

            for ids, dv in stencil:
                col = self.unknown_ids[ids]
                ok = col >= 0
                mA = (fam.rowA >= 0) & ok
                rows.append(fam.rowA[mA])
                cols.append(col[mA])
                vals.append((dv * fam.cA)[mA])
                mB = (fam.rowB >= 0) & ok
                rows.append(fam.rowB[mB])
                cols.append(col[mB])
                vals.append((-dv * fam.cB)[mB])

        for row, p, q1, q2 in self.bridge_rows:
            for node, w in ((p, 1.0), (q1, -0.5), (q2, -0.5)):
                col = self.unknown_ids[node]
                if col >= 0:
                    rows.append(np.array([row]))
                    cols.append(np.array([col]))
                    vals.append(np.array([w]))

        J = sp.coo_matrix((np.concatenate(vals),
                           (np.concatenate(rows), np.concatenate(cols))),
                          shape=(self.n_unknowns, self.n_unknowns))
        return J.tocsr()

    def frozen_W(self, u_grid: np.ndarray) -> list:
        u_flat = u_grid.ravel()
        return [self._edge_state(fam, u_flat)[2] for fam in (self.fam_i, self.fam_j)]

    def flux_balance(self, u_grid: np.ndarray):
        """(volume sum of the discrete divergence, direct boundary-flux sum).

        The flux form telescopes, so the two agree to rounding.
        """
        u_flat = u_grid.ravel()
        F = self.residual(u_grid, np.zeros(self.dom.shape))
        cellw = self.cell.ravel()[self.flat_unknown]
        volume = float(np.sum(F[self.pde_row_mask] * cellw[self.pde_row_mask]))
        boundary = 0.0
        for fam in (self.fam_i, self.fam_j):
            flux = self._edge_state(fam, u_flat)[4]
            outgoing = (fam.rowA >= 0) & (fam.rowB < 0)
            incoming = (fam.rowB >= 0) & (fam.rowA < 0)
            boundary += float(np.sum(flux[outgoing] * fam.htrans[outgoing]))
            boundary -= float(np.sum(flux[incoming] * fam.htrans[incoming]))
        return volume, boundary


# ---------------------------------------------------------------------------
# Pointwise graph geometry

def generalized_gradient(model: MetricModel, u: ScalarGrid, node,
                         fields: Optional[NodeFields] = None):
    """(G1, G2) at one interior node: (u_x/lambda - a, u_y/lambda - b) in the
    orthonormal chart frame (radial/angular frame on polar grids)."""
    nf = fields or NodeFields(model, u.domain)
    G1, G2 = nf.gradient_arrays(u.values)
    j, i = node
    if not np.isfinite(G1[j, i]):
        raise ValueError(f"node {node} is not interior")
    return float(G1[j, i]), float(G2[j, i])


def area_element(model: MetricModel, u: ScalarGrid, node,
                 fields: Optional[NodeFields] = None) -> float:
    nf = fields or NodeFields(model, u.domain)
    g1, g2 = generalized_gradient(model, u, node, fields=nf)
    mu = float(nf.MU[node])
    return float(np.sqrt(1.0 + mu ** 2 * (g1 ** 2 + g2 ** 2)))


def angle_function(model: MetricModel, u: ScalarGrid, node,
                   fields: Optional[NodeFields] = None) -> float:
    nf = fields or NodeFields(model, u.domain)
    return float(nf.MU[node]) / area_element(model, u, node, fields=nf)


def factorization_gap(model: MetricModel, u: ScalarGrid, v: ScalarGrid, node,
                      fields: Optional[NodeFields] = None) -> float:
    """Pairing <Gu/Wu - Gv/Wv, Gu - Gv> at a node; >= 0, zero exactly when
    the discrete gradients coincide."""
    nf = fields or NodeFields(model, u.domain)
    gu = generalized_gradient(model, u, node, fields=nf)
    gv = generalized_gradient(model, v, node, fields=nf)
    mu = float(nf.MU[node])
    Wu = np.sqrt(1.0 + mu ** 2 * (gu[0] ** 2 + gu[1] ** 2))
    Wv = np.sqrt(1.0 + mu ** 2 * (gv[0] ** 2 + gv[1] ** 2))
    return float((gu[0] / Wu - gv[0] / Wv) * (gu[0] - gv[0])
                 + (gu[1] / Wu - gv[1] / Wv) * (gu[1] - gv[1]))


def factorization_identity_rhs(model: MetricModel, u: ScalarGrid, v: ScalarGrid,
                               node, fields: Optional[NodeFields] = None) -> float:
    """(Wu + Wv)/(2 mu^2) |Nu - Nv|^2, the normal-gap side of the
    factorization identity, with the vertical part (1/Wu - 1/Wv)^2 included."""
    nf = fields or NodeFields(model, u.domain)
    gu = generalized_gradient(model, u, node, fields=nf)
    gv = generalized_gradient(model, v, node, fields=nf)
    mu = float(nf.MU[node])
    Wu = np.sqrt(1.0 + mu ** 2 * (gu[0] ** 2 + gu[1] ** 2))
    Wv = np.sqrt(1.0 + mu ** 2 * (gv[0] ** 2 + gv[1] ** 2))
    horiz = ((mu * gu[0] / Wu - mu * gv[0] / Wv) ** 2
             + (mu * gu[1] / Wu - mu * gv[1] / Wv) ** 2)
    vert = (1.0 / Wu - 1.0 / Wv) ** 2
    return float((Wu + Wv) / (2.0 * mu ** 2) * (horiz + vert))


# ---------------------------------------------------------------------------
# Public residual

def nodal_rhs(model: MetricModel, dom: GridDomain, H=None) -> np.ndarray:
    """2*mu*H at every carried node (zeros when H is None)."""
    out = np.zeros(dom.shape)
    if H is None:
        return out
    Hf = as_field(H)
    X, Y = dom.coords()
    m = dom.carried()
    out[m] = 2.0 * model.mu.value(X[m], Y[m]) * Hf.value(X[m], Y[m])
    return out


def mean_curvature_residual(model: MetricModel, u: ScalarGrid, H=None,
                            cache: Optional[AssemblyCache] = None) -> ScalarGrid:
    """Flux-form residual F(u) at interior nodes (NaN elsewhere).

    Solutions of the prescribed-curvature problem satisfy F(u) = 0.
    """
    if cache is None:
        cache = AssemblyCache(model, u.domain)
    rhs = nodal_rhs(model, u.domain, H)
    F = cache.residual(u.values, rhs)
    out = np.full(u.domain.shape, np.nan)
    flat = cache.flat_unknown[cache.pde_row_mask]
    out.ravel()[flat] = F[cache.pde_row_mask]
    return raw_grid(u.domain, out)
