"""Projective duality: dual points, dual meshes with jets, transport laws.

The dual of a point z on S is the complex tangent hyperplane at z.  Two
affine charts of the dual projective space are used:

* the incidence chart ``eta`` with eta_j = -zeta*_j / zeta*_n (j < n) and
  eta_n = zeta*_0 / zeta*_n, in which the incidence relation reads
  z_n + eta_n = z_1 eta_1 + ... + z_{n-1} eta_{n-1}; the transfer/pairing
  machinery lives here, and the chart is self-inverse (the dual of the
  dual chart is the original affine chart);
* the standard chart ``std`` with w_j = zeta*_j / zeta*_0, in which the
  dual of a chart-compact surface enclosing the origin is again
  chart-compact (used to mesh dual surfaces and their Hardy spaces).

Dual jets are obtained by pushing the per-point osculating normal form of
the dual surface back through the normalizing Moebius frame; for curves
(n = 1) the dual is the exact mirror -S and so are its jets.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .geometry import (
    GeometryError,
    Hypersurface,
    Jet2,
    MobiusMap,
    NormalFrame,
    normalize_at,
    pullback_jet,
    tangent_frame,
)
from .meshing import QuadratureMesh

__all__ = [
    "dual_chart_matrix",
    "dual_point",
    "dual_point_std",
    "dual_differential",
    "dual_jet",
    "JetPointSurface",
    "DualMesh",
    "dual_mesh",
    "roundtrip",
    "transport_check",
]


def dual_chart_matrix(n: int) -> np.ndarray:
    """Involution P with eta-chart = standard chart after applying P.

    P swaps the homogenizing slot with the last slot and negates the middle
    block; P^2 = I and P is symmetric.
    """
    p = np.zeros((n + 1, n + 1), dtype=complex)
    p[0, n] = 1.0
    p[n, 0] = 1.0
    for j in range(1, n):
        p[j, j] = -1.0
    return p


def _dual_from_jet(z: np.ndarray, jet: Jet2) -> np.ndarray:
    g = jet.grad
    if abs(g[-1]) < 1e-13 * (1.0 + np.linalg.norm(g)):
        raise GeometryError("dual chart degenerate: r_{z_n} = 0 (re-chart needed)")
    eta = np.empty_like(z)
    eta[:-1] = -g[:-1] / g[-1]
    eta[-1] = -(z @ g) / g[-1]
    return eta


def dual_point(surface: Hypersurface, z) -> np.ndarray:
    """Dual point eta = D_S(z) in the incidence chart.

    eta_j = -r_j / r_n for j < n and eta_n = sum_j z_j eta_j - z_n, so the
    incidence relation z_n + eta_n = sum_{j<n} z_j eta_j holds exactly.
    """
    z = np.asarray(z, dtype=complex)
    return _dual_from_jet(z, surface.jet2(z))


def dual_point_std(surface: Hypersurface, z) -> np.ndarray:
    """Dual point in the standard dual chart w = (r_1, ..., r_n)/zeta*_0.

    zeta*_0 = -sum_j r_j z_j; nonzero whenever no tangent plane passes
    through the affine origin (origin inside the surface).
    """
    z = np.asarray(z, dtype=complex)
    jet = surface.jet2(z)
    zeta0 = -(z @ jet.grad)
    if abs(zeta0) < 1e-13 * (1.0 + np.linalg.norm(jet.grad)):
        raise GeometryError("standard dual chart degenerate: tangent plane hits 0")
    return jet.grad / zeta0


def _d_grad(jet: Jet2, x: np.ndarray) -> np.ndarray:
    """Differential of z -> grad r(z) along the real direction x (complex rep)."""
    return jet.hess_holo @ x + jet.hess_mixed @ np.conj(x)


def dual_differential(z: np.ndarray, jet: Jet2, x: np.ndarray, chart: str = "eta") -> np.ndarray:
    """Exact differential of the dual map along a real tangent direction x."""
    g = jet.grad
    dg = _d_grad(jet, x)
    if chart == "eta":
        gn = g[-1]
        deta = np.empty_like(z)
        deta[:-1] = -(dg[:-1] * gn - g[:-1] * dg[-1]) / gn**2
        eta_head = -g[:-1] / gn
        deta[-1] = x[:-1] @ eta_head + z[:-1] @ deta[:-1] - x[-1]
        return deta
    if chart == "std":
        zeta0 = -(z @ g)
        dzeta0 = -(x @ g + z @ dg)
        return (dg * zeta0 - g * dzeta0) / zeta0**2
    raise GeometryError(f"unknown dual chart {chart!r}")


def dual_jet(surface: Hypersurface, z, frame: NormalFrame | None = None,
             chart: str = "eta") -> tuple[np.ndarray, Jet2]:
    """Dual point and second order jet of the dual surface there.

    n = 1: exact mirror jets of -S.  n >= 2: the osculating dual normal
    form (dilated frame coefficients with conjugated beta) pushed through
    the normalizing frame into the requested chart.
    """
    z = np.asarray(z, dtype=complex)
    n = surface.n
    jet = surface.jet2(z)
    if n == 1:
        eta = _dual_from_jet(z, jet)
        mirr = Jet2(jet.r, -jet.grad, jet.hess_holo, jet.hess_mixed)
        return eta, mirr
    if frame is None:
        frame = normalize_at(surface, z)
    if not frame.convex:
        raise GeometryError("dual jets require strong C-linear convexity")
    alpha, beta = frame.alpha_dil, frame.beta_dil
    model_grad = np.zeros(n, dtype=complex)
    model_grad[-1] = -0.5j  # d(Im eta_n)/d eta_n
    model_hh = np.zeros((n, n), dtype=complex)
    model_hh[: n - 1, : n - 1] = np.diag(np.conj(beta))
    model_hm = np.zeros((n, n), dtype=complex)
    model_hm[: n - 1, : n - 1] = np.diag(alpha)
    model = Jet2(0.0, model_grad, model_hh, model_hm)
    m = frame.M.matrix
    p = dual_chart_matrix(n)
    if chart == "eta":
        q = MobiusMap.from_matrix(p @ np.linalg.inv(m).T @ p)
        eta = _dual_from_jet(z, jet)
        return eta, pullback_jet(q, model, eta)
    if chart == "std":
        qp = MobiusMap.from_matrix(p @ np.linalg.inv(m).T)
        w = dual_point_std(surface, z)
        return w, pullback_jet(qp, model, w)
    raise GeometryError(f"unknown dual chart {chart!r}")


class JetPointSurface(Hypersurface):
    """Single-point jet provider: lets invariant code run on dual models."""

    def __init__(self, n: int, point: np.ndarray, jet: Jet2):
        self.n = n
        self.point = np.asarray(point, dtype=complex)
        self.jet = jet

    def defining(self, z):
        return self.jet.r

    def jet2(self, z):
        if np.linalg.norm(np.asarray(z, dtype=complex) - self.point) > 1e-9 * (
            1.0 + np.linalg.norm(self.point)
        ):
            raise GeometryError("JetPointSurface only knows its own point")
        return self.jet


@dataclass
class DualMesh:
    """Image point cloud D_S(nodes) with dual jets and exact area weights."""

    source: QuadratureMesh
    chart: str
    nodes: np.ndarray
    weights: np.ndarray
    jets: list

    @property
    def n(self) -> int:
        return self.source.n

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    def node_surface(self, i: int) -> JetPointSurface:
        return JetPointSurface(self.n, self.nodes[i], self.jets[i])

    @cached_property
    def frames(self) -> list:
        return [normalize_at(self.node_surface(i), self.nodes[i]) for i in range(self.size)]


def dual_mesh(src: QuadratureMesh, chart: str = "eta") -> DualMesh:
    """Dual surface mesh: image nodes, model jets, Jacobian-exact weights."""
    surf = src.surface
    nodes = np.empty_like(src.nodes)
    jets = []
    jac = np.empty(src.size)
    for i, z in enumerate(src.nodes):
        jet = src.jets[i]
        frame = src.frames[i] if surf.n >= 2 else None
        eta, djet = dual_jet(surf, z, frame=frame, chart=chart)
        nodes[i] = eta
        jets.append(djet)
        tf = tangent_frame(jet)
        imgs = np.array([dual_differential(z, jet, x, chart=chart) for x in tf])
        gram = np.einsum("ak,bk->ab", imgs, np.conj(imgs)).real
        jac[i] = np.sqrt(np.linalg.det(gram))
    return DualMesh(source=src, chart=chart, nodes=nodes,
                    weights=src.weights * jac, jets=jets)


def roundtrip(surface: Hypersurface, z) -> np.ndarray:
    """D_{S*}(D_S(z)): must return z (the dual chart is self-inverse)."""
    z = np.asarray(z, dtype=complex)
    if surface.n == 1:
        eta, djet = dual_jet(surface, z)
        return _dual_from_jet(eta, djet)
    eta, djet = dual_jet(surface, z, chart="eta")
    return _dual_from_jet(eta, djet)


def transport_check(surface: Hypersurface, z) -> tuple[float, float]:
    """Residuals of the invariant transport laws |b*| o D = |b|, phi* o D = phi."""
    from .invariants import beltrami_b, phi as phi_fn

    z = np.asarray(z, dtype=complex)
    eta, djet = dual_jet(surface, z, chart="eta")
    dual_surf = JetPointSurface(surface.n, eta, djet)
    dphi = phi_fn(dual_surf, eta)
    sphi = phi_fn(surface, z)
    res_phi = abs(dphi - sphi)
    if surface.n == 2:
        res_b = abs(abs(beltrami_b(dual_surf, eta)) - abs(beltrami_b(surface, z)))
    else:
        res_b = 0.0
    return res_b, res_phi
