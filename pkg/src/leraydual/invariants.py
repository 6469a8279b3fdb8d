"""Pointwise Moebius invariants of a hypersurface.

Everything here is a pure function of the second order jet: the Levi /
anti-hermitian pair on the complex tangent space, the Beltrami coefficient
b (n = 2), the scalar invariant phi with its independent bordered
determinant cross-check, the Fefferman surface density and its sharp
(phi-weighted) companion, and the convexity classification.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from .geometry import GeometryError, Hypersurface, Jet2, normalize_at

__all__ = [
    "PointInvariants",
    "levi_q",
    "beltrami_b",
    "phi",
    "phi_det",
    "fefferman_weight",
    "sharp_weight",
    "classify",
    "point_invariants",
]


def _jet_of(surface: Hypersurface, z) -> Jet2:
    return surface.jet2(np.asarray(z, dtype=complex))


def levi_q(surface: Hypersurface, z):
    """Levi and anti-hermitian forms in an orthonormal basis of H_zS.

    The basis comes from a QR factorization of the tangent projector, so the
    matrices themselves are basis-dependent; their eigen-ratios are not.
    """
    jet = _jet_of(surface, z)
    n = jet.n
    g = jet.grad
    ng = np.linalg.norm(g)
    if ng < 1e-12:
        raise GeometryError("tangency degeneracy: |grad r| ~ 0")
    if n == 1:
        return np.zeros((0, 0)), np.zeros((0, 0), dtype=complex)
    basis = null_space(g[None, :])  # columns: orthonormal basis of H_zS
    scale = 0.5 / ng  # defining function normalized to gradient i/2 e_n
    levi = scale * basis.T @ jet.hess_mixed @ np.conj(basis)
    qform = scale * basis.T @ jet.hess_holo @ basis
    return 0.5 * (levi + levi.conj().T), 0.5 * (qform + qform.T)


def beltrami_b(surface: Hypersurface, z) -> complex:
    """Beltrami coefficient b(z) for n = 2: bordered determinant quotient.

    b = -det[[0, r_1, r_2], [r_1, r_11, r_21], [r_2, r_12, r_22]]
       / det[[0, r_1, r_2], [r_1b, r_11b, r_21b], [r_2b, r_12b, r_22b]],
    independent of the choice of defining function.
    """
    jet = _jet_of(surface, z)
    if jet.n != 2:
        raise GeometryError("beltrami_b is defined for n = 2 only")
    r1, r2 = jet.grad
    hh = jet.hess_holo
    hm = jet.hess_mixed
    num = np.array(
        [
            [0.0, r1, r2],
            [r1, hh[0, 0], hh[1, 0]],
            [r2, hh[0, 1], hh[1, 1]],
        ]
    )
    den = np.array(
        [
            [0.0, r1, r2],
            [np.conj(r1), hm[0, 0], hm[1, 0]],
            [np.conj(r2), hm[0, 1], hm[1, 1]],
        ]
    )
    d = np.linalg.det(den)
    if abs(d) < 1e-300:
        raise GeometryError("Levi-degenerate point: denominator determinant vanishes")
    return complex(-np.linalg.det(num) / d)


def phi(surface: Hypersurface, z) -> float:
    """Scalar invariant prod_j (1 - |beta_j|^2/alpha_j^2) from the normal frame."""
    frame = normalize_at(surface, np.asarray(z, dtype=complex))
    if not frame.pseudoconvex:
        raise GeometryError("phi requires strong pseudoconvexity")
    return frame.phi


_PHI_DET_CAL: dict[int, float] = {}


def _phi_det_raw(jet: Jet2) -> float:
    n = jet.n
    g = jet.grad
    hh = jet.hess_holo
    hm = jet.hess_mixed
    inner = np.zeros((n + 1, n + 1), dtype=complex)
    inner[0, 1:] = np.conj(g)
    inner[1:, 0] = g
    inner[1:, 1:] = hm
    d1 = np.linalg.det(inner)
    if abs(d1) < 1e-300:
        raise GeometryError("singular inner determinant in phi_det")
    big = np.zeros((2 * n + 2, 2 * n + 2), dtype=complex)
    big[0, 2 : n + 2] = g
    big[1, n + 2 :] = np.conj(g)
    big[2 : n + 2, 0] = g
    big[n + 2 :, 1] = np.conj(g)
    big[2 : n + 2, 2 : n + 2] = hh
    big[2 : n + 2, n + 2 :] = hm
    big[n + 2 :, 2 : n + 2] = np.conj(hm)
    big[n + 2 :, n + 2 :] = np.conj(hh)
    return float(abs(np.linalg.det(big) / d1**2))


def phi_det(surface: Hypersurface, z) -> float:
    """Affine bordered-determinant formula for phi.

    Calibrated once per dimension against the unit sphere (the raw formula
    is already self-normalized; the calibration guards the convention).
    """
    jet = _jet_of(surface, z)
    n = jet.n
    if n not in _PHI_DET_CAL:
        from .surfaces import LpSphere

        if n == 2:
            zs = np.array([1.0 / np.sqrt(2), 1.0 / np.sqrt(2)], dtype=complex)
            _PHI_DET_CAL[n] = 1.0 / _phi_det_raw(LpSphere(2.0).jet2(zs))
        else:
            _PHI_DET_CAL[n] = 1.0
    return _PHI_DET_CAL[n] * _phi_det_raw(jet)


def fefferman_weight(surface: Hypersurface, z) -> float:
    """Density of the invariant boundary norm against euclidean dS.

    Affine bordered-Hessian form: 2 |det [[0, r_kbar], [r_j, r_{j kbar}]]|^{1/(n+1)}
    divided by |grad r| (the normal derivative of r).  Equals 1 on the unit
    circle and the unit sphere.
    """
    jet = _jet_of(surface, z)
    return _fefferman_from_jet(jet)


def _fefferman_from_jet(jet: Jet2) -> float:
    n = jet.n
    g = jet.grad
    dn = 2.0 * np.linalg.norm(g)  # dr . N for the outward unit normal
    if dn < 1e-14:
        raise GeometryError("tangency degeneracy in fefferman_weight")
    bord = np.zeros((n + 1, n + 1), dtype=complex)
    bord[0, 1:] = np.conj(g)
    bord[1:, 0] = g
    bord[1:, 1:] = jet.hess_mixed
    det = np.linalg.det(bord)
    return float(2.0 * abs(det) ** (1.0 / (n + 1)) / dn)


def sharp_weight(surface: Hypersurface, z) -> float:
    """Density of the sharp inner product: phi^{-n/(2(n+1))} x Fefferman density."""
    jet = _jet_of(surface, z)
    n = jet.n
    if n == 1:
        return _fefferman_from_jet(jet)
    p = phi(surface, z)
    if p <= 0:
        raise GeometryError("sharp weight requires phi > 0")
    return p ** (-n / (2.0 * (n + 1))) * _fefferman_from_jet(jet)


def classify(surface: Hypersurface, z) -> dict:
    """Pseudoconvexity and strong C-linear convexity flags at a point."""
    levi, _ = levi_q(surface, z)
    if levi.shape[0] == 0:
        return {"pseudoconvex": True, "strongly_convexlike": True}
    eigs = np.linalg.eigvalsh(levi)
    pseudoconvex = bool(np.all(eigs >= -1e-12))
    strongly = False
    if np.all(eigs > 0):
        try:
            frame = normalize_at(surface, np.asarray(z, dtype=complex))
            strongly = frame.convex
        except GeometryError:
            strongly = False
    return {"pseudoconvex": pseudoconvex, "strongly_convexlike": strongly}


@dataclass(frozen=True)
class PointInvariants:
    """Bundle of the pointwise invariants at a surface point."""

    levi: np.ndarray
    q_form: np.ndarray
    b: complex | None
    phi: float
    fefferman_w: float
    sharp_w: float
    pseudoconvex: bool
    strongly_convexlike: bool


def point_invariants(surface: Hypersurface, z) -> PointInvariants:
    levi, qform = levi_q(surface, z)
    flags = classify(surface, z)
    b = beltrami_b(surface, z) if surface.n == 2 else None
    ph = phi(surface, z) if flags["pseudoconvex"] else float("nan")
    fw = fefferman_weight(surface, z)
    n = surface.n
    sw = fw if n == 1 else (ph ** (-n / (2.0 * (n + 1))) * fw if ph > 0 else float("nan"))
    return PointInvariants(
        levi=levi,
        q_form=qform,
        b=b,
        phi=ph,
        fefferman_w=fw,
        sharp_w=sw,
        pseudoconvex=flags["pseudoconvex"],
        strongly_convexlike=flags["strongly_convexlike"],
    )
