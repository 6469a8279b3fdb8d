"""Fefferman/sharp inner products, the transfer map and the duality pairing.

The bilinear pairing between sections f on S and g on the dual surface S*
is computed through per-node normal frames: in frame-normalized
coordinates the pairing element is f g phi^{-1/2} dS, and the chart
factors of the normalizing map and of its dual produce a complex pairing
density nu against euclidean dS,

    <<f, g>> = sum_i f(z_i) g(eta_i) nu_i w_i ,

with g sampled at the dual points in the incidence-chart trivialization.
The same frames give the transfer map values, and the identity
<<f, g>> = <f, conj(T g)>_Fefferman holds exactly (it is used as a
self-test).  For curves nu reduces to the unit tangent, recovering the
classical contour pairing.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations_with_replacement

import numpy as np

from .duality import DualMesh, dual_mesh, dual_point_std
from .geometry import GeometryError, tangent_frame
from .invariants import _fefferman_from_jet
from .meshing import QuadratureMesh

__all__ = [
    "Section",
    "SharpMetric",
    "PairingCache",
    "pairing_cache",
    "fefferman_weights",
    "sharp_weights",
    "inner_fefferman",
    "inner_sharp",
    "norm_sharp",
    "transfer",
    "pair",
    "pair_dualside",
    "eta_section_from_std",
    "HardyBasis",
    "hardy_basis",
    "dual_hardy_basis",
    "pairing_matrix",
    "sup_pairing",
    "infsup",
]


@dataclass
class Section:
    """Trivialized section samples on a mesh (bidegree bookkeeping only)."""

    values: np.ndarray
    mesh: object
    bidegree: tuple = (None, 0)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape[0] != self.mesh.size:
            raise GeometryError("section length does not match mesh")


@dataclass
class SharpMetric:
    """Diagonal sharp quadrature weights (density times area weight)."""

    weights: np.ndarray

    def __post_init__(self):
        if np.any(self.weights <= 0):
            raise GeometryError("sharp metric weights must be positive")


def _mesh_jets(mesh) -> list:
    return mesh.jets


def fefferman_weights(mesh) -> np.ndarray:
    """Fefferman density per node (against dS)."""
    return np.array([_fefferman_from_jet(j) for j in _mesh_jets(mesh)])


def _phis(mesh) -> np.ndarray:
    return np.array([fr.phi for fr in mesh.frames])


def sharp_weights(mesh) -> np.ndarray:
    """Sharp density per node: phi^{-n/(2(n+1))} times the Fefferman density."""
    n = mesh.n
    w = fefferman_weights(mesh)
    if n == 1:
        return w
    return _phis(mesh) ** (-n / (2.0 * (n + 1))) * w


def sharp_metric(mesh) -> SharpMetric:
    return SharpMetric(sharp_weights(mesh) * mesh.weights)


# ---------------------------------------------------------------------------
# inner products
# ---------------------------------------------------------------------------

def _values(f) -> np.ndarray:
    return f.values if isinstance(f, Section) else np.asarray(f, dtype=complex)


def inner_fefferman(f, g, mesh) -> complex:
    """Hermitian Fefferman inner product of trivialized sections."""
    fv, gv = _values(f), _values(g)
    if fv.shape != gv.shape:
        raise GeometryError("mesh mismatch in inner product")
    return complex(np.sum(fv * np.conj(gv) * fefferman_weights(mesh) * mesh.weights))


def inner_sharp(f, g, mesh) -> complex:
    fv, gv = _values(f), _values(g)
    return complex(np.sum(fv * np.conj(gv) * sharp_weights(mesh) * mesh.weights))


def norm_sharp(f, mesh) -> float:
    return float(np.sqrt(inner_sharp(f, f, mesh).real))


def norm_fefferman(f, mesh) -> float:
    return float(np.sqrt(inner_fefferman(f, f, mesh).real))


# ---------------------------------------------------------------------------
# pairing cache: frames, density, transfer factors
# ---------------------------------------------------------------------------

@dataclass
class PairingCache:
    """Per-node frame data for the pairing and transfer machinery.

    ``nu`` is the pairing density against dS; ``tfac`` the transfer scalar
    such that (T g)(z_i) = tfac_i * g_eta(eta_i) in the conjugate
    trivialization on the source side.
    """

    n: int
    nodes: np.ndarray
    weights: np.ndarray
    dual_nodes: np.ndarray
    nu: np.ndarray
    tfac: np.ndarray
    phis: np.ndarray
    feff: np.ndarray

    @property
    def size(self) -> int:
        return self.nodes.shape[0]


def _frame_factors(frame, z, jet):
    m = frame.M.matrix
    n = m.shape[0] - 1
    minv00 = complex(np.linalg.inv(m)[0, 0])
    mnn = complex(m[n, n])
    ac = frame.M.jacobian(z)
    tf = tangent_frame(jet)
    imgs = tf @ ac.T
    gram = np.einsum("ak,bk->ab", imgs, np.conj(imgs)).real
    jac = float(np.sqrt(np.linalg.det(gram)))
    return minv00, mnn, jac


def pairing_cache(mesh) -> PairingCache:
    """Build the pairing density and transfer factors over a mesh.

    Works on a source ``QuadratureMesh`` or on a ``DualMesh`` (for the
    constructions run from the dual side); for a dual mesh the "dual
    points" are the original source nodes.
    """
    n = mesh.n
    if isinstance(mesh, DualMesh):
        nodes = mesh.nodes
        jets = mesh.jets
        frames = mesh.frames
        duals = mesh.source.nodes
    else:
        nodes = mesh.nodes
        jets = mesh.jets
        frames = mesh.frames
        from .duality import dual_point

        duals = np.array([dual_point(mesh.surface, z) for z in nodes])
    size = nodes.shape[0]
    nu = np.empty(size, dtype=complex)
    tfac = np.empty(size, dtype=complex)
    phis = np.empty(size)
    for i in range(size):
        fr = frames[i]
        if not fr.convex:
            raise GeometryError("pairing requires strong C-linear convexity on the mesh")
        minv00, mnn, jac = _frame_factors(fr, nodes[i], jets[i])
        phis[i] = fr.phi
        nu[i] = (minv00 * mnn) ** (-n) * phis[i] ** -0.5 * jac
        aprod = float(np.prod(fr.alpha_dil)) if n >= 2 else 1.0
        tfac[i] = (
            2.0 ** (n * (n - 1) / (n + 1))
            * aprod ** (n / (n + 1))
            * mnn ** (-n)
            * np.conj(minv00) ** n
        )
    feff = np.array([_fefferman_from_jet(j) for j in jets])
    return PairingCache(
        n=n, nodes=nodes, weights=mesh.weights, dual_nodes=duals,
        nu=nu, tfac=tfac, phis=phis, feff=feff,
    )


def transfer(cache: PairingCache, g_at_dual) -> np.ndarray:
    """Transfer of a dual-side section onto the source surface.

    ``g_at_dual``: samples of g at the dual points, in the incidence-chart
    trivialization (for a dual-side cache: samples of the source section at
    the source nodes in the affine trivialization).  Returns the conjugate
    trivialization values of the transferred bidegree (0, -n) section.
    """
    return cache.tfac * _values(g_at_dual)


def pair(cache: PairingCache, f, g_at_dual) -> complex:
    """Bilinear pairing <<f, g>> = sum f g nu dS."""
    return complex(np.sum(_values(f) * _values(g_at_dual) * cache.nu * cache.weights))


def pair_density(cache: PairingCache) -> np.ndarray:
    """Complex pairing element per node (nu times area weight)."""
    return cache.nu * cache.weights


def pair_dualside(dual_cache: PairingCache, g, f_at_source) -> complex:
    """The pairing computed from the dual side: <<f, g>> = <g, conj(T_{S*} f)>."""
    return pair(dual_cache, g, f_at_source)


def eta_section_from_std(eta_nodes: np.ndarray, g_std, n: int) -> np.ndarray:
    """Incidence-chart trivialization of a section given in the standard chart.

    g_eta(eta) = eta_n^{-n} g_std(w),  w = (-eta'/eta_n, 1/eta_n).
    """
    eta = np.asarray(eta_nodes, dtype=complex)
    etan = eta[:, -1]
    w = np.empty_like(eta)
    w[:, :-1] = -eta[:, :-1] / etan[:, None]
    w[:, -1] = 1.0 / etan
    return etan ** (-n) * g_std(w)


# ---------------------------------------------------------------------------
# Hardy bases
# ---------------------------------------------------------------------------

def monomial_exponents(n: int, max_degree: int) -> list[tuple[int, ...]]:
    """Graded list of monomial exponents in n variables up to max_degree."""
    out = [(0,) * n]
    for d in range(1, max_degree + 1):
        for combo in combinations_with_replacement(range(n), d):
            e = [0] * n
            for c in combo:
                e[c] += 1
            out.append(tuple(e))
    return out


def _monomial_values(points: np.ndarray, exps) -> np.ndarray:
    cols = [np.prod(points**np.array(e), axis=1) for e in exps]
    return np.stack(cols, axis=1)


@dataclass
class HardyBasis:
    """Orthonormalized boundary monomials spanning a discrete Hardy space.

    ``values[:, k]`` are node samples of the k-th basis section;
    ``coeffs[:, k]`` expresses it over the raw monomials; ``exponents``
    records the monomial grading.
    """

    values: np.ndarray
    coeffs: np.ndarray
    exponents: list
    metric: np.ndarray  # diagonal quadrature weights of the sharp metric

    @property
    def count(self) -> int:
        return self.values.shape[1]

    def gram(self) -> np.ndarray:
        return self.values.conj().T @ (self.metric[:, None] * self.values)


def _orthonormalize(vals: np.ndarray, metric: np.ndarray, drop_tol: float = 1e-8):
    """Modified Gram-Schmidt with one reorthogonalization pass."""
    nvecs = vals.shape[1]
    qs = []
    coeffs = np.eye(nvecs, dtype=complex)
    kept = []
    basis = np.zeros_like(vals)
    co = []
    for k in range(nvecs):
        v = vals[:, k].astype(complex)
        c = coeffs[:, k].copy()
        pre = np.sqrt(np.sum(np.abs(v) ** 2 * metric))
        for _ in range(2):
            for idx, q in enumerate(qs):
                ip = np.sum(np.conj(q) * v * metric)
                v = v - ip * q
                c = c - ip * co[idx]
        nv = np.sqrt(np.sum(np.abs(v) ** 2 * metric).real)
        if nv < drop_tol * max(pre, 1e-30):
            continue
        qs.append(v / nv)
        co.append(c / nv)
        kept.append(k)
    if not qs:
        raise GeometryError("empty Hardy basis after truncation")
    return np.stack(qs, axis=1), np.stack(co, axis=1), kept


def hardy_basis(mesh, max_degree: int) -> HardyBasis:
    """Sharp-orthonormal boundary monomials z^a, |a| <= max_degree.

    The surface must bound a domain containing the origin of its chart so
    that monomials are holomorphic section representatives on the inside.
    """
    exps = monomial_exponents(mesh.n, max_degree)
    vals = _monomial_values(mesh.nodes, exps)
    metric = sharp_weights(mesh) * mesh.weights
    q, c, kept = _orthonormalize(vals, metric)
    return HardyBasis(values=q, coeffs=c, exponents=[exps[k] for k in kept], metric=metric)


def dual_hardy_basis(dmesh_std: DualMesh, max_degree: int) -> HardyBasis:
    """Hardy basis on the dual surface, in the standard dual chart."""
    if dmesh_std.chart != "std":
        raise GeometryError("dual Hardy basis wants the standard dual chart")
    exps = monomial_exponents(dmesh_std.n, max_degree)
    vals = _monomial_values(dmesh_std.nodes, exps)
    n = dmesh_std.n
    feff = np.array([_fefferman_from_jet(j) for j in dmesh_std.jets])
    if n == 1:
        dens = feff
    else:
        phis = np.array([fr.phi for fr in dmesh_std.frames])
        dens = phis ** (-n / (2.0 * (n + 1))) * feff
    metric = dens * dmesh_std.weights
    q, c, kept = _orthonormalize(vals, metric)
    return HardyBasis(values=q, coeffs=c, exponents=[exps[k] for k in kept], metric=metric)


# ---------------------------------------------------------------------------
# pairing matrix, sup / inf-sup functionals
# ---------------------------------------------------------------------------

def pairing_matrix(cache: PairingCache, basis_s: HardyBasis, basis_dual: HardyBasis) -> np.ndarray:
    """P[i, j] = <<f_i, g_j>> between sharp-orthonormal Hardy bases.

    The dual basis lives in the standard dual chart; its sections are
    converted to the incidence-chart trivialization at the dual points.
    """
    exps = basis_dual.exponents
    w_nodes = _std_points_from_eta(cache.dual_nodes)
    raw = _monomial_values(w_nodes, exps)
    etan = cache.dual_nodes[:, -1]
    g_eta = etan[:, None] ** (-cache.n) * (raw @ basis_dual.coeffs)
    dens = pair_density(cache)
    return basis_s.values.T @ (dens[:, None] * g_eta)


def _std_points_from_eta(eta: np.ndarray) -> np.ndarray:
    etan = eta[:, -1]
    w = np.empty_like(eta)
    w[:, :-1] = -eta[:, :-1] / etan[:, None]
    w[:, -1] = 1.0 / etan
    return w


def sup_pairing(cache: PairingCache, f, basis_dual: HardyBasis) -> float:
    """sup over the unit ball of the dual Hardy space of |<<f, g>>|."""
    exps = basis_dual.exponents
    w_nodes = _std_points_from_eta(cache.dual_nodes)
    raw = _monomial_values(w_nodes, exps)
    etan = cache.dual_nodes[:, -1]
    g_eta = etan[:, None] ** (-cache.n) * (raw @ basis_dual.coeffs)
    vec = (pair_density(cache) * _values(f)) @ g_eta
    return float(np.linalg.norm(vec))


def infsup(cache: PairingCache, basis_s: HardyBasis, basis_dual: HardyBasis) -> float:
    """Smallest singular value of the pairing matrix: the pairing efficiency."""
    if basis_s.count == 0 or basis_dual.count == 0:
        raise GeometryError("empty basis in infsup")
    p = pairing_matrix(cache, basis_s, basis_dual)
    return float(np.linalg.svd(p, compute_uv=False)[-1])
