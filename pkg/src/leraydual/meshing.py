"""Quadrature meshes on parametrized hypersurfaces.

A mesh is a product grid over the surface's parameter axes:

* ``periodic`` axes get the trapezoid rule (spectrally accurate),
* ``tau`` axes get the symmetric midpoint rule on (0, pi) for the radial
  double-cover variable t = (1 - cos tau)/2 (nodes stay clear of the
  poles and sit symmetrically, which the principal-value punctures rely on),
* ``gl`` axes get Gauss-Legendre nodes.

Weights are parameter weights times the euclidean surface Jacobian
(Gram determinant of the embedding derivatives).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .geometry import GeometryError, Hypersurface, Jet2, normalize_at

__all__ = ["QuadratureMesh", "mesh"]


def _axis_rule(kind: str, lo: float, hi: float, count: int):
    if kind == "periodic":
        nodes = lo + (hi - lo) * np.arange(count) / count
        weights = np.full(count, (hi - lo) / count)
    elif kind == "tau":
        nodes = lo + (hi - lo) * (np.arange(count) + 0.5) / count
        weights = np.full(count, (hi - lo) / count)
    elif kind == "gl":
        x, w = np.polynomial.legendre.leggauss(count)
        nodes = 0.5 * (hi + lo) + 0.5 * (hi - lo) * x
        weights = 0.5 * (hi - lo) * w
    else:
        raise GeometryError(f"unknown axis kind {kind!r}")
    return nodes, weights


def _axis_counts(axes, resolution: int, t_count: int | None):
    counts = []
    for kind, _, _ in axes:
        if kind == "periodic":
            counts.append(max(4, resolution))
        else:
            counts.append(max(4, resolution // 2 if t_count is None else t_count))
    return counts


@dataclass
class QuadratureMesh:
    """Surface sample points with euclidean area weights and cached jets."""

    surface: Hypersurface
    nodes: np.ndarray            # (N, n) complex
    weights: np.ndarray          # (N,) > 0, sums to the euclidean area
    params: np.ndarray           # (N, d) parameter coordinates
    shape: tuple                 # grid shape
    axis_kinds: tuple = ()

    def __post_init__(self):
        if np.any(self.weights <= 0):
            raise GeometryError("nonpositive quadrature weight")

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    @property
    def n(self) -> int:
        return self.surface.n

    @cached_property
    def jets(self) -> list[Jet2]:
        return [self.surface.jet2(z) for z in self.nodes]

    @cached_property
    def grads(self) -> np.ndarray:
        return np.array([j.grad for j in self.jets])

    @cached_property
    def normals(self) -> np.ndarray:
        g = 2.0 * np.conj(self.grads)
        return g / np.linalg.norm(g, axis=1)[:, None]

    @cached_property
    def frames(self) -> list:
        """Normal frames at every node (pairing/transfer machinery)."""
        return [normalize_at(self.surface, z) for z in self.nodes]

    def area(self) -> float:
        return float(np.sum(self.weights))


def _gram_jacobian(derivs: np.ndarray) -> np.ndarray:
    """Surface Jacobian sqrt(det G), G_ab = Re<d_a z, d_b z>, derivs (..., d, n)."""
    g = np.einsum("...ak,...bk->...ab", derivs, np.conj(derivs)).real
    return np.sqrt(np.linalg.det(g))


def _fd_embed_derivs(surface, params: np.ndarray, h: float = 1e-6) -> np.ndarray:
    d = params.shape[-1]
    outs = []
    for a in range(d):
        dp = np.zeros_like(params)
        dp[..., a] = h
        outs.append((surface.embed(params + dp) - surface.embed(params - dp)) / (2 * h))
    return np.stack(outs, axis=-2)


def mesh(surface: Hypersurface, resolution: int, t_count: int | None = None) -> QuadratureMesh:
    """Product-rule quadrature mesh at the given per-axis resolution.

    ``resolution`` is the node count on each periodic axis; non-periodic
    axes default to ``resolution // 2`` nodes (override with ``t_count``).
    """
    axes = surface.param_axes()
    counts = _axis_counts(axes, resolution, t_count)
    rules = [_axis_rule(kind, lo, hi, c) for (kind, lo, hi), c in zip(axes, counts)]
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wgrids = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    params = np.stack([g.ravel() for g in grids], axis=-1)
    pweights = np.prod(np.stack([w.ravel() for w in wgrids], axis=-1), axis=-1)
    nodes = surface.embed(params)
    derivs = surface.embed_derivs(params)
    if derivs is None:
        derivs = _fd_embed_derivs(surface, params)
    jac = _gram_jacobian(derivs)
    if np.any(jac <= 1e-14):
        raise GeometryError("degenerate parametrization Jacobian")
    shape = tuple(len(r[0]) for r in rules)
    return QuadratureMesh(
        surface=surface,
        nodes=nodes.reshape(-1, surface.n),
        weights=pweights * jac,
        params=params,
        shape=shape,
        axis_kinds=tuple(kind for kind, _, _ in axes),
    )
