"""Hypersurface families with analytic jets.

All families use the convention that the defining function is negative on
the pseudoconvex side.  Compact families (curves for n = 1, the l^p spheres
for n = 2) carry parametrizations used by the quadrature meshes; the graph
families are meant for pointwise invariant work on a chart window.
"""

from __future__ import annotations

import numpy as np

from .geometry import GeometryError, Hypersurface, Jet2

__all__ = [
    "Ellipse",
    "Circle",
    "LpSphere",
    "Sphere",
    "Quadric",
    "PowerGraph",
    "TubeParabola",
    "GraphSurface",
    "surface_from_config",
]


# ---------------------------------------------------------------------------
# curves (n = 1)
# ---------------------------------------------------------------------------

class Ellipse(Hypersurface):
    """Curve x^2/a^2 + y^2/b^2 = 1 in C, oriented counterclockwise."""

    n = 1

    def __init__(self, a: float = 1.0, b: float = 1.0, center: complex = 0.0):
        if a <= 0 or b <= 0:
            raise GeometryError("ellipse semi-axes must be positive")
        self.a = float(a)
        self.b = float(b)
        self.center = complex(center)

    def defining(self, z):
        w = complex(np.asarray(z, dtype=complex).reshape(())) - self.center
        return (w.real / self.a) ** 2 + (w.imag / self.b) ** 2 - 1.0

    def jet2(self, z):
        w = complex(np.asarray(z, dtype=complex).reshape(())) - self.center
        ia2 = 1.0 / (2 * self.a**2)
        ib2 = 1.0 / (2 * self.b**2)
        grad = np.array([(w + w.conjugate()) * ia2 - (w - w.conjugate()) * ib2])
        hess_holo = np.array([[ia2 - ib2]], dtype=complex)
        hess_mixed = np.array([[ia2 + ib2]], dtype=complex)
        return Jet2(self.defining(z), grad, hess_holo, hess_mixed)

    # parametrization -----------------------------------------------------
    def param_axes(self):
        return (("periodic", 0.0, 2 * np.pi),)

    def embed(self, params):
        t = params[..., 0]
        return (self.center + self.a * np.cos(t) + 1j * self.b * np.sin(t))[..., None]

    def embed_derivs(self, params):
        t = params[..., 0]
        return (-self.a * np.sin(t) + 1j * self.b * np.cos(t))[..., None, None]


def Circle(radius: float = 1.0, center: complex = 0.0) -> Ellipse:
    return Ellipse(radius, radius, center)


# ---------------------------------------------------------------------------
# l^p spheres in C^2 (unit sphere for p = 2)
# ---------------------------------------------------------------------------

class LpSphere(Hypersurface):
    """Surface |z_1|^p + |z_2|^p = 1 in C^2 (strongly C-linearly convex, p > 1).

    Parametrized by (theta_1, theta_2, tau) with the radial variable
    t = (1 - cos tau)/2 in (0, 1), so that the poles z_j = 0 sit at the
    (excluded) endpoints of the tau axis.
    """

    n = 2

    def __init__(self, p: float = 2.0):
        if p <= 1:
            raise GeometryError("l^p sphere requires p > 1")
        self.p = float(p)

    def defining(self, z):
        z = np.asarray(z, dtype=complex)
        p = self.p
        return float(abs(z[0]) ** p + abs(z[1]) ** p - 1.0)

    def jet2(self, z):
        z = np.asarray(z, dtype=complex)
        p = self.p
        q = p / 2.0
        a2 = np.abs(z) ** 2
        if np.any(a2 == 0) and p != 2.0:
            raise GeometryError("l^p sphere jets are singular on z_j = 0")
        grad = q * a2 ** (q - 1) * np.conj(z)
        hess_holo = np.diag(q * (q - 1) * a2 ** (q - 2) * np.conj(z) ** 2) if p != 2.0 \
            else np.zeros((2, 2), dtype=complex)
        hess_mixed = np.diag(q * q * a2 ** (q - 1)).astype(complex)
        return Jet2(self.defining(z), grad.astype(complex), hess_holo.astype(complex), hess_mixed)

    # parametrization -----------------------------------------------------
    def param_axes(self):
        return (
            ("periodic", 0.0, 2 * np.pi),
            ("periodic", 0.0, 2 * np.pi),
            ("tau", 0.0, np.pi),
        )

    def _radii(self, tau):
        t = 0.5 * (1.0 - np.cos(tau))
        r1 = t ** (1.0 / self.p)
        r2 = (1.0 - t) ** (1.0 / self.p)
        dt = 0.5 * np.sin(tau)
        dr1 = (1.0 / self.p) * t ** (1.0 / self.p - 1.0) * dt
        dr2 = -(1.0 / self.p) * (1.0 - t) ** (1.0 / self.p - 1.0) * dt
        return r1, r2, dr1, dr2

    def embed(self, params):
        t1, t2, tau = params[..., 0], params[..., 1], params[..., 2]
        r1, r2, _, _ = self._radii(tau)
        return np.stack([r1 * np.exp(1j * t1), r2 * np.exp(1j * t2)], axis=-1)

    def embed_derivs(self, params):
        """Derivatives of embed wrt (theta_1, theta_2, tau): shape (..., 3, 2)."""
        t1, t2, tau = params[..., 0], params[..., 1], params[..., 2]
        r1, r2, dr1, dr2 = self._radii(tau)
        e1 = np.exp(1j * t1)
        e2 = np.exp(1j * t2)
        zero = np.zeros_like(e1)
        d_t1 = np.stack([1j * r1 * e1, zero], axis=-1)
        d_t2 = np.stack([zero, 1j * r2 * e2], axis=-1)
        d_tau = np.stack([dr1 * e1, dr2 * e2], axis=-1)
        return np.stack([d_t1, d_t2, d_tau], axis=-2)


def Sphere() -> LpSphere:
    """Unit sphere |z_1|^2 + |z_2|^2 = 1."""
    return LpSphere(2.0)


# ---------------------------------------------------------------------------
# graph families Im z_n = F(z')
# ---------------------------------------------------------------------------

class GraphSurface(Hypersurface):
    """Base for graphs Im z_n = F(z', Re z_n): r = F - Im z_n.

    Subclasses supply ``_f_jet(zp, u)`` returning the value, Wirtinger
    gradient (length n-1), holomorphic and mixed Hessians of F (graph
    families here do not depend on Re z_n).
    """

    def __init__(self, n: int = 2, window: float = 1.0):
        self.n = n
        self.window = float(window)

    def _f_jet(self, zp: np.ndarray, u: float):
        raise NotImplementedError

    def defining(self, z):
        z = np.asarray(z, dtype=complex)
        f, _, _, _ = self._f_jet(z[:-1], z[-1].real)
        return float(f - z[-1].imag)

    def jet2(self, z):
        z = np.asarray(z, dtype=complex)
        n = self.n
        f, fg, fhh, fhm = self._f_jet(z[:-1], z[-1].real)
        grad = np.zeros(n, dtype=complex)
        grad[:-1] = fg
        grad[-1] = 0.5j  # -Im z_n contributes  i/2  to d/dz_n
        hess_holo = np.zeros((n, n), dtype=complex)
        hess_holo[:-1, :-1] = fhh
        hess_mixed = np.zeros((n, n), dtype=complex)
        hess_mixed[:-1, :-1] = fhm
        return Jet2(float(f - z[-1].imag), grad, hess_holo, hess_mixed)

    def graph_point(self, zp) -> np.ndarray:
        """Surface point above z' with Re z_n = 0."""
        zp = np.atleast_1d(np.asarray(zp, dtype=complex))
        f, _, _, _ = self._f_jet(zp, 0.0)
        return np.concatenate([zp, [1j * float(f)]])

    # chart-window box mesh (pointwise work only)
    def param_axes(self):
        w = self.window
        axes = []
        for _ in range(self.n - 1):
            axes.append(("gl", -w, w))
            axes.append(("gl", -w, w))
        axes.append(("gl", -w, w))  # u = Re z_n
        return tuple(axes)

    def embed(self, params):
        shape = params.shape[:-1]
        flat = params.reshape(-1, params.shape[-1])
        out = np.empty(flat.shape[0] * self.n, dtype=complex).reshape(flat.shape[0], self.n)
        for i, prm in enumerate(flat):
            zp = prm[0:-1:2] + 1j * prm[1:-1:2]
            u = prm[-1]
            f, _, _, _ = self._f_jet(zp, u)
            out[i, :-1] = zp
            out[i, -1] = u + 1j * f
        return out.reshape(*shape, self.n)


class Quadric(GraphSurface):
    """Im z_2 = alpha |z_1|^2 + Re(beta z_1^2): the model hypersurface."""

    def __init__(self, alpha: float = 1.0, beta: complex = 0.0, window: float = 1.0):
        super().__init__(2, window)
        self.alpha = float(alpha)
        self.beta = complex(beta)

    def _f_jet(self, zp, u):
        z1 = complex(zp[0])
        a, b = self.alpha, self.beta
        f = a * abs(z1) ** 2 + (b * z1**2).real
        fg = np.array([a * z1.conjugate() + b * z1])
        fhh = np.array([[b]], dtype=complex)
        fhm = np.array([[a]], dtype=complex)
        return f, fg, fhh, fhm


class PowerGraph(GraphSurface):
    """Im z_2 = |z_1|^gamma (strongly C-linearly convex for gamma > 1, z_1 != 0)."""

    def __init__(self, gamma: float = 3.0, window: float = 1.0):
        super().__init__(2, window)
        if gamma <= 1:
            raise GeometryError("power graph requires gamma > 1")
        self.gamma = float(gamma)

    def _f_jet(self, zp, u):
        z1 = complex(zp[0])
        g = self.gamma
        q = g / 2.0
        a2 = abs(z1) ** 2
        if a2 == 0:
            raise GeometryError("power graph jets are singular at z_1 = 0")
        f = a2**q
        fg = np.array([q * a2 ** (q - 1) * z1.conjugate()])
        fhh = np.array([[q * (q - 1) * a2 ** (q - 2) * z1.conjugate() ** 2]])
        fhm = np.array([[q * q * a2 ** (q - 1)]], dtype=complex)
        return f, fg, fhh, fhm


class TubeParabola(GraphSurface):
    """Tube Im z_2 = c (Re z_1)^2; never strongly C-linearly convex."""

    def __init__(self, c: float = 1.0, window: float = 1.0):
        super().__init__(2, window)
        self.c = float(c)

    def _f_jet(self, zp, u):
        z1 = complex(zp[0])
        x = z1.real
        c = self.c
        f = c * x * x
        fg = np.array([c * x + 0j])
        fhh = np.array([[c / 2.0]], dtype=complex)
        fhm = np.array([[c / 2.0]], dtype=complex)
        return f, fg, fhh, fhm


# ---------------------------------------------------------------------------
# config-driven construction (CLI)
# ---------------------------------------------------------------------------

def surface_from_config(cfg: dict) -> Hypersurface:
    """Build a surface from a config dict {family, params...}."""
    family = cfg.get("family")
    params = dict(cfg.get("params", {}))
    window = float(cfg.get("chart_window", params.pop("window", 1.0)))
    if family == "circle":
        return Circle(params.get("radius", 1.0), complex(params.get("center", 0.0)))
    if family == "ellipse":
        return Ellipse(params.get("a", 2.0), params.get("b", 1.0),
                       complex(params.get("center", 0.0)))
    if family == "lp_sphere":
        return LpSphere(params.get("p", 2.0))
    if family == "sphere":
        return Sphere()
    if family == "quadric":
        return Quadric(params.get("alpha", 1.0), complex(params.get("beta", 0.0)), window)
    if family == "power_graph":
        return PowerGraph(params.get("gamma", 3.0), window)
    if family == "tube":
        return TubeParabola(params.get("c", 1.0), window)
    if family == "custom_graph":
        from .expr import SymbolicGraph

        return SymbolicGraph(params["expression"], n=int(params.get("n", 2)), window=window)
    raise GeometryError(f"unknown surface family: {family!r}")
