"""Core geometric primitives: jets, Moebius maps, per-point normal frames.

Conventions used throughout the package:

* Affine points of CP^n are plain complex ndarrays ``z`` of shape ``(n,)``,
  the affine coordinates ``z_j = zeta_j / zeta_0`` of a homogeneous point
  ``(zeta_0 : ... : zeta_n)``.
* A defining function ``r`` of a hypersurface is real valued, negative on
  the pseudoconvex side.  ``Jet2`` collects its value, Wirtinger gradient
  ``r_j``, holomorphic Hessian ``r_{jk}`` and mixed Hessian ``r_{j kbar}``.
* Moebius maps are unimodular (n+1)x(n+1) complex matrices acting on
  homogeneous coordinates; the first row/column index (0) is the
  homogenizing slot.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

__all__ = [
    "GeometryError",
    "ChartError",
    "Jet2",
    "MobiusMap",
    "Hypersurface",
    "NormalFrame",
    "numeric_jet2",
    "normalize_at",
    "real_gradient",
    "unit_normal",
    "tangent_frame",
]


class GeometryError(ValueError):
    """Geometric precondition violated (degeneracy, non-finite data...)."""


class ChartError(GeometryError):
    """A point left the affine chart (denominator of a Moebius action vanished)."""


# ---------------------------------------------------------------------------
# jets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Jet2:
    """Second order jet of a defining function at a point.

    Attributes
    ----------
    r : float
        Value of the defining function (``|r| <= tol`` on the surface).
    grad : (n,) complex ndarray
        Wirtinger gradient ``r_j = dr/dz_j``.
    hess_holo : (n, n) complex ndarray
        Holomorphic Hessian ``r_{jk}``; symmetric.
    hess_mixed : (n, n) complex ndarray
        Mixed Hessian ``H[j, k] = r_{j kbar}``; hermitian.
    """

    r: float
    grad: np.ndarray
    hess_holo: np.ndarray
    hess_mixed: np.ndarray

    @property
    def n(self) -> int:
        return self.grad.shape[0]

    def validate(self, tol: float = 1e-8) -> None:
        if not np.all(np.isfinite(self.grad)):
            raise GeometryError("non-finite gradient in jet")
        if np.linalg.norm(self.hess_holo - self.hess_holo.T) > tol * (
            1.0 + np.linalg.norm(self.hess_holo)
        ):
            raise GeometryError("holomorphic Hessian not symmetric")
        if np.linalg.norm(self.hess_mixed - self.hess_mixed.conj().T) > tol * (
            1.0 + np.linalg.norm(self.hess_mixed)
        ):
            raise GeometryError("mixed Hessian not hermitian")

    def scaled(self, s: float | complex) -> "Jet2":
        """Jet of ``s * r`` (same surface, rescaled defining function)."""
        return Jet2(self.r * s, self.grad * s, self.hess_holo * s, self.hess_mixed * s)


def _wirtinger_from_real(grad_r: np.ndarray, hess_r: np.ndarray, n: int):
    """Convert a real gradient/Hessian in (x_1,y_1,...,x_n,y_n) to Wirtinger data."""
    gx = grad_r[0::2]
    gy = grad_r[1::2]
    grad = 0.5 * (gx - 1j * gy)
    hxx = hess_r[0::2, 0::2]
    hyy = hess_r[1::2, 1::2]
    hxy = hess_r[0::2, 1::2]
    hyx = hess_r[1::2, 0::2]
    hess_holo = 0.25 * (hxx - hyy - 1j * (hxy + hyx))
    hess_mixed = 0.25 * (hxx + hyy + 1j * (hxy - hyx))
    return grad, hess_holo, hess_mixed


def numeric_jet2(func, z: np.ndarray, h: float | None = None) -> Jet2:
    """Second order jet of a real-valued ``func(z)`` by central differences.

    ``h`` defaults to ``1e-5 * scale`` for the gradient; second derivatives
    use a larger step (``~30 h``) so that the subtractive noise floor stays
    below the jet-consistency tolerance of the test suite.
    """
    z = np.asarray(z, dtype=complex)
    n = z.shape[0]
    scale = max(1.0, float(np.max(np.abs(z)))) if n else 1.0
    h1 = (1e-5 if h is None else h) * scale
    h2 = 30.0 * h1

    def at(dx: np.ndarray) -> float:
        return float(func(z + dx[0::2] + 1j * dx[1::2]))

    m = 2 * n
    grad_r = np.zeros(m)
    for a in range(m):
        e = np.zeros(m)
        e[a] = h1
        grad_r[a] = (at(e) - at(-e)) / (2 * h1)
    hess_r = np.zeros((m, m))
    f0 = at(np.zeros(m))
    for a in range(m):
        ea = np.zeros(m)
        ea[a] = h2
        hess_r[a, a] = (at(ea) - 2 * f0 + at(-ea)) / h2**2
        for b in range(a + 1, m):
            eb = np.zeros(m)
            eb[b] = h2
            v = (at(ea + eb) - at(ea - eb) - at(-ea + eb) + at(-ea - eb)) / (4 * h2**2)
            hess_r[a, b] = v
            hess_r[b, a] = v
    grad, hess_holo, hess_mixed = _wirtinger_from_real(grad_r, hess_r, n)
    hess_holo = 0.5 * (hess_holo + hess_holo.T)
    hess_mixed = 0.5 * (hess_mixed + hess_mixed.conj().T)
    return Jet2(f0, grad, hess_holo, hess_mixed)


# ---------------------------------------------------------------------------
# real/complex vector helpers
# ---------------------------------------------------------------------------

def real_gradient(jet: Jet2) -> np.ndarray:
    """Real gradient of r as a complex n-vector (equals ``2 conj(r_j)``)."""
    return 2.0 * np.conj(jet.grad)


def unit_normal(jet: Jet2) -> np.ndarray:
    """Outward unit normal (complex representation); r < 0 inside."""
    g = real_gradient(jet)
    ng = np.linalg.norm(g)
    if ng < 1e-14:
        raise GeometryError("vanishing gradient: tangency degeneracy")
    return g / ng


def _c2r(v: np.ndarray) -> np.ndarray:
    out = np.empty(2 * v.shape[0])
    out[0::2] = v.real
    out[1::2] = v.imag
    return out


def tangent_frame(jet: Jet2) -> np.ndarray:
    """Oriented orthonormal real frame of the tangent space, complex rows.

    Returns ``(2n-1, n)`` complex array of tangent vectors ``t_m`` that are
    orthonormal for the real inner product ``Re<a, b>`` and such that
    ``(N, t_1, ..., t_{2n-1})`` is positively oriented in R^{2n}.
    """
    n = jet.n
    nu = unit_normal(jet)
    cols = [_c2r(nu)]
    basis = []
    for a in range(2 * n):
        e = np.zeros(n, dtype=complex)
        if a % 2 == 0:
            e[a // 2] = 1.0
        else:
            e[a // 2] = 1j
        v = _c2r(e)
        for c in cols:
            v = v - np.dot(c, v) * c
        nv = np.linalg.norm(v)
        if nv > 1e-7:
            v = v / nv
            cols.append(v)
            basis.append(v[0::2] + 1j * v[1::2])
        if len(basis) == 2 * n - 1:
            break
    if len(basis) != 2 * n - 1:
        raise GeometryError("failed to complete tangent frame")
    mat = np.column_stack([_c2r(nu)] + [_c2r(t) for t in basis])
    if np.linalg.det(mat) < 0:
        basis[0] = -basis[0]
    return np.array(basis)


# ---------------------------------------------------------------------------
# Moebius maps
# ---------------------------------------------------------------------------

def _unimodular(mat: np.ndarray) -> np.ndarray:
    d = np.linalg.det(mat)
    if abs(d) < 1e-300:
        raise GeometryError("singular Moebius matrix")
    size = mat.shape[0]
    return mat / d ** (1.0 / size)


@dataclass(frozen=True)
class MobiusMap:
    """Unimodular matrix acting on CP^n and on O(j,k) sections.

    ``matrix[0,0]`` is the homogenizing slot; the affine action is

        Psi(z)_k = (M[k,0] + sum_j M[k,j] z_j) / (M[0,0] + sum_j M[0,j] z_j).
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise GeometryError("Moebius matrix must be square")
        object.__setattr__(self, "matrix", m)
        if abs(np.linalg.det(m) - 1.0) > 1e-8:
            raise GeometryError("Moebius matrix must be unimodular (det = 1)")

    @classmethod
    def from_matrix(cls, mat) -> "MobiusMap":
        """Rescale an invertible matrix to det = 1 (principal root)."""
        return cls(_unimodular(np.asarray(mat, dtype=complex)))

    @classmethod
    def identity(cls, n: int) -> "MobiusMap":
        return cls(np.eye(n + 1, dtype=complex))

    @classmethod
    def translation(cls, a) -> "MobiusMap":
        a = np.atleast_1d(np.asarray(a, dtype=complex))
        n = a.shape[0]
        m = np.eye(n + 1, dtype=complex)
        m[1:, 0] = a
        return cls(m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0] - 1

    def inverse(self) -> "MobiusMap":
        return MobiusMap.from_matrix(np.linalg.inv(self.matrix))

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        return MobiusMap.from_matrix(self.matrix @ other.matrix)

    # --- point action --------------------------------------------------

    def denominator(self, z: np.ndarray):
        z = np.asarray(z, dtype=complex)
        return self.matrix[0, 0] + z @ self.matrix[0, 1:]

    def apply(self, z: np.ndarray) -> np.ndarray:
        """Affine action Psi_M(z); raises ChartError at the hyperplane at infinity."""
        z = np.asarray(z, dtype=complex)
        single = z.ndim == 1
        zz = z[None, :] if single else z
        den = self.matrix[0, 0] + zz @ self.matrix[0, 1:]
        if np.any(np.abs(den) < 1e-13):
            raise ChartError("point maps to the hyperplane at infinity")
        num = self.matrix[1:, 0][None, :] + zz @ self.matrix[1:, 1:].T
        out = num / den[:, None]
        if not np.all(np.isfinite(out)):
            raise ChartError("non-finite Moebius image")
        return out[0] if single else out

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        """Complex Jacobian d Psi_M / d z at ``z`` (n x n)."""
        z = np.asarray(z, dtype=complex)
        den = complex(self.denominator(z))
        if abs(den) < 1e-13:
            raise ChartError("Jacobian at the hyperplane at infinity")
        num = self.matrix[1:, 0] + self.matrix[1:, 1:] @ z
        return self.matrix[1:, 1:] / den - np.outer(num, self.matrix[0, 1:]) / den**2

    def second_derivatives(self, z: np.ndarray) -> np.ndarray:
        """Second holomorphic derivatives ``K[b, a, c] = d^2 Psi_b / dz_a dz_c``."""
        z = np.asarray(z, dtype=complex)
        den = complex(self.denominator(z))
        num = self.matrix[1:, 0] + self.matrix[1:, 1:] @ z
        d = self.matrix[0, 1:]
        lin = self.matrix[1:, 1:]
        k = (
            -np.einsum("ba,c->bac", lin, d) / den**2
            - np.einsum("bc,a->bac", lin, d) / den**2
            + 2.0 * np.einsum("b,a,c->bac", num, d, d) / den**3
        )
        return k

    # --- section action -------------------------------------------------

    def section_factor(self, z: np.ndarray, j: float, k: float):
        """Homogeneity factor ``(M00 + M0.z)^j * conj(M00 + M0.z)^k``.

        Integer ``j - k`` is assumed; fractional powers use the principal
        branch (any branch choice cancels in norms and pairings).
        """
        den = self.denominator(np.asarray(z, dtype=complex))
        return den**j * np.conj(den) ** k

    def pullback_section(self, values_at_images, z_nodes, j: int, k: int):
        """(M^* f)(z) from samples of ``f`` at ``Psi_M(z)`` (bidegree (j,k))."""
        values_at_images = np.asarray(values_at_images, dtype=complex)
        fac = self.section_factor(np.asarray(z_nodes, dtype=complex), j, k)
        return fac * values_at_images

    def pushforward_jet(self, jet: Jet2, z: np.ndarray) -> Jet2:
        """Jet of ``r o Psi_{M^{-1}}`` at ``Psi_M(z)`` given the jet of r at z.

        Exact chain rule through the fractional-linear inverse map.
        """
        w = self.apply(z)
        return pullback_jet(self.inverse(), jet, w)


def pullback_jet(m: MobiusMap, jet: Jet2, w: np.ndarray) -> Jet2:
    """Jet at ``w`` of ``r o Psi_m`` given the jet of ``r`` at ``Psi_m(w)``.

    Holomorphy of Psi_m makes the mixed Hessian transform without gradient
    terms; the holomorphic Hessian picks up the second derivatives of Psi_m.
    """
    jmat = m.jacobian(w)  # J[b, a] = d Psi_b / d w_a
    k2 = m.second_derivatives(w)
    grad = jmat.T @ jet.grad
    hess_holo = jmat.T @ jet.hess_holo @ jmat + np.einsum("b,bac->ac", jet.grad, k2)
    hess_mixed = jmat.T @ jet.hess_mixed @ np.conj(jmat)
    hess_holo = 0.5 * (hess_holo + hess_holo.T)
    return Jet2(jet.r, grad, hess_holo, hess_mixed)


# ---------------------------------------------------------------------------
# hypersurfaces
# ---------------------------------------------------------------------------

class Hypersurface(abc.ABC):
    """Provider of second order jets of a defining function.

    Subclasses either override :meth:`jet2` with analytic derivatives or
    rely on the central-difference fallback applied to :meth:`defining`.
    The defining function is negative on the pseudoconvex side.
    """

    n: int

    @abc.abstractmethod
    def defining(self, z: np.ndarray) -> float:
        ...

    def jet2(self, z: np.ndarray) -> Jet2:
        return numeric_jet2(self.defining, np.asarray(z, dtype=complex))

    # meshing interface; see meshing.py.  Families that support quadrature
    # meshes override these.
    def param_axes(self):
        raise NotImplementedError(f"{type(self).__name__} has no parametrization")

    def embed(self, params: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def embed_derivs(self, params: np.ndarray):
        """Optional analytic derivative of embed; None requests FD."""
        return None


class MobiusImage(Hypersurface):
    """Image surface ``Psi_M(S)`` with exact chain-rule jets."""

    def __init__(self, base: Hypersurface, m: MobiusMap):
        if m.n != base.n:
            raise GeometryError("dimension mismatch between surface and map")
        self.base = base
        self.map = m
        self._inv = m.inverse()
        self.n = base.n

    def defining(self, z):
        return self.base.defining(self._inv.apply(z))

    def jet2(self, z):
        z = np.asarray(z, dtype=complex)
        base_jet = self.base.jet2(self._inv.apply(z))
        return pullback_jet(self._inv, base_jet, z)


# ---------------------------------------------------------------------------
# normal frames
# ---------------------------------------------------------------------------

@dataclass
class NormalFrame:
    """Normalizing Moebius frame at a surface point.

    ``M`` maps the point to 0 and the surface into the osculating normal
    form Im z_n = sum alpha_j |z_j|^2 + Re sum beta_j z_j^2 + O(3), with the
    dilation normalization alpha_j^2 - |beta_j|^2 = 1/4 applied whenever the
    point is strongly C-linearly convex.  ``alpha``/``beta`` are reported
    before dilation so that scalar invariants are dilation-free.
    """

    point: np.ndarray
    M: MobiusMap
    alpha: np.ndarray          # pre-dilation, shape (n-1,)
    beta: np.ndarray
    alpha_dil: np.ndarray | None
    beta_dil: np.ndarray | None
    convex: bool
    pseudoconvex: bool
    grad_scale: float = field(default=1.0)

    @property
    def n(self) -> int:
        return self.point.shape[0]

    @property
    def phi(self) -> float:
        """Pointwise invariant prod_j (1 - |beta_j|^2 / alpha_j^2)."""
        if self.alpha.size == 0:
            return 1.0
        return float(np.prod(1.0 - np.abs(self.beta) ** 2 / self.alpha**2))

    @property
    def beltrami_ratio(self) -> float:
        """max_j |beta_j| / alpha_j; < 1 iff strongly C-linearly convex."""
        if self.alpha.size == 0:
            return 0.0
        return float(np.max(np.abs(self.beta) / self.alpha))


def _unitary_with_last_row(v: np.ndarray) -> np.ndarray:
    """Unitary matrix whose last row is the unit vector ``v``.

    The completion is deterministic and reduces to a permutation-free
    identity block when ``v`` is supported on the last coordinate.
    """
    n = v.shape[0]
    if n == 1:
        return v.reshape(1, 1)
    if abs(abs(v[-1]) - 1.0) < 1e-13:
        u = np.eye(n, dtype=complex)
        u[-1, -1] = v[-1]
        return u
    comp = null_space(np.conj(v)[None, :])  # columns orthonormal, perp to v
    rows = [comp[:, k] for k in range(n - 1)]
    return np.vstack(rows + [v])


def _takagi(b: np.ndarray, tol: float = 1e-12):
    """Takagi factorization ``b = V diag(s) V^T`` of a complex symmetric matrix.

    Returns (V unitary, s >= 0 descending).  Uses the real symmetric
    embedding T = [[Re b, Im b], [Im b, -Re b]]: an eigenvector (x; y) of T
    with eigenvalue s > 0 yields v = x + iy with ``b conj(v) = s v``, and
    eigenvectors of distinct positive eigenvalues are hermitian-orthonormal.
    """
    m = b.shape[0]
    if m == 0:
        return np.zeros((0, 0), dtype=complex), np.zeros(0)
    t = np.block([[b.real, b.imag], [b.imag, -b.real]])
    evals, evecs = np.linalg.eigh(t)
    idx = np.argsort(evals)[::-1][:m]
    s = evals[idx]
    v = evecs[:m, idx] + 1j * evecs[m:, idx]
    scale = max(1.0, float(np.max(np.abs(s))))
    nzero = int(np.sum(s < tol * scale))
    if nzero:
        # zero singular block: (x; y) and (y; -x) both appear, so the
        # complex vectors can be dependent; use the complex kernel instead.
        s = np.where(s < tol * scale, 0.0, s)
        ker = null_space(b, rcond=max(tol, 1e-10))
        if ker.shape[1] < nzero:
            ker = null_space(b, rcond=1e-7)
        v[:, m - nzero:] = np.conj(ker[:, :nzero])
    return v, s


def normalize_at(surface: Hypersurface, p: np.ndarray, tol: float = 1e-9) -> NormalFrame:
    """Normal frame of ``surface`` at the surface point ``p``.

    Composite map: translation, unitary rotation aligning the complex
    normal with the z_n axis, tangential diagonalization of the pair
    (Levi form, anti-hermitian form), a projective shear removing the
    holomorphic z_j z_n and z_n^2 quadratic terms, and (when admissible)
    the dilations enforcing alpha_j^2 - |beta_j|^2 = 1/4.
    """
    p = np.asarray(p, dtype=complex)
    n = surface.n
    jet = surface.jet2(p)
    if abs(jet.r) > 1e-6 * max(1.0, float(np.max(np.abs(p))) ** 2):
        raise GeometryError(f"point not on surface (r = {jet.r:.3e})")
    g = jet.grad
    ng = float(np.linalg.norm(g))
    if ng < 1e-12:
        raise GeometryError("tangency degeneracy: |grad r| ~ 0")

    # translation p -> 0
    m_tr = np.eye(n + 1, dtype=complex)
    m_tr[1:, 0] = -p

    # unitary rotation: last row -i g/|g| sends the real normal to the
    # -v axis and H_pS to C^{n-1} x {0}; transformed gradient is i|g| e_n.
    u = _unitary_with_last_row(-1j * g / ng)
    binv = u.conj().T  # inverse of the coordinate map z' = U z
    grad1 = binv.T @ g
    hholo1 = binv.T @ jet.hess_holo @ binv
    hmix1 = binv.T @ jet.hess_mixed @ np.conj(binv)
    s = grad1[-1] / (0.5j)
    if abs(s.imag) > 1e-8 * abs(s) or s.real <= 0:
        raise GeometryError("rotation failed to align the normal")
    s = float(s.real)  # defining-function scale: r-hat = r / s
    hholo1 = hholo1 / s
    hmix1 = hmix1 / s

    # tangential blocks (Levi and anti-hermitian forms in this frame)
    levi = hmix1[: n - 1, : n - 1]
    qform = hholo1[: n - 1, : n - 1]
    levi = 0.5 * (levi + levi.conj().T)
    qform = 0.5 * (qform + qform.T)
    eigs = np.linalg.eigvalsh(levi) if n > 1 else np.array([])
    pseudoconvex = bool(n == 1 or np.all(eigs > 0))

    if n == 1:
        alpha = np.zeros(0)
        beta = np.zeros(0, dtype=complex)
        m_diag = np.eye(n + 1, dtype=complex)
        hholo2, hmix2 = hholo1, hmix1
    elif n == 2:
        alpha = np.array([levi[0, 0].real])
        beta = np.array([qform[0, 0]])
        m_diag = np.eye(n + 1, dtype=complex)
        hholo2, hmix2 = hholo1, hmix1
    else:
        if not pseudoconvex:
            raise GeometryError("Levi form not positive definite")
        # L-orthogonal diagonalization of (levi, qform): first map levi to I,
        # then Takagi-diagonalize the transported symmetric form.
        evals, evecs = np.linalg.eigh(levi)
        w1 = np.conj(evecs) @ np.diag(evals**-0.5)
        b1 = w1.T @ qform @ w1
        v, sig = _takagi(b1)
        w2 = np.conj(v)
        w = w1 @ w2  # z' = W z'' ; ties already descending by SVD order
        alpha = np.ones(n - 1)
        beta = sig.astype(complex)
        winv = np.linalg.inv(w)
        m_diag = np.eye(n + 1, dtype=complex)
        m_diag[1:n, 1:n] = winv  # forward map z'' = W^{-1} z'
        full = np.eye(n, dtype=complex)
        full[: n - 1, : n - 1] = w
        hholo2 = full.T @ hholo1 @ full
        hmix2 = full.T @ hmix1 @ np.conj(full)

    if n >= 2 and not pseudoconvex:
        convex = False
    else:
        convex = bool(n == 1 or np.max(np.abs(beta) / alpha) < 1.0 - 1e-12)

    # projective shear removing holomorphic z_j z_n and z_n^2 terms
    m_shear = np.eye(n + 1, dtype=complex)
    if n >= 1:
        cross = hholo2[: n - 1, n - 1]
        m_shear[0, 1:n] = 2j * cross
        m_shear[0, n] = 1j * hholo2[n - 1, n - 1]

    # dilation z_j -> t_j z_j enforcing alpha^2 - |beta|^2 = 1/4
    alpha_dil = beta_dil = None
    m_dil = np.eye(n + 1, dtype=complex)
    if convex and n >= 2:
        t2 = 2.0 * np.sqrt(alpha**2 - np.abs(beta) ** 2)
        m_dil[1:n, 1:n] = np.diag(np.sqrt(t2))
        alpha_dil = alpha / t2
        beta_dil = beta / t2
    elif convex:
        alpha_dil = alpha
        beta_dil = beta

    mat = m_dil @ m_shear @ m_diag @ np.block(
        [[np.ones((1, 1), dtype=complex), np.zeros((1, n), dtype=complex)],
         [np.zeros((n, 1), dtype=complex), u]]
    ) @ m_tr
    frame = NormalFrame(
        point=p,
        M=MobiusMap.from_matrix(mat),
        alpha=alpha,
        beta=beta,
        alpha_dil=alpha_dil,
        beta_dil=beta_dil,
        convex=convex,
        pseudoconvex=pseudoconvex,
        grad_scale=s,
    )
    return frame
