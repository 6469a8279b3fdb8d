"""Projective invariants, duality and Cauchy/Leray transforms.

Numerical toolkit for the Moebius-invariant geometry of strongly
C-linearly convex real hypersurfaces in complex projective space:
pointwise invariants (Levi form, Beltrami coefficient, phi), projective
duality, the Fefferman and sharp boundary norms, the transfer pairing
between a hypersurface and its dual, Nystrom discretizations of the
Cauchy (n = 1) and Leray (n >= 2) transforms, and the identity equating
the transform norm with the reciprocal pairing efficiency.
"""

from .geometry import (
    ChartError,
    GeometryError,
    Hypersurface,
    Jet2,
    MobiusImage,
    MobiusMap,
    NormalFrame,
    normalize_at,
    numeric_jet2,
)
from .invariants import (
    PointInvariants,
    beltrami_b,
    classify,
    fefferman_weight,
    levi_q,
    phi,
    phi_det,
    point_invariants,
    sharp_weight,
)
from .meshing import QuadratureMesh, mesh
from .surfaces import (
    Circle,
    Ellipse,
    GraphSurface,
    LpSphere,
    PowerGraph,
    Quadric,
    Sphere,
    TubeParabola,
    surface_from_config,
)

__version__ = "0.1.0"

__all__ = [
    "ChartError",
    "GeometryError",
    "Hypersurface",
    "Jet2",
    "MobiusImage",
    "MobiusMap",
    "NormalFrame",
    "normalize_at",
    "numeric_jet2",
    "PointInvariants",
    "beltrami_b",
    "classify",
    "fefferman_weight",
    "levi_q",
    "phi",
    "phi_det",
    "point_invariants",
    "sharp_weight",
    "QuadratureMesh",
    "mesh",
    "Circle",
    "Ellipse",
    "GraphSurface",
    "LpSphere",
    "PowerGraph",
    "Quadric",
    "Sphere",
    "TubeParabola",
    "surface_from_config",
    "__version__",
]
