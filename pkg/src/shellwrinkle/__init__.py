"""shellwrinkle: wrinkle-pattern prediction for weakly curved floating shells.

Pipeline: pick a catalog shape and a one-signed curvature profile, solve the
dual problem for the extremal convex potential, partition the shell, build
the stable-line family, integrate the characteristic ODEs for the defect
density, and cross-check duality, weak-form constraints and energy scaling.
"""

__version__ = "0.1.0"

from .geometry import (
    ConvexPolygon,
    Disc,
    Domain,
    Ellipse,
    HalfDisc,
    MedialAxis,
    Rectangle,
    make_domain,
)
from .shell import ShellProfile

__all__ = [
    "__version__",
    "ConvexPolygon",
    "Disc",
    "Domain",
    "Ellipse",
    "HalfDisc",
    "MedialAxis",
    "Rectangle",
    "ShellProfile",
    "make_domain",
]
