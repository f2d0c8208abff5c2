"""Shell curvature data: the Gaussian-curvature density and optional slope
field of the reference profile.

The solver only ever needs det(Hessian of the profile) -- called K below --
plus, for full energy evaluation, the profile gradient.  K may be a constant
or a callable field on (n, 2) points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class ShellProfile:
    """Curvature data K = det(grad grad p) with a declared sign.

    sign is one of {"positive", "negative", "zero"}; K samples must not
    contradict it beyond ``tol``.  grad_p / p_field are only needed for
    energy evaluation with a nonflat reference profile.
    """

    curvature: float | Callable = 0.0
    sign: str = "zero"
    grad_p: Optional[Callable] = None
    p_field: Optional[Callable] = None
    tol: float = 1e-10

    def __post_init__(self):
        if self.sign not in ("positive", "negative", "zero"):
            raise DataError(f"bad curvature sign {self.sign!r}")
        if not callable(self.curvature):
            k = float(self.curvature)
            ok = (
                (self.sign == "positive" and k >= -self.tol)
                or (self.sign == "negative" and k <= self.tol)
                or (self.sign == "zero" and abs(k) <= self.tol)
            )
            if not ok:
                raise DataError("constant curvature contradicts declared sign")

    def k(self, x):
        """Evaluate K at points (n, 2) (or a single point)."""
        x = np.asarray(x, dtype=float)
        pts = x if x.ndim == 2 else x[None, :]
        if callable(self.curvature):
            vals = np.asarray(self.curvature(pts), dtype=float)
        else:
            vals = np.full(len(pts), float(self.curvature))
        return vals if x.ndim == 2 else float(vals[0])

    def check_sign(self, x):
        """Verify sampled K values against the declared sign."""
        vals = np.atleast_1d(self.k(x))
        if self.sign == "positive":
            return bool(np.all(vals >= -self.tol))
        if self.sign == "negative":
            return bool(np.all(vals <= self.tol))
        return bool(np.all(np.abs(vals) <= self.tol))

    def gradient(self, x):
        """Profile gradient; zero for a flat reference profile."""
        x = np.asarray(x, dtype=float)
        pts = x if x.ndim == 2 else x[None, :]
        if self.grad_p is None:
            g = np.zeros_like(pts)
        else:
            g = np.asarray(self.grad_p(pts), dtype=float)
        return g if x.ndim == 2 else g[0]

    @staticmethod
    def constant(k):
        sign = "zero" if k == 0 else ("positive" if k > 0 else "negative")
        return ShellProfile(curvature=float(k), sign=sign)

    def spec(self):
        if callable(self.curvature):
            return {"sign": self.sign, "curvature": "field"}
        return {"sign": self.sign, "curvature": float(self.curvature)}
