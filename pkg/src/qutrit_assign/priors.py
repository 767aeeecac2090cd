"""Unnormalised prior plausibility densities over Bloch coordinates.

Three kinds of prior knowledge are supported:

* ``constant`` -- uniform with respect to the flat coordinate measure;
* ``gaussian`` -- concentrated around a centre state with breadth ``s``,
  g(x) = exp(-|x - c|^2 / (2 s^2)).  This equals the operator form
  exp(-tr[(rho - rho_c)^2] / s^2) because the basis is orthogonal with
  tr(L_i L_j) = 2 delta_ij;
* ``slater`` -- g(x) = max(det rho(x), 0)^k, the determinant-power
  density proposed as a natural measure on state space.  For a
  three-level system the exponent is 2*3 + 1 = 7.

All densities are unnormalised: they enter the assignment formulas only
through ratios, so constant factors are irrelevant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bloch

KINDS = ("constant", "gaussian", "slater")


@dataclass(frozen=True)
class PriorSpec:
    """Parameters selecting one prior density.

    ``center`` and ``s`` apply to the gaussian kind only; ``k`` to the
    slater kind only.  The centre may be any point of the coordinate box,
    physical or not.
    """

    kind: str
    center: np.ndarray | None = None
    s: float | None = None
    k: int = 7

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown prior kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "gaussian":
            if self.center is None or self.s is None:
                raise ValueError("gaussian prior requires center and s")
            c = bloch.as_bloch(self.center)
            if not bloch.in_box(c):
                raise ValueError("gaussian centre lies outside the coordinate box")
            c.setflags(write=False)
            object.__setattr__(self, "center", c)
            if not (self.s > 0.0 and np.isfinite(self.s)):
                raise ValueError("gaussian breadth s must be positive and finite")
            object.__setattr__(self, "s", float(self.s))
        elif self.kind == "slater":
            if self.k != int(self.k) or self.k < 0:
                raise ValueError("slater exponent k must be a non-negative integer")
            object.__setattr__(self, "k", int(self.k))

    @classmethod
    def constant(cls) -> "PriorSpec":
        return cls(kind="constant")

    @classmethod
    def gaussian_like(cls, center, s: float) -> "PriorSpec":
        return cls(kind="gaussian", center=center, s=s)

    @classmethod
    def slater(cls, k: int = 7) -> "PriorSpec":
        return cls(kind="slater", k=k)

    def label(self) -> str:
        if self.kind == "gaussian":
            c = np.asarray(self.center)
            return f"gaussian(s={self.s:g}, center_x3={c[2]:g}, center_x8={c[7]:g})"
        if self.kind == "slater":
            return f"slater(k={self.k})"
        return "constant"


def eval_prior(spec: PriorSpec, x):
    """Evaluate the unnormalised density g(x).

    ``x`` may be one ``(8,)`` vector (returns a float) or an ``(n, 8)``
    batch (returns an ``(n,)`` array).  Coordinates must lie in the box.
    """
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    pts = arr.reshape(1, 8) if single else arr
    if pts.ndim != 2 or pts.shape[1] != 8:
        raise ValueError(f"expected shape (8,) or (n, 8), got {arr.shape}")
    if not (np.all(pts >= bloch.BOX_LOW - bloch.ATOL)
            and np.all(pts <= bloch.BOX_HIGH + bloch.ATOL)):
        raise ValueError("coordinates outside the admissible box")

    if spec.kind == "constant":
        g = np.ones(len(pts))
    elif spec.kind == "gaussian":
        diff = pts - spec.center
        g = np.exp(-np.sum(diff * diff, axis=1) / (2.0 * spec.s**2))
    else:
        det = np.maximum(bloch.bloch_determinant(pts), 0.0)
        g = det**spec.k
    if not np.all(np.isfinite(g)):
        raise ValueError("prior evaluated to a non-finite value")
    return float(g[0]) if single else g
