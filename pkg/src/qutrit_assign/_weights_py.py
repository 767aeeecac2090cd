"""NumPy implementation of the Monte Carlo weight kernels.

Each kernel maps a C-contiguous ``(n, 8)`` batch of box points to the
per-sample weight w(x) = g(x) * chi(x), where chi is the indicator of
positive semidefiniteness, and returns ``(w, n_physical)``.  The
physicality test is the closed-form criterion |x|^2 <= 4/3 and
det rho(x) >= 0 (equivalent to tr(rho^2) <= 1 and det >= 0 for a
trace-one Hermitian matrix).

To keep weights in a well-scaled range the gaussian kernel accepts a
log-shift and the slater kernel raises 27*det (which is <= 1 on the
physical body) to the power k.  Constant factors cancel in the moment /
normalisation ratios; the driver records the applied log-scale.
"""

from __future__ import annotations

import numpy as np

NAME = "python"

_SQRT3 = np.sqrt(3.0)
_PURITY_CAP = 4.0 / 3.0


def _chi_and_det(pts: np.ndarray):
    """Physicality mask and determinant for a batch of points."""
    x1 = pts[:, 0]
    x2 = pts[:, 1]
    x3 = pts[:, 2]
    x4 = pts[:, 3]
    x5 = pts[:, 4]
    x6 = pts[:, 5]
    x7 = pts[:, 6]
    x8 = pts[:, 7]
    c = x8 / (2.0 * _SQRT3)
    d1 = 1.0 / 3.0 + 0.5 * x3 + c
    d2 = 1.0 / 3.0 - x8 / _SQRT3
    d3 = 1.0 / 3.0 - 0.5 * x3 + c
    det = (
        d1 * d2 * d3
        + 0.25 * (x4 * (x1 * x6 + x2 * x7) - x5 * (x1 * x7 - x2 * x6))
        - 0.25 * (d1 * (x6 * x6 + x7 * x7)
                  + d2 * (x4 * x4 + x5 * x5)
                  + d3 * (x1 * x1 + x2 * x2))
    )
    norm_sq = np.einsum("ij,ij->i", pts, pts)
    chi = (norm_sq <= _PURITY_CAP) & (det >= 0.0)
    return chi, det


def weights_constant(pts: np.ndarray):
    chi, _ = _chi_and_det(pts)
    w = chi.astype(float)
    return w, int(np.count_nonzero(chi))


def weights_gaussian(pts: np.ndarray, center: np.ndarray,
                     inv_two_s2: float, log_shift: float):
    chi, _ = _chi_and_det(pts)
    diff = pts - center
    expo = log_shift - np.einsum("ij,ij->i", diff, diff) * inv_two_s2
    w = np.where(chi, np.exp(expo), 0.0)
    return w, int(np.count_nonzero(chi))


def weights_slater(pts: np.ndarray, k: int):
    chi, det = _chi_and_det(pts)
    # boundary states can round to det = -0.0; clamp before the power
    base = np.maximum(27.0 * det, 0.0)
    # keep the indicator outside the power: base**0 is 1 even off-body
    w = np.where(chi, base**k, 0.0)
    return w, int(np.count_nonzero(chi))
