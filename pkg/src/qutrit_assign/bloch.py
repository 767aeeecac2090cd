"""Exact linear algebra for the qutrit Bloch parametrisation.

A trace-one Hermitian operator on the three-dimensional Hilbert space is
written as

    rho(x) = I/3 + (1/2) * sum_j x_j * LAMBDA[j],    j = 0..7,

with eight real coordinates ``x``.  The basis operators are traceless,
Hermitian and orthogonal under the Hilbert-Schmidt product,
``tr(L_i L_j) = 2 delta_ij``.  The basis ordering follows the measurement
eigenbasis (|1>, |0>, |-1>): the measurement observable itself is
``LAMBDA[2] = diag(1, 0, -1)`` and the second diagonal generator is
``LAMBDA[7] = diag(1, -2, 1)/sqrt(3)``.  The six off-diagonal generators
are the usual symmetric/antisymmetric pairs coupling levels (1,2), (1,3)
and (2,3); the antisymmetric member of the (2,3) pair carries the sign
that makes the basis swap |1> <-> |-1> act on coordinates exactly as the
permutation/sign-flip implemented by :func:`symmetry_map`.

Coordinates live in the box ``[-1, 1]^7 x [-2/sqrt(3), 1/sqrt(3)]``
(the eighth coordinate has the asymmetric range).  The physical states,
i.e. those with positive-semidefinite rho(x), form a convex body inside
the box; membership is tested by :func:`is_physical`.
"""

from __future__ import annotations

import math

import numpy as np

SQRT3 = math.sqrt(3.0)

#: range of the eighth coordinate
X8_MIN = -2.0 / SQRT3
X8_MAX = 1.0 / SQRT3

BOX_LOW = np.array([-1.0] * 7 + [X8_MIN])
BOX_HIGH = np.array([1.0] * 7 + [X8_MAX])
BOX_LOW.setflags(write=False)
BOX_HIGH.setflags(write=False)

#: tolerance for Hermiticity/trace checks; integration error dominates by
#: many orders of magnitude, so equality means "to double-precision rounding"
ATOL = 1e-12


def gell_mann_matrices() -> np.ndarray:
    """Return the eight basis operators as a complex ``(8, 3, 3)`` array."""
    lam = np.zeros((8, 3, 3), dtype=complex)
    lam[0][0, 1] = lam[0][1, 0] = 1.0
    lam[1][0, 1] = -1.0j
    lam[1][1, 0] = 1.0j
    lam[2][:] = np.diag([1.0, 0.0, -1.0])
    lam[3][0, 2] = lam[3][2, 0] = 1.0
    lam[4][0, 2] = -1.0j
    lam[4][2, 0] = 1.0j
    lam[5][1, 2] = lam[5][2, 1] = 1.0
    # sign fixed by requiring the |1> <-> |-1> swap to act as symmetry_map
    lam[6][2, 1] = -1.0j
    lam[6][1, 2] = 1.0j
    lam[7][:] = np.diag([1.0, -2.0, 1.0]) / SQRT3
    return lam


LAMBDA = gell_mann_matrices()
LAMBDA.setflags(write=False)

#: coordinate action of swapping the basis vectors |1> and |-1>:
#: x -> SWAP_SIGN * x[SWAP_PERM]
SWAP_PERM = np.array([5, 6, 2, 3, 4, 0, 1, 7])
SWAP_SIGN = np.array([1.0, 1.0, -1.0, 1.0, -1.0, 1.0, 1.0, 1.0])
SWAP_PERM.setflags(write=False)
SWAP_SIGN.setflags(write=False)

#: permutation matrix swapping basis rows/columns 1 and 3
SWAP_MATRIX = np.array(
    [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]]
)
SWAP_MATRIX.setflags(write=False)


def as_bloch(x) -> np.ndarray:
    """Coerce ``x`` to a float ``(8,)`` array without range checks."""
    arr = np.asarray(x, dtype=float)
    if arr.shape != (8,):
        raise ValueError(f"Bloch vector must have shape (8,), got {arr.shape}")
    return arr


def in_box(x, atol: float = ATOL) -> bool:
    """True if every coordinate lies within the box bounds (+/- atol)."""
    arr = np.asarray(x, dtype=float)
    return bool(
        np.all(arr >= BOX_LOW - atol) and np.all(arr <= BOX_HIGH + atol)
    )


def _require_in_box(x) -> np.ndarray:
    arr = as_bloch(x)
    if not in_box(arr):
        raise ValueError(
            "coordinates outside the admissible box "
            "[-1,1]^7 x [-2/sqrt(3), 1/sqrt(3)]"
        )
    return arr


def bloch_to_density(x) -> np.ndarray:
    """Map coordinates to the 3x3 matrix I/3 + (1/2) sum_j x_j LAMBDA[j].

    The result is Hermitian with unit trace but not necessarily positive
    semidefinite; use :func:`is_physical` to test physicality.
    """
    arr = _require_in_box(x)
    rho = np.eye(3, dtype=complex) / 3.0
    rho += 0.5 * np.tensordot(arr, LAMBDA, axes=(0, 0))
    return rho


def density_to_bloch(rho) -> np.ndarray:
    """Extract coordinates x_i = tr(LAMBDA[i] rho) from a trace-one
    Hermitian matrix.  Round-trips with :func:`bloch_to_density` to
    double-precision rounding."""
    mat = np.asarray(rho, dtype=complex)
    if mat.shape != (3, 3):
        raise ValueError(f"density matrix must be 3x3, got {mat.shape}")
    if not np.allclose(mat, mat.conj().T, atol=ATOL, rtol=0.0):
        raise ValueError("matrix is not Hermitian to within 1e-12")
    if abs(np.trace(mat).real - 1.0) > ATOL or abs(np.trace(mat).imag) > ATOL:
        raise ValueError("matrix trace differs from 1 by more than 1e-12")
    # .real of a complex array is a strided view; return an owned array
    return np.ascontiguousarray(np.einsum("kij,ji->k", LAMBDA, mat).real)


def diagonal_entries(x3, x8):
    """Diagonal matrix elements of rho(x) as functions of (x3, x8) only.

    Accepts scalars or arrays; broadcasts.
    """
    c = x8 / (2.0 * SQRT3)
    d1 = 1.0 / 3.0 + 0.5 * x3 + c
    d2 = 1.0 / 3.0 - x8 / SQRT3
    d3 = 1.0 / 3.0 - 0.5 * x3 + c
    return d1, d2, d3


def bloch_determinant(x) -> np.ndarray | float:
    """det rho(x) via the closed-form 3x3 expansion, vectorised.

    ``x`` may be a single ``(8,)`` vector or an ``(n, 8)`` batch.
    """
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    pts = arr.reshape(1, 8) if single else arr
    x1, x2, x3, x4, x5, x6, x7, x8 = (pts[:, i] for i in range(8))
    d1, d2, d3 = diagonal_entries(x3, x8)
    det = (
        d1 * d2 * d3
        + 0.25 * (x4 * (x1 * x6 + x2 * x7) - x5 * (x1 * x7 - x2 * x6))
        - 0.25 * (d1 * (x6 * x6 + x7 * x7)
                  + d2 * (x4 * x4 + x5 * x5)
                  + d3 * (x1 * x1 + x2 * x2))
    )
    return float(det[0]) if single else det


def is_physical(x) -> bool:
    """True iff rho(x) is positive semidefinite.

    Uses the elementary-symmetric-polynomial criterion for a trace-one
    Hermitian 3x3 matrix: tr(rho^2) <= 1 and det(rho) >= 0, evaluated
    with zero slack so that boundary states count as physical.
    """
    arr = _require_in_box(x)
    norm_sq = float(arr @ arr)
    if 1.0 / 3.0 + 0.5 * norm_sq > 1.0:
        return False
    return bloch_determinant(arr) >= 0.0


def symmetry_map(x) -> np.ndarray:
    """Coordinate image of the basis swap |1> <-> |-1|.

    (x1,...,x8) -> (x6, x7, -x3, x4, -x5, x1, x2, x8); an involution that
    preserves physicality.
    """
    arr = _require_in_box(x)
    return SWAP_SIGN * arr[SWAP_PERM]


def expectation_lambda3(x) -> float:
    """Expectation value of the measurement observable: simply x3."""
    arr = _require_in_box(x)
    return float(arr[2])


def purity(rho) -> float:
    """tr(rho^2); equals the squared Frobenius norm for Hermitian input."""
    mat = np.asarray(rho, dtype=complex)
    return float(np.vdot(mat, mat).real)


def det3(rho) -> float:
    """Determinant of a 3x3 matrix by direct cofactor expansion."""
    a = np.asarray(rho, dtype=complex)
    det = (
        a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
        - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
        + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
    )
    return float(det.real)


def von_neumann_entropy(rho) -> float:
    """-tr(rho ln rho) with the convention 0 ln 0 = 0.

    Rejects input that is not positive semidefinite (eigenvalues below
    -1e-12).  The result lies in [0, ln 3].
    """
    mat = np.asarray(rho, dtype=complex)
    vals = np.linalg.eigvalsh(mat)
    if vals[0] < -ATOL:
        raise ValueError(
            f"entropy undefined: smallest eigenvalue {vals[0]:.3e} < 0"
        )
    vals = np.clip(vals, 0.0, None)
    nz = vals[vals > 0.0]
    return float(-np.sum(nz * np.log(nz)))


def pure_state_bloch(outcome: int) -> np.ndarray:
    """Coordinates of the projector onto the eigenvector with the given
    outcome value (+1, 0 or -1)."""
    try:
        idx = {1: 0, 0: 1, -1: 2}[outcome]
    except KeyError:
        raise ValueError("outcome value must be one of +1, 0, -1") from None
    rho = np.zeros((3, 3), dtype=complex)
    rho[idx, idx] = 1.0
    return density_to_bloch(rho)
