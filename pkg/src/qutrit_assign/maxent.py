"""Maximum-entropy state for a fixed average of the measurement outcomes.

Among all states with <diag(1,0,-1)> = mbar, the one maximising the von
Neumann entropy is diagonal in the measurement basis,

    rho = diag(e^-mu, 1, e^mu) / (e^-mu + 1 + e^mu),

with the multiplier in closed form:

    mu(mbar) = ln[ (-mbar + sqrt(4 - 3 mbar^2)) / (2 (mbar + 1)) ].

The formula is singular at mbar = -1 and indeterminate at mbar = +1;
both endpoints are handled as explicit pure-state limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bloch


@dataclass(frozen=True)
class MaxEntResult:
    rho: np.ndarray
    mu: float
    x8: float


def maxent_mu(mbar: float) -> float:
    """Lagrange multiplier mu(mbar) on the open interval (-1, 1).

    Strictly decreasing, mu(0) = 0, diverging to -inf (+inf) as mbar
    approaches +1 (-1).  Raises at the endpoints, which callers resolve
    as pure-state limits.
    """
    m = float(mbar)
    if abs(m) > 1.0:
        raise ValueError(f"average value {m} outside [-1, 1]")
    if abs(m) == 1.0:
        raise ValueError(
            "multiplier diverges at mbar = +/-1; use the pure-state limit"
        )
    return math.log((-m + math.sqrt(4.0 - 3.0 * m * m)) / (2.0 * (m + 1.0)))


def maxent_state(mbar: float) -> MaxEntResult:
    """Maximum-entropy state with <diag(1,0,-1)> = mbar, for |mbar| <= 1.

    Endpoints return the corresponding pure projector with mu = -/+inf.
    """
    m = float(mbar)
    if abs(m) > 1.0:
        raise ValueError(f"average value {m} outside [-1, 1]")
    if abs(m) == 1.0:
        rho = np.zeros((3, 3), dtype=complex)
        rho[0 if m > 0 else 2, 0 if m > 0 else 2] = 1.0
        mu = -math.inf if m > 0 else math.inf
        return MaxEntResult(rho=rho, mu=mu, x8=float(bloch.X8_MAX))
    mu = maxent_mu(m)
    # stable normalisation of diag(e^-mu, 1, e^mu)
    logits = np.array([-mu, 0.0, mu])
    logits -= logits.max()
    weights = np.exp(logits)
    diag = weights / weights.sum()
    rho = np.diag(diag).astype(complex)
    x8 = float(bloch.density_to_bloch(rho)[7])
    return MaxEntResult(rho=rho, mu=mu, x8=x8)
