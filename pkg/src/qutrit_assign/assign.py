"""Posterior-mean state assignment from average-value data.

Three data models are supported, all conditioning on repeated projective
measurements of the observable diag(1, 0, -1):

* ``assign_large_n``: the average value is known exactly (the limit of
  infinitely many repetitions); the posterior lives on the slice
  x3 = mbar of the physical body.
* ``assign_large_n_region``: the average is only known to lie in a
  region; the posterior carries the region indicator instead of a delta
  constraint.
* ``assign_finite_n``: N repetitions summarised by the region their
  average fell in; the posterior sums the multinomial likelihood over
  every compatible frequency vector.

Every path returns the posterior-mean Bloch vector with the components
that vanish by symmetry set to exactly zero.  The symmetry argument
(conjugation by diagonal phase unitaries and the basis swap leaves the
posterior invariant) requires the prior itself to be invariant, which
holds for the constant and determinant-power priors and for gaussian
priors centred on a diagonal state; gaussian centres with off-diagonal
components are rejected in these entry points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import gammaln
from scipy.stats import t as _student_t

from . import bloch
from .errors import IncompatibleDataError, SymmetryViolationError
from .integrate import (
    _MIN_ESS,
    IntegratorConfig,
    SliceIntegralEstimate,
    integrate_body,
    integrate_slice,
)
from .priors import PriorSpec
from .regions import as_region, contains, has_interior, single_point

METHOD_DELTA = "large-n"
METHOD_REGION = "large-n-region"
METHOD_FINITE = "finite-n"

#: indices that vanish by symmetry (everything except x3 and x8)
_SUPPRESSED = (0, 1, 3, 4, 5, 6)

#: two-sided tail probability per suppressed component at which the run
#: is rejected; a broken basis convention overshoots this massively
_ZERO_CHECK_ALPHA = 1e-5


@dataclass(frozen=True)
class FiniteNLedger:
    """Diagnostics of a finite-repetition run."""

    estimate: SliceIntegralEstimate
    n_shots: int
    n_frequency_vectors: int
    log_likelihood_shift: float


@dataclass(frozen=True)
class AssignmentResult:
    """Assigned state with its Monte Carlo provenance.

    ``x`` is the posterior-mean Bloch vector after symmetry suppression,
    ``rho`` the corresponding matrix.  ``stderr`` holds per-component
    standard errors; entries fixed by construction (the pinned x3, the
    suppressed components, analytic endpoints) are zero.  The raw,
    unsuppressed estimates remain available in ``diagnostics``.
    ``mbar`` is the conditioning average when the data was an exact
    average, None for region and finite-N data.
    """

    rho: np.ndarray
    x: np.ndarray
    stderr: np.ndarray
    mbar: Optional[float]
    prior: PriorSpec
    method: str
    diagnostics: Optional[object]
    mirrored: bool = False

    def __post_init__(self) -> None:
        self.rho.setflags(write=False)
        self.x.setflags(write=False)
        self.stderr.setflags(write=False)

    @property
    def x8(self) -> float:
        return float(self.x[7])

    @property
    def x8_stderr(self) -> float:
        return float(self.stderr[7])

    @property
    def estimate(self) -> Optional[SliceIntegralEstimate]:
        """The underlying integral estimate, if any integration ran."""
        if isinstance(self.diagnostics, FiniteNLedger):
            return self.diagnostics.estimate
        return self.diagnostics


def prior_is_flip_invariant(prior: PriorSpec) -> bool:
    """True when the prior is unchanged by the basis swap |1> <-> |-1>.

    The constant and determinant-power priors always are; a gaussian
    prior is iff its centre is a fixed point of the coordinate map.
    """
    if prior.kind != "gaussian":
        return True
    return bool(np.all(bloch.symmetry_map(prior.center) == prior.center))


def _require_diagonal_center(prior: PriorSpec) -> None:
    if prior.kind != "gaussian":
        return
    off = np.asarray(prior.center)[list(_SUPPRESSED)]
    if np.any(off != 0.0):
        raise ValueError(
            "assignment requires a gaussian centre with zero off-diagonal "
            "coordinates: the symmetry that forces components other than "
            "x3 and x8 to vanish holds only for phase-invariant priors"
        )


def _check_suppressed(est: SliceIntegralEstimate, what: str) -> None:
    """Raise unless every symmetry-suppressed component is statistically
    compatible with zero.

    The z threshold is the Student-t quantile for the chunk-replicate
    count, so the false-alarm rate stays near _ZERO_CHECK_ALPHA even for
    budgets with few replicates, whose error bars have heavy-tailed
    noise.  Below the effective-sample-size reliability floor (possible
    only when the run hit its sample cap) the test has no power at any
    threshold and is skipped; the large reported error bars already say
    that such a run determines very little.
    """
    if est.effective_samples < _MIN_ESS:
        return
    gate = float(_student_t.isf(_ZERO_CHECK_ALPHA / 2.0, est.n_chunks - 1))
    for i in _SUPPRESSED:
        r = float(est.ratio[i])
        s = float(est.stderr_ratio[i])
        if r == 0.0:
            continue
        if s == 0.0 or abs(r) > gate * s:
            raise SymmetryViolationError(
                f"{what}: component {i + 1} must vanish by symmetry but "
                f"estimated {r:.3e} +/- {s:.3e} (>{gate:.2f} standard "
                "errors). A genuine violation indicates a broken sampling "
                "kernel; an estimate this unlucky arises by chance about "
                f"once in {round(1.0 / _ZERO_CHECK_ALPHA):d} runs."
            )


def _diagonal_state(x3: float, x8: float) -> np.ndarray:
    """Bloch vector (0,0,x3,0,0,0,0,x8), nudged into the physical body.

    The posterior means are convex combinations of physical samples, so
    (x3, x8) lies in the closed feasible set {|x3| <= 1,
    sqrt(3)|x3| - 2/sqrt(3) <= x8 <= 1/sqrt(3)} up to final-rounding
    error; the clamp only absorbs those last-ulp excursions.
    """
    x = np.zeros(8)
    x[2] = x3
    lo = bloch.SQRT3 * abs(x3) + bloch.X8_MIN
    x[7] = min(max(x8, lo), bloch.X8_MAX)
    return x


def _endpoint_result(mbar: float, prior: PriorSpec, method: str) -> AssignmentResult:
    """Exact pure-state assignment at mbar = +/-1, no integration.

    At the extreme average only one state remains: every measurement
    must have produced the same outcome, so the slice of the physical
    body is the single projector with x8 = 1/sqrt(3)."""
    sign = 1.0 if mbar > 0 else -1.0
    x = np.zeros(8)
    x[2] = sign
    x[7] = bloch.X8_MAX
    rho = np.zeros((3, 3), dtype=complex)
    rho[0 if sign > 0 else 2, 0 if sign > 0 else 2] = 1.0
    return AssignmentResult(
        rho=rho,
        x=x,
        stderr=np.zeros(8),
        mbar=float(mbar),
        prior=prior,
        method=method,
        diagnostics=None,
    )


def assign_large_n(
    mbar: float,
    prior: PriorSpec,
    cfg: Optional[IntegratorConfig] = None,
    *,
    mirror_negative: bool = True,
    backend: Optional[str] = None,
) -> AssignmentResult:
    """Assign the state for an exactly known average value.

    Integrates the prior over the slice x3 = mbar of the physical body
    and returns the posterior mean (0, 0, mbar, 0, 0, 0, 0, x8).  The
    endpoints mbar = +/-1 are returned exactly without integration.

    By default a negative average is mapped to the positive one through
    the basis-swap symmetry (valid whenever the prior is swap-invariant),
    halving the compute for symmetric sweeps; pass ``mirror_negative=
    False`` to force direct integration, e.g. for independent
    cross-checks of the symmetry itself.
    """
    m = float(mbar)
    if not -1.0 <= m <= 1.0:
        raise ValueError("mbar must lie in [-1, 1]")
    _require_diagonal_center(prior)
    if abs(m) == 1.0:
        return _endpoint_result(m, prior, METHOD_DELTA)
    if m < 0.0 and mirror_negative and prior_is_flip_invariant(prior):
        return mirror_assignment(
            assign_large_n(-m, prior, cfg, mirror_negative=False, backend=backend)
        )
    est = integrate_slice(m, prior, cfg, backend=backend)
    _check_suppressed(est, f"slice at mbar={m:g}")
    x = _diagonal_state(m, float(est.ratio[7]))
    stderr = np.zeros(8)
    stderr[7] = float(est.stderr_ratio[7])
    return AssignmentResult(
        rho=bloch.bloch_to_density(x),
        x=x,
        stderr=stderr,
        mbar=m,
        prior=prior,
        method=METHOD_DELTA,
        diagnostics=est,
    )


def mirror_assignment(base: AssignmentResult) -> AssignmentResult:
    """Image of an exact-average assignment under the basis swap.

    Maps the result at +mbar to the result at -mbar without integrating
    again, valid whenever the prior is itself swap-invariant.  Standard
    errors follow the coordinate permutation (signs are irrelevant for
    an error magnitude).
    """
    if base.method != METHOD_DELTA or base.mbar is None:
        raise ValueError("only exact-average assignments can be mirrored")
    if not prior_is_flip_invariant(base.prior):
        raise ValueError(
            "prior is not invariant under the basis swap; integrate the "
            "negative average directly instead of mirroring"
        )
    m = -base.mbar
    if abs(m) == 1.0:
        result = _endpoint_result(m, base.prior, METHOD_DELTA)
        return AssignmentResult(
            rho=result.rho,
            x=result.x,
            stderr=result.stderr,
            mbar=m,
            prior=base.prior,
            method=METHOD_DELTA,
            diagnostics=None,
            mirrored=True,
        )
    x = bloch.symmetry_map(base.x)
    return AssignmentResult(
        rho=bloch.bloch_to_density(x),
        x=x,
        stderr=base.stderr[bloch.SWAP_PERM],
        mbar=m,
        prior=base.prior,
        method=METHOD_DELTA,
        diagnostics=base.diagnostics,
        mirrored=True,
    )


def assign_large_n_region(
    region,
    prior: PriorSpec,
    cfg: Optional[IntegratorConfig] = None,
    *,
    backend: Optional[str] = None,
) -> AssignmentResult:
    """Assign the state when the average is only located within a region.

    The posterior is the prior restricted to the part of the physical
    body whose x3 falls in the region; x3 of the result is the posterior
    mean, not pinned.  A zero-width region is delegated to
    :func:`assign_large_n` at that point, since an indicator of measure
    zero cannot be integrated.
    """
    intervals = as_region(region)
    point = single_point(intervals)
    if point is not None:
        return assign_large_n(point, prior, cfg, backend=backend)
    if not has_interior(intervals):
        raise ValueError("region must contain an interval of nonzero width")
    _require_diagonal_center(prior)
    est = integrate_body(prior, cfg, region=intervals, backend=backend)
    _check_suppressed(est, f"region {intervals}")
    x = _diagonal_state(float(est.ratio[2]), float(est.ratio[7]))
    stderr = np.zeros(8)
    stderr[2] = float(est.stderr_ratio[2])
    stderr[7] = float(est.stderr_ratio[7])
    return AssignmentResult(
        rho=bloch.bloch_to_density(x),
        x=x,
        stderr=stderr,
        mbar=None,
        prior=prior,
        method=METHOD_REGION,
        diagnostics=est,
    )


def enumerate_phi(
    region,
    n_shots: int,
    outcome_values: Sequence[float] = (1.0, 0.0, -1.0),
) -> list[tuple[int, int, int]]:
    """All frequency vectors of ``n_shots`` outcomes whose average lies
    in the region.

    Returns (N1, N2, N3) triples with N1 + N2 + N3 = n_shots and
    (N1*v1 + N2*v2 + N3*v3) / n_shots inside the region, in lexicographic
    order.  May be empty, in which case the data region is incompatible
    with any outcome sequence.
    """
    if n_shots < 1:
        raise ValueError("n_shots must be at least 1")
    intervals = as_region(region)
    v1, v2, v3 = (float(v) for v in outcome_values)
    out = []
    for n1 in range(n_shots + 1):
        for n2 in range(n_shots - n1 + 1):
            n3 = n_shots - n1 - n2
            avg = (n1 * v1 + n2 * v2 + n3 * v3) / n_shots
            if contains(intervals, avg):
                out.append((n1, n2, n3))
    return out


def _likelihood_terms(phi: Sequence[tuple[int, int, int]], n_shots: int):
    """Exponent matrix, per-term log offsets and the global log shift.

    Each compatible frequency vector contributes
    prod_i rho_ii^{N_i} / N_i!; the factorials are kept because they
    differ between frequency vectors inside the sum.  The shift is the
    largest value any single term can attain over the probability
    simplex (at rho_ii = N_i / N), so the shifted terms never exceed 1.
    """
    exps = np.asarray(phi, dtype=float).T          # (3, T)
    log_fact = gammaln(exps + 1.0).sum(axis=0)     # (T,)
    gibbs = np.where(
        exps > 0.0, exps * np.log(np.maximum(exps, 1.0) / n_shots), 0.0
    ).sum(axis=0)
    shift = float(np.max(gibbs - log_fact))
    offsets = -log_fact - shift
    return exps, offsets, shift


def _make_likelihood(phi, n_shots: int):
    exps, offsets, shift = _likelihood_terms(phi, n_shots)
    n_terms = exps.shape[1]
    block = 1024

    def likelihood(pts: np.ndarray) -> np.ndarray:
        d1, d2, d3 = bloch.diagonal_entries(pts[:, 2], pts[:, 7])
        # diagonal entries can be <= 0 outside the physical body, where
        # the weight is zeroed anyway; floor them so the log stays finite
        logd = np.log(np.maximum(np.stack([d1, d2, d3], axis=1), 1e-300))
        out = np.zeros(len(pts))
        for t0 in range(0, n_terms, block):
            a = logd @ exps[:, t0:t0 + block] + offsets[t0:t0 + block]
            out += np.exp(a, out=a).sum(axis=1)
        return out

    return likelihood, shift


def assign_finite_n(
    region,
    n_shots: int,
    prior: PriorSpec,
    cfg: Optional[IntegratorConfig] = None,
    *,
    backend: Optional[str] = None,
) -> AssignmentResult:
    """Assign the state for finitely many repetitions.

    The data is "the average of ``n_shots`` outcomes fell in ``region``";
    its likelihood at x is the multinomial probability mass summed over
    every compatible frequency vector, evaluated term-wise in log space
    so that large ``n_shots`` cannot underflow inside a term.

    Raises IncompatibleDataError when no frequency vector is compatible,
    and WeightUnderflowError when the summed likelihood vanished at every
    sampled physical point (then ``n_shots`` is too large for this path;
    the large-N limit is the appropriate model).
    """
    intervals = as_region(region)
    _require_diagonal_center(prior)
    phi = enumerate_phi(intervals, n_shots)
    if not phi:
        raise IncompatibleDataError(
            f"no frequency vector of {n_shots} outcomes has its average "
            f"inside {intervals}"
        )
    likelihood, shift = _make_likelihood(phi, n_shots)
    est = integrate_body(prior, cfg, extra_weight=likelihood, backend=backend)
    _check_suppressed(est, f"finite-N region {intervals}")
    x = _diagonal_state(float(est.ratio[2]), float(est.ratio[7]))
    stderr = np.zeros(8)
    stderr[2] = float(est.stderr_ratio[2])
    stderr[7] = float(est.stderr_ratio[7])
    return AssignmentResult(
        rho=bloch.bloch_to_density(x),
        x=x,
        stderr=stderr,
        mbar=None,
        prior=prior,
        method=METHOD_FINITE,
        diagnostics=FiniteNLedger(
            estimate=est,
            n_shots=n_shots,
            n_frequency_vectors=len(phi),
            log_likelihood_shift=shift,
        ),
    )
