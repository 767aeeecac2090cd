"""Monte Carlo moments of prior-weighted integrals over the Bloch body.

The integrals behind a posterior-mean assignment are ratios

    ratio_j = (integral of x_j * w(x) dx) / (integral of w(x) dx)

taken over the physical Bloch body, or over its intersection with the
hyperplane x3 = mbar when the average value is known exactly.  Both are
estimated with uniform sampling of the bounding box, the physicality
indicator folded into the weight.

Estimates are deterministic functions of ``(seed, n_samples, chunk_size,
sequence)``: samples are drawn in fixed-size chunks, chunk ``i`` uses the
stream ``SeedSequence(entropy=seed, spawn_key=(i,))``, and chunk
aggregates are reduced in index order.  The thread count (see
``QUTRIT_ASSIGN_THREADS``) therefore never changes the result, only the
wall time.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.stats import qmc

from .backend import get_backend
from .bloch import X8_MAX, X8_MIN
from .errors import DegenerateSliceError, WeightUnderflowError
from .priors import PriorSpec
from .regions import mask as region_mask

SEQUENCES = ("pseudo", "lowdisc")

#: reliability floor on the effective sample size (sum w)^2 / sum w^2;
#: below it the loop keeps sampling rather than trust its error bars
_MIN_ESS = 100.0

# Box column layout: x1..x7 in [-1, 1], x8 in [X8_MIN, X8_MAX].
_BOX_LOW = np.array([-1.0] * 7 + [X8_MIN])
_BOX_WIDTH = np.array([2.0] * 7 + [X8_MAX - X8_MIN])


def thread_count() -> int:
    """Worker threads for chunk evaluation.

    ``QUTRIT_ASSIGN_THREADS`` overrides; otherwise the CPU count, capped
    at 8.  Results never depend on this value.
    """
    env = os.environ.get("QUTRIT_ASSIGN_THREADS")
    if env is not None:
        n = int(env)
        if n < 1:
            raise ValueError("QUTRIT_ASSIGN_THREADS must be >= 1")
        return n
    return min(os.cpu_count() or 1, 8)


@dataclass(frozen=True)
class IntegratorConfig:
    """Sampling budget and reproducibility knobs.

    n_samples:      initial budget.  It grows by doubling while the
                    effective sample size is below the reliability
                    floor (thin slices, sharp priors), and further when
                    target_stderr is set.
    seed:           entropy for the chunk seed tree.
    sequence:       "pseudo" (SFC64 uniforms) or "lowdisc" (scrambled
                    Sobol points, one independent scramble per chunk).
    target_stderr:  stop once every ratio component has an estimated
                    standard error at or below this; None stops at the
                    reliability floor instead.
    max_samples:    hard cap on growth; reached, the run returns its
                    best effort (check ``effective_samples``).
    chunk_size:     samples per chunk; part of the deterministic stream
                    layout, so changing it changes the estimate.
    """

    n_samples: int = 1 << 17
    seed: int = 0
    sequence: str = "pseudo"
    target_stderr: Optional[float] = None
    max_samples: int = 1 << 26
    chunk_size: int = 1 << 14

    def __post_init__(self) -> None:
        if self.sequence not in SEQUENCES:
            raise ValueError(f"sequence must be one of {SEQUENCES}")
        if self.n_samples < 10_000:
            raise ValueError("n_samples must be at least 10000")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be positive")
        if self.max_samples < self.n_samples:
            raise ValueError("max_samples must be >= n_samples")
        if self.target_stderr is not None and not self.target_stderr > 0:
            raise ValueError("target_stderr must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.n_samples < 8 * self.chunk_size:
            # The error bar comes from the spread across independent
            # chunks, so a minimum number of replicates is required.
            raise ValueError(
                "n_samples must be at least 8 * chunk_size; shrink "
                "chunk_size for small budgets"
            )


@dataclass(frozen=True)
class SliceIntegralEstimate:
    """Reduced output of one integration run.

    moments[j] estimates the integral of x_j * w, norm the integral of w,
    both in the kernel's rescaled weight convention: multiply by
    ``exp(log_weight_scale)`` to undo the overflow guard.  The rescaling
    cancels in ``ratio``, which is the quantity of interest.  When the
    run was conditioned on x3 = mbar, ratio[2] is set to mbar exactly
    (the identity moments[2] = mbar * norm holds algebraically) and its
    error is zero.

    ``effective_samples`` is the weight-based effective sample size
    (sum w)^2 / sum w^2; it, not ``n_samples``, sets the statistical
    quality of the estimate.  Runs stopped by the sample cap may report
    fewer effective samples than the reliability floor, in which case
    the error bars are themselves noisy.
    """

    moments: np.ndarray
    norm: float
    ratio: np.ndarray
    stderr_ratio: np.ndarray
    n_samples: int
    n_physical: int
    effective_samples: float
    seed: int
    sequence: str
    n_chunks: int
    log_weight_scale: float = 0.0
    mbar: Optional[float] = None

    def __post_init__(self) -> None:
        self.moments.setflags(write=False)
        self.ratio.setflags(write=False)
        self.stderr_ratio.setflags(write=False)

    @property
    def acceptance(self) -> float:
        """Fraction of box samples that landed in the physical body."""
        return self.n_physical / self.n_samples


def _make_weight_fn(
    prior: PriorSpec,
    kernels,
    pinned_mbar: Optional[float],
) -> tuple[Callable[[np.ndarray], tuple[np.ndarray, int]], float]:
    """Bind a prior to a backend kernel.

    Returns ``(fn, log_weight_scale)`` where ``fn(pts)`` yields the
    rescaled weights and the physical count, and the true weights are
    ``fn(pts)[0] * exp(log_weight_scale)``.
    """
    if prior.kind == "constant":
        return kernels.weights_constant, 0.0
    if prior.kind == "slater":
        k = prior.k
        # det <= 1/27 on the body, so (27 det)^k stays in [0, 1].
        return (lambda pts: kernels.weights_slater(pts, k)), -k * math.log(27.0)
    # Gaussian: shift the exponent by the squared distance from the
    # center to the sampling domain, keeping the kernel's exp argument
    # <= 0 near the optimum without changing any weight ratio.
    center = np.ascontiguousarray(prior.center)
    inv_two_s2 = 1.0 / (2.0 * prior.s * prior.s)
    low = _BOX_LOW.copy()
    high = _BOX_LOW + _BOX_WIDTH
    if pinned_mbar is not None:
        low[2] = high[2] = pinned_mbar
    nearest = np.clip(center, low, high)
    dmin = float(np.sum((center - nearest) ** 2))
    log_shift = dmin * inv_two_s2
    fn = lambda pts: kernels.weights_gaussian(pts, center, inv_two_s2, log_shift)
    return fn, -log_shift


def _chunk_points(
    chunk_index: int,
    chunk_size: int,
    seed: int,
    sequence: str,
    pinned_mbar: Optional[float],
) -> np.ndarray:
    """Deterministic (chunk_size, 8) sample block for one chunk index.

    All eight columns are drawn and scaled to the box; conditioning on an
    exact average then overwrites the x3 column, which keeps a single
    stream layout for both the sliced and the full-body integrals.
    """
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(chunk_index,))
    if sequence == "pseudo":
        u = np.random.Generator(np.random.SFC64(ss)).random((chunk_size, 8))
    else:
        sampler = qmc.Sobol(d=8, scramble=True, seed=np.random.default_rng(ss))
        u = sampler.random(chunk_size)
    pts = _BOX_LOW + u * _BOX_WIDTH
    if pinned_mbar is not None:
        pts[:, 2] = pinned_mbar
    return pts


@dataclass
class _ChunkAgg:
    """Per-chunk contractions feeding the ratio and its error."""

    n: int
    n_physical: int
    sw: float
    sww: float
    sxw: np.ndarray      # sum of x_j w


def _eval_chunk(
    chunk_index: int,
    cfg: IntegratorConfig,
    weight_fn,
    pinned_mbar: Optional[float],
    extra_weight,
) -> _ChunkAgg:
    pts = _chunk_points(chunk_index, cfg.chunk_size, cfg.seed, cfg.sequence, pinned_mbar)
    n = pts.shape[0]
    w, n_physical = weight_fn(pts)
    # physical acceptance is well below a percent on most slices; dropping
    # the zero-weight rows up front makes the moment contractions cheap
    nz = np.nonzero(w)[0]
    if nz.size < n // 2:
        pts = pts[nz]
        w = w[nz]
    if extra_weight is not None and w.size:
        w = w * extra_weight(pts)
    xw = pts * w[:, None]
    return _ChunkAgg(
        n=n,
        n_physical=int(n_physical),
        sw=float(w.sum()),
        sww=float(w @ w),
        sxw=xw.sum(axis=0),
    )


def _ratio_stderr(aggs: Sequence[_ChunkAgg]) -> tuple[np.ndarray, np.ndarray]:
    """Pooled ratio and its chunk-replicate delta-method standard error.

    Chunks are independent replicates by construction (independent
    pseudo-random streams, or independently scrambled low-discrepancy
    point sets), so for R = mean(xw)/mean(w) the first-order variance is
    the spread of the per-chunk residuals a_k - R b_k around their mean,
    where a_k and b_k are the chunk means of xw and w.  This residual
    form is a plain sum of squares, which stays well conditioned even
    when the weights span many orders of magnitude.
    """
    k = len(aggs)
    a = np.stack([agg.sxw / agg.n for agg in aggs])   # (K, 8) chunk means of xw
    b = np.array([agg.sw / agg.n for agg in aggs])    # (K,)  chunk means of w
    a_bar = a.mean(axis=0)
    b_bar = b.mean()
    ratio = a_bar / b_bar
    resid = (a - a_bar) - np.outer(b - b_bar, ratio)
    var_resid = np.einsum("kj,kj->j", resid, resid) / (k - 1)
    stderr = np.sqrt(var_resid / k) / abs(b_bar)
    return ratio, stderr


def _integrate(
    prior: PriorSpec,
    cfg: IntegratorConfig,
    *,
    pinned_mbar: Optional[float] = None,
    extra_weight=None,
    backend: Optional[str] = None,
) -> SliceIntegralEstimate:
    """Shared adaptive driver for slice and full-body runs."""
    kernels = get_backend(backend)
    weight_fn, log_scale = _make_weight_fn(prior, kernels, pinned_mbar)
    k_max = max(8, -(-cfg.max_samples // cfg.chunk_size))
    k_now = min(max(8, -(-cfg.n_samples // cfg.chunk_size)), k_max)

    aggs: list[_ChunkAgg] = []

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:

        def run_chunks(start: int, stop: int) -> None:
            task = lambda i: _eval_chunk(i, cfg, weight_fn, pinned_mbar, extra_weight)
            aggs.extend(pool.map(task, range(start, stop)))

        run_chunks(0, k_now)
        while True:
            n_physical = sum(a.n_physical for a in aggs)
            sw = sum(a.sw for a in aggs)
            exhausted = k_now >= k_max
            if n_physical > 0 and sw > 0.0:
                ratio, stderr = _ratio_stderr(aggs)
                if pinned_mbar is not None:
                    # x3 was held fixed, so its ratio is exact by
                    # construction, not an estimate.
                    ratio = ratio.copy()
                    stderr = stderr.copy()
                    ratio[2] = pinned_mbar
                    stderr[2] = 0.0
                ess = sw * sw / sum(a.sww for a in aggs)
                if exhausted:
                    # out of budget: report what there is, with
                    # effective_samples exposing how little that may be
                    break
                # error bars are replicate estimates themselves; don't
                # trust them (to stop, or at all) below a minimum
                # effective sample size, keep sampling instead
                if ess >= _MIN_ESS and (
                    cfg.target_stderr is None
                    or float(stderr.max()) <= cfg.target_stderr
                ):
                    break
            elif exhausted:
                n_total = sum(a.n for a in aggs)
                if n_physical == 0:
                    raise DegenerateSliceError(
                        f"no physical sample among {n_total}; the support has "
                        "measure zero (average value at an endpoint?) or "
                        "max_samples is far too small"
                    )
                raise WeightUnderflowError(
                    f"{n_physical} physical samples among {n_total} but all "
                    "weights vanished; the prior or region is too narrow for "
                    "this budget"
                )
            grow = min(k_now, k_max - k_now)
            run_chunks(k_now, k_now + grow)
            k_now += grow

    sxw = sum(a.sxw for a in aggs)
    n_total = sum(a.n for a in aggs)
    moments = np.asarray(sxw / n_total)
    norm = sw / n_total
    if pinned_mbar is not None:
        moments[2] = pinned_mbar * norm
    return SliceIntegralEstimate(
        moments=moments,
        norm=norm,
        ratio=np.asarray(ratio),
        stderr_ratio=np.asarray(stderr),
        n_samples=n_total,
        n_physical=n_physical,
        effective_samples=float(ess),
        seed=cfg.seed,
        sequence=cfg.sequence,
        n_chunks=k_now,
        log_weight_scale=log_scale,
        mbar=pinned_mbar,
    )


def integrate_slice(
    mbar: float,
    prior: PriorSpec,
    cfg: Optional[IntegratorConfig] = None,
    *,
    backend: Optional[str] = None,
) -> SliceIntegralEstimate:
    """Posterior moments conditioned on an exactly known average value.

    Samples the seven free coordinates uniformly with x3 pinned to
    ``mbar`` and weighs each point by ``prior`` times the physicality
    indicator.  ``ratio`` then estimates the posterior-mean Bloch vector
    on that slice; its x3 component equals ``mbar`` exactly.

    Raises DegenerateSliceError when no physical point is found within
    ``max_samples``, which is guaranteed to happen at ``mbar = +/-1``
    (the slice there is a single pure state, a measure-zero set).
    """
    if not -1.0 <= mbar <= 1.0:
        raise ValueError("mbar must lie in [-1, 1]")
    cfg = cfg or IntegratorConfig()
    return _integrate(prior, cfg, pinned_mbar=float(mbar), backend=backend)


def integrate_body(
    prior: PriorSpec,
    cfg: Optional[IntegratorConfig] = None,
    *,
    region=None,
    extra_weight: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    backend: Optional[str] = None,
) -> SliceIntegralEstimate:
    """Posterior moments over the full body, optionally restricted.

    ``region`` (any form accepted by ``regions.as_region``) multiplies
    the weight by the indicator of x3 falling inside it; ``extra_weight``
    multiplies by an arbitrary non-negative factor such as a measurement
    likelihood.  Both may be combined.
    """
    cfg = cfg or IntegratorConfig()
    if region is not None:
        from .regions import as_region

        intervals = as_region(region)
        indicator = lambda pts: region_mask(intervals, pts[:, 2])
        if extra_weight is None:
            combined = indicator
        else:
            inner = extra_weight
            combined = lambda pts: indicator(pts) * inner(pts)
    else:
        combined = extra_weight
    return _integrate(prior, cfg, extra_weight=combined, backend=backend)


def integrate_region(
    region,
    prior: PriorSpec,
    cfg: Optional[IntegratorConfig] = None,
    *,
    backend: Optional[str] = None,
) -> SliceIntegralEstimate:
    """Posterior moments for an average located within a region.

    Like :func:`integrate_body` with the region indicator, but rejects
    regions without interior: an indicator supported on a measure-zero
    set multiplies every sample weight to zero.  Use
    :func:`integrate_slice` for exact averages.
    """
    from .regions import as_region, has_interior

    intervals = as_region(region)
    if not has_interior(intervals):
        raise ValueError(
            "region has empty interior; condition on the exact average "
            "with integrate_slice instead"
        )
    return integrate_body(prior, cfg, region=intervals, backend=backend)
