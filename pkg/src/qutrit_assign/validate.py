"""Self-contained property checks, runnable from the CLI.

Each check exercises one invariant the assignment pipeline relies on and
reports a measured margin:

* the pinned coordinate of a conditioned run reproduces the average
  exactly (margin: absolute deviation, must be 0);
* symmetry-suppressed components are statistically zero (margin: worst
  z-score, gate 4);
* the closed-form maximum-entropy state meets its constraint on a fine
  grid (margin: worst absolute deviation, gate 1e-12);
* two independent seeds agree on the assigned x8 (margin: combined
  z-score, gate 3);
* direct integration at -mbar agrees with the basis-swap mirror of the
  +mbar result (margin: combined z-score, gate 3).

``corrupt_swap=True`` deliberately runs the mirror comparison with a
wrong-signed swap map; the suite must then fail, which makes it a
negative control for the whole symmetry machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import bloch
from .assign import _SUPPRESSED, assign_large_n
from .integrate import IntegratorConfig, integrate_slice
from .maxent import maxent_state
from .priors import PriorSpec


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    margin: float
    gate: float
    detail: str


def _replace_seed(cfg: IntegratorConfig, seed: int) -> IntegratorConfig:
    return replace(cfg, seed=seed)


def check_pinned_identity(prior: PriorSpec, cfg: IntegratorConfig) -> CheckResult:
    devs = []
    for mbar in (0.3, 0.7):
        est = integrate_slice(mbar, prior, _replace_seed(cfg, cfg.seed + 11))
        devs.append(abs(est.ratio[2] - mbar))
        devs.append(abs(est.moments[2] - mbar * est.norm))
    margin = max(devs)
    return CheckResult(
        name="pinned-average-identity",
        passed=margin == 0.0,
        margin=margin,
        gate=0.0,
        detail="conditioned x3 ratio must equal the average bit-exactly",
    )


def check_suppressed_components(prior: PriorSpec, cfg: IntegratorConfig) -> CheckResult:
    est = integrate_slice(0.3, prior, _replace_seed(cfg, cfg.seed + 23))
    z = [
        abs(est.ratio[i]) / est.stderr_ratio[i]
        for i in _SUPPRESSED
        if est.stderr_ratio[i] > 0
    ]
    margin = max(z) if z else 0.0
    return CheckResult(
        name="suppressed-components",
        passed=margin <= 4.0,
        margin=margin,
        gate=4.0,
        detail="worst |estimate|/stderr over components that vanish by symmetry",
    )


def check_maxent_constraint() -> CheckResult:
    lam3 = bloch.LAMBDA[2]
    grid = np.linspace(-1.0, 1.0, 201)[1:-1]
    margin = max(
        abs(float(np.trace(maxent_state(m).rho @ lam3).real) - m) for m in grid
    )
    return CheckResult(
        name="maxent-constraint",
        passed=margin <= 1e-12,
        margin=margin,
        gate=1e-12,
        detail="worst |tr(rho_ME lambda3) - mbar| over a 201-point grid",
    )


def check_cross_seed(prior: PriorSpec, cfg: IntegratorConfig) -> CheckResult:
    a = assign_large_n(0.5, prior, _replace_seed(cfg, cfg.seed + 101))
    b = assign_large_n(0.5, prior, _replace_seed(cfg, cfg.seed + 202))
    sigma = float(np.hypot(a.x8_stderr, b.x8_stderr))
    margin = abs(a.x8 - b.x8) / sigma if sigma > 0 else float("inf")
    return CheckResult(
        name="cross-seed-agreement",
        passed=margin <= 3.0,
        margin=margin,
        gate=3.0,
        detail="x8 at mbar=0.5 from two independent seeds, combined z-score",
    )


def check_mirror_symmetry(
    prior: PriorSpec, cfg: IntegratorConfig, corrupt_swap: bool = False
) -> CheckResult:
    mbar = 0.5
    pos = assign_large_n(mbar, prior, _replace_seed(cfg, cfg.seed + 303))
    neg = assign_large_n(
        -mbar, prior, _replace_seed(cfg, cfg.seed + 404), mirror_negative=False
    )
    sign = bloch.SWAP_SIGN.copy()
    if corrupt_swap:
        # negative control: a wrong sign on the last coordinate must blow
        # up the comparison, proving the check has teeth
        sign[7] = -1.0
    mirrored = sign * pos.x[bloch.SWAP_PERM]
    sigma = float(np.hypot(pos.x8_stderr, neg.x8_stderr))
    margin = abs(mirrored[7] - neg.x8) / sigma if sigma > 0 else float("inf")
    return CheckResult(
        name="mirror-symmetry",
        passed=margin <= 3.0,
        margin=margin,
        gate=3.0,
        detail="direct -mbar integration vs basis-swap of +mbar, combined z-score",
    )


def run_checks(
    prior: Optional[PriorSpec] = None,
    cfg: Optional[IntegratorConfig] = None,
    *,
    corrupt_swap: bool = False,
) -> list[CheckResult]:
    """Run every check; pass a narrow prior/config to stress them."""
    prior = prior or PriorSpec.constant()
    cfg = cfg or IntegratorConfig()
    return [
        check_pinned_identity(prior, cfg),
        check_suppressed_components(prior, cfg),
        check_maxent_constraint(),
        check_cross_seed(prior, cfg),
        check_mirror_symmetry(prior, cfg, corrupt_swap=corrupt_swap),
    ]
