"""Regions of average values: finite unions of closed intervals in [-1, 1]."""

from __future__ import annotations

import numpy as np

#: slack for interval membership, so that averages like 96/200 compare
#: cleanly against decimal endpoints
EPS = 1e-12


def as_region(spec) -> tuple[tuple[float, float], ...]:
    """Normalise a region specification to sorted, merged closed intervals.

    Accepts a single number (point region), an (a, b) pair, or an
    iterable of pairs.  Intervals must lie within [-1, 1] and the union
    must be non-empty.
    """
    if np.isscalar(spec):
        intervals = [(float(spec), float(spec))]
    else:
        seq = list(spec)
        if len(seq) == 2 and all(np.isscalar(v) for v in seq):
            intervals = [(float(seq[0]), float(seq[1]))]
        else:
            intervals = [(float(a), float(b)) for a, b in seq]
    if not intervals:
        raise ValueError("region must contain at least one interval")
    for a, b in intervals:
        if not (-1.0 <= a <= b <= 1.0):
            raise ValueError(f"invalid interval [{a}, {b}]; need -1 <= a <= b <= 1")
    intervals.sort()
    merged = [intervals[0]]
    for a, b in intervals[1:]:
        la, lb = merged[-1]
        if a <= lb:
            merged[-1] = (la, max(lb, b))
        else:
            merged.append((a, b))
    return tuple(merged)


def contains(region, value: float) -> bool:
    return any(a - EPS <= value <= b + EPS for a, b in region)


def mask(region, values: np.ndarray) -> np.ndarray:
    """Indicator of membership as a float array (for weight products)."""
    out = np.zeros(len(values), dtype=bool)
    for a, b in region:
        out |= (values >= a - EPS) & (values <= b + EPS)
    return out.astype(float)


def has_interior(region) -> bool:
    return any(b > a for a, b in region)


def drop_degenerate(region) -> tuple[tuple[float, float], ...]:
    """Remove zero-width components (they carry no measure)."""
    return tuple((a, b) for a, b in region if b > a)


def single_point(region) -> float | None:
    """The unique point if the region is one zero-width interval."""
    if len(region) == 1 and region[0][0] == region[0][1]:
        return region[0][0]
    return None
