"""Exception types signalling integration and assignment failures."""


class DegenerateSliceError(RuntimeError):
    """No physical sample found; the conditioning set has measure zero
    (only possible at average value +/-1) or the budget was far too small."""


class WeightUnderflowError(RuntimeError):
    """Physical samples exist but every weight vanished (extremely narrow
    prior/region or likelihood underflow); use a larger budget or the
    large-N path."""


class SymmetryViolationError(RuntimeError):
    """A component that must vanish by symmetry was statistically nonzero;
    indicates a broken basis convention or a prior without the assumed
    symmetry."""


class IncompatibleDataError(ValueError):
    """No frequency vector is compatible with the requested data region."""
