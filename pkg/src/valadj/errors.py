"""Package-level error types.

Validation of user inputs raises plain :class:`ValueError`.  An
:class:`InvariantError` means the inputs were admissible but a numeric
identity the implementation guarantees failed to hold, e.g. a quadrature
cross-check or a non-finite coefficient; these indicate a genuine
problem rather than bad arguments.
"""


class InvariantError(RuntimeError):
    """A guaranteed numeric identity or sanity bound failed."""
