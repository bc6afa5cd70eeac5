"""Exception hierarchy.

The CLI maps these onto exit codes: :class:`InputError` -> 2,
:class:`NumericalContractError` and subclasses -> 3.
"""


class MolJunctionError(Exception):
    """Base class for all package errors."""


class InputError(MolJunctionError, ValueError):
    """Malformed or inconsistent user input (shapes, schema, ranges)."""


class NumericalContractError(MolJunctionError):
    """A numerical guarantee could not be met."""


class NumericalError(NumericalContractError):
    """A linear-algebra routine failed to converge."""


class UnsupportedStateError(NumericalContractError):
    """The Gaussian state is not pure, so the pure-state formulas do not apply."""


class ResourceError(NumericalContractError):
    """The requested computation exceeds a configured size budget."""


class CutoffError(NumericalContractError):
    """Photon-number truncation captured too little probability mass.

    Attributes:
        captured_mass (float): probability mass actually enumerated
        required (float): the configured minimum
    """

    def __init__(self, captured_mass, required, cutoff):
        self.captured_mass = captured_mass
        self.required = required
        self.cutoff = cutoff
        super().__init__(
            f"captured mass {captured_mass:.10f} is below the required {required} "
            f"at max_total_photons={cutoff}; raise max_total_photons"
        )


class OccupationError(NumericalContractError):
    """Steady-state occupations are undefined because every rate vanishes."""


class PrecisionWarning(UserWarning):
    """Fock-space truncation leaked more norm than the oracle tolerates."""
