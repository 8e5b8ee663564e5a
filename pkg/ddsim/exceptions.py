"""
DDSim Exceptions
Error types raised by the simulator and the experiment runner.
"""


class DDSimError(Exception):
    """Base class for all simulator errors."""


class GridError(DDSimError, ValueError):
    """Invalid grid parameters (non power-of-two size, bad half-width)."""


class RepresentationError(DDSimError, ValueError):
    """Vector is not in the representation an operation needs."""


class BackendMismatchError(DDSimError, ValueError):
    """State backend does not match the model (grid vs Fock)."""


class UnitarityError(DDSimError, ValueError):
    """A system operator that must be unitary is not."""


class NormalizationError(DDSimError, ValueError):
    """A state that must be normalised is not."""


class OracleDomainError(DDSimError, ValueError):
    """Closed-form result evaluated outside its validity domain."""


class SupportOverflowError(DDSimError, ValueError):
    """A Friedrichs-Lee shift would push amplitude out of the time window."""


class SubspaceError(DDSimError, ValueError):
    """Friedrichs-Lee state outside the invariant subspace (x1, 0, 0, xi2)."""


class ConfigError(DDSimError, ValueError):
    """Experiment configuration failed to parse or validate."""


class NumericalGuardError(DDSimError, RuntimeError):
    """Norm drift or Fock truncation exceeded its guard during a run."""


class ToleranceExceededError(DDSimError, RuntimeError):
    """Deviation between simulation and oracle exceeded the configured tolerance."""


class ParameterError(DDSimError, ValueError):
    """Physical parameter outside its admissible range."""
