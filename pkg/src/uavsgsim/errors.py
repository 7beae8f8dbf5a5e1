"""Exception hierarchy for the simulator and the analytic engine."""


class UavsgsimError(Exception):
    """Base class for all package errors."""


class ValidationError(UavsgsimError):
    """A configuration value violates a model invariant."""


class ParseError(UavsgsimError):
    """A config file could not be read or contains unknown/bad keys."""


class NonConvergence(UavsgsimError):
    """A series or iteration failed to reach tolerance within its budget."""


class QuadratureFailure(UavsgsimError):
    """A numerical integration did not meet the requested tolerance."""


class BeamDomain(UavsgsimError):
    """The mmWave mainlobe beamwidth left its admissible interval (0, pi/2)."""


class DegenerateGeometry(UavsgsimError):
    """A geometric quantity (e.g. a link distance of zero) has no meaning."""


class DegenerateRealization(UavsgsimError):
    """A sampled realization is unusable (e.g. zero UAVs after retries)."""
