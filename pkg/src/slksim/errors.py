"""Exception types shared across the package."""


class SlkSimError(Exception):
    """Base class for all slksim errors."""


class DomainMismatchError(SlkSimError):
    """Two states (or a state and a potential) live on different domains."""


class DegenerateStateError(SlkSimError):
    """A zero-norm state was passed where a normalizable one is required."""


class PotentialConstructionError(SlkSimError):
    """A potential could not be built (e.g. non-positive ground-state ansatz)."""


class StabilityError(SlkSimError):
    """Propagator parameters fail the construction-time stability guard."""


class SimulationDivergedError(SlkSimError):
    """Non-finite amplitudes were detected during time stepping."""


class SpectralError(SlkSimError):
    """Eigensolver failure or an out-of-contract request to the oracle."""


class ConfigError(SlkSimError):
    """Invalid experiment configuration; `field` names the offending key."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
