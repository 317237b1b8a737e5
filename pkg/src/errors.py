"""Exception types raised by the toolkit"""

import config


class CsPhaseError(Exception):
    """Base class for all toolkit errors."""
    exit_code = 1


class DomainError(CsPhaseError, ValueError):
    """A parameter or mesh lies outside the domain where the model is defined."""
    exit_code = config.EXIT_DOMAIN


class ContractError(CsPhaseError, ValueError):
    """Malformed input: mismatched meshes, wrong array lengths, non-finite samples."""
    exit_code = config.EXIT_DOMAIN


class RootUnavailableError(CsPhaseError):
    """The requested root of the soliton frequency equation does not exist."""
    exit_code = config.EXIT_NO_ROOT


class DivergenceError(CsPhaseError, RuntimeError):
    """Descent produced a non-finite energy."""
    exit_code = config.EXIT_DIVERGED

    def __init__(self, message: str, energy_trace: list[float] | None = None):
        super().__init__(message)
        self.energy_trace = list(energy_trace or [])
