"""Exception types raised across the package."""

from __future__ import annotations


class MosaicError(Exception):
    """Base class for all package errors."""


class ConfigError(MosaicError, ValueError):
    """Invalid configuration value (optimizer settings, model constants)."""


class ScenarioError(MosaicError, ValueError):
    """Scenario file failed to parse or validate.

    ``path`` names the offending location in the document, e.g.
    ``locations[3].prices.tou``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class CapacityError(MosaicError, ValueError):
    """An assignment activates more nodes than a datacenter has installed."""


class OversubscriptionError(MosaicError):
    """Arrival rates exceed the compute capacity that can absorb them."""

    def __init__(self, message: str, epoch: int | None = None):
        self.epoch = epoch
        super().__init__(message if epoch is None else f"epoch {epoch}: {message}")


class PlanInfeasibleError(MosaicError, ValueError):
    """A distribution plan requests something the scenario cannot provide."""


class BudgetExhausted(MosaicError):
    """Raised internally when an optimizer runs out of evaluations or time."""
