"""Exception hierarchy.

Two broad families matter to callers: ``InputError`` for bad or inconsistent
input data (the CLI maps these to exit code 2) and ``ConfigurationError`` for
invalid run configuration (exit code 3). Anything else derived from
``CascadeKitError`` that escapes to the CLI indicates a bug (exit code 4).
"""

from __future__ import annotations


class CascadeKitError(Exception):
    """Base class for all cascadekit errors."""


class InputError(CascadeKitError):
    """Invalid or inconsistent input data."""


class ConfigurationError(CascadeKitError):
    """Invalid run configuration."""


# --- input data -----------------------------------------------------------


class ParseError(InputError):
    """A record file could not be parsed; names the file and line."""

    def __init__(self, path, line: int, reason: str):
        self.path = str(path)
        self.line = line
        self.reason = reason
        super().__init__(f"{path}:{line}: {reason}")


class DuplicateInstanceError(InputError):
    def __init__(self, instance_id: str, where: str = ""):
        self.instance_id = instance_id
        suffix = f" ({where})" if where else ""
        super().__init__(f"duplicate instance id {instance_id!r}{suffix}")


class MissingPredictionError(InputError):
    def __init__(self, model_id: str, instance_id: str):
        self.model_id = model_id
        self.instance_id = instance_id
        super().__init__(
            f"model {model_id!r} has no prediction for instance {instance_id!r}"
        )


class UnknownInstanceError(InputError):
    def __init__(self, model_id: str, instance_id: str):
        self.model_id = model_id
        self.instance_id = instance_id
        super().__init__(
            f"prediction for model {model_id!r} references unknown instance "
            f"{instance_id!r}"
        )


class LabelCountMismatchError(InputError):
    """A distribution length or gold label disagrees with the dataset label count."""


class InvalidDistributionError(InputError):
    """Distribution entries out of [0, 1] or not summing to 1 within tolerance."""


class NonFiniteScoreError(InputError):
    """Raw score vector contains NaN or infinity."""


class NonPositiveLengthError(InputError):
    """Token length below 1."""


class EmptyCostTableError(InputError):
    def __init__(self, model_id: str):
        self.model_id = model_id
        super().__init__(f"model {model_id!r} has an empty cost table")


class NonMonotoneCostError(InputError):
    def __init__(self, length: int, cheaper_id: str, pricier_id: str):
        self.length = length
        self.cheaper_id = cheaper_id
        self.pricier_id = pricier_id
        super().__init__(
            f"cost ordering violated at sequence length {length}: "
            f"{cheaper_id!r} (lower order) costs at least as much as {pricier_id!r}"
        )


class ProfileOrderError(InputError):
    """order_index values do not form a contiguous 1..K sequence."""


class EmptyBundleError(InputError):
    """Bundle contains no instances."""


# --- configuration --------------------------------------------------------


class UnknownModelError(ConfigurationError):
    def __init__(self, model_id: str):
        self.model_id = model_id
        super().__init__(f"model {model_id!r} not present in the bundle")


class ThresholdOutOfRangeError(ConfigurationError):
    """Threshold below the policy's minimum confidence, or not finite."""


class RoutingArityError(ConfigurationError):
    """Routing mode requires at least three models."""


class BandViolationError(ConfigurationError):
    """A skip threshold exceeds its stage's output threshold."""


class GridTooLargeError(ConfigurationError):
    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"sweep grid has {size} elements, exceeding cap {cap}")


class InfeasibleBudgetError(ConfigurationError):
    """Budget lies below the cheapest operating point on validation data."""


class InvalidSpecError(ConfigurationError):
    """Synthetic bundle specification is invalid."""


# --- internal misuse (CLI exit code 4) ------------------------------------


class CountMismatchError(CascadeKitError):
    """Outcome list does not cover the bundle's instances exactly."""


class EmptyCurveError(CascadeKitError):
    """Curve operation applied to an empty point set."""
