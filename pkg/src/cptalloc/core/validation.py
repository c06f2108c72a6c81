"""Validation logic for network instances."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from cptalloc.core.cpt import decision_weights
from cptalloc.core.exceptions import InvalidInstanceError
from cptalloc.models import ExplicitWeights, NetworkInstance

logger = logging.getLogger(__name__)


@dataclass
class InstanceViolation:
    """A single broken instance invariant."""

    field: str
    index: int | None
    reason: str

    def __str__(self) -> str:
        where = self.field if self.index is None else f"{self.field}[{self.index}]"
        return f"{where}: {self.reason}"


@dataclass
class ValidationResult:
    """Result of validating a network instance."""

    is_valid: bool
    errors: list[InstanceViolation] = field(default_factory=list)

    @property
    def error_count(self) -> int:
        return len(self.errors)

    def add_error(self, error: InstanceViolation) -> None:
        self.errors.append(error)
        self.is_valid = False

    def messages(self) -> list[str]:
        return [str(error) for error in self.errors]


def _check_capacities(instance: NetworkInstance, result: ValidationResult) -> None:
    if not instance.capacities:
        result.add_error(InstanceViolation("capacities", None, "no links"))
    for j, capacity in enumerate(instance.capacities):
        if not math.isfinite(capacity) or capacity <= 0:
            result.add_error(
                InstanceViolation(
                    "capacities", j, f"capacity must be positive and finite, got {capacity}"
                )
            )


def _check_routes(instance: NetworkInstance, result: ValidationResult) -> None:
    if not instance.routes:
        result.add_error(InstanceViolation("routes", None, "no players"))
    for i, route in enumerate(instance.routes):
        if not route:
            result.add_error(InstanceViolation("routes", i, "empty route"))
        bad = [link for link in route if not 0 <= link < instance.num_links]
        if bad:
            result.add_error(
                InstanceViolation("routes", i, f"link index out of range: {bad}")
            )


def _check_agents(instance: NetworkInstance, result: ValidationResult) -> None:
    if instance.k < 1:
        result.add_error(InstanceViolation("k", None, f"k must be at least 1, got {instance.k}"))

    if len(instance.agents) != instance.num_players:
        result.add_error(
            InstanceViolation(
                "agents",
                None,
                f"agent count mismatch: {len(instance.agents)} agents for "
                f"{instance.num_players} routes",
            )
        )

    for i, agent in enumerate(instance.agents):
        weights = agent.weights
        if isinstance(weights, ExplicitWeights) and len(weights.explicit_h) != instance.k:
            result.add_error(
                InstanceViolation(
                    "agents",
                    i,
                    f"explicit_h has {len(weights.explicit_h)} entries, expected k = {instance.k}",
                )
            )
        elif instance.k >= 1:
            h = decision_weights(weights, instance.k)
            if (h <= 0).any():
                worst = int(np.argmin(h))
                result.add_error(
                    InstanceViolation(
                        "agents",
                        i,
                        f"decision weight h[{worst}] = {h[worst]:.3g} is not positive at "
                        f"k = {instance.k}",
                    )
                )


def validate_instance(instance: NetworkInstance) -> ValidationResult:
    """Check every structural invariant of an instance.

    All violations are collected rather than stopping at the first one.

    Args:
        instance: The instance to validate

    Returns:
        ValidationResult with any violations found
    """
    result = ValidationResult(is_valid=True)

    _check_capacities(instance, result)
    _check_routes(instance, result)
    _check_agents(instance, result)

    for error in result.errors:
        logger.warning("Invalid instance: %s", error)

    if result.is_valid:
        logger.info(
            "Instance validation passed: %d players, %d links, k=%d",
            instance.num_players,
            instance.num_links,
            instance.k,
        )
    else:
        logger.warning("Instance validation failed: %d errors", result.error_count)

    return result


def require_valid(instance: NetworkInstance) -> NetworkInstance:
    """Return the instance unchanged or raise with the full violation list.

    Raises:
        InvalidInstanceError: If any invariant is violated
    """
    result = validate_instance(instance)
    if not result.is_valid:
        raise InvalidInstanceError(result.messages())
    return instance
