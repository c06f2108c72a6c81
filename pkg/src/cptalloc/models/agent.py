"""Agent specifications: value functions and probability weighting."""

import math
from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

EXPLICIT_WEIGHT_TOL = 1e-9


class ValueFamily(str, Enum):
    """Supported value function families."""

    POWER = "power"
    LOG_AFFINE = "log_affine"
    LINEAR = "linear"


class WeightingFamily(str, Enum):
    """Supported probability weighting families."""

    IDENTITY = "identity"
    KT = "kt"
    POWER_CONVEX = "power_convex"


# None marks a required parameter
_VALUE_PARAMS: dict[ValueFamily, dict[str, float | None]] = {
    ValueFamily.POWER: {"beta": None},
    ValueFamily.LOG_AFFINE: {"a": None, "b": 0.0, "s": None, "c": 0.0},
    ValueFamily.LINEAR: {},
}

_WEIGHTING_PARAMS: dict[WeightingFamily, dict[str, float | None]] = {
    WeightingFamily.IDENTITY: {},
    WeightingFamily.KT: {"gamma": None},
    WeightingFamily.POWER_CONVEX: {"a": None},
}


def _check_names(
    family: str,
    params: dict[str, float],
    expected: dict[str, float | None],
) -> None:
    unknown = sorted(set(params) - set(expected))
    if unknown:
        raise ValueError(f"Unknown {family} parameters: {', '.join(unknown)}")
    missing = [name for name, default in expected.items() if default is None and name not in params]
    if missing:
        raise ValueError(f"Missing {family} parameters: {', '.join(missing)}")
    for name, value in params.items():
        if not math.isfinite(value):
            raise ValueError(f"Parameter {name} must be finite, got {value}")


class ValueFunctionSpec(BaseModel):
    """A concave, strictly increasing value function on [0, inf).

    Families:
        power: v(x) = x**beta, beta in (0, 1]
        log_affine: v(x) = a*ln(x+s) + b*(x+s) + c, a, b >= 0, a+b > 0, s > 0
        linear: v(x) = x
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    family: ValueFamily
    params: dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def validate_params(self) -> "ValueFunctionSpec":
        """Check parameter names and ranges for the family."""
        _check_names(self.family.value, self.params, _VALUE_PARAMS[self.family])

        if self.family is ValueFamily.POWER:
            beta = self.param("beta")
            if not 0.0 < beta <= 1.0:
                raise ValueError(f"power beta must be in (0, 1], got {beta}")

        elif self.family is ValueFamily.LOG_AFFINE:
            a, b, s = self.param("a"), self.param("b"), self.param("s")
            if a < 0 or b < 0 or a + b <= 0:
                raise ValueError("log_affine needs a >= 0, b >= 0 and a + b > 0")
            if s <= 0:
                raise ValueError(f"log_affine shift s must be positive, got {s}")

        return self

    def param(self, name: str) -> float:
        """Return a parameter value, falling back to the family default."""
        if name in self.params:
            return float(self.params[name])
        default = _VALUE_PARAMS[self.family].get(name)
        if default is None:
            raise KeyError(f"{self.family.value} has no parameter {name}")
        return default

    @classmethod
    def power(cls, beta: float) -> "ValueFunctionSpec":
        return cls(family=ValueFamily.POWER, params={"beta": beta})

    @classmethod
    def log_affine(cls, a: float, b: float, s: float, c: float = 0.0) -> "ValueFunctionSpec":
        return cls(family=ValueFamily.LOG_AFFINE, params={"a": a, "b": b, "s": s, "c": c})

    @classmethod
    def linear(cls) -> "ValueFunctionSpec":
        return cls(family=ValueFamily.LINEAR)


class WeightingFunctionSpec(BaseModel):
    """A strictly increasing probability weighting function with w(0)=0, w(1)=1."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    family: WeightingFamily
    params: dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def validate_params(self) -> "WeightingFunctionSpec":
        """Check parameter names and ranges for the family."""
        _check_names(self.family.value, self.params, _WEIGHTING_PARAMS[self.family])

        if self.family is WeightingFamily.KT:
            gamma = self.param("gamma")
            if not 0.0 < gamma <= 1.0:
                raise ValueError(f"kt gamma must be in (0, 1], got {gamma}")

        elif self.family is WeightingFamily.POWER_CONVEX:
            a = self.param("a")
            if a <= 1.0:
                raise ValueError(f"power_convex exponent must exceed 1, got {a}")

        return self

    def param(self, name: str) -> float:
        """Return a parameter value."""
        if name not in self.params:
            raise KeyError(f"{self.family.value} has no parameter {name}")
        return float(self.params[name])

    @classmethod
    def identity(cls) -> "WeightingFunctionSpec":
        return cls(family=WeightingFamily.IDENTITY)

    @classmethod
    def kt(cls, gamma: float) -> "WeightingFunctionSpec":
        return cls(family=WeightingFamily.KT, params={"gamma": gamma})

    @classmethod
    def power_convex(cls, a: float) -> "WeightingFunctionSpec":
        return cls(family=WeightingFamily.POWER_CONVEX, params={"a": a})


class ExplicitWeights(BaseModel):
    """Decision weights given directly for a uniform k-outcome lottery."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    explicit_h: list[float]

    @field_validator("explicit_h")
    @classmethod
    def validate_weights(cls, v: list[float]) -> list[float]:
        """Weights must be positive and sum to one."""
        if not v:
            raise ValueError("explicit_h cannot be empty")
        if any(not math.isfinite(h) or h <= 0 for h in v):
            raise ValueError("explicit_h entries must be positive")
        total = math.fsum(v)
        if abs(total - 1.0) > EXPLICIT_WEIGHT_TOL:
            raise ValueError(f"explicit_h must sum to 1, got {total}")
        return v


class AgentSpec(BaseModel):
    """A player: value function plus weighting function or explicit weights."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    value: ValueFunctionSpec
    weights: WeightingFunctionSpec | ExplicitWeights

    @property
    def has_weighting_function(self) -> bool:
        return isinstance(self.weights, WeightingFunctionSpec)

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "AgentSpec":
        """Create an AgentSpec from its JSON form.

        ```json
        {"value": {"family": "power", "params": {"beta": 0.88}},
         "weights": {"family": "kt", "params": {"gamma": 0.61}}}
        ```

        or with explicit decision weights:

        ```json
        {"value": {"family": "linear"}, "weights": {"explicit_h": [0.9, 0.1]}}
        ```
        """
        return cls.model_validate(data)

    def to_json(self) -> dict[str, Any]:
        return self.model_dump(mode="json")
