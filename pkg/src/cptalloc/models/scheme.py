"""Lottery schemes and price systems."""

from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]
IntArray = NDArray[np.int64]


def array_to_json(values: NDArray[Any]) -> Any:
    """Convert an array to nested lists, writing infinities as strings."""
    if values.dtype.kind == "f":
        if values.ndim == 0:
            return float_to_json(float(values))
        return [array_to_json(row) for row in values]
    return values.tolist()


def float_to_json(value: float) -> float | str:
    if np.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


@dataclass(frozen=True, eq=False)
class LotteryScheme:
    """Per-player descending allocations z and outcome-to-rank maps pi.

    Player i receives z[i, pi[i, l]] in outcome l, each outcome having
    probability 1/k.
    """

    z: FloatArray
    pi: IntArray

    @property
    def num_players(self) -> int:
        return int(self.z.shape[0])

    @property
    def num_outcomes(self) -> int:
        return int(self.z.shape[1])

    def to_dict(self) -> dict[str, Any]:
        return {"z": array_to_json(self.z), "pi": array_to_json(self.pi)}


@dataclass(frozen=True, eq=False)
class PriceSystem:
    """Link duals and the per-player prices they induce.

    Attributes:
        lam: m x k link duals, indexed by outcome
        rho: n x k per-unit prices, indexed by rank
        r: n x k cumulative rates r(l) = sum of rho up to rank l
        alpha: n x k ordering duals
    """

    lam: FloatArray
    rho: FloatArray
    r: FloatArray
    alpha: FloatArray

    def to_dict(self) -> dict[str, Any]:
        return {
            "lambda": array_to_json(self.lam),
            "rho": array_to_json(self.rho),
            "r": array_to_json(self.r),
            "alpha": array_to_json(self.alpha),
        }
