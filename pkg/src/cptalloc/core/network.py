"""Feasibility checks, scheme composition and price bookkeeping."""

import logging

import numpy as np
from numpy.typing import ArrayLike

from cptalloc.core.exceptions import InvalidInputError
from cptalloc.models import FloatArray, IntArray, LotteryScheme, NetworkInstance, PriceSystem

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-9


def link_loads(instance: NetworkInstance, x: ArrayLike) -> FloatArray:
    """Load on each link for one allocation profile x (length n)."""
    x = np.asarray(x, dtype=float)
    return np.array([x[users].sum() for users in instance.link_users()], dtype=float)


def outcome_loads(instance: NetworkInstance, y: ArrayLike) -> FloatArray:
    """m x k matrix of link loads, one column per outcome of y (n x k)."""
    y = np.asarray(y, dtype=float)
    return np.array([y[users].sum(axis=0) for users in instance.link_users()], dtype=float)


def is_feasible_allocation(
    instance: NetworkInstance,
    x: ArrayLike,
    tol: float = FEASIBILITY_TOL,
) -> bool:
    """Check A^T x <= c for a deterministic allocation.

    Raises:
        InvalidInputError: If x does not have one entry per player
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (instance.num_players,):
        raise InvalidInputError(
            f"Allocation must have {instance.num_players} entries, got shape {x.shape}"
        )
    if (x < -tol).any():
        return False
    capacities = np.asarray(instance.capacities, dtype=float)
    return bool((link_loads(instance, x) <= capacities + tol).all())


def scheme_compose(scheme: LotteryScheme) -> FloatArray:
    """y[i, l] = z[i, pi[i, l]]."""
    return np.take_along_axis(scheme.z, scheme.pi, axis=1)


def is_feasible_scheme(
    instance: NetworkInstance,
    scheme: LotteryScheme,
    tol: float = FEASIBILITY_TOL,
) -> bool:
    """True iff every outcome's allocation profile is feasible."""
    if scheme.z.shape != (instance.num_players, instance.k):
        raise InvalidInputError(
            f"Scheme shape {scheme.z.shape} does not match "
            f"({instance.num_players}, {instance.k})"
        )
    if (scheme.z < -tol).any():
        return False
    loads = outcome_loads(instance, scheme_compose(scheme))
    capacities = np.asarray(instance.capacities, dtype=float)[:, None]
    return bool((loads <= capacities + tol).all())


def scheme_decompose(y: ArrayLike) -> LotteryScheme:
    """Split an outcome matrix into descending allocations and rank maps.

    Ties keep their outcome order, so equal entries map to the identity.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 2:
        raise InvalidInputError(f"Outcome matrix must be 2-D, got shape {y.shape}")
    order = np.argsort(-y, axis=1, kind="stable")
    z = np.take_along_axis(y, order, axis=1)
    pi = np.argsort(order, axis=1, kind="stable").astype(np.int64)
    return LotteryScheme(z=z, pi=pi)


def validate_profile(instance: NetworkInstance, pi: ArrayLike) -> IntArray:
    """Coerce pi to an n x k integer array of per-player permutations.

    Raises:
        InvalidInputError: If pi has the wrong shape or a row is not a permutation
    """
    profile = np.asarray(pi)
    expected = (instance.num_players, instance.k)
    if profile.shape != expected:
        raise InvalidInputError(
            f"Permutation profile must have shape {expected}, got {profile.shape}"
        )
    if not np.issubdtype(profile.dtype, np.integer):
        if not np.array_equal(profile, np.round(profile)):
            raise InvalidInputError("Permutation profile entries must be integers")
    profile = profile.astype(np.int64)
    identity = np.arange(instance.k)
    for i, row in enumerate(profile):
        if not np.array_equal(np.sort(row), identity):
            raise InvalidInputError(
                f"pi[{i}] = {row.tolist()} is not a permutation of 0..{instance.k - 1}"
            )
    return profile


def player_prices(instance: NetworkInstance, pi: IntArray, lam: FloatArray) -> FloatArray:
    """n x k rank-indexed unit prices rho[i, pi[i, l]] = sum of lam[j, l] over the route."""
    rho = np.zeros((instance.num_players, instance.k))
    for i, route in enumerate(instance.routes):
        rho[i, pi[i]] = lam[route].sum(axis=0)
    return rho


def prices_from_duals(
    instance: NetworkInstance,
    pi: ArrayLike,
    lam: ArrayLike,
) -> PriceSystem:
    """Per-player prices and cumulative rates induced by link duals.

    Args:
        instance: Network instance
        pi: n x k permutation profile
        lam: m x k nonnegative link duals, indexed by outcome

    Returns:
        PriceSystem with rho and r filled and alpha left at zero

    Raises:
        InvalidInputError: If lam has the wrong shape or a negative entry
    """
    profile = validate_profile(instance, pi)
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (instance.num_links, instance.k):
        raise InvalidInputError(
            f"Link duals must have shape ({instance.num_links}, {instance.k}), got {lam.shape}"
        )
    if (lam < 0).any():
        raise InvalidInputError("Link duals must be nonnegative")

    rho = player_prices(instance, profile, lam)
    return PriceSystem(lam=lam, rho=rho, r=np.cumsum(rho, axis=1), alpha=np.zeros_like(rho))


def cyclic_profile(n: int, k: int) -> IntArray:
    """Latin profile pi_i(l) = (l + i) mod k."""
    return ((np.arange(k)[None, :] + np.arange(n)[:, None]) % k).astype(np.int64)
