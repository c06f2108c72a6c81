"""Network instance model."""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator

from cptalloc.models.agent import AgentSpec


class NetworkInstance(BaseModel):
    """Links with capacities, player routes, outcome count and agents.

    Structural invariants (positive capacities, non-empty routes, link
    indices in range, one agent per route, k >= 1) are checked by
    ``cptalloc.core.validation.validate_instance`` so that every violation
    can be reported at once; construction only enforces types.

    Usage:
        instance = NetworkInstance.from_json(json.load(f))
        result = validate_instance(instance)
        if result.is_valid:
            report = solve_sys_fix(instance, profile)
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    capacities: list[float]
    routes: list[list[int]]
    k: int
    agents: list[AgentSpec] = Field(default_factory=list)

    @field_validator("routes")
    @classmethod
    def normalize_routes(cls, v: list[list[int]]) -> list[list[int]]:
        """Store every route as a sorted set of link indices."""
        return [sorted(set(route)) for route in v]

    @property
    def num_players(self) -> int:
        return len(self.routes)

    @property
    def num_links(self) -> int:
        return len(self.capacities)

    def link_users(self) -> list[list[int]]:
        """Players routed through each link (R_j)."""
        users: list[list[int]] = [[] for _ in self.capacities]
        for player, route in enumerate(self.routes):
            for link in route:
                if 0 <= link < len(users):
                    users[link].append(player)
        return users

    def route_capacity(self, player: int) -> float:
        """Smallest capacity along a player's route."""
        return min(self.capacities[link] for link in self.routes[player])

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "NetworkInstance":
        """Create an instance from its JSON form.

        ```json
        {"capacities": [2.9], "routes": [[0], [0]], "k": 2, "agents": [...]}
        ```
        """
        return cls.model_validate(data)

    def to_json(self) -> dict[str, Any]:
        return self.model_dump(mode="json")
