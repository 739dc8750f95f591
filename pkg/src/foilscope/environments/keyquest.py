"""Platformer-style key quest: ladders, ropes, ledges, one static hazard.

Movement needs standable ground: a cell is supported when it is itself a
ladder, rope, or ledge cell, or sits directly above a wall or ladder.
Horizontal moves onto unsupported cells fall (⊥), moving into a live hazard
dies (⊥), jumps clear two cells (the middle may hold a hazard but not a
wall), vertical moves need a climbable or a one-step-down supported cell.
``attack`` never fails: adjacent to a live hazard it kills it at cost 500,
anywhere else it is a cost-1 swing. Every other step costs 1.
"""
from __future__ import annotations

from typing import NamedTuple

from ..model import ActionId, TransitionOutcome, BOTTOM
from .base import CostRule, EnvironmentBase, GroundTruth
from .grid import (
    AGENT,
    DIRECTIONS,
    FLOOR,
    GridSpec,
    KEY,
    KEYQUEST_VARIANT,
    LADDER,
    LEDGE,
    MapError,
    ROPE,
    SKULL,
    WALL,
    add,
)


class KQState(NamedTuple):
    agent: tuple
    hazard_alive: bool


_CLIMBABLE = (LADDER, ROPE)


class KeyQuestEnv(EnvironmentBase):
    """``hazard_name`` picks the concept naming family ("skull" or "crab")."""

    action_labels = (
        "move-up", "move-down", "move-left", "move-right",
        "jump-left", "jump-right", "attack", "noop",
    )

    def __init__(self, spec: GridSpec, hazard_name: str = "skull"):
        super().__init__()
        if spec.variant != KEYQUEST_VARIANT:
            raise MapError(f"not a key-quest map: {spec.variant!r}")
        if hazard_name not in ("skull", "crab"):
            raise MapError(f"unsupported hazard name {hazard_name!r}")
        self.spec = spec
        self.variant = spec.variant
        self.hazard_name = hazard_name
        self.agent_start = spec.find_one(AGENT)
        self.key_pos = spec.find_one(KEY)
        hazards = spec.find_all(SKULL)
        if len(hazards) > 1:
            raise MapError(f"expected at most one hazard, found {len(hazards)}")
        self.hazard_pos = hazards[0] if hazards else None

    # --- terrain ------------------------------------------------------------

    def _glyph(self, pos: tuple) -> str:
        r, c = pos
        if r < 0 or c < 0 or r >= self.spec.height or c >= self.spec.width:
            return WALL
        g = self.spec.glyph(r, c)
        # agent/box/hazard markers sit on ordinary floor terrain
        return FLOOR if g in (AGENT, SKULL) else g

    def _is_wall(self, pos: tuple) -> bool:
        return self._glyph(pos) == WALL

    def _supported(self, pos: tuple) -> bool:
        g = self._glyph(pos)
        if g in (LADDER, ROPE, LEDGE):
            return True
        return self._glyph(add(pos, DIRECTIONS["down"])) in (WALL, LADDER)

    def _live_hazard_at(self, state: KQState, pos: tuple) -> bool:
        return state.hazard_alive and self.hazard_pos is not None and pos == self.hazard_pos

    # --- dynamics -------------------------------------------------------------

    def initial_state(self) -> KQState:
        return KQState(agent=self.agent_start, hazard_alive=self.hazard_pos is not None)

    def goal(self, state: KQState) -> bool:
        return state.agent == self.key_pos

    def simulate(self, state: KQState, action: ActionId) -> TransitionOutcome:
        label = action.label
        if label == "noop":
            return TransitionOutcome(state, 1.0)
        if label == "attack":
            if state.hazard_alive and self.hazard_pos in (
                add(state.agent, DIRECTIONS["left"]),
                add(state.agent, DIRECTIONS["right"]),
            ):
                return TransitionOutcome(KQState(state.agent, False), 500.0)
            return TransitionOutcome(state, 1.0)
        if label.startswith("jump-"):
            d = DIRECTIONS[label.split("-", 1)[1]]
            mid = add(state.agent, d)
            landing = add(mid, d)
            if self._is_wall(mid) or self._is_wall(landing):
                return TransitionOutcome(BOTTOM, 1.0)
            if self._live_hazard_at(state, landing) or not self._supported(landing):
                return TransitionOutcome(BOTTOM, 1.0)
            return TransitionOutcome(KQState(landing, state.hazard_alive), 1.0)
        d = DIRECTIONS[label.split("-", 1)[1]]
        target = add(state.agent, d)
        if self._is_wall(target) or self._live_hazard_at(state, target):
            return TransitionOutcome(BOTTOM, 1.0)
        here_climbable = self._glyph(state.agent) in _CLIMBABLE
        target_climbable = self._glyph(target) in _CLIMBABLE
        if label in ("move-left", "move-right"):
            ok = self._supported(target)
        elif label == "move-up":
            ok = target_climbable or (here_climbable and self._supported(target))
        else:  # move-down: climb down, or drop one step onto standable ground
            ok = target_climbable or self._supported(target)
        if not ok:
            return TransitionOutcome(BOTTOM, 1.0)
        return TransitionOutcome(KQState(target, state.hazard_alive), 1.0)

    # --- concepts ---------------------------------------------------------------

    def _hazard_rel(self, state: KQState, direction: str) -> bool:
        return self._live_hazard_at(state, add(state.agent, DIRECTIONS[direction]))

    def detector_registry(self) -> dict:
        registry = {
            "on_ladder": lambda s: self._glyph(s.agent) == LADDER,
            "on_bottom_floor": lambda s: s.agent[0] == self.spec.height - 2,
            "key_on_left": lambda s: add(s.agent, DIRECTIONS["left"]) == self.key_pos,
            "wall_on_left": lambda s: self._is_wall(add(s.agent, DIRECTIONS["left"])),
            "wall_on_right": lambda s: self._is_wall(add(s.agent, DIRECTIONS["right"])),
        }
        if self.hazard_name == "skull":
            registry.update({
                "on_rope": lambda s: self._glyph(s.agent) == ROPE,
                "on_left_ledge": lambda s: self._glyph(s.agent) == LEDGE,
                "skull_on_left": lambda s: self._hazard_rel(s, "left"),
                "skull_on_right": lambda s: self._hazard_rel(s, "right"),
                "skull_below": lambda s: self._hazard_rel(s, "down"),
            })
        else:
            registry.update({
                "is_clear_down_of_crab": lambda s: not self._hazard_rel(s, "down"),
                "on_ledge": lambda s: self._glyph(s.agent) == LEDGE,
                "crab_on_left": lambda s: self._hazard_rel(s, "left"),
                "crab_on_right": lambda s: self._hazard_rel(s, "right"),
                "wall_below": lambda s: self._is_wall(add(s.agent, DIRECTIONS["down"])),
            })
        return registry

    def base_concept_names(self) -> tuple:
        if self.hazard_name == "skull":
            return (
                "on_rope", "on_ladder", "on_left_ledge",
                "skull_on_left", "skull_on_right", "skull_below",
                "on_bottom_floor", "key_on_left", "wall_on_left", "wall_on_right",
            )
        return (
            "is_clear_down_of_crab", "on_ladder", "on_ledge",
            "crab_on_left", "crab_on_right", "on_bottom_floor",
            "key_on_left", "wall_on_left", "wall_on_right", "wall_below",
        )

    # --- ground truth --------------------------------------------------------------

    def ground_truth(self) -> GroundTruth:
        if self.hazard_name == "skull":
            preconditions = {
                "move-left": frozenset({
                    "not_skull_on_left", "not_wall_on_left",
                    "not_on_left_ledge", "not_on_rope", "not_on_ladder",
                }),
                "move-right": frozenset({
                    "not_skull_on_right", "not_wall_on_right", "not_on_rope", "not_on_ladder",
                }),
                "move-up": frozenset(),
                "move-down": frozenset({"not_skull_below"}),
                "jump-left": frozenset(),
                "jump-right": frozenset(),
                "attack": frozenset(),
                "noop": frozenset(),
            }
            rules = (
                CostRule("attack", frozenset({"skull_on_left"}), 500.0),
                CostRule("attack", frozenset({"skull_on_right"}), 500.0),
            )
        else:
            preconditions = {
                "move-left": frozenset({"not_crab_on_left", "not_wall_on_left"}),
                "move-right": frozenset({"not_crab_on_right", "not_wall_on_right"}),
                "move-up": frozenset(),
                "move-down": frozenset({"is_clear_down_of_crab", "not_wall_below"}),
                "jump-left": frozenset(),
                "jump-right": frozenset(),
                "attack": frozenset(),
                "noop": frozenset(),
            }
            rules = ()
        return GroundTruth(preconditions=preconditions, cost_rules=rules)

    # --- presentation -----------------------------------------------------------------

    def describe_state(self, state: KQState) -> dict:
        info = {"agent": list(state.agent)}
        if self.hazard_pos is not None:
            info["hazard"] = {
                "pos": list(self.hazard_pos),
                "alive": bool(state.hazard_alive),
                "name": self.hazard_name,
            }
        return info

    def static_layout(self) -> list:
        rows = []
        for row in self.spec.rows:
            rows.append(row.replace(AGENT, FLOOR).replace(SKULL, FLOOR))
        return rows
