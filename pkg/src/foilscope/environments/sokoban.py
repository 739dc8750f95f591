"""Single-box sokoban with a toggle switch or pink-region cost variants.

Variants share geometry rules — moves need an empty target cell, pushes need
the box adjacent with a free cell beyond, any non-noop action that leaves the
agent in place fails — and differ in what the switch/pink cells mean:

* ``sokoban-switch-prec``: pushing requires the switch on, else ⊥.
* ``sokoban-switch-cost``: pushing with the switch off costs 10 (else 1).
* ``sokoban-cell``: pushing while the agent stands on a pink cell costs 10.

The switch toggles on every agent visit to its cell.
"""
from __future__ import annotations

from typing import NamedTuple

from ..model import ActionId, TransitionOutcome, BOTTOM, StateHandle
from .base import CostRule, EnvironmentBase, GroundTruth
from .grid import (
    AGENT,
    BOX,
    DIRECTIONS,
    FLOOR,
    GridSpec,
    MapError,
    PINK,
    SOKOBAN_VARIANTS,
    SWITCH,
    TARGET,
    WALL,
    add,
)


class SokState(NamedTuple):
    agent: tuple
    box: tuple
    switch_on: bool


_MOVE_LABELS = ("move-up", "move-down", "move-left", "move-right")
_PUSH_LABELS = ("push-up", "push-down", "push-left", "push-right")


class SokobanEnv(EnvironmentBase):
    action_labels = _MOVE_LABELS + _PUSH_LABELS + ("noop",)

    def __init__(self, spec: GridSpec):
        super().__init__()
        if spec.variant not in SOKOBAN_VARIANTS:
            raise MapError(f"not a sokoban variant: {spec.variant!r}")
        self.spec = spec
        self.variant = spec.variant
        self.agent_start = spec.find_one(AGENT)
        self.box_start = spec.find_one(BOX)
        self.target = spec.find_one(TARGET)
        self.pinks = frozenset(spec.find_all(PINK))
        if self.variant == "sokoban-cell":
            self.switch_pos = None
            if not self.pinks:
                raise MapError("sokoban-cell map needs at least one pink cell")
        else:
            self.switch_pos = spec.find_one(SWITCH)

    # --- dynamics -----------------------------------------------------------

    def _is_wall(self, pos: tuple) -> bool:
        r, c = pos
        if r < 0 or c < 0 or r >= self.spec.height or c >= self.spec.width:
            return True
        return self.spec.glyph(r, c) == WALL

    def initial_state(self) -> SokState:
        return SokState(agent=self.agent_start, box=self.box_start, switch_on=False)

    def goal(self, state: SokState) -> bool:
        return state.box == self.target

    def _push_cost(self, state: SokState) -> float:
        if self.variant == "sokoban-switch-cost" and not state.switch_on:
            return 10.0
        if self.variant == "sokoban-cell" and state.agent in self.pinks:
            return 10.0
        return 1.0

    def _enter(self, state: SokState, agent: tuple, box: tuple) -> SokState:
        switch_on = state.switch_on
        if self.switch_pos is not None and agent == self.switch_pos:
            switch_on = not switch_on
        return SokState(agent=agent, box=box, switch_on=switch_on)

    def simulate(self, state: SokState, action: ActionId) -> TransitionOutcome:
        label = action.label
        if label == "noop":
            return TransitionOutcome(state, 1.0)
        direction = DIRECTIONS[label.split("-", 1)[1]]
        if label in _MOVE_LABELS:
            target = add(state.agent, direction)
            if self._is_wall(target) or target == state.box:
                return TransitionOutcome(BOTTOM, 1.0)
            return TransitionOutcome(self._enter(state, target, state.box), 1.0)
        cost = self._push_cost(state)
        box_cell = add(state.agent, direction)
        beyond = add(box_cell, direction)
        if state.box != box_cell or self._is_wall(beyond):
            return TransitionOutcome(BOTTOM, cost)
        if self.variant == "sokoban-switch-prec" and not state.switch_on:
            return TransitionOutcome(BOTTOM, cost)
        return TransitionOutcome(self._enter(state, box_cell, beyond), cost)

    # --- concepts -----------------------------------------------------------

    def _box_is(self, state: SokState, direction: str) -> bool:
        return state.box == add(state.agent, DIRECTIONS[direction])

    def detector_registry(self) -> dict:
        registry = {
            "box_on_right": lambda s: self._box_is(s, "right"),
            "box_on_left": lambda s: self._box_is(s, "left"),
            "box_above": lambda s: self._box_is(s, "up"),
            "box_below": lambda s: self._box_is(s, "down"),
        }
        if self.variant == "sokoban-cell":
            registry.update({
                "on_pink_cell": lambda s: s.agent in self.pinks,
                "pink_on_right": lambda s: add(s.agent, DIRECTIONS["right"]) in self.pinks,
                "pink_on_left": lambda s: add(s.agent, DIRECTIONS["left"]) in self.pinks,
                "pink_above": lambda s: add(s.agent, DIRECTIONS["up"]) in self.pinks,
                "pink_below": lambda s: add(s.agent, DIRECTIONS["down"]) in self.pinks,
                "box_on_target": lambda s: s.box == self.target,
            })
        else:
            registry.update({
                "switch_on": lambda s: s.switch_on,
                "on_switch_cell": lambda s: s.agent == self.switch_pos,
            })
        return registry

    def base_concept_names(self) -> tuple:
        if self.variant == "sokoban-cell":
            return (
                "on_pink_cell", "pink_on_right", "pink_on_left", "pink_above", "pink_below",
                "box_on_right", "box_on_left", "box_above", "box_below", "box_on_target",
            )
        return (
            "switch_on", "on_switch_cell",
            "box_on_right", "box_on_left", "box_above", "box_below",
        )

    # --- ground truth ---------------------------------------------------------

    _OPPOSITE_BOX = {
        "up": ("box_above", "box_below", "box_on_left", "box_on_right"),
        "down": ("box_below", "box_above", "box_on_left", "box_on_right"),
        "left": ("box_on_left", "box_on_right", "box_above", "box_below"),
        "right": ("box_on_right", "box_on_left", "box_above", "box_below"),
    }

    def _push_from_switch_impossible(self, direction: str) -> bool:
        """Geometric check: pushing this way while standing on the switch can never execute."""
        if self.switch_pos is None:
            return False
        d = DIRECTIONS[direction]
        return self._is_wall(add(self.switch_pos, d)) or self._is_wall(add(add(self.switch_pos, d), d))

    def ground_truth(self) -> GroundTruth:
        preconditions: dict = {"noop": frozenset()}
        for direction in ("up", "down", "left", "right"):
            here, *others = self._OPPOSITE_BOX[direction]
            preconditions[f"move-{direction}"] = frozenset({f"not_{here}"})
            push_set = {here} | {f"not_{o}" for o in others}
            if self.variant == "sokoban-switch-prec":
                push_set.add("switch_on")
            if self.switch_pos is not None and self._push_from_switch_impossible(direction):
                push_set.add("not_on_switch_cell")
            preconditions[f"push-{direction}"] = frozenset(push_set)
        if self.variant == "sokoban-switch-cost":
            rules = tuple(
                CostRule(f"push-{d}", frozenset({"not_switch_on"}), 10.0)
                for d in ("up", "down", "left", "right")
            )
        elif self.variant == "sokoban-cell":
            rules = tuple(
                CostRule(f"push-{d}", frozenset({"on_pink_cell"}), 10.0)
                for d in ("up", "down", "left", "right")
            )
        else:
            rules = ()
        return GroundTruth(preconditions=preconditions, cost_rules=rules)

    # --- presentation -----------------------------------------------------------

    def describe_state(self, state: SokState) -> dict:
        info = {
            "agent": list(state.agent),
            "box": list(state.box),
        }
        if self.switch_pos is not None:
            info["switch_on"] = bool(state.switch_on)
        return info

    def static_layout(self) -> list:
        """Map rows with dynamic glyphs cleared (agent/box replaced by floor)."""
        rows = []
        for row in self.spec.rows:
            rows.append(row.replace(AGENT, FLOOR).replace(BOX, FLOOR))
        return rows
