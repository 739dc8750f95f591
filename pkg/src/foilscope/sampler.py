"""Seeded random-walk state sampling around anchor states.

An episode picks a uniform anchor, emits it, then takes up to ``walk_length``
uniformly random actions, emitting each successor. A ⊥ transition ends the
episode early without emission. Every emission — anchors included — costs one
unit of the stream budget, so a budget of ℓ yields exactly ℓ states and at
most ℓ·walk_length walk-step simulate calls.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np

from .model import (
    BOTTOM,
    END,
    ActionId,
    BlackBoxModel,
    ContractViolation,
    StateHandle,
    Trajectory,
    simulate,
)


@dataclass(frozen=True)
class SamplerConfig:
    anchors: tuple
    walk_length: int = 10
    budget: int = 500
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.anchors:
            raise ContractViolation("sampler needs at least one anchor state")
        if any(s is BOTTOM or s is END for s in self.anchors):
            raise ContractViolation("anchors must be live states")
        if self.walk_length < 0:
            raise ContractViolation("walk_length must be nonnegative")
        if self.budget < 0:
            raise ContractViolation("budget must be nonnegative")

    def with_seed(self, seed: int) -> "SamplerConfig":
        return replace(self, seed=seed)


def walk_rng(seed: int) -> np.random.Generator:
    """Walk-stream generator for a sampler seed (shared by every mode)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, 0]))


def observation_rng(seed: int) -> np.random.Generator:
    """Observation-stream generator, independent of the walk stream."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, 1]))


def derive_seed(*parts: int) -> int:
    """Stable 64-bit child seed from integer parts (batch/stream separation)."""
    words = np.random.SeedSequence([int(p) & 0xFFFFFFFF for p in parts]).generate_state(2)
    return int(words.view(np.uint64)[0])


def anchors_from_trajectories(model: BlackBoxModel, *trajectories: Trajectory) -> tuple:
    """Deduplicated live states of the given trajectories, in first-seen order.

    Drops ⊥ (a failed trajectory's final entry) and the model's terminal
    states, so the result is directly usable as ``SamplerConfig.anchors``.
    """
    terminal = set(getattr(model, "terminal_states", ()))
    seen: set = set()
    out = []
    for trajectory in trajectories:
        for state in trajectory.states:
            if state is BOTTOM or state in terminal or state in seen:
                continue
            seen.add(state)
            out.append(state)
    if not out:
        raise ContractViolation("trajectories contain no live states to anchor at")
    return tuple(out)


def sample_states(model: BlackBoxModel, config: SamplerConfig) -> Iterator[StateHandle]:
    """Yield exactly ``config.budget`` sampled states (see module docstring).

    Deterministic for a fixed seed: the walk generator is consumed in a fixed
    order (anchor index, then one action index per attempted step).
    """
    rng = walk_rng(config.seed)
    actions = tuple(model.actions())
    terminal = getattr(model, "terminal_states", ())
    emitted = 0
    anchors = config.anchors
    while emitted < config.budget:
        state = anchors[int(rng.integers(0, len(anchors)))]
        yield state
        emitted += 1
        steps = 0
        while steps < config.walk_length and emitted < config.budget:
            action = actions[int(rng.integers(0, len(actions)))]
            out = simulate(model, state, action)
            steps += 1
            if out.failed or any(out.state is t for t in terminal):
                break
            state = out.state
            yield state
            emitted += 1


def sample_executable(
    model: BlackBoxModel, config: SamplerConfig, action: ActionId
) -> Iterator[tuple]:
    """Filter the sampled stream to states where ``action`` executes.

    Yields ``(state, outcome)`` pairs; the executability probes are extra
    simulate calls on top of the walk itself.
    """
    for state in sample_states(model, config):
        out = simulate(model, state, action)
        if not out.failed:
            yield state, out
