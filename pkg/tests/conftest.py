"""Shared fixtures: two tiny hand-checkable worlds plus scenario helpers.

LineWorld and OpenGrid exist so unit tests can assert against quantities
computed by hand (state counts, costs, true preconditions) instead of
against the code under test.
"""
from __future__ import annotations

import pytest

from foilscope.concepts import ConceptVocabulary, extend_with_negations
from foilscope.model import BOTTOM, ActionId, TransitionOutcome

_FAIL = None  # computed lazily: TransitionOutcome(BOTTOM, 0.0)


def _fail() -> TransitionOutcome:
    global _FAIL
    if _FAIL is None:
        _FAIL = TransitionOutcome(BOTTOM, 0.0)
    return _FAIL


class LineWorld:
    """Positions 0..top on a line.

    Actions (all validated by hand in the tests):
      fwd    i -> i+1, cost 1, fails at top
      back   i -> i-1, cost 1, fails at 0
      hop    i -> i+2, cost 3, fails above top-2
      charge i -> i+1, cost 5, executes only on even i (and below top)
    """

    def __init__(self, top: int = 4):
        self.top = top
        self._actions = (
            ActionId("fwd", 0),
            ActionId("back", 1),
            ActionId("hop", 2),
            ActionId("charge", 3),
        )

    def actions(self):
        return self._actions

    def initial_state(self):
        return 0

    def simulate(self, state, action):
        if action.label == "fwd":
            return TransitionOutcome(state + 1, 1.0) if state < self.top else _fail()
        if action.label == "back":
            return TransitionOutcome(state - 1, 1.0) if state > 0 else _fail()
        if action.label == "hop":
            return TransitionOutcome(state + 2, 3.0) if state + 2 <= self.top else _fail()
        if action.label == "charge":
            if state % 2 == 0 and state < self.top:
                return TransitionOutcome(state + 1, 5.0)
            return _fail()
        raise AssertionError(f"unexpected action {action!r}")

    def goal(self, state) -> bool:
        return state == 3


class OpenGrid:
    """A 3x3 open grid, four unit-cost moves failing off the edge."""

    def __init__(self):
        self._actions = tuple(
            ActionId(label, i)
            for i, label in enumerate(("north", "south", "west", "east"))
        )
        self._moves = {"north": (-1, 0), "south": (1, 0), "west": (0, -1), "east": (0, 1)}

    def actions(self):
        return self._actions

    def initial_state(self):
        return (1, 1)

    def simulate(self, state, action):
        dr, dc = self._moves[action.label]
        r, c = state[0] + dr, state[1] + dc
        if 0 <= r <= 2 and 0 <= c <= 2:
            return TransitionOutcome((r, c), 1.0)
        return _fail()

    def goal(self, state) -> bool:
        return state == (0, 2)


@pytest.fixture
def line():
    return LineWorld()


@pytest.fixture
def line_vocab():
    base = ConceptVocabulary(
        names=("even", "at_zero", "high"),
        detectors=(
            lambda s: s % 2 == 0,
            lambda s: s == 0,
            lambda s: s >= 3,
        ),
    )
    return extend_with_negations(base)


@pytest.fixture
def grid():
    return OpenGrid()


def action_by_label(model, label: str) -> ActionId:
    return next(a for a in model.actions() if a.label == label)
