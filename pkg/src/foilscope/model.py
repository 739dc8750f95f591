"""Black-box decision-model abstraction.

Everything downstream (sampling, the two searches, the oracle) talks to an
environment exclusively through ``simulate``: states are opaque hashable
handles, actions are indexed labels, and a failed transition lands in the
absorbing state ``BOTTOM``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence, Union, runtime_checkable


class ContractViolation(Exception):
    """An operation was called outside its contract (bad state/action)."""


class InvalidPlanError(Exception):
    """The plan itself does not execute to the goal; nothing can be contrasted."""


class _Absorber:
    _instance = None

    def __new__(cls) -> "_Absorber":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return "<bottom>"


class _EndMarker:
    _instance = None

    def __new__(cls) -> "_EndMarker":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return "<end>"


#: Absorbing failure state. Simulating from it yields it again.
BOTTOM = _Absorber()

#: Distinguished terminal state reached by the synthetic goal action.
END = _EndMarker()

StateHandle = object


@dataclass(frozen=True)
class ActionId:
    """A named action slot in the environment's fixed action list."""

    label: str
    index: int

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class TransitionOutcome:
    """Result of one simulated step: successor handle plus step cost."""

    state: StateHandle
    cost: float

    @property
    def failed(self) -> bool:
        return self.state is BOTTOM


@runtime_checkable
class BlackBoxModel(Protocol):
    def actions(self) -> Sequence[ActionId]: ...

    def simulate(self, state: StateHandle, action: ActionId) -> TransitionOutcome: ...


def simulate(model: BlackBoxModel, state: StateHandle, action: ActionId) -> TransitionOutcome:
    """Validated single-step simulation.

    ``BOTTOM`` absorbs with zero cost; unknown action indices are contract
    violations rather than failures, so callers never mistake a typo for ⊥.
    """
    if state is BOTTOM:
        return TransitionOutcome(BOTTOM, 0.0)
    known = model.actions()
    if action.index < 0 or action.index >= len(known) or known[action.index].label != action.label:
        raise ContractViolation(f"unknown action {action.label!r} (index {action.index})")
    return model.simulate(state, action)


@dataclass(frozen=True)
class Trajectory:
    """States and per-step costs of an executed action sequence.

    ``states`` always includes the initial state; when a step fails the final
    entry is ``BOTTOM`` and ``terminated_at`` is that step's index.
    """

    states: tuple
    costs: tuple
    terminated_at: Union[int, None] = None

    def __post_init__(self) -> None:
        if len(self.states) != len(self.costs) + 1:
            raise ContractViolation("trajectory must have one more state than costs")

    @property
    def succeeded(self) -> bool:
        return self.terminated_at is None

    @property
    def total_cost(self) -> float:
        return float(sum(self.costs))

    def state_before(self, step: int) -> StateHandle:
        return self.states[step]


def execute_sequence(model: BlackBoxModel, initial: StateHandle, actions: Sequence[ActionId]) -> Trajectory:
    """Run ``actions`` from ``initial``, stopping at the first ⊥ transition.

    The failing step's reported cost is kept (it is the environment's attempted
    step cost), but nothing after it executes.
    """
    states = [initial]
    costs: list = []
    current = initial
    for i, action in enumerate(actions):
        out = simulate(model, current, action)
        costs.append(out.cost)
        states.append(out.state)
        if out.failed:
            return Trajectory(tuple(states), tuple(costs), terminated_at=i)
        current = out.state
    return Trajectory(tuple(states), tuple(costs), terminated_at=None)


@dataclass(frozen=True)
class ContrastiveQuery:
    """A plan/foil pair over one model, with the goal test they both target."""

    initial: StateHandle
    plan: tuple
    foil: tuple
    goal: Callable[[StateHandle], bool]

    def __post_init__(self) -> None:
        if not self.plan:
            raise ContractViolation("plan must be nonempty")
        if not self.foil:
            raise ContractViolation("foil must be nonempty")


GOAL_ACTION_LABEL = "achieve-goal"


class GoalCompiledModel:
    """Wraps a model with a synthetic zero-cost goal action.

    The goal action moves any goal-satisfying state to ``END`` and everything
    else to ⊥, which turns "reached the goal" into an ordinary executability
    question. ``END`` is terminal: every action from it fails, and samplers
    treat it like an episode boundary (see ``terminal_states``).
    """

    def __init__(self, inner: BlackBoxModel, goal: Callable[[StateHandle], bool]):
        self._inner = inner
        self._goal = goal
        base = tuple(inner.actions())
        self._actions = base + (ActionId(GOAL_ACTION_LABEL, len(base)),)
        self.goal_action = self._actions[-1]
        self.terminal_states = (END,)

    def actions(self) -> Sequence[ActionId]:
        return self._actions

    def simulate(self, state: StateHandle, action: ActionId) -> TransitionOutcome:
        if state is END:
            return TransitionOutcome(BOTTOM, 0.0)
        if action.index == self.goal_action.index:
            if self._goal(state):
                return TransitionOutcome(END, 0.0)
            return TransitionOutcome(BOTTOM, 0.0)
        return self._inner.simulate(state, action)


def compile_goal_action(model: BlackBoxModel, query: ContrastiveQuery) -> tuple:
    """Append the synthetic goal action to the model and to both sequences."""
    wrapped = GoalCompiledModel(model, query.goal)
    ga = wrapped.goal_action
    compiled = ContrastiveQuery(
        initial=query.initial,
        plan=tuple(query.plan) + (ga,),
        foil=tuple(query.foil) + (ga,),
        goal=query.goal,
    )
    return wrapped, compiled


@dataclass(frozen=True)
class InvalidFoil:
    """The foil broke at ``fail_index``: ``fail_action`` failed in ``fail_state``."""

    fail_index: int
    fail_state: StateHandle
    fail_action: ActionId
    foil_trajectory: Trajectory = field(repr=False, compare=False, default=None)
    plan_trajectory: Trajectory = field(repr=False, compare=False, default=None)


@dataclass(frozen=True)
class CostlierFoil:
    """The foil executes to the goal but strictly costs more than the plan."""

    plan_cost: float
    foil_cost: float
    foil_trajectory: Trajectory = field(repr=False, compare=False, default=None)
    plan_trajectory: Trajectory = field(repr=False, compare=False, default=None)


@dataclass(frozen=True)
class FoilPreferred:
    """The foil executes to the goal at no extra cost; the agent can adopt it."""

    plan_cost: float
    foil_cost: float
    foil_trajectory: Trajectory = field(repr=False, compare=False, default=None)
    plan_trajectory: Trajectory = field(repr=False, compare=False, default=None)


QueryKind = Union[InvalidFoil, CostlierFoil, FoilPreferred]


def classify_query(model: BlackBoxModel, query: ContrastiveQuery) -> QueryKind:
    """Decide which of the three contrastive cases the foil falls into.

    Runs both sequences on the goal-compiled model. A plan that does not
    itself execute to the goal is a caller error (``InvalidPlanError``) —
    plan validity is a precondition of the whole dialogue, not a query kind.
    Ties in cost go to ``FoilPreferred``.
    """
    wrapped, compiled = compile_goal_action(model, query)
    plan_traj = execute_sequence(wrapped, compiled.initial, compiled.plan)
    if not plan_traj.succeeded:
        raise InvalidPlanError(f"plan failed at step {plan_traj.terminated_at}")
    foil_traj = execute_sequence(wrapped, compiled.initial, compiled.foil)
    if not foil_traj.succeeded:
        i = foil_traj.terminated_at
        return InvalidFoil(
            fail_index=i,
            fail_state=foil_traj.state_before(i),
            fail_action=compiled.foil[i],
            foil_trajectory=foil_traj,
            plan_trajectory=plan_traj,
        )
    plan_cost = plan_traj.total_cost
    foil_cost = foil_traj.total_cost
    if foil_cost > plan_cost:
        return CostlierFoil(plan_cost=plan_cost, foil_cost=foil_cost,
                            foil_trajectory=foil_traj, plan_trajectory=plan_traj)
    return FoilPreferred(plan_cost=plan_cost, foil_cost=foil_cost,
                         foil_trajectory=foil_traj, plan_trajectory=plan_traj)


class CountingModel:
    """Pass-through wrapper counting simulate calls (budget instrumentation)."""

    def __init__(self, inner: BlackBoxModel):
        self._inner = inner
        self.calls = 0
        if hasattr(inner, "terminal_states"):
            self.terminal_states = inner.terminal_states

    def actions(self) -> Sequence[ActionId]:
        return self._inner.actions()

    def simulate(self, state: StateHandle, action: ActionId) -> TransitionOutcome:
        self.calls += 1
        return self._inner.simulate(state, action)
