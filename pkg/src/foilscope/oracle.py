"""Brute-force ground truth: exhaustive local regions and exact references.

Everything here trades scale for certainty — BFS-complete region enumeration,
exact preconditions/abstract costs by full scans, and a tabulated symbolic
model (one indicator concept per state) that is correct by construction. The
searchers are validated against these references, never the other way around.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .concepts import ConceptId, ConceptVocabulary, evaluate_concepts
from .model import (
    BOTTOM,
    ActionId,
    BlackBoxModel,
    ContractViolation,
    StateHandle,
    simulate,
)

#: Default BFS radius: wide enough to cover every bundled plan/foil
#: neighborhood plus the sampler's walk reach.
DEFAULT_RADIUS = 12


def enumerate_local_states(
    model: BlackBoxModel,
    anchors: Iterable[StateHandle],
    radius: int = DEFAULT_RADIUS,
    cap: int = 200_000,
) -> tuple:
    """All live states within ``radius`` transitions of any anchor (BFS order).

    Deterministic: anchors are expanded in the given order, actions in index
    order. Exceeding ``cap`` states raises rather than silently truncating.
    """
    if radius < 0:
        raise ContractViolation("radius must be nonnegative")
    actions = tuple(model.actions())
    terminal = set(getattr(model, "terminal_states", ()))
    seen: set = set()
    order = []
    frontier: deque = deque()
    for anchor in anchors:
        if anchor is BOTTOM or anchor in terminal:
            raise ContractViolation("anchors must be live states")
        if anchor in seen:
            continue
        seen.add(anchor)
        order.append(anchor)
        frontier.append((anchor, 0))
    if not order:
        raise ContractViolation("need at least one anchor state")
    while frontier:
        state, depth = frontier.popleft()
        if depth >= radius:
            continue
        for action in actions:
            out = simulate(model, state, action)
            nxt = out.state
            if out.failed or nxt in terminal or nxt in seen:
                continue
            seen.add(nxt)
            order.append(nxt)
            if len(order) > cap:
                raise ContractViolation(f"local region exceeds cap of {cap} states")
            frontier.append((nxt, depth + 1))
    return tuple(order)


def executable_states(
    model: BlackBoxModel, action: ActionId, local_states: Sequence[StateHandle]
) -> tuple:
    """The subset of the region where ``action`` executes, preserving order."""
    return tuple(s for s in local_states if not simulate(model, s, action).failed)


def true_preconditions(
    action: ActionId,
    local_states: Sequence[StateHandle],
    vocab: ConceptVocabulary,
    *,
    model: BlackBoxModel,
) -> frozenset | None:
    """Concepts true in every region state where ``action`` executes.

    Returns ``None`` when the action executes nowhere in the region (the
    precondition is then unconstrained by this region).
    """
    if not local_states:
        raise ContractViolation("local_states must be nonempty")
    surviving = None
    for state in local_states:
        if simulate(model, state, action).failed:
            continue
        mask = evaluate_concepts(vocab, state).mask
        surviving = mask if surviving is None else (surviving & mask)
    if surviving is None:
        return None
    return frozenset(
        vocab.concept(i) for i in range(len(vocab)) if (surviving >> i) & 1
    )


def true_abstract_cost(
    subset: Iterable[ConceptId],
    action: ActionId,
    local_states: Sequence[StateHandle],
    *,
    model: BlackBoxModel,
    vocab: ConceptVocabulary,
) -> float | None:
    """Exact minimum cost of ``action`` over region states containing ``subset``.

    The empty subset gives the unconditioned minimum. Returns ``None`` when no
    executable region state contains the subset (no support).
    """
    wanted = frozenset(subset)
    indices = {c.index for c in wanted}
    best = None
    for state in local_states:
        out = simulate(model, state, action)
        if out.failed:
            continue
        vec = evaluate_concepts(vocab, state)
        if not all(vec.contains(i) for i in indices):
            continue
        if best is None or out.cost < best:
            best = out.cost
    return best


# --- symbolic approximation ----------------------------------------------------


@dataclass(frozen=True)
class SymbolicModel:
    """Tabulated concept-level model: dynamics and costs over concept maps.

    ``successors`` maps (concept mask, action index) to the successor's
    concept mask, or to ``None`` for ⊥. ``costs`` maps the same keys to step
    costs. ``goal_mask`` is the concept mask shared by all goal states, or
    ``None`` when the model does not commit to a goal condition.
    """

    vocab: ConceptVocabulary
    successors: dict
    costs: dict
    goal_mask: int | None = None


@dataclass(frozen=True)
class Violation:
    condition: str  # "a" dynamics | "b" cost | "c" goal
    detail: str
    state: StateHandle = field(default=None, repr=False)
    action: ActionId | None = None


@dataclass(frozen=True)
class ApproximationReport:
    violations: tuple
    states_checked: int
    pairs_checked: int
    total: bool  # every (mask, action) pair seen had a table entry

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_local_approximation(
    symbolic: SymbolicModel,
    model: BlackBoxModel,
    local_states: Sequence[StateHandle],
    vocab: ConceptVocabulary,
    *,
    goal=None,
) -> ApproximationReport:
    """Check the symbolic tables against the black box on a region.

    Three conditions, each state-by-state: (a) the tabulated successor mask
    equals the true successor's concept map (with ⊥ agreeing on both sides),
    (b) the tabulated cost equals the true step cost, and (c) when ``goal``
    is given and the region contains goal states, the symbolic goal mask
    equals the intersection of their concept maps.
    """
    actions = tuple(model.actions())
    terminal = set(getattr(model, "terminal_states", ()))
    violations = []
    pairs = 0
    total = True
    for state in local_states:
        mask = evaluate_concepts(vocab, state).mask
        for action in actions:
            pairs += 1
            key = (mask, action.index)
            out = simulate(model, state, action)
            if key not in symbolic.successors:
                total = False
                violations.append(Violation("a", "no successor entry", state, action))
            else:
                if out.failed or out.state in terminal:
                    want = None
                else:
                    want = evaluate_concepts(vocab, out.state).mask
                got = symbolic.successors[key]
                if got != want:
                    violations.append(
                        Violation("a", f"successor mask {got!r} != true {want!r}", state, action)
                    )
            if key not in symbolic.costs:
                total = False
                violations.append(Violation("b", "no cost entry", state, action))
            elif symbolic.costs[key] != out.cost:
                violations.append(
                    Violation(
                        "b", f"cost {symbolic.costs[key]!r} != true {out.cost!r}", state, action
                    )
                )
    if goal is not None:
        goal_masks = [
            evaluate_concepts(vocab, s).mask for s in local_states if goal(s)
        ]
        if goal_masks:
            want = goal_masks[0]
            for m in goal_masks[1:]:
                want &= m
            if symbolic.goal_mask != want:
                violations.append(
                    Violation("c", f"goal mask {symbolic.goal_mask!r} != true {want!r}")
                )
    return ApproximationReport(
        violations=tuple(violations),
        states_checked=len(local_states),
        pairs_checked=pairs,
        total=total,
    )


def construct_trivial_approximation(
    model: BlackBoxModel, local_states: Sequence[StateHandle]
) -> SymbolicModel:
    """Indicator-concept construction: one concept per region state.

    Every region state gets a detector that is true exactly there, making the
    concept map a perfect state identifier; dynamics and costs are then read
    off the black box transition by transition. A successor outside the region
    has no indicator true, so its tabulated concept map is the empty mask —
    still in exact agreement with the detectors.
    """
    states = tuple(local_states)
    if not states:
        raise ContractViolation("cannot build an approximation over zero states")
    index_of = {s: i for i, s in enumerate(states)}
    if len(index_of) != len(states):
        raise ContractViolation("local_states contains duplicates")

    def make_detector(target: StateHandle):
        return lambda s: s == target

    vocab = ConceptVocabulary(
        names=[f"state_{i}" for i in range(len(states))],
        detectors=[make_detector(s) for s in states],
    )
    successors: dict = {}
    costs: dict = {}
    actions = tuple(model.actions())
    terminal = set(getattr(model, "terminal_states", ()))
    for i, state in enumerate(states):
        mask = 1 << i
        for action in actions:
            out = simulate(model, state, action)
            key = (mask, action.index)
            costs[key] = out.cost
            if out.failed or out.state in terminal:
                successors[key] = None
            elif out.state in index_of:
                successors[key] = 1 << index_of[out.state]
            else:
                successors[key] = 0  # outside the region: no indicator is true
    return SymbolicModel(vocab=vocab, successors=successors, costs=costs, goal_mask=None)


def with_goal_mask(symbolic: SymbolicModel, model_goal, local_states: Sequence[StateHandle]) -> SymbolicModel:
    """Return a copy of ``symbolic`` with its goal mask tabulated from the region."""
    goal_masks = [
        evaluate_concepts(symbolic.vocab, s).mask for s in local_states if model_goal(s)
    ]
    mask = None
    if goal_masks:
        mask = goal_masks[0]
        for m in goal_masks[1:]:
            mask &= m
    return SymbolicModel(
        vocab=symbolic.vocab,
        successors=symbolic.successors,
        costs=symbolic.costs,
        goal_mask=mask,
    )


def symbolic_execute(symbolic: SymbolicModel, start_mask: int, actions: Sequence[ActionId]):
    """Run an action sequence through the tables; returns (final mask | None, total cost).

    A missing table entry or a ⊥ entry ends execution with mask ``None``;
    costs accumulate over the steps actually taken (matching how failed
    trajectories report the attempted step's cost).
    """
    mask = start_mask
    cost = 0.0
    for action in actions:
        key = (mask, action.index)
        if key not in symbolic.costs:
            return None, cost
        cost += symbolic.costs[key]
        nxt = symbolic.successors.get(key)
        if nxt is None:
            return None, cost
        mask = nxt
    return mask, cost
