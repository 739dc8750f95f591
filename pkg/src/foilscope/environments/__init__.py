"""Bundled benchmark environments and the map/scenario catalog.

Each environment is a deterministic grid game implementing the black-box
model protocol plus introspection hooks (concept detectors, ground truth)
used by the oracle and the test harness. Maps ship as text assets; plans and
foils as mnemonic-per-line action files.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources

from ..concepts import ConceptVocabulary, extend_with_negations
from ..model import ActionId, ContrastiveQuery
from .base import CostRule, EnvironmentBase, GroundTruth
from .grid import (
    ALL_GLYPHS,
    DIRECTIONS,
    GridSpec,
    KEYQUEST_VARIANT,
    MapError,
    SOKOBAN_VARIANTS,
    add,
    parse_grid_text,
)
from .keyquest import KeyQuestEnv, KQState
from .sokoban import SokobanEnv, SokState

__all__ = [
    "ALL_GLYPHS",
    "BundledMap",
    "CostRule",
    "DIRECTIONS",
    "EnvironmentBase",
    "GridSpec",
    "GroundTruth",
    "KEYQUEST_VARIANT",
    "KQState",
    "KeyQuestEnv",
    "LoadedScenario",
    "MapError",
    "SCENARIOS",
    "SOKOBAN_VARIANTS",
    "Scenario",
    "SokState",
    "SokobanEnv",
    "add",
    "bundled_maps",
    "load_actions",
    "load_map",
    "load_scenario",
    "parse_grid",
    "parse_grid_text",
    "read_asset_text",
    "vocabulary_for",
]


def parse_grid(text: str, variant: str | None = None, hazard_name: str | None = None) -> EnvironmentBase:
    """Parse map text and build the environment for its variant."""
    spec = parse_grid_text(text, variant=variant)
    if spec.variant in SOKOBAN_VARIANTS:
        return SokobanEnv(spec)
    return KeyQuestEnv(spec, hazard_name=hazard_name or "skull")


def vocabulary_for(env: EnvironmentBase) -> ConceptVocabulary:
    """The environment's full concept vocabulary, closed under negation."""
    registry = env.detector_registry()
    names = env.base_concept_names()
    base = ConceptVocabulary(names=names, detectors=[registry[n] for n in names])
    return extend_with_negations(base)


@dataclass(frozen=True)
class BundledMap:
    map_id: str
    asset: str
    title: str
    variants: tuple
    default_variant: str | None = None  # None: use the map file's header
    hazard_name: str | None = None


_BUNDLED = (
    BundledMap(
        map_id="sokoban_switch",
        asset="sokoban_switch.map",
        title="Sokoban with a toggle switch",
        variants=("sokoban-switch-prec", "sokoban-switch-cost"),
    ),
    BundledMap(
        map_id="sokoban_cell",
        asset="sokoban_cell.map",
        title="Sokoban with a pink cost region",
        variants=("sokoban-cell",),
    ),
    BundledMap(
        map_id="key_quest_s1",
        asset="key_quest_s1.map",
        title="Key quest: ropes, ladders and a skull",
        variants=(KEYQUEST_VARIANT,),
        hazard_name="skull",
    ),
    BundledMap(
        map_id="key_quest_s4",
        asset="key_quest_s4.map",
        title="Key quest: ledges above a crab",
        variants=(KEYQUEST_VARIANT,),
        hazard_name="crab",
    ),
)

_BY_ID = {entry.map_id: entry for entry in _BUNDLED}

# Aliases pin a variant choice onto a shared map file.
_ALIASES = {
    "sokoban_switch_prec": ("sokoban_switch", "sokoban-switch-prec"),
    "sokoban_switch_cost": ("sokoban_switch", "sokoban-switch-cost"),
}


def bundled_maps() -> tuple:
    """The canonical bundled maps, in catalog order."""
    return _BUNDLED


def read_asset_text(name: str) -> str:
    return resources.files(__name__).joinpath("assets", name).read_text(encoding="utf-8")


def load_map(source: str, variant: str | None = None) -> EnvironmentBase:
    """Build an environment from a bundled map id, an alias, or a file path."""
    hazard = None
    if source in _ALIASES:
        base_id, alias_variant = _ALIASES[source]
        variant = variant or alias_variant
        source = base_id
    if source in _BY_ID:
        entry = _BY_ID[source]
        text = read_asset_text(entry.asset)
        variant = variant or entry.default_variant
        hazard = entry.hazard_name
    elif os.path.exists(source):
        with open(source, encoding="utf-8") as handle:
            text = handle.read()
    else:
        raise MapError(f"unknown map {source!r}: not a bundled id or readable file")
    return parse_grid(text, variant=variant, hazard_name=hazard)


def _parse_action_lines(env: EnvironmentBase, text: str) -> tuple:
    actions = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            actions.append(env.action(line))
        except Exception as exc:
            raise MapError(f"line {lineno}: {exc}") from exc
    return tuple(actions)


def load_actions(env: EnvironmentBase, source: str) -> tuple:
    """Read a mnemonic-per-line action file (bundled asset name or path)."""
    if os.path.exists(source):
        with open(source, encoding="utf-8") as handle:
            text = handle.read()
    else:
        text = read_asset_text(source)
    return _parse_action_lines(env, text)


@dataclass(frozen=True)
class Scenario:
    """A bundled plan/foil pair with its known correct explanation."""

    scenario_id: str
    map_id: str
    plan_asset: str
    foil_asset: str
    kind: str  # "precondition" | "cost"
    expected_concept: str
    fail_index: int | None = None  # precondition scenarios: failing foil step
    default_budget: int = 500


SCENARIOS = {
    scenario.scenario_id: scenario
    for scenario in (
        Scenario(
            scenario_id="sokoban-switch-prec",
            map_id="sokoban_switch_prec",
            plan_asset="sokoban_switch.plan",
            foil_asset="sokoban_switch.foil",
            kind="precondition",
            expected_concept="switch_on",
            fail_index=0,
        ),
        Scenario(
            scenario_id="sokoban-switch-cost",
            map_id="sokoban_switch_cost",
            plan_asset="sokoban_switch.plan",
            foil_asset="sokoban_switch.foil",
            kind="cost",
            expected_concept="not_switch_on",
        ),
        Scenario(
            scenario_id="sokoban-cell",
            map_id="sokoban_cell",
            plan_asset="sokoban_cell.plan",
            foil_asset="sokoban_cell.foil",
            kind="cost",
            expected_concept="on_pink_cell",
        ),
        Scenario(
            scenario_id="key-quest-a",
            map_id="key_quest_s1",
            plan_asset="key_quest_s1.plan",
            foil_asset="key_quest_s1_a.foil",
            kind="precondition",
            expected_concept="not_on_rope",
            fail_index=9,
            default_budget=750,
        ),
        Scenario(
            scenario_id="key-quest-b",
            map_id="key_quest_s1",
            plan_asset="key_quest_s1.plan",
            foil_asset="key_quest_s1_b.foil",
            kind="precondition",
            expected_concept="not_on_left_ledge",
            fail_index=3,
            default_budget=750,
        ),
        Scenario(
            scenario_id="key-quest-c",
            map_id="key_quest_s1",
            plan_asset="key_quest_s1.plan",
            foil_asset="key_quest_s1_c.foil",
            kind="precondition",
            expected_concept="not_skull_on_left",
            fail_index=16,
            default_budget=750,
        ),
        Scenario(
            scenario_id="key-quest-d",
            map_id="key_quest_s4",
            plan_asset="key_quest_s4.plan",
            foil_asset="key_quest_s4_d.foil",
            kind="precondition",
            expected_concept="is_clear_down_of_crab",
            fail_index=2,
            default_budget=750,
        ),
        Scenario(
            scenario_id="key-quest-attack",
            map_id="key_quest_s1",
            plan_asset="key_quest_s1.plan",
            foil_asset="key_quest_s1_attack.foil",
            kind="cost",
            expected_concept="skull_on_left",
            default_budget=750,
        ),
    )
}


@dataclass(frozen=True)
class LoadedScenario:
    scenario: Scenario
    env: EnvironmentBase
    query: ContrastiveQuery

    @property
    def plan(self) -> tuple:
        return self.query.plan

    @property
    def foil(self) -> tuple:
        return self.query.foil


def load_scenario(scenario_id: str) -> LoadedScenario:
    try:
        scenario = SCENARIOS[scenario_id]
    except KeyError:
        raise MapError(f"unknown scenario {scenario_id!r}") from None
    env = load_map(scenario.map_id)
    plan = load_actions(env, scenario.plan_asset)
    foil = load_actions(env, scenario.foil_asset)
    query = ContrastiveQuery(initial=env.initial_state(), plan=plan, foil=foil, goal=env.goal)
    return LoadedScenario(scenario=scenario, env=env, query=query)
