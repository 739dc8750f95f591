"""Concept vocabularies: boolean detectors, noisy observation, marginals.

A vocabulary is an ordered tuple of named detectors over live states. States
are mapped to fixed-width boolean vectors (stored as bitmasks); the absorbing
state has no concept map by contract. Vocabularies grow only by returning new
objects (negation closure, compound clauses) so indices stay stable.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .model import BOTTOM, END, ContractViolation, StateHandle


@dataclass(frozen=True)
class ConceptId:
    name: str
    index: int

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Provenance:
    """How a concept came to exist: authored, negation of another, or a clause."""

    kind: str  # "base" | "negation" | "compound"
    of: Union[str, None] = None          # negation: the positive concept's name
    clause: Union[tuple, None] = None    # compound: literal tokens ("name" / "!name")


@dataclass(frozen=True)
class ConceptVector:
    """Fixed-width boolean vector over a vocabulary, packed into a bitmask."""

    width: int
    mask: int

    @classmethod
    def from_bools(cls, values: Sequence[bool]) -> "ConceptVector":
        m = 0
        for i, v in enumerate(values):
            if v:
                m |= 1 << i
        return cls(width=len(values), mask=m)

    def contains(self, index: int) -> bool:
        return bool((self.mask >> index) & 1)

    def true_indices(self) -> tuple:
        return tuple(i for i in range(self.width) if (self.mask >> i) & 1)

    def true_set(self) -> frozenset:
        return frozenset(self.true_indices())

    def superset_of(self, indices: Iterable[int]) -> bool:
        for i in indices:
            if not (self.mask >> i) & 1:
                return False
        return True

    def __len__(self) -> int:
        return self.width


class ConceptVocabulary:
    """Ordered, immutable collection of named boolean detectors."""

    def __init__(
        self,
        names: Sequence[str],
        detectors: Sequence[Callable[[StateHandle], bool]],
        provenance: Union[Sequence[Provenance], None] = None,
    ):
        if len(names) != len(detectors):
            raise ContractViolation("names and detectors must align")
        if len(set(names)) != len(names):
            raise ContractViolation("concept names must be unique")
        self._names = tuple(names)
        self._detectors = tuple(detectors)
        if provenance is None:
            provenance = tuple(Provenance("base") for _ in names)
        self._provenance = tuple(provenance)
        self._concepts = tuple(ConceptId(n, i) for i, n in enumerate(self._names))
        self._index = {n: i for i, n in enumerate(self._names)}

    def __len__(self) -> int:
        return len(self._names)

    def __iter__(self):
        return iter(self._concepts)

    @property
    def concepts(self) -> tuple:
        return self._concepts

    @property
    def names(self) -> tuple:
        return self._names

    @property
    def provenance(self) -> tuple:
        return self._provenance

    def concept(self, index: int) -> ConceptId:
        return self._concepts[index]

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ContractViolation(f"unknown concept {name!r}") from None

    def detector(self, index: int) -> Callable[[StateHandle], bool]:
        return self._detectors[index]

    def restricted(self, keep_names: Sequence[str]) -> "ConceptVocabulary":
        """New vocabulary with only the named concepts, order preserved."""
        keep = set(keep_names)
        unknown = keep - set(self._names)
        if unknown:
            raise ContractViolation(f"unknown concepts: {', '.join(sorted(unknown))}")
        idx = [i for i, n in enumerate(self._names) if n in keep]
        return ConceptVocabulary(
            [self._names[i] for i in idx],
            [self._detectors[i] for i in idx],
            [self._provenance[i] for i in idx],
        )


def evaluate_concepts(vocab: ConceptVocabulary, state: StateHandle) -> ConceptVector:
    """True concept vector for a live state. ⊥ and the end marker are out of domain."""
    if state is BOTTOM or state is END:
        raise ContractViolation("concept map is undefined on absorbing/terminal states")
    mask = 0
    for i, det in enumerate(vocab._detectors):
        if det(state):
            mask |= 1 << i
    return ConceptVector(width=len(vocab), mask=mask)


@dataclass(frozen=True)
class ObservationModel:
    """Per-concept detector noise: true-positive and false-positive rates."""

    p_true_pos: np.ndarray
    p_false_pos: np.ndarray

    def __post_init__(self) -> None:
        tp = np.asarray(self.p_true_pos, dtype=float)
        fp = np.asarray(self.p_false_pos, dtype=float)
        object.__setattr__(self, "p_true_pos", tp)
        object.__setattr__(self, "p_false_pos", fp)
        if tp.shape != fp.shape:
            raise ContractViolation("rate arrays must align")
        if np.any((tp < 0) | (tp > 1) | (fp < 0) | (fp > 1)):
            raise ContractViolation("rates must lie in [0, 1]")

    @classmethod
    def exact(cls, n: int) -> "ObservationModel":
        return cls(np.ones(n), np.zeros(n))

    @classmethod
    def uniform(cls, n: int, p_true_pos: float, p_false_pos: float) -> "ObservationModel":
        return cls(np.full(n, float(p_true_pos)), np.full(n, float(p_false_pos)))

    @property
    def is_exact(self) -> bool:
        return bool(np.all(self.p_true_pos == 1.0) and np.all(self.p_false_pos == 0.0))

    def __len__(self) -> int:
        return int(self.p_true_pos.shape[0])


def observe_concepts(
    vocab: ConceptVocabulary,
    obs_model: ObservationModel,
    state: StateHandle,
    rng: np.random.Generator,
) -> ConceptVector:
    """Noisy detector readout: one uniform draw per concept against tp/fp.

    Deterministic given the generator state; exact rates reproduce
    ``evaluate_concepts`` bit for bit (while consuming the same draws).
    """
    if len(obs_model) != len(vocab):
        raise ContractViolation("observation model width must match vocabulary")
    truth = evaluate_concepts(vocab, state)
    draws = rng.random(len(vocab))
    mask = 0
    for i in range(len(vocab)):
        p = obs_model.p_true_pos[i] if truth.contains(i) else obs_model.p_false_pos[i]
        if draws[i] < p:
            mask |= 1 << i
    return ConceptVector(width=len(vocab), mask=mask)


NEGATION_PREFIX = "not_"


def extend_with_negations(vocab: ConceptVocabulary) -> ConceptVocabulary:
    """Close the vocabulary under negation.

    Every non-negation concept gains a ``not_<name>`` partner (detector is the
    complement); existing negations are never re-negated, so the operation is
    idempotent: applying it to an already-extended vocabulary returns an equal
    one.
    """
    names = list(vocab.names)
    detectors = list(vocab._detectors)
    provenance = list(vocab.provenance)
    existing = set(names)
    for i, prov in enumerate(vocab.provenance):
        if prov.kind == "negation":
            continue
        neg_name = NEGATION_PREFIX + vocab.names[i]
        if neg_name in existing:
            continue
        base_det = vocab._detectors[i]
        detectors.append(_complement(base_det))
        names.append(neg_name)
        provenance.append(Provenance("negation", of=vocab.names[i]))
        existing.add(neg_name)
    return ConceptVocabulary(names, detectors, provenance)


def _complement(det: Callable[[StateHandle], bool]) -> Callable[[StateHandle], bool]:
    def negated(state: StateHandle) -> bool:
        return not det(state)

    return negated


_LITERAL_RE = re.compile(r"^(!?)([A-Za-z0-9_()|,!]+)$")


def parse_literal(token: str) -> tuple:
    m = _LITERAL_RE.match(token)
    if not m:
        raise ContractViolation(f"bad literal token {token!r}")
    return m.group(2), m.group(1) != "!"


def make_compound_clause(vocab: ConceptVocabulary, literals: Sequence[str]) -> tuple:
    """Add a disjunctive clause over existing concepts as one compound concept.

    Literal tokens are plain names or ``!name``. The clause is true in a state
    when any literal holds, which lets CNF preconditions ride on the same
    single-concept machinery. Returns ``(new_vocab, concept_id)``.
    """
    if not literals:
        raise ContractViolation("clause needs at least one literal")
    parsed = []
    for tok in literals:
        name, positive = parse_literal(tok)
        parsed.append((vocab.index_of(name), positive))
    clause_tokens = tuple(
        (name if pos else "!" + name)
        for (name, pos) in (parse_literal(t) for t in literals)
    )
    clause_name = "clause(" + ",".join(clause_tokens) + ")"
    base_detectors = vocab._detectors

    def clause_det(state: StateHandle, _parsed=tuple(parsed)) -> bool:
        for idx, positive in _parsed:
            if base_detectors[idx](state) == positive:
                return True
        return False

    names = list(vocab.names) + [clause_name]
    detectors = list(base_detectors) + [clause_det]
    provenance = list(vocab.provenance) + [Provenance("compound", clause=clause_tokens)]
    new_vocab = ConceptVocabulary(names, detectors, provenance)
    return new_vocab, new_vocab.concept(len(vocab))


@dataclass(frozen=True)
class ConceptMarginals:
    """Bernoulli MLE of each concept over a sampled-state stream."""

    p: np.ndarray
    sample_count: int

    def __getitem__(self, index: int) -> float:
        return float(self.p[index])


def estimate_marginals(vocab: ConceptVocabulary, states: Iterable[StateHandle]) -> ConceptMarginals:
    """Frequency of each concept (true labels) over the given state stream."""
    counts = np.zeros(len(vocab), dtype=np.int64)
    n = 0
    for s in states:
        vec = evaluate_concepts(vocab, s)
        for i in vec.true_indices():
            counts[i] += 1
        n += 1
    if n == 0:
        raise ContractViolation("cannot estimate marginals from an empty stream")
    return ConceptMarginals(p=counts / float(n), sample_count=n)


# --- vocabulary manifests -------------------------------------------------
#
# Plain-text, line oriented, round-trippable:
#
#   version: 1
#   concept <name> base tp=<float> fp=<float>
#   concept <name> negation of=<base-name> tp=<float> fp=<float>
#   concept <name> compound clause=<lit>|<lit>... tp=<float> fp=<float>
#
# Comments (#) and blank lines are ignored. Detector binding happens later,
# against an environment's registry (base concepts) or derivation (the rest).

MANIFEST_VERSION = 1


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    provenance: Provenance
    tp: float
    fp: float


@dataclass(frozen=True)
class VocabularySpec:
    entries: tuple

    @property
    def names(self) -> tuple:
        return tuple(e.name for e in self.entries)


class ManifestError(Exception):
    """A vocabulary manifest failed to parse."""


def parse_manifest(text: str) -> VocabularySpec:
    entries = []
    saw_version = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("version:"):
            value = line.split(":", 1)[1].strip()
            if value != str(MANIFEST_VERSION):
                raise ManifestError(f"line {lineno}: unsupported manifest version {value!r}")
            saw_version = True
            continue
        parts = line.split()
        if parts[0] != "concept" or len(parts) < 5:
            raise ManifestError(f"line {lineno}: expected 'concept <name> <kind> ... tp= fp='")
        name, kind = parts[1], parts[2]
        fields = dict(p.split("=", 1) for p in parts[3:] if "=" in p)
        try:
            tp = float(fields["tp"])
            fp = float(fields["fp"])
        except (KeyError, ValueError):
            raise ManifestError(f"line {lineno}: missing or bad tp=/fp= rates") from None
        if kind == "base":
            prov = Provenance("base")
        elif kind == "negation":
            if "of" not in fields:
                raise ManifestError(f"line {lineno}: negation needs of=<name>")
            prov = Provenance("negation", of=fields["of"])
        elif kind == "compound":
            if "clause" not in fields:
                raise ManifestError(f"line {lineno}: compound needs clause=<lit>|...")
            prov = Provenance("compound", clause=tuple(fields["clause"].split("|")))
        else:
            raise ManifestError(f"line {lineno}: unknown concept kind {kind!r}")
        entries.append(ManifestEntry(name=name, provenance=prov, tp=tp, fp=fp))
    if not saw_version:
        raise ManifestError("manifest is missing its version line")
    if len({e.name for e in entries}) != len(entries):
        raise ManifestError("duplicate concept names in manifest")
    return VocabularySpec(entries=tuple(entries))


def serialize_manifest(spec: VocabularySpec) -> str:
    lines = [f"version: {MANIFEST_VERSION}"]
    for e in spec.entries:
        if e.provenance.kind == "base":
            mid = "base"
        elif e.provenance.kind == "negation":
            mid = f"negation of={e.provenance.of}"
        else:
            mid = "compound clause=" + "|".join(e.provenance.clause)
        lines.append(f"concept {e.name} {mid} tp={e.tp!r} fp={e.fp!r}")
    return "\n".join(lines) + "\n"


def spec_from_vocabulary(vocab: ConceptVocabulary, obs_model: ObservationModel) -> VocabularySpec:
    entries = tuple(
        ManifestEntry(
            name=vocab.names[i],
            provenance=vocab.provenance[i],
            tp=float(obs_model.p_true_pos[i]),
            fp=float(obs_model.p_false_pos[i]),
        )
        for i in range(len(vocab))
    )
    return VocabularySpec(entries=entries)


def observation_model_from_spec(spec: VocabularySpec) -> ObservationModel:
    return ObservationModel(
        np.array([e.tp for e in spec.entries], dtype=float),
        np.array([e.fp for e in spec.entries], dtype=float),
    )
