"""Domain ontology for social engineering attack knowledge.

The schema is a fixed, code-defined vocabulary: eleven core concepts plus
three auxiliary ones, the asserted relations between them, property-style
axioms (inverses, subproperties, one equivalence), and the relations that
only inference may produce. Everything here is immutable; graphs hold a
reference to a schema and validate their edges against it.
"""

from dataclasses import dataclass, field
from enum import Enum

from .errors import SchemaError


class RelationKind(Enum):
    ASSERTED = "asserted"
    SUBPROPERTY = "subproperty"
    VERBOSE_ALIAS = "verbose_alias"
    DERIVED = "derived"


@dataclass(frozen=True)
class ConceptDef:
    """One ontology concept: canonical name, synonyms, allowed taxonomy labels."""

    name: str
    synonyms: tuple[str, ...] = ()
    taxonomy_labels: frozenset[str] = frozenset()
    auxiliary: bool = False
    definition: str = ""


@dataclass(frozen=True)
class RelationDef:
    """One relation: exactly one domain and one range concept.

    ``inverse_of`` / ``subproperty_of`` / ``equivalent_to`` encode the axioms.
    A symmetric relation is modeled as its own inverse.
    """

    name: str
    domain: str
    range: str
    kind: RelationKind = RelationKind.ASSERTED
    inverse_of: str | None = None
    subproperty_of: str | None = None
    equivalent_to: str | None = None
    irreflexive: bool = True


@dataclass(frozen=True)
class ConformanceVerdict:
    conforms: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.conforms


CONFORMS = ConformanceVerdict(True)


_OBJECT_LABELS = frozenset(
    {"carrier", "resources", "subjects", "operations"}
)
_SECURITY_LABELS = frozenset(
    {"confidentiality", "integrity", "availability", "controllability", "auditability"}
)
_ACTOR_LABELS = frozenset(
    {"individual", "group", "organization", "real_person", "virtual_role", "internal", "external"}
)

VULNERABILITY_CATEGORIES = (
    "cognition_and_knowledge",
    "behavior_and_habit",
    "emotions_and_feelings",
    "human_nature",
    "personality_traits",
    "individual_characters",
)

MECHANISM_ASPECTS = (
    "persuasion",
    "influence",
    "cognition_attitude_and_behavior",
    "trust_and_deception",
    "language_thought_and_decision",
    "emotion_and_decision_making",
)


def _concepts() -> tuple[ConceptDef, ...]:
    goal_labels = _OBJECT_LABELS | _SECURITY_LABELS
    return (
        ConceptDef(
            "Attacker",
            synonyms=("SocialEngineer",),
            taxonomy_labels=_ACTOR_LABELS,
            definition="party that plans and carries out the attack",
        ),
        ConceptDef(
            "AttackMotivation",
            taxonomy_labels=frozenset({"intrinsic", "extrinsic"}),
            definition="what moves the attacker to act",
        ),
        ConceptDef(
            "AttackGoal",
            synonyms=("AttackPurpose",),
            taxonomy_labels=goal_labels,
            definition="concrete objective the attack works toward",
        ),
        ConceptDef(
            "SocialEngineeringInformation",
            taxonomy_labels=frozenset(
                {"personal", "organizational", "cyber", "physical", "social_relations"}
            ),
            definition="information gathered to prepare or support the attack",
        ),
        ConceptDef(
            "AttackStrategy",
            taxonomy_labels=frozenset(
                {"forward", "reverse", "persistent", "short_term", "progressive"}
            ),
            definition="plan that sequences methods toward the goal",
        ),
        ConceptDef(
            "AttackMethod",
            taxonomy_labels=frozenset({"human_based", "computer_based"}),
            definition="technique performed against the target",
        ),
        ConceptDef(
            "AttackTarget",
            synonyms=("Victim",),
            taxonomy_labels=_ACTOR_LABELS,
            definition="person or group the method is applied to",
        ),
        ConceptDef(
            "AttackMedium",
            synonyms=("SocialInteraction",),
            taxonomy_labels=frozenset(
                {"direct", "indirect", "realtime", "non_realtime", "active", "passive"}
            ),
            definition="channel the interaction travels through",
        ),
        ConceptDef(
            "HumanVulnerability",
            taxonomy_labels=frozenset(VULNERABILITY_CATEGORIES),
            definition="human trait or state the method exploits",
        ),
        ConceptDef(
            "EffectMechanism",
            taxonomy_labels=frozenset(MECHANISM_ASPECTS),
            definition="psychological principle that makes the exploitation work",
        ),
        ConceptDef(
            "AttackConsequence",
            taxonomy_labels=goal_labels,
            definition="observable outcome the target brings out",
        ),
        ConceptDef(
            "SubGoal",
            taxonomy_labels=goal_labels | frozenset({"precondition"}),
            auxiliary=True,
            definition="intermediate objective under an attack goal",
        ),
        ConceptDef(
            "CommonSkill",
            auxiliary=True,
            definition="general skill usable across methods",
        ),
        ConceptDef(
            "AuxiliaryTrick",
            auxiliary=True,
            definition="small supporting trick embedded in a method",
        ),
    )


# name, domain, range, inverse_of  (rows of the asserted-relation table)
_ASSERTED_ROWS: tuple[tuple[str, str, str, str | None], ...] = (
    ("motivate", "AttackMotivation", "Attacker", "motivated_by"),
    ("motivated_by", "Attacker", "AttackMotivation", "motivate"),
    ("gather_and_use", "Attacker", "SocialEngineeringInformation", None),
    ("craft_and_perform", "Attacker", "AttackMethod", None),
    ("formulate", "Attacker", "AttackStrategy", None),
    ("to_achieve", "AttackMethod", "AttackGoal", None),
    ("guided_by", "AttackMethod", "AttackStrategy", None),
    ("apply_to", "AttackMethod", "AttackTarget", "suffer"),
    ("performed_through", "AttackMethod", "AttackMedium", None),
    ("to_exploit", "AttackMethod", "HumanVulnerability", None),
    ("based_on", "AttackStrategy", "SocialEngineeringInformation", None),
    ("suffer", "AttackTarget", "AttackMethod", "apply_to"),
    ("have_vul", "AttackTarget", "HumanVulnerability", None),
    ("interacted_through", "AttackTarget", "AttackMedium", None),
    ("bring_out", "AttackTarget", "AttackConsequence", None),
    ("take_effected_by", "HumanVulnerability", "EffectMechanism", None),
    ("explain", "EffectMechanism", "AttackConsequence", None),
    ("feed_back_to", "AttackConsequence", "AttackGoal", None),
    ("to_satisfy", "AttackGoal", "AttackMotivation", None),
    ("subgoal_of", "SubGoal", "AttackGoal", None),
    ("with_skill", "AttackMethod", "CommonSkill", None),
    ("with_trick", "AttackMethod", "AuxiliaryTrick", None),
)

# Edge names accepted on input and rewritten to a canonical stored form.
# ``bring_about`` is a plain spelling variant; ``conduct`` is declared
# equivalent to craft_and_perform; ``exploited_by`` is the verbose inverse
# of to_exploit, so its endpoints swap when normalized.
RELATION_ALIASES: dict[str, str] = {
    "bring_about": "bring_out",
    "conduct": "craft_and_perform",
}
SWAPPED_ALIASES: dict[str, str] = {
    "exploited_by": "to_exploit",
}


def _relations() -> tuple[RelationDef, ...]:
    rels = [
        RelationDef(name, dom, rng, RelationKind.ASSERTED, inverse_of=inv)
        for name, dom, rng, inv in _ASSERTED_ROWS
    ]
    rels += [
        RelationDef(
            "incent", "AttackMotivation", "Attacker", RelationKind.SUBPROPERTY,
            inverse_of="incented_by", subproperty_of="motivate",
        ),
        RelationDef(
            "drive", "AttackMotivation", "Attacker", RelationKind.SUBPROPERTY,
            inverse_of="driven_by", subproperty_of="motivate",
        ),
        RelationDef(
            "incented_by", "Attacker", "AttackMotivation", RelationKind.SUBPROPERTY,
            inverse_of="incent", subproperty_of="motivated_by",
        ),
        RelationDef(
            "driven_by", "Attacker", "AttackMotivation", RelationKind.SUBPROPERTY,
            inverse_of="drive", subproperty_of="motivated_by",
        ),
        RelationDef(
            "conduct", "Attacker", "AttackMethod", RelationKind.VERBOSE_ALIAS,
            equivalent_to="craft_and_perform",
        ),
        RelationDef(
            "exploited_by", "HumanVulnerability", "AttackMethod", RelationKind.VERBOSE_ALIAS,
            inverse_of="to_exploit",
        ),
    ]
    return tuple(rels)


def _derived_relations() -> tuple[RelationDef, ...]:
    return (
        RelationDef("attack", "Attacker", "AttackTarget", RelationKind.DERIVED),
        RelationDef(
            "same_attack_organization", "Attacker", "Attacker", RelationKind.DERIVED,
            inverse_of="same_attack_organization",
        ),
        RelationDef(
            "same_affiliation", "AttackTarget", "AttackTarget", RelationKind.DERIVED,
            inverse_of="same_affiliation",
        ),
        RelationDef(
            "same_origin_attack", "AttackMethod", "AttackMethod", RelationKind.DERIVED,
            inverse_of="same_origin_attack",
        ),
        RelationDef(
            "in_the_same_organization", "Attacker", "Attacker", RelationKind.DERIVED,
            inverse_of="in_the_same_organization",
        ),
    )


@dataclass(frozen=True)
class OntologySchema:
    """Immutable lookup structure over concepts and relations."""

    concepts: dict[str, ConceptDef]
    relations: dict[str, RelationDef]
    derived_relations: tuple[RelationDef, ...]
    _concept_index: dict[str, str] = field(repr=False, default_factory=dict)
    _sub_index: dict[str, tuple[str, ...]] = field(repr=False, default_factory=dict)

    def concept(self, name: str) -> ConceptDef:
        """Resolve a concept by canonical name or synonym."""
        canonical = self._concept_index.get(name)
        if canonical is None:
            raise SchemaError(f"unknown concept: {name!r}")
        return self.concepts[canonical]

    def is_concept(self, name: str) -> bool:
        return name in self._concept_index

    def relation(self, name: str) -> RelationDef:
        """Resolve any known relation, derived ones included."""
        rel = self.relations.get(name)
        if rel is None:
            rel = next((d for d in self.derived_relations if d.name == name), None)
        if rel is None:
            raise SchemaError(f"unknown relation: {name!r}")
        return rel

    def is_relation(self, name: str) -> bool:
        try:
            self.relation(name)
        except SchemaError:
            return False
        return True

    def asserted_relations(self) -> tuple[RelationDef, ...]:
        return tuple(
            r for r in self.relations.values() if r.kind is RelationKind.ASSERTED
        )

    def effective_relations(self, name: str) -> tuple[str, ...]:
        """Subproperty chain for ``name``, most specific first."""
        rel = self.relation(name)
        chain = [rel.name]
        while rel.subproperty_of is not None:
            rel = self.relation(rel.subproperty_of)
            chain.append(rel.name)
        return tuple(chain)

    def sub_relations(self, name: str) -> tuple[str, ...]:
        """All relations whose subproperty chain passes through ``name``."""
        self.relation(name)
        return self._sub_index.get(name, ())

    def normalize_relation(self, name: str) -> tuple[str, bool]:
        """Map an input relation name to its stored form.

        Returns ``(canonical_name, endpoints_swapped)``. Plain aliases and
        declared-equivalent relations keep their direction; verbose inverse
        spellings flip src and dst.
        """
        if name in RELATION_ALIASES:
            return RELATION_ALIASES[name], False
        if name in SWAPPED_ALIASES:
            return SWAPPED_ALIASES[name], True
        rel = self.relation(name)
        if rel.equivalent_to is not None:
            return rel.equivalent_to, False
        return rel.name, False

    def check_edge_conformance(
        self, src_concept: str, relation: str, dst_concept: str
    ) -> ConformanceVerdict:
        """Check a (domain, relation, range) combination against the schema."""
        rel = self.relation(relation)
        src = self.concept(src_concept)
        dst = self.concept(dst_concept)
        if src.name != rel.domain:
            return ConformanceVerdict(
                False, f"domain mismatch: {relation} expects {rel.domain}, got {src.name}"
            )
        if dst.name != rel.range:
            return ConformanceVerdict(
                False, f"range mismatch: {relation} expects {rel.range}, got {dst.name}"
            )
        return CONFORMS


def build_default_schema() -> OntologySchema:
    """Construct the fixed domain schema.

    Two calls produce structurally equal schemas; the result is safe to share.
    """
    concepts = {c.name: c for c in _concepts()}
    concept_index: dict[str, str] = {}
    for c in concepts.values():
        concept_index[c.name] = c.name
        for syn in c.synonyms:
            concept_index[syn] = c.name

    relations = {r.name: r for r in _relations()}
    derived = _derived_relations()

    sub_index: dict[str, list[str]] = {}
    for r in relations.values():
        parent = r.subproperty_of
        while parent is not None:
            sub_index.setdefault(parent, []).append(r.name)
            parent = relations[parent].subproperty_of
    frozen_sub = {k: tuple(sorted(v)) for k, v in sub_index.items()}

    return OntologySchema(
        concepts=concepts,
        relations=relations,
        derived_relations=derived,
        _concept_index=concept_index,
        _sub_index=frozen_sub,
    )


DEFAULT_SCHEMA = build_default_schema()
