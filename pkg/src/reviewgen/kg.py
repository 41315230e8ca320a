"""Knowledge-graph construction from paper annotations.

A graph is built over a section scope: mentions are clustered (IE clusters
plus implicit singletons), each cluster gets a representative mention (the
longest informative one), clusters whose representatives contain one
another are merged transitively, and relation annotations are remapped to
the merged entities. Graphs compare across papers through ``ElementKey``
values: one key per entity node, one per relation edge.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from reviewgen.corpus import (
    EntityType,
    Mention,
    PaperRecord,
    RelationType,
    SectionKind,
)

NormalizedString = tuple[str, ...]

# G_P-style default scopes: the target-paper graph reads the abstract and
# conclusion; the related-work graph reads the related-work section.
TARGET_SCOPE: frozenset[SectionKind] = frozenset(
    {SectionKind.ABSTRACT, SectionKind.CONCLUSION}
)
RELATED_SCOPE: frozenset[SectionKind] = frozenset({SectionKind.RELATED_WORK})


def normalize(surface: str) -> NormalizedString:
    """Lowercase and whitespace-tokenize; drop punctuation-only tokens.

    Internal hyphens survive ("TF-IDF" -> ("tf-idf",)). A whitespace- or
    punctuation-only surface yields the empty tuple, which callers treat
    as an invalid mention.
    """
    tokens = surface.lower().split()
    return tuple(t for t in tokens if any(ch.isalnum() for ch in t))


def _mention_rank(mention: Mention) -> tuple:
    norm = normalize(mention.surface)
    return (-len(norm), norm, mention.mention_id)


def representative_mention(cluster: list[Mention]) -> Mention:
    """Pick the cluster's longest informative mention.

    Informative means entity_type != GENERIC. Among candidates the one
    with the most normalized tokens wins; ties break to the
    lexicographically smallest normalized form, then the lowest
    mention_id. An all-generic cluster is ranked as a whole.
    """
    if not cluster:
        raise ValueError("empty cluster")
    informative = [m for m in cluster if m.entity_type is not EntityType.GENERIC]
    pool = informative or list(cluster)
    return min(pool, key=_mention_rank)


def coreferential(a: NormalizedString, b: NormalizedString) -> bool:
    """True iff one token sequence occurs contiguously inside the other."""
    if not a or not b:
        raise ValueError("coreferential() requires non-empty token tuples")
    short, long = (a, b) if len(a) <= len(b) else (b, a)
    n = len(short)
    return any(long[i : i + n] == short for i in range(len(long) - n + 1))


@dataclass(frozen=True)
class ElementKey:
    """A comparable knowledge element: an entity node or a relation edge.

    Node keys carry only ``head``; edge keys carry head, relation, and
    tail representatives. ``sort_key`` defines the total order used for
    all deterministic iteration (nodes before edges).
    """

    head: NormalizedString
    relation: RelationType | None = None
    tail: NormalizedString | None = None

    @classmethod
    def node(cls, representative: NormalizedString) -> "ElementKey":
        return cls(head=tuple(representative))

    @classmethod
    def edge(
        cls, head: NormalizedString, relation: RelationType, tail: NormalizedString
    ) -> "ElementKey":
        return cls(head=tuple(head), relation=relation, tail=tuple(tail))

    @property
    def is_edge(self) -> bool:
        return self.relation is not None

    def sort_key(self) -> tuple:
        if self.relation is None:
            return (0, self.head, "", ())
        return (1, self.head, self.relation.value, self.tail)

    def __str__(self) -> str:
        if self.relation is None:
            return f"node\t{' '.join(self.head)}"
        return (
            f"edge\t{' '.join(self.head)}\t{self.relation.value}"
            f"\t{' '.join(self.tail)}"
        )


@dataclass(frozen=True)
class Entity:
    """A merged mention cluster with its representative form."""

    entity_id: int
    paper_id: str
    mentions: tuple[Mention, ...]
    representative: NormalizedString
    rep_surface: str
    entity_type: EntityType


@dataclass(frozen=True)
class Edge:
    head: int
    tail: int
    relation: RelationType
    provenance: tuple[SectionKind, int]


@dataclass(frozen=True)
class KnowledgeGraph:
    paper_id: str
    scope: frozenset[SectionKind]
    entities: tuple[Entity, ...]
    edges: tuple[Edge, ...]

    @cached_property
    def _entities_by_id(self) -> dict[int, Entity]:
        return {e.entity_id: e for e in self.entities}

    def entity(self, entity_id: int) -> Entity:
        # ids equal positions in a freshly built graph but not in a
        # subgraph, so always resolve through the id map
        return self._entities_by_id[entity_id]

    def entity_by_representative(self) -> dict[NormalizedString, Entity]:
        return {e.representative: e for e in self.entities}


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller root index wins, keeping group order stable
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


def _entity_type_of(mentions: list[Mention]) -> EntityType:
    """Majority type; ties go to the more specific type (enum order)."""
    counts: dict[EntityType, int] = {}
    for m in mentions:
        counts[m.entity_type] = counts.get(m.entity_type, 0) + 1
    best = max(counts.values())
    for etype in EntityType:
        if counts.get(etype, 0) == best:
            return etype
    raise AssertionError("unreachable")


def build_kg(paper: PaperRecord, scope: set[SectionKind]) -> KnowledgeGraph:
    """Construct the knowledge graph of ``paper`` over the given sections.

    Mentions outside the scope (or normalizing to nothing) are dropped,
    IE clusters are restricted accordingly and completed with singletons,
    and clusters are merged to the representative-containment fixed
    point. Relations are remapped to merged entities, with self-loops
    dropped and duplicate (head, relation, tail) triples collapsed onto
    their first provenance.
    """
    if not scope:
        raise ValueError("scope must be non-empty")
    scope = frozenset(scope)

    by_id = {m.mention_id: m for m in paper.annotations.mentions}
    in_scope = {
        m.mention_id
        for m in paper.annotations.mentions
        if m.section in scope and normalize(m.surface)
    }

    groups: list[list[Mention]] = []
    covered: set[int] = set()
    for cluster in paper.annotations.clusters:
        members = [by_id[i] for i in cluster if i in in_scope]
        if members:
            groups.append(members)
            covered.update(m.mention_id for m in members)
    for m in paper.annotations.mentions:
        if m.mention_id in in_scope and m.mention_id not in covered:
            groups.append([m])
    groups.sort(key=lambda ms: min(m.mention_id for m in ms))

    # Merge until no two representatives contain one another. A single
    # full pairwise pass reaches the fixed point (a merged group's
    # representative is always one of the old representatives), but the
    # loop keeps the invariant checkable rather than argued.
    while len(groups) > 1:
        reps = [normalize(representative_mention(g).surface) for g in groups]
        uf = _UnionFind(len(groups))
        merged = False
        for i, j in itertools.combinations(range(len(groups)), 2):
            if uf.find(i) != uf.find(j) and coreferential(reps[i], reps[j]):
                uf.union(i, j)
                merged = True
        if not merged:
            break
        regrouped: dict[int, list[Mention]] = {}
        for i, group in enumerate(groups):
            regrouped.setdefault(uf.find(i), []).extend(group)
        groups = [regrouped[root] for root in sorted(regrouped)]

    merged_entities = []
    for group in groups:
        rep = representative_mention(group)
        merged_entities.append(
            (
                normalize(rep.surface),
                rep.surface,
                sorted(group, key=lambda m: m.mention_id),
            )
        )
    merged_entities.sort(key=lambda item: item[0])

    entities = tuple(
        Entity(
            entity_id=i,
            paper_id=paper.paper_id,
            mentions=tuple(mentions),
            representative=rep,
            rep_surface=surface,
            entity_type=_entity_type_of(mentions),
        )
        for i, (rep, surface, mentions) in enumerate(merged_entities)
    )

    entity_of_mention: dict[int, int] = {}
    for entity in entities:
        for m in entity.mentions:
            entity_of_mention[m.mention_id] = entity.entity_id

    edges = []
    seen_triples: set[tuple[int, RelationType, int]] = set()
    for rel in paper.annotations.relations:
        if rel.section not in scope:
            continue
        head = entity_of_mention.get(rel.head_id)
        tail = entity_of_mention.get(rel.tail_id)
        if head is None or tail is None or head == tail:
            continue
        triple = (head, rel.relation, tail)
        if triple in seen_triples:
            continue
        seen_triples.add(triple)
        edges.append(Edge(head, tail, rel.relation, (rel.section, rel.sentence_index)))

    return KnowledgeGraph(paper.paper_id, scope, entities, tuple(edges))


def elements(kg: KnowledgeGraph) -> list[ElementKey]:
    """All knowledge elements of a graph, sorted by the key total order."""
    keys = [ElementKey.node(e.representative) for e in kg.entities]
    keys.extend(
        ElementKey.edge(
            kg.entity(e.head).representative,
            e.relation,
            kg.entity(e.tail).representative,
        )
        for e in kg.edges
    )
    keys.sort(key=ElementKey.sort_key)
    return keys


def edge_key(kg: KnowledgeGraph, edge: Edge) -> ElementKey:
    return ElementKey.edge(
        kg.entity(edge.head).representative,
        edge.relation,
        kg.entity(edge.tail).representative,
    )
