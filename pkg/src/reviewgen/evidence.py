"""Per-category review evidence from comparing the three knowledge graphs.

Novelty evidence is the set difference between a paper's elements and the
background index; comparison evidence is the matched-but-uncited papers
behind the paper's high-TF-IDF elements; summary evidence is the subgraph
of relations worth describing in prose. The numeric feature vector that
feeds the score predictor is derived from the same pieces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from reviewgen.corpus import EntityType, PaperRecord, RelationType
from reviewgen.background import (
    BackgroundIndex,
    PaperRef,
    build_index,
    match_element,
    tfidf,
)
from reviewgen.kg import (
    RELATED_SCOPE,
    TARGET_SCOPE,
    ElementKey,
    KnowledgeGraph,
    NormalizedString,
    build_kg,
    elements,
)

SUMMARY_RELATIONS: frozenset[RelationType] = frozenset(
    {
        RelationType.USED_FOR,
        RelationType.FEATURE_OF,
        RelationType.COMPARE,
        RelationType.EVALUATE_FOR,
    }
)

TFIDF_THRESHOLD = 0.5
DEFAULT_RECOMMENDATIONS = 5

# Feature vector layout: new-node counts per entity type (6), new-edge
# counts per relation type (7), graph totals, comparison entry count,
# and the mean TF-IDF over the paper's elements.
FEATURE_NAMES: tuple[str, ...] = (
    tuple(f"new_nodes_{t.value}" for t in EntityType)
    + tuple(f"new_edges_{r.value}" for r in RelationType)
    + ("total_entities", "total_edges", "comparison_entries", "mean_tfidf")
)
FEATURE_DIM = len(FEATURE_NAMES)
assert FEATURE_DIM == 17


@dataclass(frozen=True)
class ComparisonEntry:
    """One high-TF-IDF element with the matched papers the author missed."""

    element: ElementKey
    tfidf: float
    uncited: tuple[PaperRef, ...]  # year descending, then paper_id ascending


@dataclass(frozen=True)
class EvidenceBundle:
    summary: KnowledgeGraph
    novelty_new: tuple[ElementKey, ...]
    comparison: tuple[ComparisonEntry, ...]
    features: np.ndarray
    # representative -> original-casing surface, for rendering comments;
    # target-scope entities win over related-work ones on collisions
    surfaces: dict[NormalizedString, str] = field(default_factory=dict)


@dataclass(frozen=True)
class NoveltyTimeline:
    entries: tuple[tuple[int, float], ...]  # (cutoff_year, mean_new_elements)


def extract_summary(gp: KnowledgeGraph) -> KnowledgeGraph:
    """Subgraph of the four describable relation types and their endpoints."""
    edges = tuple(e for e in gp.edges if e.relation in SUMMARY_RELATIONS)
    keep = {e.head for e in edges} | {e.tail for e in edges}
    entities = tuple(e for e in gp.entities if e.entity_id in keep)
    return KnowledgeGraph(gp.paper_id, gp.scope, entities, edges)


def extract_novelty(
    gp: KnowledgeGraph,
    index: BackgroundIndex,
    include_generic: bool = False,
) -> list[ElementKey]:
    """Elements of ``gp`` with no fuzzy match anywhere in the background.

    Node keys of generic-typed entities are excluded by default ("it",
    "this method" would otherwise dominate the counts).
    """
    generic_reps = {
        e.representative for e in gp.entities if e.entity_type is EntityType.GENERIC
    }
    out = []
    for key in elements(gp):
        if not include_generic and not key.is_edge and key.head in generic_reps:
            continue
        if not match_element(index, key).papers:
            out.append(key)
    return out


def extract_comparison(
    gp: KnowledgeGraph,
    grel: KnowledgeGraph,
    index: BackgroundIndex,
    citations: set[str],
) -> list[ComparisonEntry]:
    """Matched-but-uncited background papers per high-TF-IDF element.

    A matched paper counts as cited when its id is in the citation list
    or when any of its indexed elements matches the related-work graph
    (annotation citation lists may be incomplete). Entries keep only
    elements with TF-IDF strictly above the threshold and a non-empty
    uncited list, sorted by TF-IDF descending then key order.
    """
    covered: set[str] = set()
    for key in elements(grel):
        covered.update(ref.paper_id for ref in match_element(index, key).papers)

    entries = []
    for key in elements(gp):
        score = tfidf(index, key, gp)
        if score <= TFIDF_THRESHOLD:
            continue
        matched = match_element(index, key).papers
        uncited = tuple(
            ref
            for ref in matched
            if ref.paper_id not in citations and ref.paper_id not in covered
        )
        if uncited:
            entries.append(ComparisonEntry(key, score, uncited))
    entries.sort(key=lambda e: (-e.tfidf, e.element.sort_key()))
    return entries


def recommend_related(
    entry: ComparisonEntry, k: int = DEFAULT_RECOMMENDATIONS
) -> list[PaperRef]:
    """The most recent uncited papers for one comparison entry, capped at k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return list(entry.uncited[:k])


def evidence_features(
    gp: KnowledgeGraph,
    novelty_new: list[ElementKey],
    comparison: list[ComparisonEntry],
    index: BackgroundIndex,
) -> np.ndarray:
    """Deterministic 17-dim numeric summary of one paper's evidence."""
    features = np.zeros(FEATURE_DIM, dtype=np.float64)
    by_rep = {e.representative: e for e in gp.entities}
    entity_type_order = list(EntityType)
    relation_order = list(RelationType)
    for key in novelty_new:
        if key.is_edge:
            features[6 + relation_order.index(key.relation)] += 1.0
        else:
            etype = by_rep[key.head].entity_type
            features[entity_type_order.index(etype)] += 1.0
    features[13] = float(len(gp.entities))
    features[14] = float(len(gp.edges))
    features[15] = float(len(comparison))
    keys = elements(gp)
    if keys:
        features[16] = float(
            np.mean([tfidf(index, key, gp) for key in keys])
        )
    return features


def build_bundle(
    paper: PaperRecord,
    index: BackgroundIndex,
    include_generic: bool = False,
) -> EvidenceBundle:
    """Full evidence bundle for one paper against a background index."""
    gp = build_kg(paper, TARGET_SCOPE)
    grel = build_kg(paper, RELATED_SCOPE)
    novelty_new = extract_novelty(gp, index, include_generic=include_generic)
    comparison = extract_comparison(gp, grel, index, set(paper.citations))
    features = evidence_features(gp, novelty_new, comparison, index)
    surfaces = {e.representative: e.rep_surface for e in grel.entities}
    surfaces.update((e.representative, e.rep_surface) for e in gp.entities)
    return EvidenceBundle(
        summary=extract_summary(gp),
        novelty_new=tuple(novelty_new),
        comparison=tuple(comparison),
        features=features,
        surfaces=surfaces,
    )


def novelty_timeline(
    papers: list[PaperRecord],
    corpus: list[PaperRecord],
    years: list[int],
) -> NoveltyTimeline:
    """Mean new-element count of ``papers`` per background cutoff year."""
    if any(b <= a for a, b in zip(years, years[1:])):
        raise ValueError("years must be strictly increasing")
    if not papers:
        raise ValueError("papers must be non-empty")
    graphs = [build_kg(p, TARGET_SCOPE) for p in papers]
    entries = []
    for year in years:
        index = build_index(corpus, year)
        counts = [len(extract_novelty(g, index)) for g in graphs]
        entries.append((year, sum(counts) / len(counts)))
    return NoveltyTimeline(tuple(entries))


def format_timeline(timeline: NoveltyTimeline) -> str:
    """Two-column plot-data text: year<TAB>mean, one entry per line."""
    return "".join(f"{year}\t{mean:.6f}\n" for year, mean in timeline.entries)
