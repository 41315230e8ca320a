"""Data model and file ingestion for annotated papers and review labels.

A paper arrives as a single self-contained JSON document carrying its
sectioned sentences, entity mentions, coreference clusters, and relation
annotations (the output of an upstream IE system, consumed as-is).
Review labels arrive as one JSON document per corpus. Parsing is strict:
unknown fields are rejected so format drift surfaces immediately.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from reviewgen.errors import ParseError, ValidationError


class SectionKind(Enum):
    """The four section scopes a paper may provide."""

    ABSTRACT = "abstract"
    CONCLUSION = "conclusion"
    RELATED_WORK = "related_work"
    BODY = "body"


class EntityType(Enum):
    """Entity mention types, ordered by specificity (used for tie-breaking)."""

    TASK = "task"
    METHOD = "method"
    EVALUATION_METRIC = "evaluation_metric"
    MATERIAL = "material"
    OTHER_SCIENTIFIC_TERM = "other_scientific_term"
    GENERIC = "generic"


class RelationType(Enum):
    """Relation edge types between entities."""

    USED_FOR = "used_for"
    FEATURE_OF = "feature_of"
    EVALUATE_FOR = "evaluate_for"
    HYPONYM_OF = "hyponym_of"
    PART_OF = "part_of"
    COMPARE = "compare"
    CONJUNCTION = "conjunction"


class Category(Enum):
    """Review categories. All but SUMMARY carry a 1-5 score."""

    SUMMARY = "summary"
    APPROPRIATENESS = "appropriateness"
    CLARITY = "clarity"
    NOVELTY = "novelty"
    SOUNDNESS = "soundness"
    MEANINGFUL_COMPARISON = "meaningful_comparison"
    POTENTIAL_IMPACT = "potential_impact"
    OVERALL_RECOMMENDATION = "overall_recommendation"


SCOREABLE_CATEGORIES: tuple[Category, ...] = tuple(
    c for c in Category if c is not Category.SUMMARY
)

_SECTION_BY_VALUE = {k.value: k for k in SectionKind}
_ENTITY_TYPE_BY_VALUE = {t.value: t for t in EntityType}
_RELATION_BY_VALUE = {r.value: r for r in RelationType}
_CATEGORY_BY_VALUE = {c.value: c for c in Category}


@dataclass(frozen=True)
class Sentence:
    sentence_index: int
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class Mention:
    """One entity mention; ``surface`` is the joined tokens of its span."""

    mention_id: int
    section: SectionKind
    sentence_index: int
    span: tuple[int, int]
    surface: str
    entity_type: EntityType


@dataclass(frozen=True)
class RelationAnnotation:
    head_id: int
    tail_id: int
    relation: RelationType
    section: SectionKind
    sentence_index: int


@dataclass(frozen=True)
class IEAnnotations:
    """Mentions, coreference clusters, and relations from the IE system.

    Mentions not covered by any explicit cluster form implicit singleton
    clusters; ``cluster_of`` exposes the full partition.
    """

    mentions: tuple[Mention, ...]
    clusters: tuple[tuple[int, ...], ...]
    relations: tuple[RelationAnnotation, ...]

    def cluster_of(self, mention_id: int) -> tuple[int, ...]:
        for cluster in self.clusters:
            if mention_id in cluster:
                return cluster
        return (mention_id,)


@dataclass(frozen=True)
class PaperRecord:
    """One paper: metadata, sectioned sentences, annotations, citations."""

    paper_id: str
    title: str
    year: int
    venue: str
    sections: dict[SectionKind, tuple[Sentence, ...]] = field(default_factory=dict)
    citations: tuple[str, ...] = ()
    annotations: IEAnnotations = field(
        default_factory=lambda: IEAnnotations((), (), ())
    )

    def sentence(self, section: SectionKind, index: int) -> Sentence:
        return self.sections[section][index]


@dataclass(frozen=True)
class ReviewLabels:
    """All reviews for one paper; each review maps categories to 1-5 scores."""

    paper_id: str
    per_review: tuple[dict[Category, int], ...]


def _check_keys(obj: dict, required: set[str], optional: set[str], locus: str) -> None:
    if not isinstance(obj, dict):
        raise ParseError(f"{locus}: expected an object, got {type(obj).__name__}")
    keys = set(obj)
    missing = required - keys
    if missing:
        raise ParseError(f"{locus}: missing field(s) {sorted(missing)}")
    unknown = keys - required - optional
    if unknown:
        raise ParseError(f"{locus}: unknown field(s) {sorted(unknown)}")


def _as_str(value, locus: str) -> str:
    if not isinstance(value, str):
        raise ParseError(f"{locus}: expected a string")
    return value


def _as_int(value, locus: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ParseError(f"{locus}: expected an integer")
    return value


def _load_json(path: str | Path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc


def _parse_sections(raw: dict, locus: str) -> dict[SectionKind, tuple[Sentence, ...]]:
    _check_keys(raw, set(), set(_SECTION_BY_VALUE), locus)
    sections: dict[SectionKind, tuple[Sentence, ...]] = {}
    for name, sentences_raw in raw.items():
        kind = _SECTION_BY_VALUE[name]
        if not isinstance(sentences_raw, list):
            raise ParseError(f"{locus}.{name}: expected a list of sentences")
        sentences = []
        for i, tokens_raw in enumerate(sentences_raw):
            if not isinstance(tokens_raw, list) or not all(
                isinstance(t, str) for t in tokens_raw
            ):
                raise ParseError(f"{locus}.{name}[{i}]: expected a list of token strings")
            if not tokens_raw:
                raise ValidationError(f"{locus}.{name}[{i}]: sentence has no tokens")
            sentences.append(Sentence(i, tuple(tokens_raw)))
        sections[kind] = tuple(sentences)
    return sections


def _parse_mention(raw: dict, sections, locus: str) -> Mention:
    _check_keys(raw, {"id", "section", "sentence", "span", "type"}, set(), locus)
    mention_id = _as_int(raw["id"], f"{locus}.id")
    section_name = _as_str(raw["section"], f"{locus}.section")
    if section_name not in _SECTION_BY_VALUE:
        raise ParseError(f"{locus}.section: unknown section {section_name!r}")
    section = _SECTION_BY_VALUE[section_name]
    sentence_index = _as_int(raw["sentence"], f"{locus}.sentence")
    type_name = _as_str(raw["type"], f"{locus}.type")
    if type_name not in _ENTITY_TYPE_BY_VALUE:
        raise ParseError(f"{locus}.type: unknown entity type {type_name!r}")
    span_raw = raw["span"]
    if not isinstance(span_raw, list) or len(span_raw) != 2:
        raise ParseError(f"{locus}.span: expected [start, end]")
    start = _as_int(span_raw[0], f"{locus}.span[0]")
    end = _as_int(span_raw[1], f"{locus}.span[1]")

    if section not in sections or sentence_index >= len(sections[section]):
        raise ValidationError(
            f"{locus}: mention {mention_id} points at missing sentence "
            f"{section_name}[{sentence_index}]"
        )
    tokens = sections[section][sentence_index].tokens
    if not (0 <= start < end <= len(tokens)):
        raise ValidationError(
            f"{locus}: mention {mention_id} span [{start},{end}) outside sentence "
            f"of length {len(tokens)}"
        )
    surface = " ".join(tokens[start:end])
    return Mention(
        mention_id, section, sentence_index, (start, end), surface,
        _ENTITY_TYPE_BY_VALUE[type_name],
    )


def _parse_relation(raw: dict, sections, mention_ids: set[int], locus: str) -> RelationAnnotation:
    _check_keys(raw, {"head_id", "tail_id", "type", "section", "sentence"}, set(), locus)
    head_id = _as_int(raw["head_id"], f"{locus}.head_id")
    tail_id = _as_int(raw["tail_id"], f"{locus}.tail_id")
    for endpoint in (head_id, tail_id):
        if endpoint not in mention_ids:
            raise ValidationError(
                f"{locus}: relation endpoint out of range (mention {endpoint})"
            )
    type_name = _as_str(raw["type"], f"{locus}.type")
    if type_name not in _RELATION_BY_VALUE:
        raise ParseError(f"{locus}.type: unknown relation type {type_name!r}")
    section_name = _as_str(raw["section"], f"{locus}.section")
    if section_name not in _SECTION_BY_VALUE:
        raise ParseError(f"{locus}.section: unknown section {section_name!r}")
    section = _SECTION_BY_VALUE[section_name]
    sentence_index = _as_int(raw["sentence"], f"{locus}.sentence")
    if section not in sections or sentence_index >= len(sections[section]):
        raise ValidationError(
            f"{locus}: relation points at missing sentence "
            f"{section_name}[{sentence_index}]"
        )
    return RelationAnnotation(
        head_id, tail_id, _RELATION_BY_VALUE[type_name], section, sentence_index
    )


def parse_paper(raw, locus: str = "paper") -> PaperRecord:
    """Build a validated PaperRecord from a decoded annotation document."""
    _check_keys(
        raw,
        {"paper_id", "title", "year", "venue", "citations", "sections",
         "mentions", "clusters", "relations"},
        set(),
        locus,
    )
    paper_id = _as_str(raw["paper_id"], f"{locus}.paper_id")
    if not paper_id:
        raise ValidationError(f"{locus}: paper_id must be non-empty")
    title = _as_str(raw["title"], f"{locus}.title")
    year = _as_int(raw["year"], f"{locus}.year")
    if year < 1900:
        raise ValidationError(f"{locus}: year {year} below 1900")
    venue = _as_str(raw["venue"], f"{locus}.venue")

    citations_raw = raw["citations"]
    if not isinstance(citations_raw, list):
        raise ParseError(f"{locus}.citations: expected a list")
    citations = []
    for i, cid in enumerate(citations_raw):
        cid = _as_str(cid, f"{locus}.citations[{i}]")
        if not cid:
            raise ValidationError(f"{locus}.citations[{i}]: empty citation id")
        citations.append(cid)

    sections = _parse_sections(raw["sections"], f"{locus}.sections")

    mentions_raw = raw["mentions"]
    if not isinstance(mentions_raw, list):
        raise ParseError(f"{locus}.mentions: expected a list")
    mentions = tuple(
        _parse_mention(m, sections, f"{locus}.mentions[{i}]")
        for i, m in enumerate(mentions_raw)
    )
    mention_ids = {m.mention_id for m in mentions}
    if len(mention_ids) != len(mentions):
        raise ValidationError(f"{locus}: duplicate mention ids")

    clusters_raw = raw["clusters"]
    if not isinstance(clusters_raw, list):
        raise ParseError(f"{locus}.clusters: expected a list")
    clusters = []
    seen: set[int] = set()
    for i, cluster_raw in enumerate(clusters_raw):
        if not isinstance(cluster_raw, list):
            raise ParseError(f"{locus}.clusters[{i}]: expected a list of mention ids")
        if not cluster_raw:
            raise ValidationError(f"{locus}.clusters[{i}]: empty cluster")
        members = []
        for mid in cluster_raw:
            mid = _as_int(mid, f"{locus}.clusters[{i}]")
            if mid not in mention_ids:
                raise ValidationError(
                    f"{locus}.clusters[{i}]: unknown mention id {mid}"
                )
            if mid in seen:
                raise ValidationError(
                    f"{locus}.clusters[{i}]: mention {mid} in more than one cluster"
                )
            seen.add(mid)
            members.append(mid)
        clusters.append(tuple(members))

    relations_raw = raw["relations"]
    if not isinstance(relations_raw, list):
        raise ParseError(f"{locus}.relations: expected a list")
    relations = tuple(
        _parse_relation(r, sections, mention_ids, f"{locus}.relations[{i}]")
        for i, r in enumerate(relations_raw)
    )

    return PaperRecord(
        paper_id=paper_id,
        title=title,
        year=year,
        venue=venue,
        sections=sections,
        citations=tuple(citations),
        annotations=IEAnnotations(mentions, tuple(clusters), relations),
    )


def load_paper(path: str | Path) -> PaperRecord:
    """Load and validate one paper annotation file."""
    return parse_paper(_load_json(path), locus=str(path))


def serialize_paper(record: PaperRecord) -> str:
    """Serialize a PaperRecord back to its annotation-document form.

    ``parse_paper(json.loads(serialize_paper(r)))`` equals ``r`` field by
    field; the byte output is canonical (sorted keys, two-space indent).
    """
    doc = {
        "paper_id": record.paper_id,
        "title": record.title,
        "year": record.year,
        "venue": record.venue,
        "citations": list(record.citations),
        "sections": {
            kind.value: [list(s.tokens) for s in sentences]
            for kind, sentences in record.sections.items()
        },
        "mentions": [
            {
                "id": m.mention_id,
                "section": m.section.value,
                "sentence": m.sentence_index,
                "span": list(m.span),
                "type": m.entity_type.value,
            }
            for m in record.annotations.mentions
        ],
        "clusters": [list(c) for c in record.annotations.clusters],
        "relations": [
            {
                "head_id": r.head_id,
                "tail_id": r.tail_id,
                "type": r.relation.value,
                "section": r.section.value,
                "sentence": r.sentence_index,
            }
            for r in record.annotations.relations
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_corpus(directory: str | Path) -> list[PaperRecord]:
    """Load every ``*.json`` paper file in a directory, sorted by filename."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ParseError(f"{directory}: not a directory")
    papers = [load_paper(p) for p in sorted(directory.glob("*.json"))]
    seen: set[str] = set()
    for paper in papers:
        if paper.paper_id in seen:
            raise ValidationError(f"duplicate paper_id {paper.paper_id!r} in corpus")
        seen.add(paper.paper_id)
    return papers


def load_review_labels(path: str | Path) -> list[ReviewLabels]:
    """Load a review label file: one entry per paper, multiple reviews kept."""
    raw = _load_json(path)
    if not isinstance(raw, list):
        raise ParseError(f"{path}: expected a top-level list")
    out = []
    for i, entry in enumerate(raw):
        locus = f"{path}[{i}]"
        _check_keys(entry, {"paper_id", "reviews"}, set(), locus)
        paper_id = _as_str(entry["paper_id"], f"{locus}.paper_id")
        if not paper_id:
            raise ValidationError(f"{locus}: paper_id must be non-empty")
        reviews_raw = entry["reviews"]
        if not isinstance(reviews_raw, list):
            raise ParseError(f"{locus}.reviews: expected a list")
        if not reviews_raw:
            raise ValidationError(f"{locus}: no reviews for paper {paper_id!r}")
        reviews = []
        for j, review_raw in enumerate(reviews_raw):
            rlocus = f"{locus}.reviews[{j}]"
            if not isinstance(review_raw, dict):
                raise ParseError(f"{rlocus}: expected an object")
            review: dict[Category, int] = {}
            for name, score in review_raw.items():
                if name not in _CATEGORY_BY_VALUE:
                    raise ParseError(f"{rlocus}: unknown category {name!r}")
                category = _CATEGORY_BY_VALUE[name]
                if category is Category.SUMMARY:
                    raise ValidationError(f"{rlocus}: summary never carries a score")
                score = _as_int(score, f"{rlocus}.{name}")
                if not 1 <= score <= 5:
                    raise ValidationError(
                        f"{rlocus}.{name}: score {score} outside 1-5"
                    )
                review[category] = score
            reviews.append(review)
        out.append(ReviewLabels(paper_id, tuple(reviews)))
    return out


def target_scores(labels: ReviewLabels) -> dict[Category, int]:
    """Per-category target score: the rounded (half-up) average over reviews.

    A category missing from every review is absent from the output. The
    mean is computed in exact integer arithmetic, so 3.5 always rounds
    to 4 regardless of float representation.
    """
    if not labels.per_review:
        raise ValidationError(f"no reviews for paper {labels.paper_id!r}")
    totals: dict[Category, list[int]] = {}
    for review in labels.per_review:
        for category, score in review.items():
            totals.setdefault(category, []).append(score)
    # round-half-up(s/n) == floor((2s + n) / (2n)) for positive s, n
    return {
        category: (2 * sum(scores) + len(scores)) // (2 * len(scores))
        for category, scores in totals.items()
    }
