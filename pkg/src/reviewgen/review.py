"""Template-based review text: polarity selection, per-category comments,
document assembly, and JSON/Markdown rendering.

Templates live in a user-editable JSON file with ``${SLOT}`` markers.
Comment generation is a pure function of (evidence, scores, templates);
the document timestamp is excluded from rendering and comparison so
end-to-end output stays byte-reproducible.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from reviewgen.corpus import Category, RelationType, SCOREABLE_CATEGORIES
from reviewgen.errors import (
    ParseError,
    UnsupportedRelationError,
    ValidationError,
)
from reviewgen.evidence import (
    ComparisonEntry,
    EvidenceBundle,
    SUMMARY_RELATIONS,
    recommend_related,
)
from reviewgen.kg import (
    Edge,
    ElementKey,
    KnowledgeGraph,
    NormalizedString,
    edge_key,
)
from reviewgen.scoring.train import ScoreReport

MAX_RELATION_SENTENCES = 5
MAX_NOVEL_ELEMENTS = 5
MAX_COMPARISON_ENTRIES = 3

TEMPLATE_SLOTS = {"SCORE", "ELEMENTS", "RECOMMENDATIONS", "RELATION_SENTENCES"}
PHRASE_SLOTS = {"HEAD", "TAIL"}

GENERIC_CATEGORIES = (
    Category.APPROPRIATENESS,
    Category.CLARITY,
    Category.SOUNDNESS,
    Category.POTENTIAL_IMPACT,
    Category.OVERALL_RECOMMENDATION,
)

# Prose glosses for naming an edge element inside a comment; distinct from
# relation_phrases, which render full sentences for the summary.
_RELATION_GLOSS = {
    RelationType.USED_FOR: "used for",
    RelationType.FEATURE_OF: "as a feature of",
    RelationType.EVALUATE_FOR: "evaluated for",
    RelationType.HYPONYM_OF: "as a kind of",
    RelationType.PART_OF: "as part of",
    RelationType.COMPARE: "compared with",
    RelationType.CONJUNCTION: "together with",
}


class Polarity(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


def select_polarity(score: int) -> Polarity:
    """Positive iff the score is above 3."""
    if not 1 <= score <= 5:
        raise ValueError(f"score must be in 1..5, got {score}")
    return Polarity.POSITIVE if score > 3 else Polarity.NEGATIVE


@dataclass(frozen=True)
class CategoryTemplates:
    """Polarity-keyed sentence templates; *_empty are no-evidence variants."""

    positive: tuple[str, ...]
    negative: tuple[str, ...]
    positive_empty: tuple[str, ...] = ()
    negative_empty: tuple[str, ...] = ()

    def pick(self, polarity: Polarity, empty: bool, variant: int) -> str:
        pool = {
            (Polarity.POSITIVE, False): self.positive,
            (Polarity.NEGATIVE, False): self.negative,
            (Polarity.POSITIVE, True): self.positive_empty or self.positive,
            (Polarity.NEGATIVE, True): self.negative_empty or self.negative,
        }[(polarity, empty)]
        return pool[variant % len(pool)]


@dataclass(frozen=True)
class TemplateSet:
    categories: dict[Category, CategoryTemplates]
    relation_phrases: dict[RelationType, str]
    variant: int = 0  # index into each template pool; 0 = first

    def for_category(self, category: Category) -> CategoryTemplates:
        return self.categories[category]


def _slot_names(template: str, locus: str) -> set[str]:
    """Identifiers used by a ``${SLOT}`` template; malformed markers fail."""
    names = set()
    for match in string.Template.pattern.finditer(template):
        if match.group("invalid") is not None:
            raise ValidationError(f"{locus}: malformed template marker")
        name = match.group("named") or match.group("braced")
        if name:
            names.add(name)
    return names


def _validate_templates(tset: TemplateSet) -> None:
    for category in Category:
        if category not in tset.categories:
            raise ValidationError(f"templates missing category {category.value!r}")
        block = tset.categories[category]
        if not block.positive or not block.negative:
            raise ValidationError(
                f"category {category.value!r} needs at least one template "
                "per polarity"
            )
        for kind in ("positive", "negative", "positive_empty", "negative_empty"):
            for tpl in getattr(block, kind):
                bad = _slot_names(tpl, category.value) - TEMPLATE_SLOTS
                if bad:
                    raise ValidationError(
                        f"category {category.value!r}: unknown slot "
                        f"{sorted(bad)[0]!r}"
                    )
    for relation in SUMMARY_RELATIONS:
        if relation not in tset.relation_phrases:
            raise ValidationError(
                f"relation_phrases missing {relation.value!r}"
            )
    for relation, phrase in tset.relation_phrases.items():
        names = _slot_names(phrase, f"phrase {relation.value}")
        if names != PHRASE_SLOTS:
            raise ValidationError(
                f"phrase for {relation.value!r} must use exactly HEAD and TAIL"
            )


def _parse_template_block(raw: object, locus: str) -> CategoryTemplates:
    if not isinstance(raw, dict):
        raise ValidationError(f"{locus}: expected an object")
    allowed = {"positive", "negative", "positive_empty", "negative_empty"}
    unknown = set(raw) - allowed
    if unknown:
        raise ValidationError(f"{locus}: unknown key {sorted(unknown)[0]!r}")
    lists = {}
    for kind in allowed:
        value = raw.get(kind, [])
        if not isinstance(value, list) or any(
            not isinstance(x, str) for x in value
        ):
            raise ValidationError(f"{locus}.{kind}: expected a list of strings")
        lists[kind] = tuple(value)
    return CategoryTemplates(**lists)


def parse_templates(raw: object) -> TemplateSet:
    if not isinstance(raw, dict):
        raise ValidationError("template file: expected a top-level object")
    unknown = set(raw) - {"categories", "relation_phrases", "variant"}
    if unknown:
        raise ValidationError(f"template file: unknown key {sorted(unknown)[0]!r}")
    raw_cats = raw.get("categories")
    raw_phrases = raw.get("relation_phrases")
    if not isinstance(raw_cats, dict) or not isinstance(raw_phrases, dict):
        raise ValidationError(
            "template file needs 'categories' and 'relation_phrases' objects"
        )
    by_value = {c.value: c for c in Category}
    categories = {}
    for name, block in raw_cats.items():
        if name not in by_value:
            raise ValidationError(f"unknown category {name!r} in templates")
        categories[by_value[name]] = _parse_template_block(block, name)
    rel_by_value = {r.value: r for r in RelationType}
    phrases = {}
    for name, phrase in raw_phrases.items():
        if name not in rel_by_value:
            raise ValidationError(f"unknown relation {name!r} in templates")
        if not isinstance(phrase, str):
            raise ValidationError(f"phrase for {name!r} must be a string")
        phrases[rel_by_value[name]] = phrase
    variant = raw.get("variant", 0)
    if not isinstance(variant, int) or variant < 0:
        raise ValidationError("variant must be a non-negative integer")
    tset = TemplateSet(
        categories=categories, relation_phrases=phrases, variant=variant
    )
    _validate_templates(tset)
    return tset


def load_templates(path: str | Path) -> TemplateSet:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read template file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"template file {path} is not valid JSON: {exc}") from exc
    return parse_templates(raw)


def default_templates() -> TemplateSet:
    """The template set shipped with the package."""
    text = (
        resources.files("reviewgen.data.templates")
        .joinpath("default.json")
        .read_text(encoding="utf-8")
    )
    return parse_templates(json.loads(text))


def _fill(template: str, **slots: object) -> str:
    mapping = {name: "" for name in TEMPLATE_SLOTS}
    mapping.update({k: str(v) for k, v in slots.items()})
    return string.Template(template).substitute(mapping)


def element_text(key: ElementKey, surfaces: Mapping[NormalizedString, str]) -> str:
    """Human-readable name of an element, using original-casing surfaces."""
    head = surfaces.get(key.head, " ".join(key.head))
    if key.relation is None:
        return head
    tail = surfaces.get(key.tail, " ".join(key.tail))
    return f"{head} {_RELATION_GLOSS[key.relation]} {tail}"


def realize_relation(
    edge: Edge, graph: KnowledgeGraph, phrases: Mapping[RelationType, str]
) -> str:
    """One sentence for one edge, HEAD/TAIL filled with entity surfaces."""
    if edge.relation not in phrases:
        raise UnsupportedRelationError(
            f"no phrase for relation {edge.relation.value!r}"
        )
    head = graph.entity(edge.head).rep_surface
    tail = graph.entity(edge.tail).rep_surface
    return string.Template(phrases[edge.relation]).substitute(HEAD=head, TAIL=tail)


def generate_summary(
    summary: KnowledgeGraph, overall_score: int, templates: TemplateSet
) -> list[str]:
    """Summary comment controlled by the overall recommendation score."""
    polarity = select_polarity(overall_score)
    block = templates.for_category(Category.SUMMARY)
    edges = sorted(summary.edges, key=lambda e: edge_key(summary, e).sort_key())
    realized = [
        realize_relation(e, summary, templates.relation_phrases)
        for e in edges[:MAX_RELATION_SENTENCES]
    ]
    tpl = block.pick(polarity, empty=not realized, variant=templates.variant)
    return [
        _fill(tpl, RELATION_SENTENCES=" ".join(realized), SCORE=overall_score)
    ]


def generate_novelty(
    novelty_new: Sequence[ElementKey],
    score: int,
    templates: TemplateSet,
    surfaces: Mapping[NormalizedString, str],
) -> list[str]:
    """Novelty comment: states the exact new-element count, lists up to 5."""
    polarity = select_polarity(score)
    block = templates.for_category(Category.NOVELTY)
    tpl = block.pick(polarity, empty=not novelty_new, variant=templates.variant)
    count = len(novelty_new)
    shown = [element_text(k, surfaces) for k in novelty_new[:MAX_NOVEL_ELEMENTS]]
    noun = "element" if count == 1 else "elements"
    listing = f"{count} new knowledge {noun}"
    if shown:
        listing += ": " + "; ".join(shown)
    return [_fill(tpl, ELEMENTS=listing, SCORE=score)]


def generate_comparison(
    comparison: Sequence[ComparisonEntry],
    score: int,
    templates: TemplateSet,
    surfaces: Mapping[NormalizedString, str],
) -> list[str]:
    """Comparison comment naming uncited-paper recommendations per element."""
    polarity = select_polarity(score)
    block = templates.for_category(Category.MEANINGFUL_COMPARISON)
    entries = comparison[:MAX_COMPARISON_ENTRIES]
    tpl = block.pick(polarity, empty=not entries, variant=templates.variant)
    clauses = []
    for entry in entries:
        refs = recommend_related(entry)
        listed = ", ".join(f"{ref.paper_id} ({ref.year})" for ref in refs)
        clauses.append(f"for {element_text(entry.element, surfaces)}: {listed}")
    return [_fill(tpl, RECOMMENDATIONS="; ".join(clauses), SCORE=score)]


def generate_generic(
    category: Category, score: int, templates: TemplateSet
) -> list[str]:
    """One polarity-matched sentence with the score filled in."""
    if category not in GENERIC_CATEGORIES:
        raise ValueError(f"{category.value} has its own generator")
    polarity = select_polarity(score)
    block = templates.for_category(category)
    return [_fill(block.pick(polarity, empty=False, variant=templates.variant),
                  SCORE=score)]


@dataclass(frozen=True)
class ReviewDocument:
    """A complete generated review; the timestamp never enters comparisons."""

    paper_id: str
    scores: ScoreReport
    comments: dict[Category, list[str]]
    generated_at: str = field(compare=False, default="")


def assemble(
    paper_id: str,
    scores: ScoreReport,
    bundle: EvidenceBundle,
    templates: TemplateSet,
) -> ReviewDocument:
    """Build the full eight-category review document."""
    missing = [c for c in SCOREABLE_CATEGORIES if c not in scores.scores]
    if missing:
        raise ValueError(f"scores missing category {missing[0].value!r}")
    comments: dict[Category, list[str]] = {
        Category.SUMMARY: generate_summary(
            bundle.summary, scores.overall, templates
        ),
        Category.NOVELTY: generate_novelty(
            bundle.novelty_new,
            scores.scores[Category.NOVELTY].score,
            templates,
            bundle.surfaces,
        ),
        Category.MEANINGFUL_COMPARISON: generate_comparison(
            bundle.comparison,
            scores.scores[Category.MEANINGFUL_COMPARISON].score,
            templates,
            bundle.surfaces,
        ),
    }
    for category in GENERIC_CATEGORIES:
        comments[category] = generate_generic(
            category, scores.scores[category].score, templates
        )
    return ReviewDocument(
        paper_id=paper_id,
        scores=scores,
        comments=comments,
        generated_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )


def _category_title(category: Category) -> str:
    return category.value.replace("_", " ").title()


def render(doc: ReviewDocument, fmt: str = "markdown") -> str:
    """Canonical JSON or Markdown text; excludes the timestamp."""
    if fmt == "json":
        payload = {
            "paper_id": doc.paper_id,
            "scores": {
                category.value: {
                    "score": cs.score,
                    "confidence": cs.confidence,
                    "probabilities": list(cs.probabilities),
                }
                for category, cs in doc.scores.scores.items()
            },
            "comments": {
                category.value: sentences
                for category, sentences in doc.comments.items()
            },
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if fmt == "markdown":
        lines = [f"# Review of {doc.paper_id}", ""]
        for category in Category:
            title = _category_title(category)
            cs = doc.scores.scores.get(category)
            if cs is None:
                lines.append(f"## {title}")
            else:
                lines.append(
                    f"## {title} (score: {cs.score}, "
                    f"confidence: {cs.confidence:.6f})"
                )
            lines.append("")
            lines.extend(doc.comments.get(category, []))
            lines.append("")
        return "\n".join(lines)
    raise ValueError(f"unknown render format {fmt!r}")
