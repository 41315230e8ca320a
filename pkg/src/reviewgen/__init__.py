"""reviewgen: draft peer reviews from paper knowledge graphs.

The pipeline builds a knowledge graph for a submission, compares it with
a background index of earlier work, turns the differences into
per-category evidence, predicts 1-5 review scores with a small
attentional recurrent classifier, and renders template-based comments.
"""

from reviewgen.background import (
    BackgroundIndex,
    ElementMatch,
    PaperRef,
    build_index,
    load_index,
    match_element,
    merge,
    restrict,
    save_index,
    tfidf,
)
from reviewgen.corpus import (
    Category,
    EntityType,
    IEAnnotations,
    Mention,
    PaperRecord,
    RelationAnnotation,
    RelationType,
    ReviewLabels,
    SCOREABLE_CATEGORIES,
    SectionKind,
    Sentence,
    load_corpus,
    load_paper,
    load_review_labels,
    parse_paper,
    serialize_paper,
    target_scores,
)
from reviewgen.errors import (
    CutoffMismatchError,
    EmptyDatasetError,
    EmptySequenceError,
    FormatVersionError,
    MissingModelError,
    OverlappingPapersError,
    ParseError,
    PreconditionViolation,
    ReviewgenError,
    ShapeMismatchError,
    UnsupportedRelationError,
    ValidationError,
)
from reviewgen.evidence import (
    ComparisonEntry,
    EvidenceBundle,
    FEATURE_DIM,
    FEATURE_NAMES,
    NoveltyTimeline,
    SUMMARY_RELATIONS,
    build_bundle,
    evidence_features,
    extract_comparison,
    extract_novelty,
    extract_summary,
    format_timeline,
    novelty_timeline,
    recommend_related,
)
from reviewgen.kg import (
    Edge,
    ElementKey,
    Entity,
    KnowledgeGraph,
    RELATED_SCOPE,
    TARGET_SCOPE,
    build_kg,
    coreferential,
    edge_key,
    elements,
    normalize,
    representative_mention,
)
from reviewgen.review import (
    Polarity,
    ReviewDocument,
    TemplateSet,
    assemble,
    default_templates,
    generate_comparison,
    generate_generic,
    generate_novelty,
    generate_summary,
    load_templates,
    realize_relation,
    render,
    select_polarity,
)
from reviewgen.scoring import (
    CategoryScore,
    EvalMetrics,
    ModelParams,
    ScoreModel,
    ScoreReport,
    TrainConfig,
    TrainingExample,
    Vocab,
    backward,
    category_sentences,
    classify_sentence,
    evaluate,
    forward,
    gradient_check,
    load_model,
    predict_scores,
    save_model,
    train,
)

__version__ = "0.1.0"
