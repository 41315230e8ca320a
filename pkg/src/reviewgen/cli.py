"""Command-line pipeline: build the background index, train and evaluate
score models, generate reviews, plot novelty over time, verify gradients.

Exit codes: 0 success, 2 bad input or usage, 3 missing or unreadable
artifact (index or model files), 1 failed internal check. Results go to
standard output; diagnostics go to standard error. Every command honors
--seed and produces byte-identical output given identical inputs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from reviewgen.background import (
    BackgroundIndex,
    build_index,
    load_index,
    restrict,
    save_index,
)
from reviewgen.corpus import (
    Category,
    PaperRecord,
    ReviewLabels,
    SCOREABLE_CATEGORIES,
    load_corpus,
    load_paper,
    load_review_labels,
    target_scores,
)
from reviewgen.errors import (
    MissingModelError,
    ParseError,
    ReviewgenError,
    ValidationError,
)
from reviewgen.evidence import (
    EvidenceBundle,
    build_bundle,
    format_timeline,
    novelty_timeline,
)
from reviewgen.review import (
    assemble,
    default_templates,
    load_templates,
    render,
)
from reviewgen.scoring import (
    NUM_SCORE_CLASSES,
    ScoreModel,
    TrainConfig,
    TrainingExample,
    Vocab,
    category_sentences,
    evaluate,
    gradient_check,
    load_model,
    predict_scores,
    save_model,
    train,
)

GRAD_TOLERANCE = 1e-4


class _CliError(Exception):
    """Carries an exit code and a message for main() to report."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _fail_input(message: str) -> _CliError:
    return _CliError(2, message)


def _fail_artifact(message: str) -> _CliError:
    return _CliError(3, message)


def _load_corpus(directory: str) -> list[PaperRecord]:
    try:
        return load_corpus(directory)
    except (ReviewgenError, OSError) as exc:
        raise _fail_input(f"cannot load corpus: {exc}") from exc


def _load_paper(path: str) -> PaperRecord:
    try:
        return load_paper(path)
    except (ReviewgenError, OSError) as exc:
        raise _fail_input(f"cannot load paper: {exc}") from exc


def _load_labels(path: str) -> list[ReviewLabels]:
    try:
        labels = load_review_labels(path)
    except (ReviewgenError, OSError) as exc:
        raise _fail_input(f"cannot load labels: {exc}") from exc
    if not labels:
        raise _fail_input(f"labels file {path} contains no entries")
    return labels


def _load_index(path: str) -> BackgroundIndex:
    if not Path(path).exists():
        raise _fail_artifact(f"index file not found: {path}")
    try:
        return load_index(path)
    except ReviewgenError as exc:
        raise _fail_artifact(f"cannot load index: {exc}") from exc


def _load_templates(path: str | None):
    if path is None:
        return default_templates()
    try:
        return load_templates(path)
    except (ReviewgenError, OSError) as exc:
        raise _fail_input(f"cannot load templates: {exc}") from exc


def _load_models(model_dir: str) -> dict[Category, ScoreModel]:
    models = {}
    for category in SCOREABLE_CATEGORIES:
        path = Path(model_dir) / f"{category.value}.json"
        try:
            models[category] = load_model(path)
        except MissingModelError as exc:
            raise _fail_artifact(
                f"missing model for category: {category.value}"
            ) from exc
        except ReviewgenError as exc:
            raise _fail_artifact(f"cannot load model {path}: {exc}") from exc
    return models


def _paper_index(
    index: BackgroundIndex, paper: PaperRecord, cutoff: int | None
) -> BackgroundIndex:
    """Restrict the index so only work before the paper (or --cutoff) counts."""
    effective = min(index.cutoff_year, cutoff if cutoff is not None else paper.year)
    return restrict(index, effective)


def _category_dataset(
    papers: list[PaperRecord],
    bundles: dict[str, EvidenceBundle],
    targets: dict[str, dict[Category, int]],
    category: Category,
    vocab: Vocab,
    max_seq_len: int,
) -> list[TrainingExample]:
    examples = []
    for paper in papers:
        score = targets[paper.paper_id].get(category)
        if score is None:
            continue
        tokens = category_sentences(
            paper, bundles[paper.paper_id], category, max_seq_len
        )
        examples.append(
            TrainingExample(
                token_ids=vocab.encode(tokens),
                features=bundles[paper.paper_id].features,
                target=score - 1,
            )
        )
    return examples


def cmd_build_background(args: argparse.Namespace) -> int:
    corpus = _load_corpus(args.corpus)
    try:
        index = build_index(corpus, args.cutoff)
    except (ReviewgenError, ValueError) as exc:
        raise _fail_input(f"cannot build index: {exc}") from exc
    save_index(index, args.index)
    print(f"papers {index.n_papers} elements {len(index.postings)}")
    return 0


def cmd_review(args: argparse.Namespace) -> int:
    paper = _load_paper(args.paper)
    index = _paper_index(_load_index(args.index), paper, args.cutoff)
    models = _load_models(args.models)
    templates = _load_templates(args.templates)
    bundle = build_bundle(paper, index)
    report = predict_scores(paper, bundle, models)
    doc = assemble(paper.paper_id, report, bundle, templates)
    sys.stdout.write(render(doc, args.format))
    return 0


def _train_config(args: argparse.Namespace) -> TrainConfig:
    try:
        return TrainConfig(seed=args.seed, epochs=args.epochs, learning_rate=args.lr)
    except ValueError as exc:
        raise _fail_input(str(exc)) from exc


def _prepare_labeled(
    corpus: list[PaperRecord],
    labels: list[ReviewLabels],
    index: BackgroundIndex,
    cutoff: int | None,
) -> tuple[list[PaperRecord], dict[str, EvidenceBundle], dict[str, dict[Category, int]]]:
    by_id = {lab.paper_id: lab for lab in labels}
    papers = [p for p in corpus if p.paper_id in by_id]
    if not papers:
        raise _fail_input("no corpus paper matches any labels entry")
    bundles = {}
    targets = {}
    for paper in papers:
        bundles[paper.paper_id] = build_bundle(
            paper, _paper_index(index, paper, cutoff)
        )
        targets[paper.paper_id] = target_scores(by_id[paper.paper_id])
    return papers, bundles, targets


def cmd_train(args: argparse.Namespace) -> int:
    corpus = _load_corpus(args.corpus)
    labels = _load_labels(args.labels)
    index = _load_index(args.index)
    config = _train_config(args)
    papers, bundles, targets = _prepare_labeled(corpus, labels, index, args.cutoff)

    model_dir = Path(args.models)
    model_dir.mkdir(parents=True, exist_ok=True)
    for category in SCOREABLE_CATEGORIES:
        sentence_sets = [
            category_sentences(p, bundles[p.paper_id], category, config.max_seq_len)
            for p in papers
        ]
        vocab = Vocab.build(sentence_sets, min_count=config.min_count)
        dataset = _category_dataset(
            papers, bundles, targets, category, vocab, config.max_seq_len
        )
        if not dataset:
            raise _fail_input(f"no labeled examples for category {category.value}")
        params = train(
            dataset,
            len(vocab),
            config,
            num_classes=NUM_SCORE_CLASSES,
            log=lambda line, c=category: print(f"[{c.value}] {line}"),
        )
        model = ScoreModel(params=params, vocab=vocab, max_seq_len=config.max_seq_len)
        save_model(model, model_dir / f"{category.value}.json")
        print(f"[{category.value}] saved ({len(dataset)} examples)")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    corpus = _load_corpus(args.corpus)
    labels = _load_labels(args.labels)
    index = _load_index(args.index)
    models = _load_models(args.models)
    papers, bundles, targets = _prepare_labeled(corpus, labels, index, args.cutoff)

    dataset = {
        category: _category_dataset(
            papers,
            bundles,
            targets,
            category,
            models[category].vocab,
            models[category].max_seq_len,
        )
        for category in SCOREABLE_CATEGORIES
    }
    try:
        metrics = evaluate(models, dataset)
    except ReviewgenError as exc:
        raise _fail_input(str(exc)) from exc
    for category in SCOREABLE_CATEGORIES:
        m = metrics[category]
        print(f"{category.value} accuracy {m.accuracy:.4f} mse {m.mse:.4f}")
    return 0


def _parse_years(text: str) -> list[int]:
    first, sep, last = text.partition("..")
    try:
        start, end = int(first), int(last)
    except ValueError:
        raise _fail_input(f"--years must look like 2010..2018, got {text!r}")
    if not sep or start > end:
        raise _fail_input(f"invalid year range {text!r}")
    return list(range(start, end + 1))


def cmd_novelty_timeline(args: argparse.Namespace) -> int:
    years = _parse_years(args.years)
    papers = [_load_paper(p) for p in args.papers]
    corpus = _load_corpus(args.corpus)
    try:
        timeline = novelty_timeline(papers, corpus, years)
    except (ReviewgenError, ValueError) as exc:
        raise _fail_input(str(exc)) from exc
    sys.stdout.write(format_timeline(timeline))
    return 0


def cmd_grad_check(args: argparse.Namespace) -> int:
    try:
        dims = tuple(int(d) for d in args.dims.split(","))
    except ValueError:
        raise _fail_input(f"--dims must be four integers, got {args.dims!r}")
    if len(dims) != 4 or any(d < 1 for d in dims):
        raise _fail_input(f"--dims must be four positive integers, got {args.dims!r}")
    error = gradient_check(args.seed, dims=dims, perturb=args.inject_bug)
    print(f"max relative error {error:.3e}")
    if error >= GRAD_TOLERANCE:
        print(
            f"gradient check failed: {error:.3e} >= {GRAD_TOLERANCE:.0e}",
            file=sys.stderr,
        )
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reviewgen",
        description="Draft peer reviews from paper knowledge graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-background", help="build and save a background index")
    p.add_argument("--corpus", required=True, help="directory of paper JSON files")
    p.add_argument("--cutoff", type=int, required=True, help="strict year cutoff")
    p.add_argument("--index", required=True, help="output index path")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_build_background)

    p = sub.add_parser("review", help="generate a review for one paper")
    p.add_argument("paper", help="paper JSON file")
    p.add_argument("--index", required=True, help="background index path")
    p.add_argument("--models", required=True, help="directory of trained models")
    p.add_argument("--templates", help="template JSON (default: built-in)")
    p.add_argument("--format", choices=("json", "markdown"), default="markdown")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--cutoff",
        type=int,
        help="background cutoff year (default: the paper's own year)",
    )
    p.set_defaults(func=cmd_review)

    p = sub.add_parser("train", help="train the seven category score models")
    p.add_argument("labels", help="review labels JSON file")
    p.add_argument("--corpus", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--models", required=True, help="output model directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--cutoff", type=int, help="override per-paper cutoff year")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score models against labeled papers")
    p.add_argument("labels", help="review labels JSON file")
    p.add_argument("--corpus", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--models", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cutoff", type=int, help="override per-paper cutoff year")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser(
        "novelty-timeline", help="mean new-element count per cutoff year"
    )
    p.add_argument("papers", nargs="+", help="paper JSON files to track")
    p.add_argument("--corpus", required=True, help="background corpus directory")
    p.add_argument("--years", required=True, help="inclusive range, e.g. 2010..2018")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_novelty_timeline)

    p = sub.add_parser("grad-check", help="verify analytic gradients numerically")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dims", default="4,4,4,4", help="d_w,d_h,d_a,d_e")
    p.add_argument("--inject-bug", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_grad_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except MissingModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ParseError, ValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ReviewgenError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
