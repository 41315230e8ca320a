"""Training loop, score prediction, evaluation, and model persistence.

Training is per-example adaptive-moment descent with global-norm gradient
clipping. The dataset is put into a canonical order before the seeded
shuffle, so the result depends only on (seed, dataset contents), never on
input order. Model files are JSON with base64-packed little-endian
float64 tensors; save/load round-trips bitwise and writes atomically.
"""

from __future__ import annotations

import base64
import json
import math
import os
import tempfile
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from reviewgen.corpus import Category, PaperRecord, SCOREABLE_CATEGORIES
from reviewgen.errors import (
    EmptyDatasetError,
    FormatVersionError,
    MissingModelError,
    ParseError,
)
from reviewgen.evidence import FEATURE_DIM, EvidenceBundle
from reviewgen.scoring.grad import backward
from reviewgen.scoring.model import (
    ModelParams,
    TrainConfig,
    forward,
    forward_trace,
    loss,
    init_params,
)
from reviewgen.scoring.sentences import category_sentences
from reviewgen.scoring.vocab import Vocab

NUM_SCORE_CLASSES = 5

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

MODEL_FORMAT = "reviewgen-score-model"
MODEL_VERSION = 1


@dataclass(frozen=True, eq=False)
class TrainingExample:
    token_ids: tuple[int, ...]
    features: np.ndarray
    target: int  # 0-based class index


@dataclass
class ScoreModel:
    """Trained parameters plus the vocabulary that encodes their inputs."""

    params: ModelParams
    vocab: Vocab
    max_seq_len: int


@dataclass(frozen=True)
class CategoryScore:
    score: int  # 1..5
    confidence: float
    probabilities: tuple[float, ...]


@dataclass(frozen=True)
class ScoreReport:
    paper_id: str
    scores: dict[Category, CategoryScore]

    @property
    def overall(self) -> int:
        return self.scores[Category.OVERALL_RECOMMENDATION].score


@dataclass(frozen=True)
class EvalMetrics:
    accuracy: float
    mse: float


def _canonical_order(dataset: Sequence[TrainingExample]) -> list[TrainingExample]:
    return sorted(
        dataset, key=lambda ex: (ex.token_ids, ex.features.tobytes(), ex.target)
    )


def _clip_global_norm(grads: dict[str, np.ndarray], clip_norm: float) -> None:
    total = sum(float(np.sum(g * g)) for g in grads.values())
    norm = math.sqrt(total)
    if clip_norm > 0 and norm > clip_norm:
        scale = clip_norm / norm
        for g in grads.values():
            g *= scale


def train(
    dataset: Sequence[TrainingExample],
    vocab_size: int,
    config: TrainConfig,
    num_classes: int = NUM_SCORE_CLASSES,
    log: Callable[[str], None] | None = None,
) -> ModelParams:
    """Fit a classifier; deterministic given (config.seed, dataset contents)."""
    if not dataset:
        raise EmptyDatasetError("cannot train on an empty dataset")
    for ex in dataset:
        if not 0 <= ex.target < num_classes:
            raise ValueError(f"target {ex.target} outside [0, {num_classes})")
        if not ex.token_ids:
            raise ValueError("training example with empty token sequence")

    data = _canonical_order(dataset)
    params = init_params(vocab_size, config, num_classes)
    shuffle_rng = np.random.default_rng([config.seed, 1])
    m = params.zeros_like()
    v = params.zeros_like()
    step = 0
    n = len(data)

    for epoch in range(1, config.epochs + 1):
        total_loss = 0.0
        correct = 0
        for i in shuffle_rng.permutation(n):
            ex = data[i]
            ids = ex.token_ids[: config.max_seq_len]
            trace = forward_trace(ids, ex.features, params)
            total_loss += loss(trace.probs, ex.target)
            correct += int(np.argmax(trace.probs)) == ex.target
            grads = backward(ids, ex.features, ex.target, params, trace)
            _clip_global_norm(grads, config.clip_norm)
            step += 1
            bc1 = 1.0 - ADAM_BETA1**step
            bc2 = 1.0 - ADAM_BETA2**step
            for name, g in grads.items():
                m[name] = ADAM_BETA1 * m[name] + (1.0 - ADAM_BETA1) * g
                v[name] = ADAM_BETA2 * v[name] + (1.0 - ADAM_BETA2) * g * g
                denom = np.sqrt(v[name] / bc2) + ADAM_EPS
                getattr(params, name)[...] -= (
                    config.learning_rate * (m[name] / bc1) / denom
                )
        if log is not None:
            log(
                f"epoch {epoch}/{config.epochs} "
                f"loss {total_loss / n:.6f} acc {correct / n:.4f}"
            )
    return params


def _category_probs(
    paper: PaperRecord,
    bundle: EvidenceBundle,
    category: Category,
    model: ScoreModel,
) -> np.ndarray:
    tokens = category_sentences(paper, bundle, category, model.max_seq_len)
    token_ids = model.vocab.encode(tokens)
    return forward(token_ids, bundle.features, model.params)


def predict_scores(
    paper: PaperRecord,
    bundle: EvidenceBundle,
    models: Mapping[Category, ScoreModel],
) -> ScoreReport:
    """Per-category 1-5 scores with confidences; needs all seven models."""
    scores: dict[Category, CategoryScore] = {}
    for category in SCOREABLE_CATEGORIES:
        model = models.get(category)
        if model is None:
            raise MissingModelError(category.value)
        probs = _category_probs(paper, bundle, category, model)
        best = int(np.argmax(probs))  # argmax takes the lowest index on ties
        scores[category] = CategoryScore(
            score=best + 1,
            confidence=float(probs[best]),
            probabilities=tuple(float(p) for p in probs),
        )
    return ScoreReport(paper_id=paper.paper_id, scores=scores)


def evaluate(
    models: Mapping[Category, ScoreModel],
    dataset: Mapping[Category, Sequence[TrainingExample]],
) -> dict[Category, EvalMetrics]:
    """Exact-match accuracy and squared error of predicted 1-5 scores."""
    if not dataset or all(not exs for exs in dataset.values()):
        raise EmptyDatasetError("cannot evaluate on an empty dataset")
    metrics: dict[Category, EvalMetrics] = {}
    for category, examples in dataset.items():
        if not examples:
            continue
        model = models.get(category)
        if model is None:
            raise MissingModelError(category.value)
        hits = 0
        sq_err = 0.0
        for ex in examples:
            ids = ex.token_ids[: model.max_seq_len]
            probs = forward(ids, ex.features, model.params)
            predicted = int(np.argmax(probs)) + 1
            target = ex.target + 1
            hits += predicted == target
            sq_err += (predicted - target) ** 2
        n = len(examples)
        metrics[category] = EvalMetrics(accuracy=hits / n, mse=sq_err / n)
    return metrics


def classify_sentence(
    tokens: Sequence[str], model: ScoreModel
) -> tuple[bool, float]:
    """Select/not-select decision; returns the select-class probability.

    Evidence features play no role for sentence selection, so they are
    fixed to zeros. A tie (p = 0.5 exactly) is not selected.
    """
    if not tokens:
        raise ValueError("classify_sentence requires a non-empty token sequence")
    token_ids = model.vocab.encode(tokens)[: model.max_seq_len]
    probs = forward(token_ids, np.zeros(FEATURE_DIM), model.params)
    p_select = float(probs[1])
    return p_select > 0.5, p_select


def _encode_array(arr: np.ndarray) -> dict:
    return {
        "shape": list(arr.shape),
        "data": base64.b64encode(arr.astype("<f8").tobytes()).decode("ascii"),
    }


def _decode_array(obj: dict, name: str) -> np.ndarray:
    try:
        shape = tuple(int(s) for s in obj["shape"])
        raw = base64.b64decode(obj["data"], validate=True)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"model tensor {name!r} is malformed: {exc}") from exc
    expected = int(np.prod(shape)) * 8
    if len(raw) != expected:
        raise ParseError(
            f"model tensor {name!r}: {len(raw)} bytes, expected {expected}"
        )
    return np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(shape)


def save_model(model: ScoreModel, path: str | Path) -> None:
    """Atomically write a model file; identical models produce identical bytes."""
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "max_seq_len": model.max_seq_len,
        "min_count": model.vocab.min_count,
        "vocab": model.vocab.to_list(),
        "params": {name: _encode_array(arr) for name, arr in model.params.items()},
    }
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def load_model(path: str | Path) -> ScoreModel:
    """Inverse of save_model; rejects truncated or foreign files."""
    path = Path(path)
    if not path.exists():
        raise MissingModelError(path.stem)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read model file {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != MODEL_FORMAT:
        raise FormatVersionError(f"{path} is not a score-model file")
    if payload.get("version") != MODEL_VERSION:
        raise FormatVersionError(
            f"unsupported model version {payload.get('version')!r}"
        )
    try:
        vocab = Vocab.from_list(payload["vocab"], int(payload["min_count"]))
        max_seq_len = int(payload["max_seq_len"])
        raw_params = payload["params"]
        arrays = {
            f.name: _decode_array(raw_params[f.name], f.name)
            for f in fields(ModelParams)
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"model file {path} is missing fields: {exc}") from exc
    params = ModelParams(**arrays)
    params.check_shapes()
    return ScoreModel(params=params, vocab=vocab, max_seq_len=max_seq_len)
