"""Score prediction: vocabulary, classifier network, gradients, training."""

from reviewgen.scoring.grad import (
    backward,
    finite_difference_grads,
    gradient_check,
    max_relative_error,
)
from reviewgen.scoring.model import (
    ModelParams,
    PROB_FLOOR,
    TrainConfig,
    attend,
    forward,
    forward_trace,
    gru_step,
    init_params,
    loss,
    sigmoid,
    softmax,
)
from reviewgen.scoring.sentences import category_sentences
from reviewgen.scoring.train import (
    CategoryScore,
    EvalMetrics,
    NUM_SCORE_CLASSES,
    ScoreModel,
    ScoreReport,
    TrainingExample,
    classify_sentence,
    evaluate,
    load_model,
    predict_scores,
    save_model,
    train,
)
from reviewgen.scoring.vocab import (
    PAD_INDEX,
    PAD_TOKEN,
    SEP_INDEX,
    SEP_TOKEN,
    UNK_INDEX,
    UNK_TOKEN,
    Vocab,
)

__all__ = [
    "CategoryScore",
    "EvalMetrics",
    "ModelParams",
    "NUM_SCORE_CLASSES",
    "PAD_INDEX",
    "PAD_TOKEN",
    "PROB_FLOOR",
    "ScoreModel",
    "ScoreReport",
    "SEP_INDEX",
    "SEP_TOKEN",
    "TrainConfig",
    "TrainingExample",
    "UNK_INDEX",
    "UNK_TOKEN",
    "Vocab",
    "attend",
    "backward",
    "category_sentences",
    "classify_sentence",
    "evaluate",
    "finite_difference_grads",
    "forward",
    "forward_trace",
    "gradient_check",
    "gru_step",
    "init_params",
    "load_model",
    "loss",
    "max_relative_error",
    "predict_scores",
    "save_model",
    "sigmoid",
    "softmax",
    "train",
]
