"""The score-classifier network: GRU encoder, attention, evidence head.

Token embeddings run through a single-layer GRU; attention pools the
hidden states into a context vector; the evidence feature vector maps
through a tanh layer; the concatenation feeds a linear softmax head with
C classes (5 for score prediction, 2 for the sentence selector).
Everything is float64 numpy, and all randomness is seeded.

Gate equations (update z, reset r, candidate h~):
    z_t = sigmoid(W_z x_t + U_z h_{t-1} + b_z)
    r_t = sigmoid(W_r x_t + U_r h_{t-1} + b_r)
    h~_t = tanh(W_h x_t + U_h (r_t * h_{t-1}) + b_h)
    h_t = (1 - z_t) * h_{t-1} + z_t * h~_t
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Iterator, Sequence

import numpy as np

from reviewgen.errors import EmptySequenceError, ShapeMismatchError
from reviewgen.evidence import FEATURE_DIM

PROB_FLOOR = 1e-12


@dataclass
class TrainConfig:
    """Dimensions and optimization knobs; the seed fixes all randomness."""

    d_w: int = 64
    d_h: int = 128
    d_a: int = 64
    d_e: int = 32
    learning_rate: float = 1e-3
    epochs: int = 20
    seed: int = 0
    clip_norm: float = 5.0
    max_seq_len: int = 128
    min_count: int = 1

    def __post_init__(self):
        for name in ("d_w", "d_h", "d_a", "d_e", "epochs", "max_seq_len"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass
class ModelParams:
    """All trainable tensors. Field order is the canonical parameter order."""

    embed: np.ndarray  # |V| x d_w
    w_z: np.ndarray  # d_h x d_w
    w_r: np.ndarray
    w_h: np.ndarray
    u_z: np.ndarray  # d_h x d_h
    u_r: np.ndarray
    u_h: np.ndarray
    b_z: np.ndarray  # d_h
    b_r: np.ndarray
    b_h: np.ndarray
    w_att: np.ndarray  # d_a x d_h
    v_att: np.ndarray  # d_a
    w_ev: np.ndarray  # d_e x FEATURE_DIM
    b_ev: np.ndarray  # d_e
    w_out: np.ndarray  # C x (d_h + d_e)
    b_out: np.ndarray  # C

    def items(self) -> Iterator[tuple[str, np.ndarray]]:
        for f in fields(self):
            yield f.name, getattr(self, f.name)

    @property
    def vocab_size(self) -> int:
        return self.embed.shape[0]

    @property
    def d_w(self) -> int:
        return self.embed.shape[1]

    @property
    def d_h(self) -> int:
        return self.w_z.shape[0]

    @property
    def d_a(self) -> int:
        return self.w_att.shape[0]

    @property
    def d_e(self) -> int:
        return self.w_ev.shape[0]

    @property
    def num_classes(self) -> int:
        return self.w_out.shape[0]

    def copy(self) -> "ModelParams":
        return ModelParams(**{name: arr.copy() for name, arr in self.items()})

    def zeros_like(self) -> dict[str, np.ndarray]:
        return {name: np.zeros_like(arr) for name, arr in self.items()}

    def check_shapes(self) -> None:
        v, d_w, d_h = self.vocab_size, self.d_w, self.d_h
        d_a, d_e, c = self.d_a, self.d_e, self.num_classes
        expected = {
            "embed": (v, d_w),
            "w_z": (d_h, d_w), "w_r": (d_h, d_w), "w_h": (d_h, d_w),
            "u_z": (d_h, d_h), "u_r": (d_h, d_h), "u_h": (d_h, d_h),
            "b_z": (d_h,), "b_r": (d_h,), "b_h": (d_h,),
            "w_att": (d_a, d_h), "v_att": (d_a,),
            "w_ev": (d_e, FEATURE_DIM), "b_ev": (d_e,),
            "w_out": (c, d_h + d_e), "b_out": (c,),
        }
        for name, arr in self.items():
            if arr.shape != expected[name]:
                raise ShapeMismatchError(
                    f"{name}: expected shape {expected[name]}, got {arr.shape}"
                )


def _glorot(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    fan_out, fan_in = shape if len(shape) == 2 else (shape[0], shape[0])
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape)


def init_params(
    vocab_size: int, config: TrainConfig, num_classes: int, seed: int | None = None
) -> ModelParams:
    """Fan-balanced uniform init for matrices, zeros for biases."""
    rng = np.random.default_rng(config.seed if seed is None else seed)
    d_w, d_h, d_a, d_e = config.d_w, config.d_h, config.d_a, config.d_e
    return ModelParams(
        embed=_glorot(rng, (vocab_size, d_w)),
        w_z=_glorot(rng, (d_h, d_w)),
        w_r=_glorot(rng, (d_h, d_w)),
        w_h=_glorot(rng, (d_h, d_w)),
        u_z=_glorot(rng, (d_h, d_h)),
        u_r=_glorot(rng, (d_h, d_h)),
        u_h=_glorot(rng, (d_h, d_h)),
        b_z=np.zeros(d_h),
        b_r=np.zeros(d_h),
        b_h=np.zeros(d_h),
        w_att=_glorot(rng, (d_a, d_h)),
        v_att=rng.uniform(-np.sqrt(6.0 / (d_a + 1)), np.sqrt(6.0 / (d_a + 1)), d_a),
        w_ev=_glorot(rng, (d_e, FEATURE_DIM)),
        b_ev=np.zeros(d_e),
        w_out=_glorot(rng, (num_classes, d_h + d_e)),
        b_out=np.zeros(num_classes),
    )


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - np.max(logits)
    ex = np.exp(shifted)
    return ex / ex.sum()


def gru_step(x_t: np.ndarray, h_prev: np.ndarray, params: ModelParams) -> np.ndarray:
    """One recurrence step; see the gate equations in the module docstring."""
    if x_t.shape != (params.d_w,) or h_prev.shape != (params.d_h,):
        raise ShapeMismatchError(
            f"gru_step: x {x_t.shape} vs d_w={params.d_w}, "
            f"h {h_prev.shape} vs d_h={params.d_h}"
        )
    z = sigmoid(params.w_z @ x_t + params.u_z @ h_prev + params.b_z)
    r = sigmoid(params.w_r @ x_t + params.u_r @ h_prev + params.b_r)
    h_tilde = np.tanh(params.w_h @ x_t + params.u_h @ (r * h_prev) + params.b_h)
    return (1.0 - z) * h_prev + z * h_tilde


def attend(
    hidden: Sequence[np.ndarray], params: ModelParams
) -> tuple[np.ndarray, np.ndarray]:
    """Pool hidden states: scores v.tanh(W h_i), softmax weights, weighted sum."""
    if len(hidden) == 0:
        raise EmptySequenceError("attend() requires at least one hidden state")
    h_mat = np.asarray(hidden)  # T x d_h
    scores = np.tanh(h_mat @ params.w_att.T) @ params.v_att  # T
    alpha = softmax(scores)
    return alpha @ h_mat, alpha


@dataclass
class ForwardTrace:
    """Intermediates cached by the forward pass for exact backprop."""

    token_ids: tuple[int, ...]
    features: np.ndarray
    x: np.ndarray  # T x d_w embedded inputs
    h: np.ndarray  # (T+1) x d_h, h[0] is the zero initial state
    z: np.ndarray  # T x d_h
    r: np.ndarray
    h_tilde: np.ndarray
    att_u: np.ndarray  # T x d_a, tanh(W_a h_i)
    alpha: np.ndarray  # T
    context: np.ndarray  # d_h
    ev_hidden: np.ndarray  # d_e, tanh(W_e f + b_e)
    probs: np.ndarray  # C


def forward_trace(
    token_ids: Sequence[int], features: np.ndarray, params: ModelParams
) -> ForwardTrace:
    if len(token_ids) == 0:
        raise EmptySequenceError("forward() requires a non-empty token sequence")
    features = np.asarray(features, dtype=np.float64)
    if features.shape != (FEATURE_DIM,):
        raise ShapeMismatchError(
            f"features: expected shape ({FEATURE_DIM},), got {features.shape}"
        )
    if max(token_ids) >= params.vocab_size or min(token_ids) < 0:
        raise ShapeMismatchError("token id outside embedding table")

    t_len = len(token_ids)
    d_h = params.d_h
    x = params.embed[np.asarray(token_ids)]
    h = np.zeros((t_len + 1, d_h))
    z = np.zeros((t_len, d_h))
    r = np.zeros((t_len, d_h))
    h_tilde = np.zeros((t_len, d_h))
    for t in range(t_len):
        z[t] = sigmoid(params.w_z @ x[t] + params.u_z @ h[t] + params.b_z)
        r[t] = sigmoid(params.w_r @ x[t] + params.u_r @ h[t] + params.b_r)
        h_tilde[t] = np.tanh(
            params.w_h @ x[t] + params.u_h @ (r[t] * h[t]) + params.b_h
        )
        h[t + 1] = (1.0 - z[t]) * h[t] + z[t] * h_tilde[t]

    att_u = np.tanh(h[1:] @ params.w_att.T)  # T x d_a
    scores = att_u @ params.v_att
    alpha = softmax(scores)
    context = alpha @ h[1:]

    ev_hidden = np.tanh(params.w_ev @ features + params.b_ev)
    logits = params.w_out @ np.concatenate([context, ev_hidden]) + params.b_out
    probs = softmax(logits)
    return ForwardTrace(
        token_ids=tuple(token_ids),
        features=features,
        x=x,
        h=h,
        z=z,
        r=r,
        h_tilde=h_tilde,
        att_u=att_u,
        alpha=alpha,
        context=context,
        ev_hidden=ev_hidden,
        probs=probs,
    )


def forward(
    token_ids: Sequence[int], features: np.ndarray, params: ModelParams
) -> np.ndarray:
    """Class probability vector for one example (sums to 1, strictly positive)."""
    return forward_trace(token_ids, features, params).probs


def loss(probs: np.ndarray, target: int) -> float:
    """Cross-entropy -ln p[target], clamped at p >= 1e-12."""
    if not 0 <= target < len(probs):
        raise ValueError(f"target {target} outside class range {len(probs)}")
    return float(-np.log(max(float(probs[target]), PROB_FLOOR)))
