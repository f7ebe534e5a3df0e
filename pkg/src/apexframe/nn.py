"""Grid feature extraction and desk-scale differentiable models.

Everything here runs in float64: a one-hidden-layer ReLU classifier with
two output classes, a from-scratch LSTM sequence head, numerically stable
softmax / cross-entropy, and exact analytic gradients (backpropagation
through time for the LSTM). No autodiff framework is involved, which keeps
the gradients directly checkable against finite differences.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Sequence

import numpy as np

from .errors import DataError
from .video import Frame

DEFAULT_GRID = 16
DEFAULT_HIDDEN = 100
N_CLASSES = 2
PROB_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# features

def extract_features(frame: Frame | np.ndarray, grid: int = DEFAULT_GRID) -> np.ndarray:
    """Average-pool a frame onto a grid x grid lattice of grayscale means.

    Channels are averaged first; rows and columns are partitioned as evenly
    as possible; the result is flattened row-major into a float64 vector of
    length grid**2. Pooled values stay in [0, 1].
    """
    pixels = frame.pixels if isinstance(frame, Frame) else np.asarray(frame)
    if pixels.ndim != 3:
        raise DataError(f"expected (height, width, channels) pixels, got shape {pixels.shape}")
    h, w = pixels.shape[0], pixels.shape[1]
    if grid < 1:
        raise DataError(f"grid must be >= 1, got {grid}")
    if grid > min(h, w):
        raise DataError(f"grid {grid} exceeds frame dimension {min(h, w)}")
    gray = pixels.astype(np.float64).mean(axis=2)
    return _pool_grid(gray[None, :, :], grid)[0].ravel()


def features_matrix(frames: np.ndarray | Sequence[Frame], grid: int = DEFAULT_GRID) -> np.ndarray:
    """Feature vectors for a stack of frames; returns (n, grid**2) float64."""
    if isinstance(frames, np.ndarray):
        stack = frames
    else:
        stack = np.stack([f.pixels if isinstance(f, Frame) else np.asarray(f) for f in frames])
    if stack.ndim != 4:
        raise DataError(f"expected (n, height, width, channels) stack, got shape {stack.shape}")
    h, w = stack.shape[1], stack.shape[2]
    if grid < 1 or grid > min(h, w):
        raise DataError(f"grid {grid} invalid for frames of size {h}x{w}")
    gray = stack.astype(np.float64).mean(axis=3)
    pooled = _pool_grid(gray, grid)
    return pooled.reshape(stack.shape[0], grid * grid)


def _pool_grid(gray: np.ndarray, grid: int) -> np.ndarray:
    """Pool (n, h, w) grayscale onto (n, grid, grid) block means."""
    n, h, w = gray.shape
    if h % grid == 0 and w % grid == 0:
        return gray.reshape(n, grid, h // grid, grid, w // grid).mean(axis=(2, 4))
    row_edges = (np.arange(grid + 1) * h) // grid
    col_edges = (np.arange(grid + 1) * w) // grid
    row_sums = np.add.reduceat(gray, row_edges[:-1], axis=1)
    cell_sums = np.add.reduceat(row_sums, col_edges[:-1], axis=2)
    counts = np.outer(np.diff(row_edges), np.diff(col_edges)).astype(np.float64)
    return cell_sums / counts


@dataclasses.dataclass(frozen=True)
class FeatureScaler:
    """Per-dimension standardization fitted on labeled training features.

    Dimensions with (near-)zero variance keep a unit divisor so constant
    features standardize to exactly zero.
    """

    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, features: np.ndarray) -> "FeatureScaler":
        if features.ndim != 2 or features.shape[0] < 1:
            raise DataError(f"expected non-empty (n, d) feature matrix, got shape {features.shape}")
        mean = features.mean(axis=0)
        std = features.std(axis=0)
        scale = np.where(std < 1e-12, 1.0, std)
        return cls(mean=mean, scale=scale)

    def transform(self, features: np.ndarray) -> np.ndarray:
        return (np.asarray(features, dtype=np.float64) - self.mean) / self.scale

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


# ---------------------------------------------------------------------------
# parameter containers

@dataclasses.dataclass(frozen=True)
class MlpParams:
    """One-hidden-layer ReLU classifier: logits = relu(x W1 + b1) W2 + b2."""

    w1: np.ndarray  # (d, h)
    b1: np.ndarray  # (h,)
    w2: np.ndarray  # (h, 2)
    b2: np.ndarray  # (2,)

    @property
    def input_dim(self) -> int:
        return self.w1.shape[0]


@dataclasses.dataclass(frozen=True)
class LstmParams:
    """Single-cell LSTM with a linear readout of the final hidden state.

    Gate matrices have shape (h, d + h) and act on [x_t; h_{t-1}].
    """

    w_input: np.ndarray
    b_input: np.ndarray
    w_forget: np.ndarray
    b_forget: np.ndarray
    w_output: np.ndarray
    b_output: np.ndarray
    w_candidate: np.ndarray
    b_candidate: np.ndarray
    w_readout: np.ndarray  # (h, 2)
    b_readout: np.ndarray  # (2,)

    @property
    def hidden_dim(self) -> int:
        return self.w_input.shape[0]

    @property
    def input_dim(self) -> int:
        return self.w_input.shape[1] - self.w_input.shape[0]


def param_arrays(params) -> list[np.ndarray]:
    """Parameter arrays in declaration order (stable across save/load)."""
    return [getattr(params, f.name) for f in dataclasses.fields(params)]


def params_from_arrays(template, arrays: Sequence[np.ndarray]):
    names = [f.name for f in dataclasses.fields(template)]
    if len(arrays) != len(names):
        raise DataError(f"expected {len(names)} arrays, got {len(arrays)}")
    return type(template)(**dict(zip(names, arrays)))


def zeros_like_params(params):
    return params_from_arrays(params, [np.zeros_like(a) for a in param_arrays(params)])


def _glorot_uniform(rng: np.random.Generator, shape: tuple[int, int]) -> np.ndarray:
    bound = math.sqrt(6.0 / (shape[0] + shape[1]))
    return rng.uniform(-bound, bound, size=shape)


def init_mlp(input_dim: int, hidden: int, rng: np.random.Generator) -> MlpParams:
    """Glorot-uniform weights, zero biases."""
    return MlpParams(
        w1=_glorot_uniform(rng, (input_dim, hidden)),
        b1=np.zeros(hidden),
        w2=_glorot_uniform(rng, (hidden, N_CLASSES)),
        b2=np.zeros(N_CLASSES),
    )


def init_lstm(input_dim: int, hidden: int, rng: np.random.Generator) -> LstmParams:
    gate = lambda: _glorot_uniform(rng, (hidden, input_dim + hidden))
    return LstmParams(
        w_input=gate(), b_input=np.zeros(hidden),
        w_forget=gate(), b_forget=np.zeros(hidden),
        w_output=gate(), b_output=np.zeros(hidden),
        w_candidate=gate(), b_candidate=np.zeros(hidden),
        w_readout=_glorot_uniform(rng, (hidden, N_CLASSES)),
        b_readout=np.zeros(N_CLASSES),
    )


# ---------------------------------------------------------------------------
# basic ops

def softmax(logits: np.ndarray) -> np.ndarray:
    """Max-subtracted softmax along the last axis."""
    z = np.asarray(logits, dtype=np.float64)
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(probabilities: np.ndarray, label: int) -> float:
    """-ln(p_label), with p clamped at PROB_FLOOR to keep the loss finite."""
    p = float(probabilities[label])
    return -math.log(max(p, PROB_FLOOR))


def mlp_logits(params: MlpParams, features: np.ndarray) -> np.ndarray:
    """Batched forward pass; features (n, d) -> logits (n, 2)."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != params.input_dim:
        raise DataError(f"features shape {x.shape} does not match input dim {params.input_dim}")
    hidden = np.maximum(x @ params.w1 + params.b1, 0.0)
    return hidden @ params.w2 + params.b2


def mlp_forward(params: MlpParams, x: np.ndarray) -> np.ndarray:
    """Single-example forward pass; x (d,) -> logits (2,)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DataError(f"expected a single feature vector, got shape {x.shape}")
    return mlp_logits(params, x[None, :])[0]


def mlp_loss_and_grads(params: MlpParams, features: np.ndarray, labels: np.ndarray):
    """Mean cross-entropy over the batch and its exact gradient.

    Returns (loss, MlpParams-shaped gradients). The logit-level gradient is
    the closed form (softmax - onehot) / batch_size.
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    n = x.shape[0]
    pre_hidden = x @ params.w1 + params.b1
    hidden = np.maximum(pre_hidden, 0.0)
    logits = hidden @ params.w2 + params.b2
    probs = softmax(logits)
    picked = probs[np.arange(n), y]
    loss = float(-np.log(np.maximum(picked, PROB_FLOOR)).mean())

    d_logits = probs.copy()
    d_logits[np.arange(n), y] -= 1.0
    d_logits /= n
    g_w2 = hidden.T @ d_logits
    g_b2 = d_logits.sum(axis=0)
    d_hidden = d_logits @ params.w2.T
    d_pre = d_hidden * (pre_hidden > 0.0)
    g_w1 = x.T @ d_pre
    g_b1 = d_pre.sum(axis=0)
    grads = MlpParams(w1=g_w1, b1=g_b1, w2=g_w2, b2=g_b2)
    return loss, grads


def mlp_gradients(params: MlpParams, x: np.ndarray, label: int) -> MlpParams:
    """Exact gradient of cross_entropy(softmax(mlp_forward(x))) w.r.t. params."""
    _, grads = mlp_loss_and_grads(params, np.asarray(x, dtype=np.float64)[None, :], np.array([label]))
    return grads


# ---------------------------------------------------------------------------
# LSTM

def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _lstm_run(params: LstmParams, sequence: np.ndarray):
    """Unrolled forward pass; returns (logits, per-step caches, h_last)."""
    seq = np.asarray(sequence, dtype=np.float64)
    if seq.ndim != 2 or seq.shape[0] < 1:
        raise DataError(f"expected a non-empty (steps, d) sequence, got shape {seq.shape}")
    if seq.shape[1] != params.input_dim:
        raise DataError(f"sequence width {seq.shape[1]} does not match input dim {params.input_dim}")
    h_dim = params.hidden_dim
    h = np.zeros(h_dim)
    c = np.zeros(h_dim)
    caches = []
    for x_t in seq:
        v = np.concatenate([x_t, h])
        gate_i = _sigmoid(params.w_input @ v + params.b_input)
        gate_f = _sigmoid(params.w_forget @ v + params.b_forget)
        gate_o = _sigmoid(params.w_output @ v + params.b_output)
        cand = np.tanh(params.w_candidate @ v + params.b_candidate)
        c_prev = c
        c = gate_f * c_prev + gate_i * cand
        tanh_c = np.tanh(c)
        h = gate_o * tanh_c
        caches.append((v, gate_i, gate_f, gate_o, cand, c_prev, tanh_c))
    logits = h @ params.w_readout + params.b_readout
    return logits, caches, h


def lstm_forward(params: LstmParams, sequence: np.ndarray) -> np.ndarray:
    """Logits for one feature sequence; h_0 = c_0 = 0, readout of h_last."""
    logits, _, _ = _lstm_run(params, sequence)
    return logits


def lstm_loss_and_grads(params: LstmParams, sequence: np.ndarray, label: int):
    """Cross-entropy loss and its exact gradient via backpropagation
    through time."""
    logits, caches, h_last = _lstm_run(params, sequence)
    probs = softmax(logits)
    loss = cross_entropy(probs, label)

    d_logits = probs.copy()
    d_logits[label] -= 1.0
    grads = zeros_like_params(params)
    g = {f.name: a for f, a in zip(dataclasses.fields(grads), param_arrays(grads))}
    g["w_readout"] += np.outer(h_last, d_logits)
    g["b_readout"] += d_logits

    d_dim = params.input_dim
    d_h = params.w_readout @ d_logits
    d_c = np.zeros(params.hidden_dim)
    for v, gate_i, gate_f, gate_o, cand, c_prev, tanh_c in reversed(caches):
        d_o = d_h * tanh_c
        d_c = d_c + d_h * gate_o * (1.0 - tanh_c * tanh_c)
        d_i = d_c * cand
        d_g = d_c * gate_i
        d_f = d_c * c_prev
        dz_i = d_i * gate_i * (1.0 - gate_i)
        dz_f = d_f * gate_f * (1.0 - gate_f)
        dz_o = d_o * gate_o * (1.0 - gate_o)
        dz_g = d_g * (1.0 - cand * cand)
        g["w_input"] += np.outer(dz_i, v)
        g["b_input"] += dz_i
        g["w_forget"] += np.outer(dz_f, v)
        g["b_forget"] += dz_f
        g["w_output"] += np.outer(dz_o, v)
        g["b_output"] += dz_o
        g["w_candidate"] += np.outer(dz_g, v)
        g["b_candidate"] += dz_g
        d_v = (
            params.w_input.T @ dz_i
            + params.w_forget.T @ dz_f
            + params.w_output.T @ dz_o
            + params.w_candidate.T @ dz_g
        )
        d_h = d_v[d_dim:]
        d_c = d_c * gate_f
    return loss, LstmParams(**g)


def lstm_gradients(params: LstmParams, sequence: np.ndarray, label: int) -> LstmParams:
    _, grads = lstm_loss_and_grads(params, sequence, label)
    return grads
