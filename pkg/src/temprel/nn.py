"""From-scratch numerical kernel for the sequence classifiers.

Provides LSTM layers with exact backpropagation through time, inverted
dropout on layer inputs, a softmax output layer with categorical
cross-entropy, the rmsprop update, and central-difference gradient
checking. All arithmetic is float64.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    x = np.asarray(x, dtype=float)
    t = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + t), t / (1.0 + t))


def glorot_uniform(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    limit = np.sqrt(6.0 / (rows + cols))
    return rng.uniform(-limit, limit, (rows, cols))


def orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    return q * np.sign(np.diag(r))


def inverted_dropout_mask(dim: int, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Mask with surviving entries scaled by 1/keep so expectation is preserved."""
    keep = 1.0 - rate
    return (rng.random(dim) < keep) / keep


class LstmParams:
    """Weights of one LSTM layer.

    Gate blocks are stacked row-wise in the order input, forget, cell
    candidate, output: W is (4*hidden, in_dim), U is (4*hidden, hidden),
    b is (4*hidden,). Per-gate views are exposed as w_input, u_forget, etc.
    """

    def __init__(self, hidden: int, in_dim: int, W: np.ndarray, U: np.ndarray, b: np.ndarray):
        if W.shape != (4 * hidden, in_dim):
            raise ShapeError(f"W must be {(4 * hidden, in_dim)}, got {W.shape}")
        if U.shape != (4 * hidden, hidden):
            raise ShapeError(f"U must be {(4 * hidden, hidden)}, got {U.shape}")
        if b.shape != (4 * hidden,):
            raise ShapeError(f"b must be {(4 * hidden,)}, got {b.shape}")
        self.hidden = hidden
        self.in_dim = in_dim
        self.W = np.asarray(W, dtype=float)
        self.U = np.asarray(U, dtype=float)
        self.b = np.asarray(b, dtype=float)

    @classmethod
    def init(cls, hidden: int, in_dim: int, rng: np.random.Generator) -> "LstmParams":
        """Glorot-uniform input weights, orthogonal recurrent weights, zero
        biases except the forget-gate bias at 1.0."""
        W = np.vstack([glorot_uniform(hidden, in_dim, rng) for _ in range(4)])
        U = np.vstack([orthogonal(hidden, rng) for _ in range(4)])
        b = np.zeros(4 * hidden)
        b[hidden : 2 * hidden] = 1.0
        return cls(hidden, in_dim, W, U, b)

    def _gate(self, tensor: np.ndarray, gate: int):
        return tensor[gate * self.hidden : (gate + 1) * self.hidden]

    w_input = property(lambda self: self._gate(self.W, 0))
    w_forget = property(lambda self: self._gate(self.W, 1))
    w_cell = property(lambda self: self._gate(self.W, 2))
    w_output = property(lambda self: self._gate(self.W, 3))
    u_input = property(lambda self: self._gate(self.U, 0))
    u_forget = property(lambda self: self._gate(self.U, 1))
    u_cell = property(lambda self: self._gate(self.U, 2))
    u_output = property(lambda self: self._gate(self.U, 3))
    b_input = property(lambda self: self._gate(self.b, 0))
    b_forget = property(lambda self: self._gate(self.b, 1))
    b_cell = property(lambda self: self._gate(self.b, 2))
    b_output = property(lambda self: self._gate(self.b, 3))

    def tensors(self) -> dict[str, np.ndarray]:
        return {"W": self.W, "U": self.U, "b": self.b}

    def size(self) -> int:
        return self.W.size + self.U.size + self.b.size


def _gates(params: LstmParams, x: np.ndarray, h_prev: np.ndarray, c_prev: np.ndarray):
    h = params.hidden
    z = params.W @ x + params.U @ h_prev + params.b
    i = sigmoid(z[:h])
    f = sigmoid(z[h : 2 * h])
    g = np.tanh(z[2 * h : 3 * h])
    o = sigmoid(z[3 * h :])
    c = f * c_prev + i * g
    tanh_c = np.tanh(c)
    return i, f, g, o, c, tanh_c


def lstm_step(
    params: LstmParams, x: np.ndarray, h_prev: np.ndarray, c_prev: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """One LSTM cell update: gates via logistic sigmoid, candidate via tanh."""
    if x.shape != (params.in_dim,):
        raise ShapeError(f"input must be {(params.in_dim,)}, got {x.shape}")
    if h_prev.shape != (params.hidden,) or c_prev.shape != (params.hidden,):
        raise ShapeError("state dimensions do not match the layer width")
    i, f, g, o, c, tanh_c = _gates(params, x, h_prev, c_prev)
    return o * tanh_c, c


@dataclass
class LstmCache:
    """Per-step activations recorded by lstm_forward, in processing order."""

    steps: list[tuple]
    masks: list[np.ndarray] | None
    reverse: bool


def lstm_forward(
    params: LstmParams,
    xs,
    reverse: bool = False,
    dropout: float = 0.0,
    training: bool = False,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, LstmCache]:
    """Run the layer over a sequence from zero initial state.

    Returns the final hidden state and a cache sufficient for
    lstm_backward. With training on, an inverted-dropout mask is drawn for
    each input vector.
    """
    xs = list(xs)
    if not xs:
        raise ShapeError("cannot encode an empty sequence")
    ordered = list(reversed(xs)) if reverse else xs

    use_dropout = training and dropout > 0.0
    if use_dropout and rng is None:
        raise ValueError("dropout requires a random generator")

    h = np.zeros(params.hidden)
    c = np.zeros(params.hidden)
    steps = []
    masks = [] if use_dropout else None
    for x in ordered:
        if use_dropout:
            mask = inverted_dropout_mask(x.shape[0], dropout, rng)
            masks.append(mask)
            x = x * mask
        i, f, g, o, c_new, tanh_c = _gates(params, x, h, c)
        steps.append((x, h, c, i, f, g, o, tanh_c))
        h = o * tanh_c
        c = c_new
    return h, LstmCache(steps=steps, masks=masks, reverse=reverse)


def lstm_encode(
    params: LstmParams,
    xs,
    reverse: bool = False,
    dropout: float = 0.0,
    training: bool = False,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Final hidden state of the layer over the sequence."""
    h, _ = lstm_forward(params, xs, reverse=reverse, dropout=dropout, training=training, rng=rng)
    return h


def lstm_backward(
    params: LstmParams, cache: LstmCache, dh_final: np.ndarray
) -> tuple[dict[str, np.ndarray], list[np.ndarray]]:
    """Backpropagation through time from a gradient on the final hidden state.

    Returns parameter gradients and input gradients aligned with the
    original (pre-reversal) sequence order; input gradients are mapped
    back through any dropout masks.
    """
    dW = np.zeros_like(params.W)
    dU = np.zeros_like(params.U)
    db = np.zeros_like(params.b)
    dh = np.asarray(dh_final, dtype=float).copy()
    dc = np.zeros(params.hidden)
    dxs: list[np.ndarray | None] = [None] * len(cache.steps)

    for t in range(len(cache.steps) - 1, -1, -1):
        x, h_prev, c_prev, i, f, g, o, tanh_c = cache.steps[t]
        do = dh * tanh_c
        dc = dc + dh * o * (1.0 - tanh_c * tanh_c)
        di = dc * g
        dg = dc * i
        df = dc * c_prev
        dc_prev = dc * f
        da = np.concatenate(
            [di * i * (1.0 - i), df * f * (1.0 - f), dg * (1.0 - g * g), do * o * (1.0 - o)]
        )
        dW += np.outer(da, x)
        dU += np.outer(da, h_prev)
        db += da
        dx = params.W.T @ da
        if cache.masks is not None:
            dx = dx * cache.masks[t]
        dxs[t] = dx
        dh = params.U.T @ da
        dc = dc_prev

    if cache.reverse:
        dxs.reverse()
    return {"W": dW, "U": dU, "b": db}, dxs  # type: ignore[return-value]


class DenseParams:
    """Affine output layer weights: W is (out, in), b is (out,)."""

    def __init__(self, W: np.ndarray, b: np.ndarray):
        if W.ndim != 2 or b.shape != (W.shape[0],):
            raise ShapeError(f"inconsistent dense shapes {W.shape} / {b.shape}")
        self.W = np.asarray(W, dtype=float)
        self.b = np.asarray(b, dtype=float)

    @classmethod
    def zeros(cls, out_dim: int, in_dim: int) -> "DenseParams":
        return cls(np.zeros((out_dim, in_dim)), np.zeros(out_dim))

    def tensors(self) -> dict[str, np.ndarray]:
        return {"W": self.W, "b": self.b}

    def size(self) -> int:
        return self.W.size + self.b.size


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - np.max(logits)
    e = np.exp(shifted)
    return e / e.sum()


def dense_softmax(params: DenseParams, x: np.ndarray) -> np.ndarray:
    if x.shape != (params.W.shape[1],):
        raise ShapeError(f"input must be {(params.W.shape[1],)}, got {x.shape}")
    return softmax(params.W @ x + params.b)


def dense_softmax_backward(
    params: DenseParams, x: np.ndarray, probs: np.ndarray, target: int
) -> tuple[dict[str, np.ndarray], np.ndarray]:
    """Gradients of cross_entropy(dense_softmax(x), target)."""
    dlogits = probs.copy()
    dlogits[target] -= 1.0
    grads = {"W": np.outer(dlogits, x), "b": dlogits}
    return grads, params.W.T @ dlogits


def cross_entropy(pred: np.ndarray, target_class: int) -> float:
    """Negative log-likelihood of the target class under pred."""
    pred = np.asarray(pred, dtype=float)
    if not 0 <= int(target_class) < pred.shape[0]:
        raise ValueError(f"target class {target_class} out of range for {pred.shape[0]} classes")
    if abs(pred.sum() - 1.0) > 1e-6:
        raise ValueError("prediction does not sum to 1")
    return float(-np.log(max(pred[int(target_class)], 1e-12)))


class RmsProp:
    """rmsprop: cache = rho*cache + (1-rho)*g^2; param -= lr*g/(sqrt(cache)+eps)."""

    def __init__(self, lr: float = 0.001, rho: float = 0.9, eps: float = 1e-8):
        self.lr = lr
        self.rho = rho
        self.eps = eps
        self.cache: dict[str, np.ndarray] = {}

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        """Update the parameter arrays in place."""
        for name, g in grads.items():
            p = params[name]
            if p.shape != g.shape:
                raise ShapeError(f"gradient shape {g.shape} != param shape {p.shape} for {name}")
            c = self.cache.get(name)
            if c is None:
                c = self.cache[name] = np.zeros_like(p)
            c *= self.rho
            c += (1.0 - self.rho) * g * g
            p -= self.lr * g / (np.sqrt(c) + self.eps)


def rmsprop_step(
    state: RmsProp, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]
) -> dict[str, np.ndarray]:
    state.step(params, grads)
    return params


def gradient_check(
    loss_fn,
    params: dict[str, np.ndarray],
    analytic: dict[str, np.ndarray],
    epsilon: float = 1e-5,
    sample_per_tensor: int | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """Max relative error between analytic gradients and central differences.

    loss_fn must be a deterministic closure over the arrays in params; each
    scalar entry is perturbed by +-epsilon in place and restored. The
    relative error is |a - n| / max(|a|, |n|, 1e-8), maximized over all
    checked entries (optionally a random sample per tensor).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    worst = 0.0
    for name, arr in params.items():
        flat = arr.reshape(-1)
        gflat = analytic[name].reshape(-1)
        if sample_per_tensor is not None and flat.size > sample_per_tensor:
            if rng is None:
                rng = np.random.default_rng(0)
            indices = rng.choice(flat.size, size=sample_per_tensor, replace=False)
        else:
            indices = range(flat.size)
        for k in indices:
            orig = flat[k]
            flat[k] = orig + epsilon
            loss_plus = loss_fn()
            flat[k] = orig - epsilon
            loss_minus = loss_fn()
            flat[k] = orig
            numeric = (loss_plus - loss_minus) / (2.0 * epsilon)
            denom = max(abs(gflat[k]), abs(numeric), 1e-8)
            worst = max(worst, abs(gflat[k] - numeric) / denom)
    return worst
