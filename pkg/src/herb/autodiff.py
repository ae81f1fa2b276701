"""Minimal dense 2-D tensor engine with reverse-mode differentiation.

Tensors wrap float64 numpy arrays of shape (rows, cols). Each operation
records its parents and per-parent gradient closures; backward() walks
the recorded graph in reverse topological order and accumulates grads
into every tensor that requires them. Single-threaded tape; the dense
kernels underneath are plain numpy.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .errors import NumericError, ShapeError
from .rng import Rng


class Tensor:
    """A 2-D float64 array node in the gradient tape."""

    __slots__ = ("data", "requires_grad", "grad", "_parents", "_grad_fns", "_op")

    def __init__(self, data, requires_grad: bool = False, _parents=(), _grad_fns=(), _op="leaf"):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise ShapeError("tensor", arr.shape)
        self.data = arr
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self._parents = _parents
        self._grad_fns = _grad_fns
        self._op = _op

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def item(self) -> float:
        if self.data.size != 1:
            raise ValueError(f"item() on tensor of shape {self.shape}")
        return float(self.data[0, 0])

    def backward(self) -> None:
        backward(self)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self):
        return f"Tensor(shape={self.shape}, op={self._op}, requires_grad={self.requires_grad})"

    # Operator sugar; all work happens in the module-level functions.
    def __matmul__(self, other):
        return matmul(self, other)

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return scale(self, float(other))
        return mul(self, other)

    def __rmul__(self, other):
        return scale(self, float(other))

    def __neg__(self):
        return neg(self)


def constant(values) -> Tensor:
    return Tensor(values, requires_grad=False)


def parameter(values) -> Tensor:
    """A trainable leaf; copies its input so callers can reuse buffers."""
    return Tensor(np.array(values, dtype=np.float64), requires_grad=True)


def _result(data, parents, grad_fns, op) -> Tensor:
    needs = any(p.requires_grad for p in parents)
    if not needs:
        return Tensor(data, requires_grad=False, _op=op)
    return Tensor(data, requires_grad=True, _parents=tuple(parents), _grad_fns=tuple(grad_fns), _op=op)


def backward(loss: Tensor) -> None:
    """Accumulate gradients of a scalar loss through the recorded graph."""
    if loss.shape != (1, 1):
        raise ValueError(f"backward() needs a 1x1 tensor, got shape {loss.shape}")
    topo: list[Tensor] = []
    seen = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            topo.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if p.requires_grad and id(p) not in seen:
                stack.append((p, False))
    loss.grad = np.ones((1, 1))
    for node in reversed(topo):
        g = node.grad
        if g is None:
            continue
        for parent, fn in zip(node._parents, node._grad_fns):
            if not parent.requires_grad:
                continue
            contrib = fn(g)
            # accumulation is out-of-place, so aliasing fn output is safe
            parent.grad = contrib if parent.grad is None else parent.grad + contrib


# ---------------------------------------------------------------------------
# operations


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.cols != b.rows:
        raise ShapeError("matmul", a.shape, b.shape)
    out = a.data @ b.data
    grad_fns = (
        lambda g: g @ b.data.T,
        lambda g: a.data.T @ g,
    )
    return _result(out, (a, b), grad_fns, "matmul")


def _broadcast_check(op: str, a: Tensor, b: Tensor) -> str:
    """Allowed: equal shapes, b a row vector (1,d), or b a column (n,1)."""
    if b.shape == a.shape:
        return "same"
    if b.shape == (1, a.cols):
        return "row"
    if b.shape == (a.rows, 1):
        return "col"
    raise ShapeError(op, a.shape, b.shape)


def _reduce_to(g: np.ndarray, kind: str) -> np.ndarray:
    if kind == "same":
        return g
    if kind == "row":
        return g.sum(axis=0, keepdims=True)
    return g.sum(axis=1, keepdims=True)


def add(a: Tensor, b) -> Tensor:
    if isinstance(b, (int, float)):
        return _result(a.data + b, (a,), (lambda g: g,), "add_scalar")
    kind = _broadcast_check("add", a, b)
    grad_fns = (lambda g: g, lambda g: _reduce_to(g, kind))
    return _result(a.data + b.data, (a, b), grad_fns, "add")


def sub(a: Tensor, b: Tensor) -> Tensor:
    kind = _broadcast_check("sub", a, b)
    grad_fns = (lambda g: g, lambda g: -_reduce_to(g, kind))
    return _result(a.data - b.data, (a, b), grad_fns, "sub")


def mul(a: Tensor, b: Tensor) -> Tensor:
    kind = _broadcast_check("mul", a, b)
    grad_fns = (
        lambda g: g * b.data,
        lambda g: _reduce_to(g * a.data, kind),
    )
    return _result(a.data * b.data, (a, b), grad_fns, "mul")


def scale(a: Tensor, s: float) -> Tensor:
    return _result(a.data * s, (a,), (lambda g: g * s,), "scale")


def neg(a: Tensor) -> Tensor:
    return _result(-a.data, (a,), (lambda g: -g,), "neg")


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0  # gradient defined as 0 at exactly 0
    return _result(a.data * mask, (a,), (lambda g: g * mask,), "relu")


def tanh(a: Tensor) -> Tensor:
    out = np.tanh(a.data)
    return _result(out, (a,), (lambda g: g * (1.0 - out * out),), "tanh")


def exp(a: Tensor) -> Tensor:
    out = np.exp(a.data)
    return _result(out, (a,), (lambda g: g * out,), "exp")


def log(a: Tensor) -> Tensor:
    if np.any(a.data <= 0):
        worst = float(a.data.min())
        raise NumericError(f"log of non-positive value (min entry {worst})")
    return _result(np.log(a.data), (a,), (lambda g: g / a.data,), "log")


def sum_all(a: Tensor) -> Tensor:
    grad_fns = (lambda g: np.full(a.shape, g[0, 0]),)
    return _result(np.array([[a.data.sum()]]), (a,), grad_fns, "sum")


def sum_squares(a: Tensor) -> Tensor:
    """Scalar sum of squared entries (squared Frobenius norm)."""
    grad_fns = (lambda g: g[0, 0] * 2.0 * a.data,)
    return _result(np.array([[float((a.data * a.data).sum())]]), (a,), grad_fns, "sum_squares")


def dropout(t: Tensor, rate: float, training: bool, rng: Optional[Rng] = None) -> Tensor:
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return _result(t.data, (t,), (lambda g: g,), "dropout_eval")
    if rng is None:
        raise ValueError("dropout in training mode needs an rng")
    keep = (rng.uniform(size=t.shape) >= rate) / (1.0 - rate)
    return _result(t.data * keep, (t,), (lambda g: g * keep,), "dropout")


def softmax_cross_entropy(logits: Tensor, labels, mask) -> Tensor:
    """Mean negative log-likelihood of `labels` over the rows in `mask`.

    Row-max subtraction keeps the log-sum-exp stable. `labels` is a full
    length-n class-index vector; `mask` is the node subset to average over.
    """
    mask = np.asarray(mask, dtype=np.intp).ravel()
    if mask.size == 0:
        raise ValueError("softmax_cross_entropy: empty mask")
    labels = np.asarray(labels, dtype=np.intp).ravel()
    if mask.max() >= logits.rows:
        raise ShapeError("softmax_cross_entropy", logits.shape, (int(mask.max()) + 1,))
    picked = labels[mask]
    if picked.min() < 0 or picked.max() >= logits.cols:
        raise ValueError(f"label out of range [0, {logits.cols})")
    rows = logits.data[mask]
    shifted = rows - rows.max(axis=1, keepdims=True)
    expo = np.exp(shifted)
    softmax = expo / expo.sum(axis=1, keepdims=True)
    log_probs = shifted - np.log(expo.sum(axis=1, keepdims=True))
    k = mask.size
    loss = -log_probs[np.arange(k), picked].mean()

    def grad_fn(g):
        gl = np.zeros(logits.shape)
        delta = softmax.copy()
        delta[np.arange(k), picked] -= 1.0
        gl[mask] = delta * (g[0, 0] / k)
        return gl

    return _result(np.array([[loss]]), (logits,), (grad_fn,), "softmax_ce")


def pairwise_dot(z: Tensor, pairs) -> Tensor:
    """Row inner products z[u]·z[v] for each (u, v) pair, as an (m, 1) tensor."""
    pairs = np.asarray(pairs, dtype=np.intp).reshape(-1, 2)
    u, v = pairs[:, 0], pairs[:, 1]
    scores = np.einsum("ij,ij->i", z.data[u], z.data[v]).reshape(-1, 1)

    def grad_fn(g):
        gz = np.zeros(z.shape)
        np.add.at(gz, u, g * z.data[v])
        np.add.at(gz, v, g * z.data[u])
        return gz

    return _result(scores, (z,), (grad_fn,), "pairwise_dot")


def bce_with_logits(scores: Tensor, targets) -> Tensor:
    """Mean binary cross-entropy of sigmoid(scores) against 0/1 targets."""
    y = np.asarray(targets, dtype=np.float64).reshape(scores.shape)
    s = scores.data
    # stable: max(s,0) - s*y + log(1 + exp(-|s|))
    e = np.exp(-np.abs(s))
    loss = float((np.maximum(s, 0) - s * y + np.log1p(e)).mean())
    sig = np.where(s >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    m = s.size

    def grad_fn(g):
        return g[0, 0] * (sig - y) / m

    return _result(np.array([[loss]]), (scores,), (grad_fn,), "bce")


_UNARY = {"relu": relu, "exp": exp, "log": log, "neg": neg, "tanh": tanh}
_BINARY = {"add": add, "sub": sub, "mul": mul}


def elementwise(op_kind: str, a: Tensor, b: Optional[Tensor] = None, scalar: Optional[float] = None) -> Tensor:
    """Dispatch an elementwise op by name (unary when b is absent)."""
    if op_kind == "scale":
        if scalar is None:
            raise ValueError("scale needs a scalar")
        return scale(a, scalar)
    if op_kind in _UNARY:
        if b is not None:
            raise ValueError(f"{op_kind} is unary")
        return _UNARY[op_kind](a)
    if op_kind in _BINARY:
        if b is None:
            raise ValueError(f"{op_kind} needs two operands")
        return _BINARY[op_kind](a, b)
    raise ValueError(f"unknown elementwise op {op_kind!r}")


# ---------------------------------------------------------------------------
# optimizer


class Adam:
    """Adam with decoupled weight decay over a fixed parameter list.

    Moment arrays are allocated per parameter at construction; step()
    requires every parameter to carry a gradient and clears them after
    the update.
    """

    def __init__(self, params: Sequence[Tensor], lr: float = 0.01, weight_decay: float = 0.0,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = list(params)
        self.lr = lr
        self.weight_decay = weight_decay
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros(p.shape) for p in self.params]
        self.v = [np.zeros(p.shape) for p in self.params]

    def step(self) -> None:
        for i, p in enumerate(self.params):
            if p.grad is None:
                raise ValueError(f"adam step: parameter {i} has no gradient")
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for i, p in enumerate(self.params):
            g = p.grad
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * (g * g)
            m_hat = self.m[i] / bc1
            v_hat = self.v[i] / bc2
            update = m_hat / (np.sqrt(v_hat) + self.eps)
            if self.weight_decay:
                update = update + self.weight_decay * p.data
            p.data = p.data - self.lr * update
            p.grad = None


def adam_step(state: Adam) -> None:
    """Apply one optimizer step; alias for Adam.step()."""
    state.step()
