"""Dense float64 tensors with reverse-mode gradients, SGD, and a finite-difference checker.

Every primitive records itself on the implicit computation graph (unless
wrapped in ``no_grad``) so that ``backward`` can run a reverse sweep from a
scalar loss.  All arithmetic is double precision and deterministic; producing
a non-finite value raises ``FloatingPointError`` at the op that caused it.
"""

from __future__ import annotations

import math
import struct
from contextlib import contextmanager
from pathlib import Path

import numpy as np

CHECKPOINT_MAGIC = b"EMOT"
CHECKPOINT_VERSION = 1

_GRAD_ENABLED = True


@contextmanager
def no_grad():
    """Disable graph recording inside the block (inference / finite differences)."""
    global _GRAD_ENABLED
    prev = _GRAD_ENABLED
    _GRAD_ENABLED = False
    try:
        yield
    finally:
        _GRAD_ENABLED = prev


class Tensor:
    """A float64 array plus the bookkeeping needed for the reverse sweep."""

    __slots__ = ("data", "grad", "requires_grad", "name", "_parents", "_backward_fn", "_swept")

    def __init__(self, data, requires_grad: bool = False, name: str = ""):
        arr = np.asarray(data, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise FloatingPointError(f"non-finite values in tensor {name or '<anonymous>'}")
        self.data = arr
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self.name = name
        self._parents: tuple[Tensor, ...] = ()
        self._backward_fn = None
        self._swept = False

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self) -> None:
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        else:
            self.grad.fill(0.0)

    def __repr__(self) -> str:
        tag = f" {self.name!r}" if self.name else ""
        return f"Tensor(shape={self.data.shape}{tag})"


class Parameter(Tensor):
    """A named, learnable tensor; its gradient buffer always exists."""

    def __init__(self, data, name: str):
        super().__init__(data, requires_grad=True, name=name)
        self.grad = np.zeros_like(self.data)


def _accumulate(t: Tensor, g: np.ndarray) -> None:
    if t.grad is None:
        t.grad = np.zeros_like(t.data)
    t.grad += g


def _result(data, parents: tuple[Tensor, ...], backward_fn) -> Tensor:
    track = _GRAD_ENABLED and any(p.requires_grad for p in parents)
    out = Tensor(data, requires_grad=track)
    if track:
        out._parents = parents
        out._backward_fn = backward_fn
    return out


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


# ---------------------------------------------------------------------------
# Primitives
# ---------------------------------------------------------------------------

def matmul(a: Tensor, b: Tensor, transpose_b: bool = False) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ValueError(f"matmul expects 2-d operands, got {a.data.shape} and {b.data.shape}")
    inner_b = b.data.shape[1] if transpose_b else b.data.shape[0]
    if a.data.shape[1] != inner_b:
        raise ValueError(f"matmul shape mismatch: {a.data.shape} @ {b.data.shape} (transpose_b={transpose_b})")
    out_data = a.data @ (b.data.T if transpose_b else b.data)

    def backward_fn(g):
        if transpose_b:
            if a.requires_grad:
                _accumulate(a, g @ b.data)
            if b.requires_grad:
                _accumulate(b, g.T @ a.data)
        else:
            if a.requires_grad:
                _accumulate(a, g @ b.data.T)
            if b.requires_grad:
                _accumulate(b, a.data.T @ g)

    return _result(out_data, (a, b), backward_fn)


def add(a: Tensor, b: Tensor) -> Tensor:
    try:
        out_data = a.data + b.data
    except ValueError:
        raise ValueError(f"add shape mismatch: {a.data.shape} vs {b.data.shape}") from None

    def backward_fn(g):
        if a.requires_grad:
            _accumulate(a, _unbroadcast(g, a.data.shape))
        if b.requires_grad:
            _accumulate(b, _unbroadcast(g, b.data.shape))

    return _result(out_data, (a, b), backward_fn)


def scalar_mul(a: Tensor, s: float) -> Tensor:
    s = float(s)

    def backward_fn(g):
        if a.requires_grad:
            _accumulate(a, g * s)

    return _result(a.data * s, (a,), backward_fn)


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0

    def backward_fn(g):
        if a.requires_grad:
            _accumulate(a, g * mask)

    return _result(np.where(mask, a.data, 0.0), (a,), backward_fn)


def tensor_sum(a: Tensor) -> Tensor:
    def backward_fn(g):
        if a.requires_grad:
            _accumulate(a, np.full_like(a.data, float(g)))

    return _result(a.data.sum(), (a,), backward_fn)


def softmax(a: Tensor) -> Tensor:
    """Row softmax over the last axis."""
    shifted = a.data - a.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    p = e / e.sum(axis=-1, keepdims=True)

    def backward_fn(g):
        if a.requires_grad:
            _accumulate(a, p * (g - (g * p).sum(axis=-1, keepdims=True)))

    return _result(p, (a,), backward_fn)


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-12) -> Tensor:
    """Normalize each row to zero mean / unit variance, then scale and shift."""
    if gamma.data.shape != x.data.shape[-1:] or beta.data.shape != x.data.shape[-1:]:
        raise ValueError(
            f"layer_norm affine shape mismatch: x {x.data.shape}, gamma {gamma.data.shape}, beta {beta.data.shape}"
        )
    mu = x.data.mean(axis=-1, keepdims=True)
    centered = x.data - mu
    var = (centered * centered).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = centered * inv

    def backward_fn(g):
        if gamma.requires_grad:
            _accumulate(gamma, (g * xhat).sum(axis=0))
        if beta.requires_grad:
            _accumulate(beta, g.sum(axis=0))
        if x.requires_grad:
            dxhat = g * gamma.data
            term = dxhat - dxhat.mean(axis=-1, keepdims=True) - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)
            _accumulate(x, inv * term)

    return _result(xhat * gamma.data + beta.data, (x, gamma, beta), backward_fn)


def embedding(table: Tensor, ids) -> Tensor:
    """Gather rows of ``table`` (duplicate ids accumulate gradient)."""
    idx = np.asarray(ids, dtype=np.int64)
    if idx.ndim != 1:
        raise ValueError(f"embedding ids must be 1-d, got shape {idx.shape}")
    if idx.size and (idx.min() < 0 or idx.max() >= table.data.shape[0]):
        raise ValueError(f"embedding id out of range for table of {table.data.shape[0]} rows")

    def backward_fn(g):
        if table.requires_grad:
            if table.grad is None:
                table.grad = np.zeros_like(table.data)
            np.add.at(table.grad, idx, g)

    return _result(table.data[idx], (table,), backward_fn)


def concat(tensors: list[Tensor], axis: int = 0) -> Tensor:
    sizes = [t.data.shape[axis] for t in tensors]

    def backward_fn(g):
        offset = 0
        for t, size in zip(tensors, sizes):
            if t.requires_grad:
                sl = [slice(None)] * g.ndim
                sl[axis] = slice(offset, offset + size)
                _accumulate(t, g[tuple(sl)])
            offset += size

    return _result(np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors), backward_fn)


def slice_rows(a: Tensor, start: int, stop: int) -> Tensor:
    if not 0 <= start < stop <= a.data.shape[0]:
        raise ValueError(f"slice [{start}:{stop}] out of range for shape {a.data.shape}")

    def backward_fn(g):
        if a.requires_grad:
            if a.grad is None:
                a.grad = np.zeros_like(a.data)
            a.grad[start:stop] += g

    return _result(a.data[start:stop].copy(), (a,), backward_fn)


def attention(q: Tensor, k: Tensor, v: Tensor, n_heads: int) -> Tensor:
    """Causal-masked scaled dot-product attention over ``n_heads`` heads.

    Position p attends to positions 0..p only; inputs and output are
    (seq_len, dim) with dim divisible by n_heads.
    """
    if not (q.data.shape == k.data.shape == v.data.shape):
        raise ValueError(f"attention shape mismatch: q {q.data.shape}, k {k.data.shape}, v {v.data.shape}")
    length, dim = q.data.shape
    if dim % n_heads:
        raise ValueError(f"dim {dim} not divisible by {n_heads} heads")
    dk = dim // n_heads
    scale = 1.0 / math.sqrt(dk)

    def split(x):
        return x.reshape(length, n_heads, dk).transpose(1, 0, 2)

    qh, kh, vh = split(q.data), split(k.data), split(v.data)
    scores = (qh @ kh.transpose(0, 2, 1)) * scale
    causal = np.tril(np.ones((length, length), dtype=bool))
    scores = np.where(causal, scores, -np.inf)
    shifted = scores - scores.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    att = e / e.sum(axis=-1, keepdims=True)
    out = (att @ vh).transpose(1, 0, 2).reshape(length, dim)

    def backward_fn(g):
        gh = g.reshape(length, n_heads, dk).transpose(1, 0, 2)
        if v.requires_grad:
            _accumulate(v, (att.transpose(0, 2, 1) @ gh).transpose(1, 0, 2).reshape(length, dim))
        if q.requires_grad or k.requires_grad:
            datt = gh @ vh.transpose(0, 2, 1)
            ds = att * (datt - (datt * att).sum(axis=-1, keepdims=True))
            if q.requires_grad:
                _accumulate(q, ((ds @ kh) * scale).transpose(1, 0, 2).reshape(length, dim))
            if k.requires_grad:
                _accumulate(k, ((ds.transpose(0, 2, 1) @ qh) * scale).transpose(1, 0, 2).reshape(length, dim))

    return _result(out, (q, k, v), backward_fn)


def cross_entropy(logits: Tensor, targets) -> Tensor:
    """Mean negative log-likelihood of integer targets under row softmax."""
    idx = np.asarray(targets, dtype=np.int64)
    if logits.data.ndim != 2:
        raise ValueError(f"cross_entropy expects (n, classes) logits, got {logits.data.shape}")
    n, n_classes = logits.data.shape
    if idx.shape != (n,):
        raise ValueError(f"cross_entropy targets shape {idx.shape} does not match {n} logit rows")
    if idx.size and (idx.min() < 0 or idx.max() >= n_classes):
        raise ValueError(f"cross_entropy target out of range for {n_classes} classes")
    m = logits.data.max(axis=-1, keepdims=True)
    e = np.exp(logits.data - m)
    lse = m[:, 0] + np.log(e.sum(axis=-1))
    loss = (lse - logits.data[np.arange(n), idx]).mean()

    def backward_fn(g):
        if logits.requires_grad:
            p = e / e.sum(axis=-1, keepdims=True)
            p[np.arange(n), idx] -= 1.0
            _accumulate(logits, p * (float(g) / n))

    return _result(loss, (logits,), backward_fn)


# ---------------------------------------------------------------------------
# Reverse sweep, optimizer, gradient check
# ---------------------------------------------------------------------------

def backward(loss: Tensor) -> None:
    """Populate gradients of everything the scalar ``loss`` depends on."""
    if loss.data.size != 1:
        raise ValueError(f"backward needs a scalar loss, got shape {loss.data.shape}")
    if loss._swept:
        raise RuntimeError("backward already ran for this loss; rebuild the graph before calling again")
    loss._swept = True

    topo: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            topo.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in seen:
                stack.append((parent, False))

    loss.grad = np.ones_like(loss.data)
    for node in reversed(topo):
        if node._backward_fn is not None and node.grad is not None:
            node._backward_fn(node.grad)


def sgd_step(params: list[Parameter], learning_rate: float, clip_threshold: float | None = 1.0) -> float:
    """Global-norm clipping followed by a plain SGD update; gradients are zeroed.

    Returns the pre-clip gradient norm.
    """
    total = 0.0
    for p in params:
        g = p.grad
        if not np.all(np.isfinite(g)):
            raise FloatingPointError(f"non-finite gradient in parameter {p.name!r}")
        total += float((g * g).sum())
    norm = math.sqrt(total)
    scale = 1.0
    if clip_threshold is not None and norm > clip_threshold:
        scale = clip_threshold / norm
    for p in params:
        p.data -= learning_rate * scale * p.grad
        p.grad.fill(0.0)
    return norm


def grad_check(f, params: list[Parameter], epsilon: float = 1e-5, n_samples: int = 200, seed: int = 0) -> float:
    """Max relative error between reverse-mode and central-difference gradients.

    ``f`` must rebuild the loss from scratch at each call.  At least
    ``n_samples`` coordinates are probed (all of them when there are fewer);
    relative error is |a - b| / max(1e-8, |a| + |b|).
    """
    for p in params:
        p.zero_grad()
    backward(f())
    analytic = [p.grad.copy() for p in params]
    for p in params:
        p.zero_grad()

    coords = [(pi, ci) for pi, p in enumerate(params) for ci in range(p.data.size)]
    if len(coords) > n_samples:
        rng = np.random.default_rng(seed)
        chosen = rng.choice(len(coords), size=n_samples, replace=False)
        coords = [coords[int(i)] for i in chosen]

    worst = 0.0
    with no_grad():
        for pi, ci in coords:
            p = params[pi]
            original = p.data.flat[ci]
            p.data.flat[ci] = original + epsilon
            up = float(f().data)
            p.data.flat[ci] = original - epsilon
            down = float(f().data)
            p.data.flat[ci] = original
            numeric = (up - down) / (2.0 * epsilon)
            exact = float(analytic[pi].flat[ci])
            rel = abs(exact - numeric) / max(1e-8, abs(exact) + abs(numeric))
            worst = max(worst, rel)
    return worst


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------

def save_checkpoint(path: str | Path, params: list[Parameter]) -> None:
    """Versioned binary dump; float64 values round-trip bit-exactly."""
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", CHECKPOINT_VERSION))
        for p in params:
            name = p.name.encode("utf-8")
            arr = np.asarray(p.data, dtype="<f8")  # tobytes() serializes in C order
            fh.write(struct.pack("<I", len(name)))
            fh.write(name)
            fh.write(struct.pack("<I", arr.ndim))
            for extent in arr.shape:
                fh.write(struct.pack("<Q", extent))
            fh.write(arr.tobytes())


def load_checkpoint(path: str | Path) -> dict[str, np.ndarray]:
    def read_exact(fh, count, what):
        buf = fh.read(count)
        if len(buf) != count:
            raise ValueError(f"{path}: truncated checkpoint while reading {what}")
        return buf

    out: dict[str, np.ndarray] = {}
    with open(path, "rb") as fh:
        if fh.read(4) != CHECKPOINT_MAGIC:
            raise ValueError(f"{path}: not a checkpoint file (bad magic)")
        (version,) = struct.unpack("<I", read_exact(fh, 4, "version"))
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {version}")
        while True:
            head = fh.read(4)
            if not head:
                break
            if len(head) != 4:
                raise ValueError(f"{path}: truncated checkpoint while reading name length")
            (name_len,) = struct.unpack("<I", head)
            name = read_exact(fh, name_len, "name").decode("utf-8")
            (rank,) = struct.unpack("<I", read_exact(fh, 4, "rank"))
            shape = tuple(
                struct.unpack("<Q", read_exact(fh, 8, f"extent of {name}"))[0] for _ in range(rank)
            )
            count = int(np.prod(shape)) if shape else 1
            raw = read_exact(fh, 8 * count, f"values of {name}")
            out[name] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
    return out
