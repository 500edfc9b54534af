"""Feed-forward and fully input-convex classifiers in plain numpy.

Both networks output two logits followed by a softmax. Parameters live in a
``NetworkParams`` holding named float64 arrays; weight matrices are stored
as (fan_out, fan_in) so a layer computes ``h @ W.T + b`` on row batches.

Naming:

* feed-forward: ``W1, b1, ..., W{L+1}, b{L+1}`` for L hidden layers
* FICNN: input weights ``W0..WL``, biases ``b0..bL`` and non-negative
  passthrough weights ``U1..UL`` mapping hidden activation i-1 to layer i
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

FF = "ff"
FICNN = "ficnn"

_ACTIVATIONS = {
    "relu": lambda x: np.maximum(x, 0.0),
    "tanh": np.tanh,
}
# convex and non-decreasing, so allowed inside an input-convex network
_CONVEX_MONOTONE = {"relu"}


class DimensionError(ValueError):
    pass


class ConvexityError(ValueError):
    pass


@dataclass(frozen=True)
class ArchitectureSpec:
    kind: str
    input_dim: int
    hidden_sizes: tuple[int, ...]
    hidden_activations: tuple[str, ...]
    output_dim: int = 2
    dropout_prob: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "hidden_sizes", tuple(int(h) for h in self.hidden_sizes))
        object.__setattr__(self, "hidden_activations", tuple(self.hidden_activations))
        if self.kind not in (FF, FICNN):
            raise ValueError(f"unknown network kind {self.kind!r}")
        if self.input_dim < 1:
            raise ValueError("input_dim must be positive")
        if not self.hidden_sizes or any(h < 1 for h in self.hidden_sizes):
            raise ValueError(f"hidden sizes must be positive, got {self.hidden_sizes}")
        if len(self.hidden_sizes) != len(self.hidden_activations):
            raise ValueError("hidden_sizes and hidden_activations differ in length")
        for act in self.hidden_activations:
            if act not in _ACTIVATIONS:
                raise ValueError(f"unknown activation {act!r}")
            if self.kind == FICNN and act not in _CONVEX_MONOTONE:
                raise ValueError(f"activation {act!r} is not convex and non-decreasing; not allowed in a FICNN")
        if self.output_dim != 2:
            raise ValueError("only binary (2-logit) output is supported")
        if not 0.0 <= self.dropout_prob < 1.0:
            raise ValueError(f"dropout_prob must lie in [0, 1), got {self.dropout_prob}")

    @classmethod
    def feed_forward(cls, input_dim, hidden_sizes=(256, 32), hidden_activations=("relu", "tanh"), dropout_prob=0.0):
        return cls(FF, input_dim, tuple(hidden_sizes), tuple(hidden_activations), 2, dropout_prob)

    @classmethod
    def ficnn(cls, input_dim, hidden_sizes=(512, 16), hidden_activations=("relu", "relu"), dropout_prob=0.3):
        return cls(FICNN, input_dim, tuple(hidden_sizes), tuple(hidden_activations), 2, dropout_prob)

    def shapes(self) -> dict[str, tuple[int, ...]]:
        """Parameter name -> shape, in canonical order."""
        sizes = self.hidden_sizes + (self.output_dim,)
        out = {}
        if self.kind == FF:
            fan_in = self.input_dim
            for i, size in enumerate(sizes, start=1):
                out[f"W{i}"] = (size, fan_in)
                out[f"b{i}"] = (size,)
                fan_in = size
        else:
            for i, size in enumerate(sizes):
                out[f"W{i}"] = (size, self.input_dim)
                if i > 0:
                    out[f"U{i}"] = (size, sizes[i - 1])
                out[f"b{i}"] = (size,)
        return out

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "input_dim": self.input_dim,
            "hidden_sizes": list(self.hidden_sizes),
            "hidden_activations": list(self.hidden_activations),
            "output_dim": self.output_dim,
            "dropout_prob": self.dropout_prob,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ArchitectureSpec":
        return cls(
            d["kind"], int(d["input_dim"]), tuple(d["hidden_sizes"]), tuple(d["hidden_activations"]),
            int(d.get("output_dim", 2)), float(d.get("dropout_prob", 0.0)),
        )


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 64
    learning_rate: float = 0.001
    l2_lambda: float = 0.01
    epochs: int = 100
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.l2_lambda < 0:
            raise ValueError("l2_lambda must be non-negative")
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be positive")

    @classmethod
    def for_kind(cls, kind: str, **overrides) -> "TrainConfig":
        l2 = {FF: 0.01, FICNN: 0.001}[kind]
        return cls(**{"l2_lambda": l2, **overrides})

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(**d)


def is_weight(name: str) -> bool:
    return name[0] in "WU"


@dataclass(frozen=True, eq=False)
class NetworkParams:
    spec: ArchitectureSpec
    arrays: dict

    def __post_init__(self):
        expected = self.spec.shapes()
        if list(self.arrays) != list(expected):
            raise DimensionError(f"parameter names {list(self.arrays)} do not match {list(expected)}")
        for name, shape in expected.items():
            if np.shape(self.arrays[name]) != shape:
                raise DimensionError(f"{name} has shape {np.shape(self.arrays[name])}, expected {shape}")

    def __getitem__(self, name):
        return self.arrays[name]

    def map(self, fn) -> "NetworkParams":
        return NetworkParams(self.spec, {k: fn(k, v) for k, v in self.arrays.items()})

    def predict_proba(self, x) -> np.ndarray:
        return forward(self, np.atleast_2d(x))[1]

    def input_gradient(self, x) -> np.ndarray:
        return input_gradient(self, x)

    def to_dict(self) -> dict:
        return {"spec": self.spec.to_dict(), "arrays": {k: v.tolist() for k, v in self.arrays.items()}}

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkParams":
        spec = ArchitectureSpec.from_dict(d["spec"])
        shapes = spec.shapes()
        return cls(spec, {k: np.asarray(d["arrays"][k], dtype=np.float64).reshape(shapes[k]) for k in shapes})


@dataclass(frozen=True, eq=False)
class AdamState:
    m: dict
    v: dict
    t: int = 0

    @classmethod
    def zeros_like(cls, params: NetworkParams) -> "AdamState":
        return cls(
            {k: np.zeros_like(a) for k, a in params.arrays.items()},
            {k: np.zeros_like(a) for k, a in params.arrays.items()},
            0,
        )


def init_params(spec: ArchitectureSpec, seed: int) -> NetworkParams:
    """Glorot-uniform weights, zero biases; FICNN passthrough weights are |draw|."""
    rng = np.random.default_rng(seed)
    arrays = {}
    for name, shape in spec.shapes().items():
        if is_weight(name):
            fan_out, fan_in = shape
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            w = rng.uniform(-limit, limit, size=shape)
            arrays[name] = np.abs(w) if name.startswith("U") else w
        else:
            arrays[name] = np.zeros(shape)
    return NetworkParams(spec, arrays)


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _check_input(params: NetworkParams, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != params.spec.input_dim:
        raise DimensionError(f"expected inputs with {params.spec.input_dim} features, got shape {x.shape}")
    return x


def _forward(params: NetworkParams, x: np.ndarray, rng: np.random.Generator | None = None):
    """Logits plus the per-layer cache needed by ``_backward``.

    Dropout (inverted) is applied to every hidden activation when ``rng`` is given.
    """
    spec = params.spec
    p = spec.dropout_prob
    cache = []
    h = None
    for i, act_name in enumerate(spec.hidden_activations):
        if spec.kind == FF:
            h_in = x if i == 0 else h
            pre = h_in @ params[f"W{i + 1}"].T + params[f"b{i + 1}"]
        else:
            h_in = h
            pre = x @ params[f"W{i}"].T + params[f"b{i}"]
            if i > 0:
                pre = pre + h_in @ params[f"U{i}"].T
        out = _ACTIVATIONS[act_name](pre)
        mask = None
        if rng is not None and p > 0:
            mask = (rng.random(out.shape) >= p) / (1.0 - p)
            out = out * mask
        cache.append((h_in, pre, out, mask))
        h = out
    L = len(spec.hidden_sizes)
    if spec.kind == FF:
        logits = h @ params[f"W{L + 1}"].T + params[f"b{L + 1}"]
    else:
        logits = x @ params[f"W{L}"].T + params[f"b{L}"] + h @ params[f"U{L}"].T
    return logits, cache


def _act_grad(act_name: str, pre: np.ndarray, out_nodrop: np.ndarray) -> np.ndarray:
    if act_name == "relu":
        return (pre > 0).astype(np.float64)
    return 1.0 - out_nodrop * out_nodrop


def _backward(params: NetworkParams, x: np.ndarray, cache, dlogits: np.ndarray):
    """Parameter gradients and input gradient given d(loss)/d(logits)."""
    spec = params.spec
    L = len(spec.hidden_sizes)
    grads = {}
    h_last = cache[-1][2]
    if spec.kind == FF:
        w_out = params[f"W{L + 1}"]
        grads[f"W{L + 1}"] = dlogits.T @ h_last
        grads[f"b{L + 1}"] = dlogits.sum(axis=0)
        dh = dlogits @ w_out
        for i in reversed(range(L)):
            h_in, pre, out, mask = cache[i]
            if mask is not None:
                dh = dh * mask
            act_out = _ACTIVATIONS["tanh"](pre) if spec.hidden_activations[i] == "tanh" else None
            dpre = dh * _act_grad(spec.hidden_activations[i], pre, act_out)
            grads[f"W{i + 1}"] = dpre.T @ h_in
            grads[f"b{i + 1}"] = dpre.sum(axis=0)
            dh = dpre @ params[f"W{i + 1}"]
        dx = dh
    else:
        grads[f"W{L}"] = dlogits.T @ x
        grads[f"U{L}"] = dlogits.T @ h_last
        grads[f"b{L}"] = dlogits.sum(axis=0)
        dx = dlogits @ params[f"W{L}"]
        dz = dlogits @ params[f"U{L}"]
        for i in reversed(range(L)):
            h_in, pre, out, mask = cache[i]
            if mask is not None:
                dz = dz * mask
            dpre = dz * _act_grad(spec.hidden_activations[i], pre, None)
            grads[f"W{i}"] = dpre.T @ x
            grads[f"b{i}"] = dpre.sum(axis=0)
            dx = dx + dpre @ params[f"W{i}"]
            if i > 0:
                grads[f"U{i}"] = dpre.T @ h_in
                dz = dpre @ params[f"U{i}"]
    ordered = {k: grads[k] for k in params.arrays}
    return ordered, dx


def check_nonnegative(params: NetworkParams):
    for name, arr in params.arrays.items():
        if name.startswith("U") and (arr < 0).any():
            raise ConvexityError(f"passthrough weights {name} have negative entries")


def forward(params: NetworkParams, x, training: bool = False, seed: int | None = None):
    """Batched ``(logits, probs)``; dispatches on the network kind."""
    x = _check_input(params, x)
    if params.spec.kind == FICNN:
        check_nonnegative(params)
    rng = np.random.default_rng(seed) if training else None
    logits, _ = _forward(params, x, rng)
    return logits, softmax(logits)


def _single_or_batch(fn, params, x, *args, **kwargs):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        logits, probs = fn(params, x[None, :], *args, **kwargs)
        return logits[0], probs[0]
    return fn(params, x, *args, **kwargs)


def forward_ff(params: NetworkParams, x):
    if params.spec.kind != FF:
        raise ValueError("forward_ff needs feed-forward parameters")
    return _single_or_batch(forward, params, x)


def forward_icnn(params: NetworkParams, x, training: bool = False, seed: int | None = None):
    """FICNN forward pass. In training mode dropout masks are drawn from ``seed``."""
    if params.spec.kind != FICNN:
        raise ValueError("forward_icnn needs FICNN parameters")
    return _single_or_batch(forward, params, x, training=training, seed=seed)


def l2_penalty(params: NetworkParams) -> float:
    return float(sum(np.sum(a * a) for k, a in params.arrays.items() if is_weight(k)))


def cross_entropy_loss(probs, labels, params: NetworkParams, l2_lambda: float) -> float:
    """Mean negative log-likelihood of the true class plus ``l2_lambda * sum ||W||^2``."""
    probs = np.atleast_2d(np.asarray(probs, dtype=np.float64))
    labels = np.asarray(labels, dtype=np.intp)
    if len(probs) == 0:
        raise ValueError("empty batch")
    if len(labels) != len(probs):
        raise DimensionError("probs and labels differ in length")
    picked = probs[np.arange(len(labels)), labels]
    nll = -np.mean(np.log(np.maximum(picked, np.finfo(float).tiny)))
    return float(nll + l2_lambda * l2_penalty(params))


def backward(params: NetworkParams, x, labels, l2_lambda: float, rng: np.random.Generator | None = None):
    """Exact gradient of ``cross_entropy_loss`` w.r.t. every parameter.

    Returns ``(grads, loss)``. With ``rng`` the forward pass uses dropout and
    the gradient is that of the masked network.
    """
    x = _check_input(params, x)
    labels = np.asarray(labels, dtype=np.intp)
    n = len(x)
    if n == 0:
        raise ValueError("empty batch")
    if len(labels) != n:
        raise DimensionError("batch and labels differ in length")
    logits, cache = _forward(params, x, rng)
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    probs = np.exp(log_probs)
    onehot = np.zeros_like(probs)
    onehot[np.arange(n), labels] = 1.0
    grads, _ = _backward(params, x, cache, (probs - onehot) / n)
    for k in grads:
        if is_weight(k):
            grads[k] = grads[k] + 2.0 * l2_lambda * params[k]
    loss = -log_probs[np.arange(n), labels].mean() + l2_lambda * l2_penalty(params)
    return grads, float(loss)


def adam_step(state: AdamState, params: NetworkParams, grads: dict, config: TrainConfig):
    """One bias-corrected Adam update. Returns ``(params, state)``; inputs are not modified."""
    b1, b2, eps, lr = config.adam_beta1, config.adam_beta2, config.adam_epsilon, config.learning_rate
    t = state.t + 1
    m, v, new = {}, {}, {}
    for k, p in params.arrays.items():
        g = grads[k]
        if np.shape(g) != p.shape:
            raise DimensionError(f"gradient for {k} has shape {np.shape(g)}, expected {p.shape}")
        m[k] = b1 * state.m[k] + (1.0 - b1) * g
        v[k] = b2 * state.v[k] + (1.0 - b2) * g * g
        m_hat = m[k] / (1.0 - b1**t)
        v_hat = v[k] / (1.0 - b2**t)
        new[k] = p - lr * m_hat / (np.sqrt(v_hat) + eps)
    return NetworkParams(params.spec, new), AdamState(m, v, t)


def project_nonnegative(params: NetworkParams) -> NetworkParams:
    """Clamp negative passthrough weights to zero (keeps the FICNN input-convex)."""
    if params.spec.kind != FICNN:
        raise ValueError("projection only applies to FICNN parameters")
    return params.map(lambda k, a: np.maximum(a, 0.0) if k.startswith("U") else a)


@dataclass
class TrainResult:
    params: NetworkParams
    losses: list = field(default_factory=list)


def train(spec: ArchitectureSpec, config: TrainConfig, x, labels, params: NetworkParams | None = None) -> TrainResult:
    """Minibatch Adam training; deterministic in (spec, config, data).

    Each epoch reshuffles with a generator seeded from ``config.seed``; the
    last partial batch is kept. FICNN weights are projected after every step.
    """
    x = np.asarray(x, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.intp)
    if len(x) == 0:
        raise ValueError("cannot train on an empty dataset")
    if len(labels) != len(x):
        raise DimensionError(f"{len(x)} rows but {len(labels)} labels")
    if params is None:
        params = init_params(spec, config.seed)
    elif params.spec != spec:
        raise ValueError("initial params were built for a different architecture")
    _check_input(params, x)
    rng = np.random.default_rng([config.seed, 1])
    dropout_rng = rng if spec.dropout_prob > 0 else None
    state = AdamState.zeros_like(params)
    losses = []
    n = len(x)
    for _ in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            grads, loss = backward(params, x[idx], labels[idx], config.l2_lambda, dropout_rng)
            params, state = adam_step(state, params, grads, config)
            if spec.kind == FICNN:
                params = project_nonnegative(params)
            total += loss * len(idx)
        losses.append(total / n)
    return TrainResult(params, losses)


def predict(params: NetworkParams, x):
    """Eval-mode class probabilities and argmax labels (exact ties go to class 0)."""
    _, probs = forward(params, np.atleast_2d(np.asarray(x, dtype=np.float64)))
    return probs, (probs[:, 1] > probs[:, 0]).astype(np.int64)


def input_gradient(params: NetworkParams, x, target_class: int = 1) -> np.ndarray:
    """Gradient of the ``target_class`` logit with respect to the input (eval mode)."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    xb = _check_input(params, x[None, :] if single else x)
    _, cache = _forward(params, xb)
    dlogits = np.zeros((len(xb), 2))
    dlogits[:, target_class] = 1.0
    _, dx = _backward(params, xb, cache, dlogits)
    return dx[0] if single else dx


def accuracy(params: NetworkParams, x, labels) -> float:
    _, pred = predict(params, x)
    return float(np.mean(pred == np.asarray(labels)))


def with_arrays(params: NetworkParams, **arrays) -> NetworkParams:
    """Copy of ``params`` with some arrays replaced (handy for hand-built networks)."""
    merged = dict(params.arrays)
    for k, v in arrays.items():
        if k not in merged:
            raise KeyError(k)
        merged[k] = np.asarray(v, dtype=np.float64)
    return replace(params, arrays=merged)


def zeros(spec: ArchitectureSpec) -> NetworkParams:
    return NetworkParams(spec, {k: np.zeros(s) for k, s in spec.shapes().items()})
