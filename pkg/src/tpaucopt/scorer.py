"""Differentiable toy scorers mapping feature rows into (0, 1).

Two kinds: a logistic-squashed linear model and a one-hidden-layer tanh
MLP.  Parameters live in one flat vector so optimizer updates, weight
decay, serialization, and finite-difference probes all operate on a
single array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ScorerParams", "init", "forward", "backward", "save", "load"]

MODEL_MAGIC = "TPAUCOPT-MODEL v1"

# Logistic pre-activations are clipped here so outputs stay strictly
# inside (0, 1) in float64 even for saturated inputs.
_Z_CLIP = 36.0


@dataclass
class ScorerParams:
    """Flat parameter vector plus the shape needed to interpret it.

    Layout: linear -> [w (d), b]; mlp -> [W1 row-major (h*d), b1 (h),
    w2 (h), b2].
    """

    kind: str
    d: int
    hidden: int
    theta: np.ndarray

    def __post_init__(self):
        if self.kind not in ("linear", "mlp"):
            raise ValueError(f"unknown scorer kind {self.kind!r}")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.kind == "mlp" and self.hidden < 1:
            raise ValueError("mlp requires hidden >= 1")
        expected = self.n_params(self.kind, self.d, self.hidden)
        theta = np.asarray(self.theta, dtype=float)
        if theta.shape != (expected,):
            raise ValueError(f"theta must have {expected} entries, got {theta.shape}")
        if not np.isfinite(theta).all():
            raise ValueError("theta contains non-finite values")
        self.theta = theta

    @staticmethod
    def n_params(kind: str, d: int, hidden: int) -> int:
        if kind == "linear":
            return d + 1
        return hidden * d + hidden + hidden + 1

    def copy(self) -> "ScorerParams":
        return ScorerParams(self.kind, self.d, self.hidden, self.theta.copy())

    def _views(self):
        if self.kind == "linear":
            return self.theta[: self.d], self.theta[self.d]
        h, d = self.hidden, self.d
        w1 = self.theta[: h * d].reshape(h, d)
        b1 = self.theta[h * d : h * d + h]
        w2 = self.theta[h * d + h : h * d + 2 * h]
        b2 = self.theta[-1]
        return w1, b1, w2, b2


def _sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.clip(z, -_Z_CLIP, _Z_CLIP)
    return 1.0 / (1.0 + np.exp(-z))


def init(kind: str, d: int, hidden: int = 0, seed: int = 0) -> ScorerParams:
    """Fresh parameters: weights ~ N(0, 1/sqrt(fan_in)), biases 0."""
    rng = np.random.default_rng(seed)
    if kind == "linear":
        theta = np.concatenate([rng.normal(0.0, 1.0 / np.sqrt(d), d), [0.0]])
        return ScorerParams("linear", d, 0, theta)
    if kind == "mlp":
        if hidden < 1:
            raise ValueError("mlp requires hidden >= 1")
        w1 = rng.normal(0.0, 1.0 / np.sqrt(d), (hidden, d))
        w2 = rng.normal(0.0, 1.0 / np.sqrt(hidden), hidden)
        theta = np.concatenate(
            [w1.ravel(), np.zeros(hidden), w2, [0.0]]
        )
        return ScorerParams("mlp", d, hidden, theta)
    raise ValueError(f"unknown scorer kind {kind!r}")


def _check_input(params: ScorerParams, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != params.d:
        raise ValueError(
            f"expected input of shape (n, {params.d}), got {x.shape}"
        )
    return x


def forward(params: ScorerParams, x) -> np.ndarray:
    """Score each row of x; outputs are strictly inside (0, 1)."""
    x = _check_input(params, x)
    if params.kind == "linear":
        w, b = params._views()
        return _sigmoid(x @ w + b)
    w1, b1, w2, b2 = params._views()
    return _sigmoid(np.tanh(x @ w1.T + b1) @ w2 + b2)


def backward(params: ScorerParams, x, d_out) -> np.ndarray:
    """Gradient of sum_i d_out[i] * f(x_i) w.r.t. the flat parameters."""
    x = _check_input(params, x)
    d_out = np.asarray(d_out, dtype=float)
    if d_out.shape != (x.shape[0],):
        raise ValueError("d_out must have one entry per input row")
    if params.kind == "linear":
        w, b = params._views()
        s = _sigmoid(x @ w + b)
        ds = d_out * s * (1.0 - s)
        return np.concatenate([x.T @ ds, [ds.sum()]])
    w1, b1, w2, b2 = params._views()
    z1 = x @ w1.T + b1
    hid = np.tanh(z1)
    s = _sigmoid(hid @ w2 + b2)
    ds = d_out * s * (1.0 - s)
    d_hid = np.outer(ds, w2) * (1.0 - hid**2)
    return np.concatenate(
        [(d_hid.T @ x).ravel(), d_hid.sum(axis=0), hid.T @ ds, [ds.sum()]]
    )


def save(params: ScorerParams, path) -> None:
    """Serialize to the versioned text format (17 significant digits)."""
    lines = [MODEL_MAGIC, f"kind {params.kind}"]
    if params.kind == "linear":
        lines.append(f"{params.d}")
    else:
        lines.append(f"{params.d} {params.hidden}")
    lines.extend(f"{value:.17g}" for value in params.theta)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load(path) -> ScorerParams:
    """Parse a model file saved by :func:`save`."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != MODEL_MAGIC:
        raise ValueError(f"{path}:1: not a {MODEL_MAGIC!r} file")
    if len(lines) < 3 or not lines[1].startswith("kind "):
        raise ValueError(f"{path}:2: expected 'kind linear|mlp'")
    kind = lines[1][5:]
    if kind not in ("linear", "mlp"):
        raise ValueError(f"{path}:2: unknown kind {kind!r}")
    dims = lines[2].split()
    if kind == "linear" and len(dims) == 1:
        d, hidden = int(dims[0]), 0
    elif kind == "mlp" and len(dims) == 2:
        d, hidden = int(dims[0]), int(dims[1])
    else:
        raise ValueError(f"{path}:3: bad dimension line {lines[2]!r}")
    values = []
    for line_no, line in enumerate(lines[3:], start=4):
        for token in line.split():
            try:
                values.append(float(token))
            except ValueError:
                raise ValueError(f"{path}:{line_no}: bad parameter {token!r}")
    expected = ScorerParams.n_params(kind, d, hidden)
    if len(values) != expected:
        raise ValueError(
            f"{path}: expected {expected} parameters, found {len(values)}"
        )
    return ScorerParams(kind, d, hidden, np.array(values))
