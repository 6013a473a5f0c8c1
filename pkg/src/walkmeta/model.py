"""Flat-parameter MLP with analytic gradients.

Parameters live in a single flat vector so the meta-optimizer can treat the
model as a point in R^d. Hidden layers use tanh; the head is either mean
squared error (regression), softmax cross-entropy (classification), or a
pure quadratic bowl used as a diagnostic surrogate (loss = ||p||^2 / 2,
ignoring the batch contents).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ParameterError

HEAD_MSE = "mse"
HEAD_XENT = "xent"
HEAD_QUADRATIC = "quadratic"


@dataclass(frozen=True)
class Arch:
    input_dim: int
    hidden: tuple[int, ...]
    output_dim: int
    head: str = HEAD_MSE

    def __post_init__(self):
        if self.head not in (HEAD_MSE, HEAD_XENT, HEAD_QUADRATIC):
            raise ParameterError(f"unknown head {self.head!r}")
        if self.head != HEAD_QUADRATIC:
            if self.input_dim < 1 or self.output_dim < 1:
                raise ParameterError("input_dim and output_dim must be >= 1")
            if any(w < 1 for w in self.hidden):
                raise ParameterError("hidden widths must be positive")

    def layer_dims(self) -> list[tuple[int, int]]:
        dims = [self.input_dim, *self.hidden, self.output_dim]
        return [(dims[i + 1], dims[i]) for i in range(len(dims) - 1)]

    @property
    def param_count(self) -> int:
        if self.head == HEAD_QUADRATIC:
            return self.output_dim
        return sum(out * inp + out for out, inp in self.layer_dims())


@dataclass
class ParamVector:
    values: np.ndarray
    arch: Arch

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.arch.param_count,):
            raise ParameterError(
                f"expected {self.arch.param_count} parameters, got {self.values.shape}"
            )

    def copy(self) -> "ParamVector":
        return ParamVector(self.values.copy(), self.arch)

    def with_values(self, values: np.ndarray) -> "ParamVector":
        return ParamVector(values, self.arch)


def _unpack(values: np.ndarray, arch: Arch) -> list[tuple[np.ndarray, np.ndarray]]:
    layers = []
    pos = 0
    for out, inp in arch.layer_dims():
        W = values[pos:pos + out * inp].reshape(out, inp)
        pos += out * inp
        b = values[pos:pos + out]
        pos += out
        layers.append((W, b))
    return layers


def init_params(arch: Arch, seed) -> ParamVector:
    """Glorot-uniform weights, zero biases. `seed` may be an int or SeedSequence."""
    rng = np.random.default_rng(seed)
    if arch.head == HEAD_QUADRATIC:
        return ParamVector(rng.uniform(-1.0, 1.0, arch.param_count), arch)
    chunks = []
    for out, inp in arch.layer_dims():
        bound = np.sqrt(6.0 / (inp + out))
        chunks.append(rng.uniform(-bound, bound, out * inp))
        chunks.append(np.zeros(out))
    return ParamVector(np.concatenate(chunks), arch)


def _check_batch(p: ParamVector, batch) -> tuple[np.ndarray, np.ndarray]:
    x, y = batch
    x = np.asarray(x, dtype=float)
    y = np.asarray(y)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ParameterError("batch inputs must be a nonempty (m, dim) array")
    if p.arch.head != HEAD_QUADRATIC and x.shape[1] != p.arch.input_dim:
        raise ParameterError(
            f"batch input dim {x.shape[1]} does not match arch input_dim "
            f"{p.arch.input_dim}"
        )
    if y.shape[0] != x.shape[0]:
        raise ParameterError("batch inputs and targets disagree in length")
    return x, y


def _forward(p: ParamVector, x: np.ndarray):
    """Returns (activations per layer, final pre-activation)."""
    layers = _unpack(p.values, p.arch)
    hs = [x]
    h = x
    for li, (W, b) in enumerate(layers):
        z = h @ W.T + b
        if li < len(layers) - 1:
            h = np.tanh(z)
            hs.append(h)
        else:
            return hs, z
    raise AssertionError("unreachable")


def _loss_and_grad(p: ParamVector, batch, want_grad: bool):
    # overflow surfaces as NumericalError via the finiteness checks
    with np.errstate(over="ignore", invalid="ignore"):
        return _loss_and_grad_impl(p, batch, want_grad)


def _loss_and_grad_impl(p: ParamVector, batch, want_grad: bool):
    x, y = _check_batch(p, batch)
    arch = p.arch
    if arch.head == HEAD_QUADRATIC:
        loss = 0.5 * float(p.values @ p.values)
        return loss, p.values.copy() if want_grad else None

    hs, z = _forward(p, x)
    if not np.all(np.isfinite(z)):
        raise NumericalError("non-finite forward values")
    m = x.shape[0]
    if arch.head == HEAD_MSE:
        target = y.reshape(m, arch.output_dim).astype(float)
        resid = z - target
        loss = float(np.mean(resid ** 2))
        dz = 2.0 * resid / resid.size
    else:  # softmax cross-entropy
        labels = y.astype(int)
        zs = z - z.max(axis=1, keepdims=True)
        logsumexp = np.log(np.exp(zs).sum(axis=1))
        loss = float(np.mean(logsumexp - zs[np.arange(m), labels]))
        probs = np.exp(zs - logsumexp[:, None])
        dz = probs
        dz[np.arange(m), labels] -= 1.0
        dz /= m
    if not want_grad:
        return loss, None

    layers = _unpack(p.values, p.arch)
    grads: list[np.ndarray] = []
    delta = dz
    for li in range(len(layers) - 1, -1, -1):
        W, _ = layers[li]
        h_in = hs[li]
        gW = delta.T @ h_in
        gb = delta.sum(axis=0)
        grads.append(gb)
        grads.append(gW.ravel())
        if li > 0:
            delta = (delta @ W) * (1.0 - h_in ** 2)
    flat = np.concatenate(grads[::-1])
    return loss, flat


def loss(p: ParamVector, batch) -> float:
    """Mean loss over the batch."""
    val, _ = _loss_and_grad(p, batch, want_grad=False)
    return val


def grad(p: ParamVector, batch) -> ParamVector:
    """Gradient of the mean batch loss with respect to the flat parameters."""
    _, g = _loss_and_grad(p, batch, want_grad=True)
    return p.with_values(g)


def predict(p: ParamVector, x: np.ndarray) -> np.ndarray:
    """Network output (logits for xent, raw values for mse)."""
    x = np.asarray(x, dtype=float)
    _, z = _forward(p, x)
    return z


def hvp(p: ParamVector, batch, v: ParamVector, fd_step: float = 1e-4) -> ParamVector:
    """Hessian-vector product by central differences of the analytic gradient.

    The direction is normalized before differencing so the step size is
    independent of ||v||; the result is rescaled afterwards.
    """
    if fd_step <= 0:
        raise ParameterError("fd_step must be positive")
    vnorm = float(np.linalg.norm(v.values))
    if not np.isfinite(vnorm):
        raise ParameterError("direction has non-finite norm")
    if vnorm == 0.0:
        return p.with_values(np.zeros_like(p.values))
    vhat = v.values / vnorm
    h = fd_step * max(1.0, float(np.linalg.norm(p.values)))
    gp = grad(p.with_values(p.values + h * vhat), batch).values
    gm = grad(p.with_values(p.values - h * vhat), batch).values
    return p.with_values((gp - gm) / (2.0 * h) * vnorm)


def serialize_params(p: ParamVector) -> str:
    a = p.arch
    hidden = ",".join(map(str, a.hidden)) if a.hidden else "-"
    header = f"arch {a.input_dim} {hidden} {a.output_dim} {a.head}"
    body = "\n".join(repr(float(v)) for v in p.values)
    return header + "\n" + body + "\n"


def deserialize_params(text: str) -> ParamVector:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    parts = lines[0].split()
    if parts[0] != "arch" or len(parts) != 5:
        raise ParameterError("bad parameter header line")
    hidden = () if parts[2] == "-" else tuple(int(w) for w in parts[2].split(","))
    arch = Arch(int(parts[1]), hidden, int(parts[3]), parts[4])
    values = np.array([float(ln) for ln in lines[1:]])
    return ParamVector(values, arch)
