"""Tiny dense generator networks and the entropic-transport fitting objective.

The generator is a fully connected ReLU network with identity output, its
parameters packed into one flat vector (per layer: weight matrix row-major,
then bias). Training minimizes the entropic transport divergence between
generated points and data points through the plan-weighted distance gradient,
so the only expensive oracle is one Sinkhorn solve per evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problems import MinMaxProblem
from .rng import STREAM_INIT, RandomStream
from .sinkhorn import entropic_objective, sinkhorn_solve

# pairs closer than this contribute no gradient (unit vector undefined)
_DIST_FLOOR = 1e-12


@dataclass(frozen=True)
class MlpSpec:
    """Layer widths, input first, output last. Hidden activations are ReLU."""

    widths: tuple

    def __post_init__(self):
        w = tuple(int(v) for v in self.widths)
        object.__setattr__(self, "widths", w)
        if len(w) < 2:
            raise ValueError(f"need at least input and output widths, got {w}")
        if any(v < 1 for v in w):
            raise ValueError(f"widths must be positive, got {w}")


def param_count(spec: MlpSpec) -> int:
    w = spec.widths
    return sum(w[i] * w[i + 1] + w[i + 1] for i in range(len(w) - 1))


def _unpack(spec: MlpSpec, theta: np.ndarray):
    """Views (W, b) per layer; W has shape (fan_out, fan_in), stored row-major."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (param_count(spec),):
        raise ValueError(f"expected {param_count(spec)} parameters, got shape {theta.shape}")
    layers = []
    at = 0
    w = spec.widths
    for fan_in, fan_out in zip(w[:-1], w[1:]):
        W = theta[at : at + fan_in * fan_out].reshape(fan_out, fan_in)
        at += fan_in * fan_out
        b = theta[at : at + fan_out]
        at += fan_out
        layers.append((W, b))
    return layers


def init_params(spec: MlpSpec, seed: int) -> np.ndarray:
    """Glorot-uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases.

    Draws come from the dedicated init stream in packing order, so the seed
    alone fixes every parameter.
    """
    stream = RandomStream(seed, STREAM_INIT)
    theta = np.zeros(param_count(spec))
    at = 0
    for fan_in, fan_out in zip(spec.widths[:-1], spec.widths[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        u = stream.uniform(fan_in * fan_out)
        theta[at : at + fan_in * fan_out] = bound * (2.0 * u - 1.0)
        at += fan_in * fan_out + fan_out  # biases stay zero
    return theta


def _forward_full(spec: MlpSpec, theta, Z):
    """Activations and pre-activations for a batch Z of shape (m, widths[0])."""
    layers = _unpack(spec, theta)
    acts = [Z]
    pres = []
    A = Z
    for i, (W, b) in enumerate(layers):
        pre = A @ W.T + b
        pres.append(pre)
        A = pre if i == len(layers) - 1 else np.maximum(pre, 0.0)
        acts.append(A)
    return acts, pres


def _as_batch(spec: MlpSpec, z):
    Z = np.asarray(z, dtype=float)
    single = Z.ndim == 1
    if single:
        Z = Z[None, :]
    if Z.ndim != 2 or Z.shape[1] != spec.widths[0]:
        raise ValueError(f"expected input width {spec.widths[0]}, got shape {np.shape(z)}")
    return Z, single


def mlp_forward(spec: MlpSpec, theta, z) -> np.ndarray:
    """Network output for a single input (d,) or a batch (m, d)."""
    Z, single = _as_batch(spec, z)
    out = _forward_full(spec, theta, Z)[0][-1]
    return out[0] if single else out


def mlp_backward(spec: MlpSpec, theta, z, upstream) -> np.ndarray:
    """Gradient of <upstream, G(z; theta)> in theta, summed over batch rows.

    ``upstream`` matches the output shape. ReLU contributes zero derivative at
    exactly zero pre-activation.
    """
    Z, single = _as_batch(spec, z)
    U = np.asarray(upstream, dtype=float)
    if single:
        U = U[None, :]
    if U.shape != (Z.shape[0], spec.widths[-1]):
        raise ValueError(f"upstream shape {U.shape} does not match output ({Z.shape[0]}, {spec.widths[-1]})")

    layers = _unpack(spec, theta)
    acts, pres = _forward_full(spec, theta, Z)
    grad = np.zeros_like(np.asarray(theta, dtype=float))
    offsets = []
    at = 0
    for W, b in layers:
        offsets.append(at)
        at += W.size + b.size

    G = U
    for i in range(len(layers) - 1, -1, -1):
        W, b = layers[i]
        dW = G.T @ acts[i]
        db = G.sum(axis=0)
        grad[offsets[i] : offsets[i] + W.size] = dW.ravel()
        grad[offsets[i] + W.size : offsets[i] + W.size + b.size] = db
        if i > 0:
            G = (G @ W) * (pres[i - 1] > 0.0)
    return grad


def pairwise_distances(Y, X) -> np.ndarray:
    """Euclidean distance matrix D[i, j] = |Y_i - X_j| (not squared)."""
    Y = np.asarray(Y, dtype=float)
    X = np.asarray(X, dtype=float)
    diff = Y[:, None, :] - X[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))


@dataclass
class GanObjective:
    """Entropic transport divergence between generated and data points.

    ``latents`` has shape (n, widths[0]) and ``data`` (n, widths[-1]); the cost
    matrix must be square because both clouds carry unit weights per point.
    """

    spec: MlpSpec
    latents: np.ndarray
    data: np.ndarray
    epsilon: float
    sinkhorn_tol: float = 1e-9
    max_sweeps: int = 100_000

    def __post_init__(self):
        self.latents = np.asarray(self.latents, dtype=float)
        self.data = np.asarray(self.data, dtype=float)
        if self.latents.ndim != 2 or self.latents.shape[1] != self.spec.widths[0]:
            raise ValueError(f"latents must have shape (n, {self.spec.widths[0]})")
        if self.data.ndim != 2 or self.data.shape[1] != self.spec.widths[-1]:
            raise ValueError(f"data must have shape (n, {self.spec.widths[-1]})")
        if self.latents.shape[0] != self.data.shape[0]:
            raise ValueError(
                f"need equally many latents and data points, got {self.latents.shape[0]} "
                f"and {self.data.shape[0]}"
            )
        if not (self.epsilon > 0 and np.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be positive and finite, got {self.epsilon}")

    def cost(self, theta) -> np.ndarray:
        return pairwise_distances(mlp_forward(self.spec, theta, self.latents), self.data)

    def solve_plan(self, theta):
        return sinkhorn_solve(self.cost(theta), self.epsilon, tol=self.sinkhorn_tol, max_sweeps=self.max_sweeps)

    def plan_weighted_grad(self, theta, plan) -> np.ndarray:
        """d/dtheta of <plan, C(theta)> at a fixed plan (unit-vector chain rule)."""
        Y = mlp_forward(self.spec, theta, self.latents)
        C = pairwise_distances(Y, self.data)
        W = np.asarray(plan, dtype=float) / np.where(C < _DIST_FLOOR, np.inf, C)
        upstream = Y * W.sum(axis=1)[:, None] - W @ self.data
        return mlp_backward(self.spec, theta, self.latents, upstream)

    def loss_and_grad(self, theta) -> tuple[float, np.ndarray]:
        C = self.cost(theta)
        plan = sinkhorn_solve(C, self.epsilon, tol=self.sinkhorn_tol, max_sweeps=self.max_sweeps).plan
        value = entropic_objective(plan, C, self.epsilon)
        return value, self.plan_weighted_grad(theta, plan)

    def divergence(self, theta) -> float:
        C = self.cost(theta)
        plan = sinkhorn_solve(C, self.epsilon, tol=self.sinkhorn_tol, max_sweeps=self.max_sweeps).plan
        return entropic_objective(plan, C, self.epsilon)


def as_minmin_problem(gan: GanObjective) -> MinMaxProblem:
    """The fitting problem as a min-min coupling: inner variable is the flat plan.

    ``best_response`` runs one Sinkhorn solve; the drivers in
    :mod:`holderopt.minimax` count each such call as one oracle unit.
    """
    n = gan.data.shape[0]
    q = param_count(gan.spec)

    def loss(theta, p):
        return entropic_objective(p.reshape(n, n), gan.cost(theta), gan.epsilon)

    def grad_x(theta, p):
        return gan.plan_weighted_grad(theta, p.reshape(n, n))

    def best_response(theta):
        return gan.solve_plan(theta).plan.ravel()

    return MinMaxProblem(
        dim_x=q,
        dim_y=n * n,
        loss=loss,
        grad_x=grad_x,
        sense="min-min",
        best_response=best_response,
        approx_response=None,
        certificate=None,
        x0_default=None,
        name="sinkhorn_gan",
    )
