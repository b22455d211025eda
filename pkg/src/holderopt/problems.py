"""Objectives, min-max problems, and Holder-smoothness certificates.

The drivers in :mod:`holderopt.descent` and :mod:`holderopt.minimax` only see
the small contracts defined here: a :class:`SmoothObjective` produces
``(value, gradient)`` pairs, a :class:`MinMaxProblem` exposes a coupling loss
with an inner oracle, and :class:`ValueFunctionView` turns the latter into the
former through the envelope identity ``grad g(x) = grad_x L(x, y*(x))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.spatial.distance import pdist

Array = np.ndarray


@dataclass(frozen=True)
class HolderCertificate:
    """Asserts ``|grad f(x) - grad f(y)| <= beta * |x - y|**nu``.

    ``global_flag`` records whether the bound is claimed globally or only on
    the sampled/estimated region.
    """

    beta: float
    nu: float
    global_flag: bool = True

    def __post_init__(self):
        if not (self.beta > 0 and np.isfinite(self.beta)):
            raise ValueError(f"beta must be positive and finite, got {self.beta}")
        if not (0.0 < self.nu <= 1.0):
            raise ValueError(f"nu must lie in (0, 1], got {self.nu}")


class SmoothObjective:
    """Differentiable objective evaluated jointly: one call gives (value, gradient).

    ``eval`` is pure: repeated evaluation at the same point returns bit-identical
    results. ``call_counter`` counts evaluations; it is a plain int (CPython's
    GIL serializes the increment) and evaluation bodies are reentrant, so
    concurrent use is safe as long as the counter is the only shared state.
    """

    def __init__(self, dim: int, fn: Callable[[Array], tuple], name: str = ""):
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        self.dim = int(dim)
        self.name = name
        self.call_counter = 0
        self._fn = fn

    def eval(self, x) -> tuple[float, Array]:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.dim,):
            raise ValueError(f"expected point of shape ({self.dim},), got {x.shape}")
        self.call_counter += 1
        value, grad = self._fn(x)
        return float(value), np.asarray(grad, dtype=float)


@dataclass
class MinMaxProblem:
    """Coupling loss L(x, y) with an inner oracle over y.

    ``sense`` is "min-max" (inner argmax) or "min-min" (inner argmin). At most
    one of the oracles may be missing; ``best_response`` is exact,
    ``approx_response(x, y_warm, budget)`` is an inexact inner solve whose
    ``budget`` carries step count / step size / warm-start policy (see
    :class:`holderopt.minimax.InnerAscentBudget`). ``certificate``, when
    present, certifies the Holder smoothness of the value function's gradient.
    """

    dim_x: int
    dim_y: int
    loss: Callable[[Array, Array], float]
    grad_x: Callable[[Array, Array], Array]
    sense: str = "min-max"
    best_response: Optional[Callable[[Array], Array]] = None
    approx_response: Optional[Callable] = None
    certificate: Optional[HolderCertificate] = None
    x0_default: Optional[Array] = None
    name: str = ""

    def __post_init__(self):
        if self.sense not in ("min-max", "min-min"):
            raise ValueError(f"sense must be 'min-max' or 'min-min', got {self.sense!r}")
        if self.best_response is None and self.approx_response is None:
            raise ValueError("problem needs at least one inner oracle")


class ValueFunctionView(SmoothObjective):
    """g(x) = L(x, y*(x)) as a SmoothObjective, gradient via the envelope identity.

    Requires an exact ``best_response``. One ``eval`` makes exactly one
    best-response call.
    """

    def __init__(self, problem: MinMaxProblem):
        if problem.best_response is None:
            raise ValueError("value function view needs an exact best_response")

        def fn(x):
            y = problem.best_response(x)
            return problem.loss(x, y), problem.grad_x(x, y)

        super().__init__(problem.dim_x, fn, name=f"value({problem.name})" if problem.name else "value")
        self.problem = problem
        self.certificate = problem.certificate


def make_sqrt_problem() -> MinMaxProblem:
    """1-d saddle L(x, y) = x*y - y**3/3 over y >= 0.

    The inner argmax is sqrt(max(x, 0)); the value function is
    (2/3) * max(x, 0)**1.5 with gradient sqrt(max(x, 0)), which is globally
    (1, 1/2)-Holder. Extending by zero left of the origin keeps the certificate
    global and the value function C^1.
    """

    def loss(x, y):
        return float(x[0] * y[0] - y[0] ** 3 / 3.0)

    def grad_x(x, y):
        return np.array([y[0]])

    def best_response(x):
        return np.array([np.sqrt(max(x[0], 0.0))])

    def approx_response(x, y_warm, budget):
        # projected gradient ascent on y -> x*y - y^3/3 over y >= 0
        y = 0.0 if y_warm is None else float(np.atleast_1d(y_warm)[0])
        for _ in range(budget.steps):
            y = max(0.0, y + budget.step_size * (x[0] - y * y))
        return np.array([y])

    return MinMaxProblem(
        dim_x=1,
        dim_y=1,
        loss=loss,
        grad_x=grad_x,
        sense="min-max",
        best_response=best_response,
        approx_response=approx_response,
        certificate=HolderCertificate(beta=1.0, nu=0.5, global_flag=True),
        x0_default=np.array([1.0]),
        name="sqrt",
    )


def make_quadratic_saddle(dim: int) -> MinMaxProblem:
    """L(x, y) = <x, y> - |y|^2/2; inner argmax y = x, value function |x|^2/2."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")

    def loss(x, y):
        return float(x @ y - 0.5 * (y @ y))

    def grad_x(x, y):
        return np.array(y, dtype=float)

    def best_response(x):
        return np.array(x, dtype=float)

    def approx_response(x, y_warm, budget):
        y = np.zeros(dim) if y_warm is None else np.array(y_warm, dtype=float)
        for _ in range(budget.steps):
            y = y + budget.step_size * (x - y)
        return y

    return MinMaxProblem(
        dim_x=dim,
        dim_y=dim,
        loss=loss,
        grad_x=grad_x,
        sense="min-max",
        best_response=best_response,
        approx_response=approx_response,
        certificate=HolderCertificate(beta=1.0, nu=1.0, global_flag=True),
        x0_default=np.ones(dim),
        name=f"quadratic_saddle:{dim}",
    )


def make_quadratic_minmin(dim: int) -> MinMaxProblem:
    """L(x, y) = |x - y|^2/2 + |y|^2/2; inner argmin y = x/2, value function |x|^2/4."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")

    def loss(x, y):
        d = x - y
        return float(0.5 * (d @ d) + 0.5 * (y @ y))

    def grad_x(x, y):
        return np.array(x - y, dtype=float)

    def best_response(x):
        return 0.5 * np.array(x, dtype=float)

    def approx_response(x, y_warm, budget):
        y = np.zeros(dim) if y_warm is None else np.array(y_warm, dtype=float)
        for _ in range(budget.steps):
            y = y - budget.step_size * (2.0 * y - x)
        return y

    return MinMaxProblem(
        dim_x=dim,
        dim_y=dim,
        loss=loss,
        grad_x=grad_x,
        sense="min-min",
        best_response=best_response,
        approx_response=approx_response,
        certificate=HolderCertificate(beta=0.5, nu=1.0, global_flag=True),
        x0_default=2.0 * np.ones(dim),
        name=f"quadratic_minmin:{dim}",
    )


def get_problem(problem_id: str) -> MinMaxProblem:
    """Look up an analytic problem by id.

    Ids: ``sqrt``, ``quadratic_saddle:D``, ``quadratic_minmin:D`` (D a positive
    integer dimension). The entropic-transport generator problem is assembled
    by the harness because it needs sampled data and a seed.
    """
    if problem_id == "sqrt":
        return make_sqrt_problem()
    head, _, tail = problem_id.partition(":")
    if head in ("quadratic_saddle", "quadratic_minmin") and tail:
        try:
            dim = int(tail)
        except ValueError:
            raise KeyError(f"bad dimension in problem id {problem_id!r}") from None
        maker = make_quadratic_saddle if head == "quadratic_saddle" else make_quadratic_minmin
        return maker(dim)
    raise KeyError(
        f"unknown problem id {problem_id!r}; expected 'sqrt', 'quadratic_saddle:D', "
        "'quadratic_minmin:D' (the sinkhorn_gan problem is built by the harness)"
    )


def finite_diff_gradient(f, x, h: float = 1e-6) -> Array:
    """Central finite-difference gradient of ``f`` at ``x``.

    ``f`` may be a SmoothObjective (its value is used) or any callable
    returning a scalar. The same absolute step ``h`` is used per coordinate.
    """
    if isinstance(f, SmoothObjective):
        fn = lambda p: f.eval(p)[0]
    else:
        fn = f
    x = np.atleast_1d(np.asarray(x, dtype=float))
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (fn(x + e) - fn(x - e)) / (2.0 * h)
    return g


def estimate_holder_constants(
    obj: SmoothObjective,
    region,
    samples: int = 512,
    seed: int = 0,
    *,
    bins: int = 12,
    gap_span: float = 100.0,
) -> HolderCertificate:
    """Estimate a Holder certificate for ``grad obj`` on a box region.

    Draws ``samples`` points uniformly in the box (a sequence of ``(lo, hi)``
    per coordinate), evaluates the gradient once per point, and fits
    ``log |grad f(x1) - grad f(x2)| <= log beta + nu * log |x1 - x2|`` over
    all pairs of samples, discarding pairs closer than 1e-9.

    Where the inequality binds is the upper envelope of the pair scatter, so
    the exponent comes from a least-squares line through per-bin maxima of the
    gradient differences, with gaps binned on a log scale. Only gaps within a
    factor ``gap_span`` of the largest one enter the fit: below that scale the
    samples are too sparse for a bin maximum to approach the true envelope,
    and the fit would tilt toward the interior (Lipschitz) behaviour. beta is
    then inflated to the largest residual so the returned certificate holds on
    every sampled pair. ``global_flag`` is False: the estimate is local to the
    region. Diagnostic quality only; for sharp exponents (think sqrt-like
    corners) use a few thousand samples.

    Raises ValueError if the region has zero volume or ``samples < 2``.
    """
    box = np.asarray(region, dtype=float)
    if box.ndim != 2 or box.shape[1] != 2 or box.shape[0] != obj.dim:
        raise ValueError(f"region must be {obj.dim} (lo, hi) rows, got shape {box.shape}")
    lo, hi = box[:, 0], box[:, 1]
    if not np.all(hi > lo):
        raise ValueError("region has zero volume: every coordinate needs hi > lo")
    if samples < 2:
        raise ValueError(f"need at least 2 samples to form a pair, got {samples}")

    rng = np.random.default_rng(seed)
    points = lo + (hi - lo) * rng.random((samples, obj.dim))
    grads = np.array([obj.eval(p)[1] for p in points])

    dx = pdist(points)
    dg = pdist(grads)
    keep = dx >= 1e-9
    dx, dg = dx[keep], dg[keep]

    nonzero = dg > 1e-15
    if dx.size == 0 or not np.any(nonzero):
        # gradient is constant on the region up to noise; any tiny beta certifies
        return HolderCertificate(beta=1e-12, nu=1.0, global_flag=False)

    fit = nonzero & (dx >= dx.max() / gap_span)
    u = np.log(dx[fit])
    v = np.log(dg[fit])
    env_u, env_v = [], []
    if u.size:
        edges = np.linspace(u.min(), u.max() + 1e-12, bins + 1)
        which = np.digitize(u, edges) - 1
        for b in range(bins):
            members = np.flatnonzero(which == b)
            if members.size == 0:
                continue
            top = members[np.argmax(v[members])]
            env_u.append(u[top])
            env_v.append(v[top])
    env_u = np.asarray(env_u)
    env_v = np.asarray(env_v)

    if env_u.size >= 2 and np.ptp(env_u) > 0:
        slope, _ = np.polyfit(env_u, env_v, 1)
    else:
        slope = 1.0
    nu = float(np.clip(slope, 0.01, 1.0))
    pos = dg > 0
    beta = float(np.max(dg[pos] / dx[pos] ** nu))
    return HolderCertificate(beta=beta, nu=nu, global_flag=False)
