"""Entropic optimal transport between uniform unit marginals.

Solves ``min_P <P, C> + eps * sum_ij P_ij log P_ij`` over nonnegative square
plans whose rows and columns each sum to one (total mass n, not 1), by
log-domain scaling sweeps on the dual potentials. The optimal plan is
``P_ij = exp((u_i + v_j - C_ij) / eps)`` and is the gradient of the transport
objective with respect to the cost matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp


class SinkhornError(RuntimeError):
    """Raised when the scaling sweeps do not reach the marginal tolerance."""

    def __init__(self, message: str, marginal_error: float):
        super().__init__(message)
        self.marginal_error = marginal_error


@dataclass
class TransportPlan:
    """Converged plan with its dual certificates.

    ``dual_values`` holds the concave dual objective after each sweep; block
    coordinate ascent makes it nondecreasing, which is a useful health check.
    """

    plan: np.ndarray
    dual_row: np.ndarray
    dual_col: np.ndarray
    epsilon: float
    marginal_error: float
    sweeps: int
    dual_values: np.ndarray


def _check_cost(cost) -> np.ndarray:
    C = np.asarray(cost, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1] or C.shape[0] < 1:
        raise ValueError(f"cost must be a square matrix, got shape {C.shape}")
    if not np.all(np.isfinite(C)):
        raise ValueError("cost entries must be finite")
    if np.any(C < 0):
        raise ValueError("cost entries must be nonnegative")
    return C


def entropic_objective(plan, cost, epsilon: float) -> float:
    """<P, C> + eps * sum P log P with the 0 log 0 = 0 convention."""
    P = np.asarray(plan, dtype=float)
    C = np.asarray(cost, dtype=float)
    pos = P > 0
    ent = np.where(pos, P * np.log(np.where(pos, P, 1.0)), 0.0)
    return float(np.sum(P * C) + epsilon * np.sum(ent))


def sinkhorn_solve(cost, epsilon: float, tol: float = 1e-9, max_sweeps: int = 100_000) -> TransportPlan:
    """Run scaling sweeps until both marginals are within ``tol`` in max norm.

    One sweep is a row update followed by a column update of the dual
    potentials, each an exact block maximization of the dual, so the recorded
    dual objective never decreases. Raises :class:`SinkhornError` if the
    tolerance is not reached within ``max_sweeps``.
    """
    C = _check_cost(cost)
    if not (epsilon > 0 and np.isfinite(epsilon)):
        raise ValueError(f"epsilon must be positive and finite, got {epsilon}")
    if not (tol > 0 and np.isfinite(tol)):
        raise ValueError(f"tol must be positive and finite, got {tol}")
    if max_sweeps < 1:
        raise ValueError(f"max_sweeps must be >= 1, got {max_sweeps}")

    n = C.shape[0]
    v = np.zeros(n)
    duals = []
    row_lse = -epsilon * logsumexp((v[None, :] - C) / epsilon, axis=1)
    err = np.inf
    for sweep in range(1, max_sweeps + 1):
        u = row_lse  # exact row scaling for the current v
        v = -epsilon * logsumexp((u[:, None] - C) / epsilon, axis=0)
        # row sums of the current plan come free from the next row update:
        # sum_j P_ij = exp((u_i - u_next_i) / eps)
        row_lse = -epsilon * logsumexp((v[None, :] - C) / epsilon, axis=1)
        row_sums = np.exp(np.minimum((u - row_lse) / epsilon, 700.0))
        duals.append(u.sum() + v.sum() + epsilon * (n - row_sums.sum()))
        err = float(np.max(np.abs(row_sums - 1.0)))
        if err <= tol:
            P = np.exp((u[:, None] + v[None, :] - C) / epsilon)
            marginal_error = max(
                float(np.max(np.abs(P.sum(axis=1) - 1.0))),
                float(np.max(np.abs(P.sum(axis=0) - 1.0))),
            )
            if marginal_error <= tol:
                return TransportPlan(
                    plan=P,
                    dual_row=u,
                    dual_col=v,
                    epsilon=float(epsilon),
                    marginal_error=marginal_error,
                    sweeps=sweep,
                    dual_values=np.array(duals),
                )
            err = marginal_error
    raise SinkhornError(
        f"sinkhorn did not reach marginal tolerance {tol:g} within {max_sweeps} sweeps "
        f"(marginal error {err:.3e})",
        err,
    )


def sinkhorn_divergence(cost, epsilon: float, tol: float = 1e-9, max_sweeps: int = 100_000) -> float:
    """Objective value <P, C> + eps * sum P log P at the converged plan."""
    C = _check_cost(cost)
    result = sinkhorn_solve(C, epsilon, tol=tol, max_sweeps=max_sweeps)
    return entropic_objective(result.plan, C, epsilon)


def sinkhorn_grad_cost(result: TransportPlan) -> np.ndarray:
    """Gradient of the transport objective with respect to the cost matrix: the plan itself."""
    return np.array(result.plan)
