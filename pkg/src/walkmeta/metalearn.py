"""Bi-level meta-learning: inner adaptation loop and meta-gradients.

The meta-gradient of the adapted query loss is the product of
(I - alpha * Hessian) factors along the inner trajectory applied to the
query gradient. It is accumulated right-to-left as K Hessian-vector
products, so no Hessian is ever materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model
from .errors import NumericalError, ParameterError
from .model import ParamVector
from .tasks import TaskInstance


@dataclass(frozen=True)
class InnerTrajectory:
    states: list[ParamVector]  # u_0 .. u_K
    alpha: float
    K: int


def inner_loop(w: ParamVector, support, alpha: float, K: int) -> InnerTrajectory:
    """K full-batch gradient steps on the support set, starting from w."""
    if K < 1:
        raise ParameterError(f"K must be >= 1, got {K}")
    if alpha < 0:
        raise ParameterError(f"alpha must be >= 0, got {alpha}")
    states = [w.copy()]
    u = w
    for k in range(K):
        g = model.grad(u, support)
        u = u.with_values(u.values - alpha * g.values)
        if not np.all(np.isfinite(u.values)):
            raise NumericalError(f"non-finite inner state at step {k + 1}")
        states.append(u)
    return InnerTrajectory(states=states, alpha=alpha, K=K)


def meta_gradient_exact(w: ParamVector, task: TaskInstance, alpha: float,
                        K: int) -> ParamVector:
    """Exact derivative of the adapted query loss with respect to w."""
    traj = inner_loop(w, task.support, alpha, K)
    g = model.grad(traj.states[K], task.query)
    for k in range(K - 1, -1, -1):
        hv = model.hvp(traj.states[k], task.support, g)
        g = g.with_values(g.values - alpha * hv.values)
    return g


def meta_gradient_fo(w: ParamVector, task: TaskInstance, alpha: float,
                     K: int) -> ParamVector:
    """First-order approximation: query gradient at the adapted parameters."""
    traj = inner_loop(w, task.support, alpha, K)
    return model.grad(traj.states[K], task.query)


def meta_loss(w: ParamVector, task: TaskInstance, alpha: float, K: int) -> float:
    """Query loss after inner adaptation on the support set."""
    traj = inner_loop(w, task.support, alpha, K)
    return model.loss(traj.states[K], task.query)


def adapt_unseen(w_final: ParamVector, support, alpha: float, K: int) -> ParamVector:
    """Local adaptation for a client that never took part in meta-training."""
    return inner_loop(w_final, support, alpha, K).states[K]
