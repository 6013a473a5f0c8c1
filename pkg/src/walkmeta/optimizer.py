"""Adaptive outer update with explicit auxiliary state, plus plain SGD.

The auxiliary state (momentum m, squared-gradient preconditioner v) is a
value owned by whoever performs the update: one copy per client in the
local variant, a single travelling copy in the basic variant. There is no
bias correction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ParameterError


@dataclass(frozen=True)
class HyperParams:
    eta: float = 0.001     # outer learning rate
    theta: float = 0.0     # first-moment weight
    beta: float = 0.99     # second-moment weight
    lam: float = 1e-8      # denominator offset
    alpha: float = 0.01    # inner learning rate
    K: int = 5             # inner steps

    def __post_init__(self):
        if self.eta < 0:
            raise ParameterError("eta must be >= 0")
        if not (0.0 <= self.theta < 1.0):
            raise ParameterError("theta must be in [0, 1)")
        if not (0.0 <= self.beta < 1.0):
            raise ParameterError("beta must be in [0, 1)")
        if self.lam <= 0:
            raise ParameterError("lam must be > 0")
        if self.alpha < 0:
            raise ParameterError("alpha must be >= 0")
        if self.K < 1:
            raise ParameterError("K must be >= 1")


@dataclass(frozen=True)
class AuxState:
    m: np.ndarray
    v: np.ndarray
    step_count: int = 0

    @staticmethod
    def zeros(dim: int) -> "AuxState":
        return AuxState(np.zeros(dim), np.zeros(dim), 0)


def adam_step(state: AuxState, g: np.ndarray, noise: np.ndarray,
              h: HyperParams) -> tuple[AuxState, np.ndarray]:
    """One adaptive update. Noise perturbs the numerator only; the
    preconditioner is built from the unperturbed gradient."""
    if not np.all(np.isfinite(g)):
        raise NumericalError("non-finite gradient passed to adam_step")
    m = h.theta * state.m + (1.0 - h.theta) * g
    v = h.beta * state.v + (1.0 - h.beta) * g * g
    delta = -h.eta * (m + noise) / np.sqrt(v + h.lam)
    return AuxState(m, v, state.step_count + 1), delta


def sgd_step(g: np.ndarray, eta: float) -> np.ndarray:
    return -eta * g


def clip(g: np.ndarray, bound: float) -> np.ndarray:
    """Scale g down to L2 norm `bound` if it exceeds it; direction preserved."""
    if bound <= 0:
        raise ParameterError("clip bound must be positive")
    norm = float(np.linalg.norm(g))
    if norm <= bound:
        return g
    return g * (bound / norm)
