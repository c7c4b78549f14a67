"""Pendulum trajectory generation with a half-kick/drift/half-kick scheme.

The state is (x1, x2) = (momentum, angle) for a unit-mass, unit-length
pendulum with unit gravity, so the force term is -sin(angle).  The
scalar observable used in the synthetic experiments is

    G(x) = 1.5 - sin(x2) + x1**2 / 9.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .koopman import TrajectoryDataset


@dataclass(frozen=True)
class PendulumConfig:
    """Initial condition and discretization of the pendulum run.

    Defaults put the orbit on a closed libration loop; they are recorded
    in every output file so runs are reproducible.
    """

    x1_0: float = 0.0
    x2_0: float = 2.0
    h: float = 0.1
    steps: int = 256

    def __post_init__(self) -> None:
        if not self.h > 0:
            raise InvalidArgumentError(f"time step must be > 0, got {self.h}")
        if self.steps < 1:
            raise InvalidArgumentError(f"steps must be >= 1, got {self.steps}")


def pendulum_step(x1: float, x2: float, h: float) -> tuple[float, float]:
    """One half-kick / drift / half-kick update of (momentum, angle)."""
    p_half = x1 + 0.5 * h * (-math.sin(x2))
    x2_new = x2 + h * p_half
    x1_new = p_half + 0.5 * h * (-math.sin(x2_new))
    return x1_new, x2_new


def observable_G(x) -> float | np.ndarray:
    """Synthetic observable 1.5 - sin(x2) + x1^2/9; accepts one state or a batch."""
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1] != 2:
        raise InvalidArgumentError(f"state must be 2-dimensional, got shape {arr.shape}")
    val = 1.5 - np.sin(arr[..., 1]) + arr[..., 0] ** 2 / 9.0
    return float(val) if arr.ndim == 1 else val


def hamiltonian(x1: float, x2: float) -> float:
    """Pendulum energy 0.5*x1^2 - cos(x2), conserved up to integrator drift."""
    return 0.5 * x1 * x1 - math.cos(x2)


def simulate(config: PendulumConfig) -> TrajectoryDataset:
    """Iterate the step map and record (k, x_k, x_{k+1}, G(x_{k+1})) per step."""
    states = np.empty((config.steps + 1, 2))
    states[0] = (config.x1_0, config.x2_0)
    for i in range(config.steps):
        states[i + 1] = pendulum_step(states[i, 0], states[i, 1], config.h)
    x = states[:-1]
    x_next = states[1:]
    return TrajectoryDataset(
        k=np.arange(config.steps),
        x=x,
        x_next=x_next,
        y_next=observable_G(x_next),
    )
