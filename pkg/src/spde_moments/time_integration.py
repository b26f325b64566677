"""Crank-Nicolson stepping for linear systems du/dt = A(t) u + f(t)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .exceptions import SolverError, TimeStepError


@dataclass
class LinearEvolution:
    """Time-dependent linear system of fixed dimension.

    drift(t) returns the system matrix; forcing is None, a callable of t,
    or an array of per-step values aligned with the trajectory grid.
    constant_drift lets the stepper factor the implicit matrix once.
    """

    dimension: int
    drift: Callable[[float], np.ndarray]
    forcing: Callable[[float], np.ndarray] | np.ndarray | None = None
    constant_drift: bool = False

    def drift_at(self, t: float) -> np.ndarray:
        matrix = np.asarray(self.drift(t), dtype=float)
        if matrix.shape != (self.dimension, self.dimension):
            raise ValueError("drift matrix has inconsistent dimension")
        return matrix

    def forcing_at(self, t: float, step: int):
        if self.forcing is None:
            return None
        if callable(self.forcing):
            return np.asarray(self.forcing(t), dtype=float)
        return self.forcing[step]


def step_count(interval: float, dt: float) -> int:
    """Number of steps tiling [0, interval]; errors if dt does not divide."""
    if dt <= 0:
        raise TimeStepError("time step must be positive")
    steps = round(interval / dt)
    if steps < 1 or abs(steps * dt - interval) > 1e-9 * max(interval, dt):
        raise TimeStepError(
            f"step does not divide element: {dt} into {interval}"
        )
    return steps


def crank_nicolson(
    evolution: LinearEvolution, u0: np.ndarray, interval: float, dt: float
) -> np.ndarray:
    """Integrate over [0, interval]; returns values at all step endpoints.

    The drift is evaluated at interval midpoints, the forcing by the
    endpoint trapezoidal average.  u0 may be a vector or a matrix whose
    columns evolve independently.
    """
    steps = step_count(interval, dt)
    u0 = np.asarray(u0, dtype=float)
    trajectory = np.empty((steps + 1, *u0.shape))
    trajectory[0] = u0
    eye = np.eye(evolution.dimension)
    factored = None
    explicit = None
    if evolution.constant_drift:
        matrix = evolution.drift_at(0.0)
        explicit = eye + 0.5 * dt * matrix
        try:
            factored = lu_factor(eye - 0.5 * dt * matrix)
        except Exception as exc:
            raise SolverError("CN solve failed: implicit matrix singular") from exc
    force_prev = evolution.forcing_at(0.0, 0)
    for j in range(steps):
        t_next = (j + 1) * dt
        if factored is None:
            matrix = evolution.drift_at((j + 0.5) * dt)
            rhs = (eye + 0.5 * dt * matrix) @ trajectory[j]
        else:
            rhs = explicit @ trajectory[j]
        force_next = evolution.forcing_at(t_next, j + 1)
        if force_next is not None:
            rhs = rhs + 0.5 * dt * (force_prev + force_next)
        force_prev = force_next
        try:
            if factored is None:
                trajectory[j + 1] = np.linalg.solve(eye - 0.5 * dt * matrix, rhs)
            else:
                trajectory[j + 1] = lu_solve(factored, rhs)
        except np.linalg.LinAlgError as exc:
            raise SolverError(
                f"CN solve failed at step {j + 1}: time step too large?"
            ) from exc
    return trajectory
