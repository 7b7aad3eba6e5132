"""
Project: cranectl
Module: cranectl
Created Date: 15 Oct 2026
Author: Noah Keck
:------------------------------------------------------------------------------:
MIT License
Copyright (c) 2026
:------------------------------------------------------------------------------:
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from cranectl.errors import NonFiniteState

Derivative = Callable[[float, np.ndarray], np.ndarray]
Observer = Callable[[float, np.ndarray], None]

MAX_STEP = 0.01


class Method(Enum):
    RK4 = "rk4"
    EULER = "euler"


@dataclass(frozen=True, slots=True)
class IntegratorConfig:
    """Fixed step size and horizon (s) of a simulation."""
    dt: float = 1e-3
    t_end: float = 15.0
    method: Method = Method.RK4
    
    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))
    
    def problems(self) -> list[str]:
        problems = []
        if not math.isfinite(self.dt) or not 0 < self.dt <= MAX_STEP:
            problems.append(f"dt: must satisfy 0 < dt <= {MAX_STEP}, got {self.dt!r}")
        if not math.isfinite(self.t_end) or self.t_end < 0:
            problems.append(f"t_end: must be >= 0, got {self.t_end!r}")
        if not problems:
            steps = self.t_end / self.dt
            if abs(steps - round(steps)) > 1e-6 * max(1.0, steps):
                problems.append(f"t_end: {self.t_end!r} is not a whole number of {self.dt!r} s steps")
        if not isinstance(self.method, Method):
            problems.append(f"method: must be one of {[m.value for m in Method]}, got {self.method!r}")
        return problems
    
    def is_valid(self) -> bool:
        return not self.problems()


def step(deriv: Derivative, t: float, y: np.ndarray, dt: float, method: Method = Method.RK4) -> np.ndarray:
    """Advances `y` from `t` to `t + dt` with one classic RK4 step, or one forward Euler step.

    Args:
        deriv (Derivative): dy/dt as a function of (t, y).
        t (float): Current time.
        y (np.ndarray): Current state.
        dt (float): Step size.
        method (Method, optional): Defaults to Method.RK4.

    Raises:
        NonFiniteState: Any component of the new state is NaN or Inf.

    Returns:
        np.ndarray: The state at `t + dt`.
    """
    y = np.asarray(y, dtype=float)
    if method is Method.EULER:
        y_next = y + dt * deriv(t, y)
    else:
        k1 = deriv(t, y)
        k2 = deriv(t + 0.5 * dt, y + 0.5 * dt * k1)
        k3 = deriv(t + 0.5 * dt, y + 0.5 * dt * k2)
        k4 = deriv(t + dt, y + dt * k3)
        y_next = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    
    if not np.all(np.isfinite(y_next)):
        raise NonFiniteState("Integrator produced a non-finite state", t + dt)
    return y_next


def integrate(deriv: Derivative, y0: np.ndarray, cfg: IntegratorConfig, observer: Observer | None = None) -> np.ndarray:
    """Applies `step` cfg.n_steps times starting at t = 0.

    Step k ends at exactly t = k * dt, so no time drift accumulates over long horizons.

    Args:
        deriv (Derivative): dy/dt as a function of (t, y).
        y0 (np.ndarray): Initial state at t = 0.
        cfg (IntegratorConfig): Step size, horizon and method.
        observer (Observer | None, optional): Called after every step with (t, y). Defaults to None.

    Raises:
        NonFiniteState: A step blew up; carries the timestamp of the failed step.

    Returns:
        np.ndarray: The final state (y0 itself when there are no steps).
    """
    y = np.asarray(y0, dtype=float)
    for k in range(cfg.n_steps):
        y = step(deriv, k * cfg.dt, y, cfg.dt, cfg.method)
        if observer is not None:
            observer((k + 1) * cfg.dt, y)
    return y
