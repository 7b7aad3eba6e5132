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

import dataclasses
import logging
import math
from dataclasses import dataclass

import numpy as np

from cranectl.dynamics import CraneParams, CraneState
from cranectl.errors import ValidationError

LN2 = math.log(2.0)


@dataclass(frozen=True, slots=True)
class ControllerGains:
    """Position gain kp, damping gain kd and coupling gain kl. Defaults are the reference initial values."""
    kp: float = 1.5
    kd: float = 250.0
    kl: float = 0.01
    
    def problems(self) -> list[str]:
        problems = []
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
                problems.append(f"{field.name}: must be a finite number > 0, got {value!r}")
        return problems
    
    def is_valid(self) -> bool:
        return not self.problems()
    
    def replace(self, **changes) -> "ControllerGains":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True, slots=True)
class ControllerState:
    """Running integrals of sin(theta1) and sin(theta2) (rad*s) plus the target position x_d (m)."""
    int_sin_theta1: float = 0.0
    int_sin_theta2: float = 0.0
    x_d: float = 0.0
    
    @property
    def int_sum(self) -> float:
        return self.int_sin_theta1 + self.int_sin_theta2
    
    def advance(self, int_sin_theta1: float, int_sin_theta2: float) -> "ControllerState":
        return dataclasses.replace(self, int_sin_theta1=float(int_sin_theta1), int_sin_theta2=float(int_sin_theta2))
    
    @classmethod
    def from_augmented(cls, y, x_d: float) -> "ControllerState":
        """Reads the two integrals stored after the six plant entries of an augmented vector."""
        return cls(float(y[6]), float(y[7]), x_d)


@dataclass(frozen=True, slots=True)
class LyapunovSample:
    v: float
    v_dot: float


def composite_error(params: CraneParams, cs: ControllerState, state: CraneState, kl: float) -> tuple[float, float]:
    """The trolley error augmented with the swing-angle integrals, and its rate.

    Returns:
        tuple[float, float]: (e, e_dot) in m and m/s, where
            e = x - x_d - kl*l1*(int sin(theta1) + int sin(theta2)) and
            e_dot = x_dot - kl*l1*(sin(theta1) + sin(theta2)).
    """
    e = state.x - cs.x_d - kl * params.l1 * cs.int_sum
    e_dot = state.x_dot - kl * params.l1 * (math.sin(state.theta1) + math.sin(state.theta2))
    return e, e_dot


def _shaped_argument(params: CraneParams, e: float, state: CraneState) -> float:
    return (e - (state.theta1 + state.theta2)) / params.l1


def gravity_compensation_coefficients(params: CraneParams) -> tuple[float, float]:
    """Coefficients (g1, g2) of the linear gravity terms -g1*theta1 + g2*theta2 of the control law."""
    m1, m2, l1, l2, g = params.m1, params.m2, params.l1, params.l2, params.g
    g1 = m1 * g + m2 * m2 * g / m1 - m2 * m2 * g * l2 / (m1 * l1) + 2.0 * m2 * g
    g2 = m2 * m2 * g / m1 + m2 * g
    return g1, g2


def control_force(params: CraneParams, gains: ControllerGains, cs: ControllerState, state: CraneState) -> float:
    """Evaluates the output-constrained coupling control law.

    The tanh term keeps the initial force within kp*(m - m2*l2/l1) however far away x_d is.

    Args:
        params (CraneParams): The crane. m1 must be positive.
        gains (ControllerGains): Gains active for this evaluation.
        cs (ControllerState): Integrals and target.
        state (CraneState): Measured state.

    Returns:
        float: The trolley force u (N).
    """
    m, m1, m2, l1, l2 = params.m, params.m1, params.m2, params.l1, params.l2
    e, e_dot = composite_error(params, cs, state, gains.kl)
    c1 = math.cos(state.theta1)
    c2 = math.cos(state.theta2)
    g1, g2 = gravity_compensation_coefficients(params)
    
    shaping = -gains.kp * params.position_scale * math.tanh(_shaped_argument(params, e, state))
    damping = -gains.kd * (e_dot / m - state.theta1_dot / (m * l1))
    coupling = gains.kl * (
        m * l1 * (c1 * state.theta1_dot + c2 * state.theta2_dot)
        - m2 * l2 * c2 * (state.theta2_dot - state.theta1_dot)
    )
    gravity = -g1 * state.theta1 + g2 * state.theta2
    centrifugal = -(m1 * l1 + m2 * l1) * state.theta1 * state.theta1_dot ** 2 - m2 * l2 * state.theta2 * state.theta2_dot ** 2
    return shaping + damping + coupling + gravity + centrifugal


def output_bound(params: CraneParams, gains: ControllerGains) -> float:
    """The bound kp*(m - m2*l2/l1) on |u| when starting from rest, for any target."""
    return gains.kp * params.position_scale


def lyapunov_offset(params: CraneParams) -> float:
    """Value of V at the target equilibrium, 3*m2*g/(m1*l1)."""
    return 3.0 * params.m2 * params.g / (params.m1 * params.l1)


def lyapunov(params: CraneParams, gains: ControllerGains, cs: ControllerState, state: CraneState,
             relative: bool = False) -> LyapunovSample:
    """Evaluates the energy-like function V and its closed-form derivative.

    Args:
        relative (bool, optional): Subtract the equilibrium value of V. Defaults to False.

    Returns:
        LyapunovSample: v and v_dot.
    """
    m, m1, m2, l1, g = params.m, params.m1, params.m2, params.l1, params.g
    e, e_dot = composite_error(params, cs, state, gains.kl)
    a = _shaped_argument(params, e, state)
    # ln(cosh(a)) without overflow for large |a|
    ln_cosh = float(np.logaddexp(a, -a)) - LN2
    
    kinetic = 0.5 * (e_dot ** 2 + state.theta1_dot ** 2 + state.theta2_dot ** 2)
    potential = 0.5 * (g / l1 + m2 * g / (m1 * l1)) * state.theta1 ** 2 \
        + gains.kp * ln_cosh \
        + (3.0 - state.theta1 * state.theta2) * m2 * g / (m1 * l1)
    v = kinetic + potential
    if relative:
        v -= lyapunov_offset(params)
    
    v_dot = -gains.kl * (math.cos(state.theta1) * state.theta1_dot ** 2 + math.cos(state.theta2) * state.theta2_dot ** 2) \
        - gains.kd / (m * m * l1 * l1) * (l1 * e_dot - state.theta1_dot) ** 2
    return LyapunovSample(v, v_dot)


def equilibrium(params: CraneParams, gains: ControllerGains, cs: ControllerState) -> tuple[float, float, float]:
    """Solves for the rest point of the linearized closed loop with frozen gains and frozen integrals.

    At rest the two pendulum equations reduce to their gravity terms and the trolley equation to
    u = 0 with u linearized around zero angles.

    Raises:
        ValidationError: m equals m2*l2/l1, so the law has no position stiffness.

    Returns:
        tuple[float, float, float]: (x, theta1, theta2) of the unique fixed point.
    """
    m, m1, m2, l1, l2, g = params.m, params.m1, params.m2, params.l1, params.l2, params.g
    k = gains.kp * params.position_scale / l1
    g1, g2 = gravity_compensation_coefficients(params)
    # damping term sees e_dot = -kl*l1*(theta1 + theta2) at rest
    coupling = gains.kd * gains.kl * l1 / m
    a = np.array([
        [-k, k + coupling - g1, k + coupling + g2],
        [0.0, (m1 + m2) * g * l1, 0.0],
        [0.0, 0.0, m2 * g * l2],
    ])
    b = np.array([-k * (cs.x_d + gains.kl * l1 * cs.int_sum), 0.0, 0.0])
    try:
        x, theta1, theta2 = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as err:
        raise ValidationError("m", f"m = m2*l2/l1 leaves the closed loop without a unique rest point ({err})") from err
    return float(x), float(theta1), float(theta2)


def warn_if_degenerate(params: CraneParams):
    if params.position_scale <= 0:
        logging.warning(f"m = {params.m} is not larger than m2*l2/l1 = {params.m2 * params.l2 / params.l1:.6g}; the tanh term changes sign and the initial-force bound no longer holds.")
