"""
Project: cranectl
Module: cranectl
Created Date: 14 Oct 2026
Author: Noah Keck
:------------------------------------------------------------------------------:
MIT License
Copyright (c) 2026
:------------------------------------------------------------------------------:
"""

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from cranectl.errors import AngleLimit, SingularMass

HALF_PI = 0.5 * math.pi

# layout of the plant part of every state vector, also the CSV column order
STATE_FIELDS = ("x", "x_dot", "theta1", "theta1_dot", "theta2", "theta2_dot")


@dataclass(frozen=True, slots=True)
class CraneParams:
    """Masses (kg), rope lengths (m) and gravity (m/s^2) of a double-pendulum overhead crane.

    The defaults are the first load group of the reference setup.
    """
    m: float = 10.0
    m1: float = 1.0
    m2: float = 2.0
    l1: float = 0.7
    l2: float = 0.3
    g: float = 9.81
    
    def problems(self) -> list[str]:
        """Checks every field against its invariant and returns one message per violation.
        
        Note that if the list is empty, it will evaluate as False.

        Returns:
            list[str]: Messages of the form "<field>: <reason>". Empty when the params are valid.
        """
        problems = []
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                problems.append(f"{field.name}: must be a finite number, got {value!r}")
            elif value <= 0:
                problems.append(f"{field.name}: must be > 0, got {value!r}")
        return problems
    
    def is_valid(self) -> bool:
        return not self.problems()
    
    def replace(self, **changes) -> "CraneParams":
        return dataclasses.replace(self, **changes)
    
    @property
    def total_mass(self) -> float:
        return self.m + self.m1 + self.m2
    
    @property
    def position_scale(self) -> float:
        """m - m2*l2/l1, the factor that scales the tanh term of the control law and its initial-force bound."""
        return self.m - self.m2 * self.l2 / self.l1


@dataclass(frozen=True, slots=True)
class CraneState:
    """Generalized coordinates q = (x, theta1, theta2) of the crane and their rates."""
    x: float = 0.0
    x_dot: float = 0.0
    theta1: float = 0.0
    theta1_dot: float = 0.0
    theta2: float = 0.0
    theta2_dot: float = 0.0
    
    def problems(self) -> list[str]:
        return [
            f"{name}: must be finite, got {getattr(self, name)!r}"
            for name in STATE_FIELDS
            if not math.isfinite(getattr(self, name))
        ]
    
    def is_valid(self) -> bool:
        return not self.problems()
    
    def as_vector(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in STATE_FIELDS], dtype=float)
    
    @classmethod
    def from_vector(cls, y) -> "CraneState":
        """Builds a state from the first six entries of `y`, laid out as STATE_FIELDS."""
        return cls(*np.asarray(y, dtype=float)[:6].tolist())
    
    @property
    def q(self) -> np.ndarray:
        return np.array([self.x, self.theta1, self.theta2])
    
    @property
    def q_dot(self) -> np.ndarray:
        return np.array([self.x_dot, self.theta1_dot, self.theta2_dot])


def check_angle_limit(state: CraneState, t: float):
    """Raises AngleLimit once either rope reaches horizontal, where the crane model stops being valid.

    Args:
        state (CraneState): The state to check.
        t (float): Simulation time of `state`, carried by the exception.

    Raises:
        AngleLimit: |theta1| or |theta2| is at least pi/2.
    """
    for name in ("theta1", "theta2"):
        value = getattr(state, name)
        if abs(value) >= HALF_PI:
            raise AngleLimit(name, value, t)


def mass_matrix(params: CraneParams, state: CraneState) -> np.ndarray:
    """Assembles the full nonlinear inertia matrix M(q).

    At theta1 = theta2 = 0 it reduces to the constant small-angle matrix.

    Args:
        params (CraneParams): The crane.
        state (CraneState): Only the two swing angles are read.

    Returns:
        np.ndarray: The symmetric, positive definite 3x3 matrix.
    """
    m, m1, m2, l1, l2 = params.m, params.m1, params.m2, params.l1, params.l2
    c1 = math.cos(state.theta1)
    c2 = math.cos(state.theta2)
    c12 = math.cos(state.theta1 - state.theta2)
    
    m12 = (m1 + m2) * l1 * c1
    m13 = m2 * l2 * c2
    m23 = m2 * l1 * l2 * c12
    return np.array([
        [m + m1 + m2, m12, m13],
        [m12, (m1 + m2) * l1 * l1, m23],
        [m13, m23, m2 * l2 * l2],
    ])


def generalized_forces(params: CraneParams, state: CraneState, u: float) -> np.ndarray:
    """Collects everything except the inertia terms of the three equations of motion.

    The input, centrifugal, Coriolis and gravity terms are moved to the right hand side so that
    M(q) q_ddot equals the returned vector.
    """
    m1, m2, l1, l2, g = params.m1, params.m2, params.l1, params.l2, params.g
    s1 = math.sin(state.theta1)
    s2 = math.sin(state.theta2)
    s12 = math.sin(state.theta1 - state.theta2)
    w1 = state.theta1_dot ** 2
    w2 = state.theta2_dot ** 2
    return np.array([
        u + (m1 + m2) * l1 * s1 * w1 + m2 * l2 * s2 * w2,
        -m2 * l1 * l2 * s12 * w2 - (m1 + m2) * g * l1 * s1,
        m2 * l1 * l2 * s12 * w1 - m2 * g * l2 * s2,
    ])


def _solve_symmetric(a, b, c, d, e, f, r0, r1, r2) -> tuple[float, float, float]:
    """Solves [[a, b, c], [b, d, e], [c, e, f]] q = r by cofactors after scaling the diagonal to one."""
    if not (a > 0.0 and d > 0.0 and f > 0.0):
        raise SingularMass("Inertia matrix has a non-positive diagonal entry.")
    s0, s1, s2 = 1.0 / math.sqrt(a), 1.0 / math.sqrt(d), 1.0 / math.sqrt(f)
    b, c, e = b * s0 * s1, c * s0 * s2, e * s1 * s2
    r0, r1, r2 = r0 * s0, r1 * s1, r2 * s2
    
    adj11 = 1.0 - e * e
    adj12 = c * e - b
    adj13 = b * e - c
    adj22 = 1.0 - c * c
    adj23 = b * c - e
    adj33 = 1.0 - b * b
    det = adj11 + b * adj12 + c * adj13
    if not det > 0.0:
        raise SingularMass(f"Inertia matrix is singular (scaled determinant {det!r}).")
    
    z0 = (adj11 * r0 + adj12 * r1 + adj13 * r2) / det
    z1 = (adj12 * r0 + adj22 * r1 + adj23 * r2) / det
    z2 = (adj13 * r0 + adj23 * r1 + adj33 * r2) / det
    q_ddot = (z0 * s0, z1 * s1, z2 * s2)
    if not all(math.isfinite(v) for v in q_ddot):
        raise SingularMass("Inertia system produced a non-finite solution.")
    return q_ddot


def _nonlinear_accelerations(params: CraneParams, theta1, theta1_dot, theta2, theta2_dot, u) -> tuple[float, float, float]:
    m1, m2, l1, l2, g = params.m1, params.m2, params.l1, params.l2, params.g
    c1, s1 = math.cos(theta1), math.sin(theta1)
    c2, s2 = math.cos(theta2), math.sin(theta2)
    c12, s12 = math.cos(theta1 - theta2), math.sin(theta1 - theta2)
    w1 = theta1_dot * theta1_dot
    w2 = theta2_dot * theta2_dot
    upper = m1 + m2
    return _solve_symmetric(
        params.m + upper, upper * l1 * c1, m2 * l2 * c2,
        upper * l1 * l1, m2 * l1 * l2 * c12, m2 * l2 * l2,
        u + upper * l1 * s1 * w1 + m2 * l2 * s2 * w2,
        -m2 * l1 * l2 * s12 * w2 - upper * g * l1 * s1,
        m2 * l1 * l2 * s12 * w1 - m2 * g * l2 * s2,
    )


def accelerations(params: CraneParams, state: CraneState, u: float) -> tuple[float, float, float]:
    """Solves the full nonlinear equations of motion for (x_ddot, theta1_ddot, theta2_ddot).

    Args:
        params (CraneParams): The crane.
        state (CraneState): Current state, |theta_i| < pi/2.
        u (float): Horizontal force on the trolley (N).

    Raises:
        SingularMass: The 3x3 solve failed, which points at invalid params.

    Returns:
        tuple[float, float, float]: The three generalized accelerations.
    """
    return _nonlinear_accelerations(params, state.theta1, state.theta1_dot, state.theta2, state.theta2_dot, u)


def small_angle_accelerations(params: CraneParams, state: CraneState, u: float) -> tuple[float, float, float]:
    """Solves the linearized model M0 q_ddot + C(q, q_dot) q_dot + G(q) = [u, 0, 0].

    M0 is the constant inertia matrix, C keeps only the trolley row centrifugal terms and G is linear
    in the angles.
    """
    m1, m2, l1, l2, g = params.m1, params.m2, params.l1, params.l2, params.g
    upper = m1 + m2
    return _solve_symmetric(
        params.m + upper, upper * l1, m2 * l2,
        upper * l1 * l1, m2 * l1 * l2, m2 * l2 * l2,
        u + upper * l1 * state.theta1 * state.theta1_dot ** 2 + m2 * l2 * state.theta2 * state.theta2_dot ** 2,
        -upper * g * l1 * state.theta1,
        -m2 * g * l2 * state.theta2,
    )


def state_derivative(params: CraneParams, state: CraneState, u: float) -> np.ndarray:
    """Time derivative of the plant vector, in STATE_FIELDS order."""
    return plant_derivative(params, state.as_vector(), u)


def plant_derivative(params: CraneParams, y, u: float) -> np.ndarray:
    """Same as state_derivative but reads the plant straight from the first six entries of `y`.

    This is the integrator's hot path, so no CraneState is built.
    """
    x_dot, theta1, theta1_dot, theta2, theta2_dot = np.asarray(y, dtype=float)[1:6].tolist()
    x_ddot, theta1_ddot, theta2_ddot = _nonlinear_accelerations(params, theta1, theta1_dot, theta2, theta2_dot, u)
    return np.array([x_dot, x_ddot, theta1_dot, theta1_ddot, theta2_dot, theta2_ddot])


def mechanical_energy(params: CraneParams, state: CraneState) -> float:
    """Kinetic plus potential energy (J), zero when hanging at rest. Independent of x."""
    q_dot = state.q_dot
    kinetic = 0.5 * float(q_dot @ mass_matrix(params, state) @ q_dot)
    potential = (params.m1 + params.m2) * params.g * params.l1 * (1.0 - math.cos(state.theta1)) \
        + params.m2 * params.g * params.l2 * (1.0 - math.cos(state.theta2))
    return kinetic + potential
