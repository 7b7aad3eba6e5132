"""
Project: cranectl
Module: cranectl
Created Date: 17 Oct 2026
Author: Noah Keck
:------------------------------------------------------------------------------:
MIT License
Copyright (c) 2026
:------------------------------------------------------------------------------:
"""

import dataclasses
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

SETTLING_BAND = 0.02
# m, keeps the band open when x_d = 0
SETTLING_FLOOR = 1e-3
RESIDUAL_WINDOW = 2.0
V_DOT_TOL = 1e-8
V_INCREASE_TOL = 1e-9
FD_RELATIVE_TOL = 0.05
FD_MIN_MAGNITUDE = 1e-6
V_DOT_MODES = ("auto", "analytic", "finite_difference")


@dataclass(frozen=True, slots=True)
class Metrics:
    """Summary of one trajectory. Angles are in degrees.

    settling_time is None when x never stays inside the band around x_d before the end of the run.
    """
    settling_time: float | None
    peak_theta1: float
    peak_theta2: float
    residual_theta: float
    steady_state_error: float
    max_u: float
    iae: float
    clamp_events: int = 0
    
    @property
    def settled(self) -> bool:
        return self.settling_time is not None
    
    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


METRIC_NAMES = tuple(f.name for f in dataclasses.fields(Metrics))


def compute_metrics(t: np.ndarray, x: np.ndarray, theta1: np.ndarray, theta2: np.ndarray, u: np.ndarray,
                    x_d: float, clamp_events: int = 0, band: float = SETTLING_BAND,
                    window: float = RESIDUAL_WINDOW, floor: float = SETTLING_FLOOR) -> Metrics:
    """Computes settling, swing and effort metrics of a recorded trajectory.

    Args:
        t (np.ndarray): Sample times, strictly increasing.
        x (np.ndarray): Trolley position (m).
        theta1 (np.ndarray): Hook angle (rad).
        theta2 (np.ndarray): Payload angle (rad).
        u (np.ndarray): Control force (N).
        x_d (float): Target position (m).
        clamp_events (int, optional): Passed through from the gain tuner. Defaults to 0.
        band (float, optional): Settling band as a fraction of |x_d|. Defaults to 2%.
        window (float, optional): Length of the final window for the residual swing (s). Defaults to 2 s.
        floor (float, optional): Smallest band half-width (m), whatever x_d is. Defaults to 1 mm.

    Returns:
        Metrics: The metrics, all non-negative.
    """
    error = np.abs(x - x_d)
    outside = error > max(band * abs(x_d), floor)
    if not outside.any():
        settling_time = float(t[0])
    elif outside[-1]:
        settling_time = None
    else:
        settling_time = float(t[np.nonzero(outside)[0][-1] + 1])
    
    swing = np.maximum(np.abs(theta1), np.abs(theta2))
    tail = t >= t[-1] - window
    return Metrics(
        settling_time=settling_time,
        peak_theta1=float(np.degrees(np.max(np.abs(theta1)))),
        peak_theta2=float(np.degrees(np.max(np.abs(theta2)))),
        residual_theta=float(np.degrees(np.max(swing[tail]))),
        steady_state_error=float(error[-1]),
        max_u=float(np.max(np.abs(u))),
        iae=float(trapezoid(error, t)) if len(t) > 1 else 0.0,
        clamp_events=int(clamp_events),
    )


@dataclass(slots=True)
class LyapunovReport:
    """Outcome of checking V and its closed-form derivative along a trajectory.

    fd_mismatch_fraction is the share of samples with |v_dot| > 1e-6 where the finite-difference
    derivative of V differs from v_dot by more than 5%.
    """
    v_dot_max: float
    v_increase_count: int
    v_increase_max: float
    fd_checked: int
    fd_mismatch_fraction: float
    v_dot_source: str = "analytic"
    fd_v_dot: np.ndarray = field(default=None, repr=False)
    
    @property
    def v_dot_ok(self) -> bool:
        return self.v_dot_max <= V_DOT_TOL
    
    @property
    def v_non_increasing(self) -> bool:
        return self.v_increase_count == 0
    
    @property
    def systematic_mismatch(self) -> bool:
        return self.fd_mismatch_fraction > 0.5
    
    def to_dict(self) -> dict:
        return {
            "v_dot_max": self.v_dot_max,
            "v_dot_ok": self.v_dot_ok,
            "v_increase_count": self.v_increase_count,
            "v_increase_max": self.v_increase_max,
            "fd_checked": self.fd_checked,
            "fd_mismatch_fraction": self.fd_mismatch_fraction,
            "v_dot_source": self.v_dot_source,
        }


def check_lyapunov(t: np.ndarray, v: np.ndarray, v_dot: np.ndarray, mode: str = "auto") -> LyapunovReport:
    """Checks the sign of v_dot, the sample-to-sample change of V, and v_dot against dV/dt.

    With mode "auto" the finite-difference derivative replaces v_dot as the reported diagnostic
    when the two disagree on more than half of the checked samples.
    """
    if mode not in V_DOT_MODES:
        raise ValueError(f"Unknown v_dot mode '{mode}', expected one of {V_DOT_MODES}")
    
    steps = np.diff(v)
    increases = steps[steps > V_INCREASE_TOL]
    if len(t) > 2:
        fd = np.gradient(v, t)
        interior = np.zeros(len(t), dtype=bool)
        interior[1:-1] = True
        checked = interior & (np.abs(v_dot) > FD_MIN_MAGNITUDE)
        mismatch = np.abs(fd - v_dot) > FD_RELATIVE_TOL * np.abs(v_dot)
        n_checked = int(checked.sum())
        fraction = float(mismatch[checked].mean()) if n_checked else 0.0
    else:
        fd = np.zeros_like(v)
        n_checked = 0
        fraction = 0.0
    
    report = LyapunovReport(
        v_dot_max=float(np.max(v_dot)) if len(v_dot) else 0.0,
        v_increase_count=int(len(increases)),
        v_increase_max=float(increases.max()) if len(increases) else 0.0,
        fd_checked=n_checked,
        fd_mismatch_fraction=fraction,
        fd_v_dot=fd,
    )
    if report.systematic_mismatch:
        logging.warning(f"Closed-form V_dot disagrees with dV/dt on {fraction:.0%} of {n_checked} checked samples.")
    if mode == "finite_difference" or (mode == "auto" and report.systematic_mismatch):
        report.v_dot_source = "finite_difference"
    return report
