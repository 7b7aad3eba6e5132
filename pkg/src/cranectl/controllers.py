"""
Project: cranectl
Module: cranectl
Created Date: 16 Oct 2026
Author: Noah Keck
:------------------------------------------------------------------------------:
MIT License
Copyright (c) 2026
:------------------------------------------------------------------------------:
"""

from abc import ABC, abstractmethod
from enum import Enum

from cranectl.control import ControllerGains, ControllerState, control_force
from cranectl.dynamics import CraneParams, CraneState
from cranectl.errors import ArgumentTypeError
from cranectl.fuzzy import FuzzyRuleTable, GainScheduler


def pd_baseline_force(state: CraneState, x_d: float, kp_pd: float, kd_pd: float) -> float:
    """Plain PD on the trolley position, u = -kp_pd*(x - x_d) - kd_pd*x_dot. Ignores the swing entirely."""
    return -kp_pd * (state.x - x_d) - kd_pd * state.x_dot


def pd_gains_from_law(params: CraneParams, gains: ControllerGains) -> tuple[float, float]:
    """PD gains with the same position stiffness and trolley damping as the coupling law near rest.

    Returns:
        tuple[float, float]: (kp*(m - m2*l2/l1)/l1, kd/m)
    """
    return gains.kp * params.position_scale / params.l1, gains.kd / params.m


class BaseController(ABC):
    """One controller instance drives exactly one run.

    `schedule` is called once per integrator step and the gains it returns are held for the whole
    step, `force` is called at every integrator stage.
    """
    kind = ""
    
    def __init__(self, params: CraneParams, gains0: ControllerGains, **kwargs):
        self.params = params
        self.gains0 = gains0
    
    def schedule(self, cs: ControllerState, state: CraneState) -> ControllerGains:
        return self.gains0
    
    @abstractmethod
    def force(self, cs: ControllerState, state: CraneState, gains: ControllerGains) -> float:
        raise NotImplementedError
    
    @property
    def clamp_events(self) -> int:
        return 0
    
    @property
    def uses_coupling_law(self) -> bool:
        return True


class FixedGainController(BaseController):
    """The coupling law with its gains frozen at their initial values."""
    kind = "fixed_gain"
    
    def force(self, cs: ControllerState, state: CraneState, gains: ControllerGains) -> float:
        return control_force(self.params, gains, cs, state)


class FuzzyTunedController(FixedGainController):
    """The coupling law with gains re-tuned by the fuzzy rule table on every step."""
    kind = "fuzzy_tuned"
    
    def __init__(self, params: CraneParams, gains0: ControllerGains, table: FuzzyRuleTable | None = None, **kwargs):
        super().__init__(params, gains0)
        self.scheduler = GainScheduler(gains0, table)
    
    def schedule(self, cs: ControllerState, state: CraneState) -> ControllerGains:
        return self.scheduler.gains_for_state(cs, state)
    
    @property
    def clamp_events(self) -> int:
        return self.scheduler.clamp_events


class PDBaselineController(BaseController):
    """Comparison controller standing in for a published anti-sway law that is not reproduced here."""
    kind = "pd_baseline"
    
    def __init__(self, params: CraneParams, gains0: ControllerGains, kp_pd: float = 20.0, kd_pd: float = 25.0, **kwargs):
        super().__init__(params, gains0)
        self.kp_pd = kp_pd
        self.kd_pd = kd_pd
    
    def force(self, cs: ControllerState, state: CraneState, gains: ControllerGains) -> float:
        return pd_baseline_force(state, cs.x_d, self.kp_pd, self.kd_pd)
    
    @property
    def uses_coupling_law(self) -> bool:
        return False


class Controller(Enum):
    FUZZY_TUNED = FuzzyTunedController
    FIXED_GAIN = FixedGainController
    PD_BASELINE = PDBaselineController
    
    @property
    def kind(self) -> str:
        return self.value.kind
    
    @classmethod
    def from_kind(cls, kind: str) -> "Controller":
        for member in cls:
            if member.kind == kind:
                return member
        raise ArgumentTypeError(f"Unknown controller kind '{kind}', expected one of {[m.kind for m in cls]}")
    
    def create(self, params: CraneParams, gains0: ControllerGains, **kwargs) -> BaseController:
        return self.value(params, gains0, **kwargs)
