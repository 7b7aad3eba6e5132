"""
Project: cranectl
Module: fuzzy
Created Date: 16 Oct 2026
Author: Noah Keck
:------------------------------------------------------------------------------:
MIT License
Copyright (c) 2026
:------------------------------------------------------------------------------:
"""

import logging

import numpy as np
import skfuzzy as fuzz

from cranectl.control import ControllerGains, ControllerState
from cranectl.dynamics import CraneState
from cranectl.fuzzy.model import CENTERS, DEFAULT_RULE_TABLE, LABELS, OUTPUTS, FuzzyDomains, FuzzyRuleTable

GAIN_FLOOR_FRACTION = 1e-4

# triangles peaking on each label center, with saturating shoulders at -1 and 1
_TRIANGLES = [
    [CENTERS[max(i - 1, 0)], c, CENTERS[min(i + 1, len(CENTERS) - 1)]]
    for i, c in enumerate(CENTERS)
]
# degree of every label (rows) at every label center (columns). The sets are piecewise linear
# between centers, so blending two adjacent columns gives the exact degrees anywhere in [-1, 1].
_KNOT_MEMBERSHIPS = np.array([fuzz.trimf(CENTERS, abc) for abc in _TRIANGLES])


def fuzzify(value: float) -> np.ndarray:
    """Degrees of membership of a normalized input in the seven labels NB..PB.

    Adjacent triangles overlap so that the degrees always sum to 1.

    Args:
        value (float): Normalized input, clamped to [-1, 1] here if it is not already.

    Returns:
        np.ndarray: Seven membership degrees in [0, 1].
    """
    x = min(max(float(value), CENTERS[0]), CENTERS[-1])
    i = min(int(np.searchsorted(CENTERS, x, side="right")) - 1, len(CENTERS) - 2)
    w = (x - CENTERS[i]) / (CENTERS[i + 1] - CENTERS[i])
    return (1.0 - w) * _KNOT_MEMBERSHIPS[:, i] + w * _KNOT_MEMBERSHIPS[:, i + 1]


def infer(table: FuzzyRuleTable, e_memberships: np.ndarray, e_dot_memberships: np.ndarray,
          domains: FuzzyDomains | None = None) -> tuple[float, float, float]:
    """Mamdani inference over the rule table followed by centroid defuzzification.

    Each rule fires with the min of its row and column memberships. Rules sharing a consequent
    label are combined with max. The crisp value is the firing-weighted mean of the label centers,
    scaled into the output domain.

    Args:
        table (FuzzyRuleTable): Rows indexed by e_dot labels, columns by e labels.
        e_memberships (np.ndarray): fuzzify() of the normalized position error.
        e_dot_memberships (np.ndarray): fuzzify() of the normalized error rate.
        domains (FuzzyDomains | None, optional): Output ranges. Defaults to FuzzyDomains().

    Returns:
        tuple[float, float, float]: (delta_kp, delta_kd, delta_kl).
    """
    domains = domains or FuzzyDomains()
    strength = np.minimum.outer(e_dot_memberships, e_memberships).ravel()
    
    outputs = []
    for k, bounds in enumerate(domains.output_ranges):
        aggregated = np.zeros(len(LABELS))
        np.maximum.at(aggregated, table.indices[:, :, k].ravel(), strength)
        total = aggregated.sum()
        normalized = float(aggregated @ CENTERS / total) if total > 0 else 0.0
        outputs.append(domains.scale(min(max(normalized, -1.0), 1.0), bounds))
    return outputs[0], outputs[1], outputs[2]


def gain_floors(base: ControllerGains) -> ControllerGains:
    return ControllerGains(*(GAIN_FLOOR_FRACTION * getattr(base, name) for name in OUTPUTS))


def apply_increments(base: ControllerGains, deltas: tuple[float, float, float]) -> tuple[ControllerGains, list[str]]:
    """Offsets the initial gains by the fuzzy increments and clamps each result at its floor.

    Returns:
        tuple[ControllerGains, list[str]]: The gains and the names of the gains that were clamped.
    """
    floors = gain_floors(base)
    values = {}
    clamped = []
    for name, delta in zip(OUTPUTS, deltas):
        value = getattr(base, name) + delta
        floor = getattr(floors, name)
        if value < floor:
            clamped.append(name)
            value = floor
        values[name] = value
    return ControllerGains(**values), clamped


def update_gains(base: ControllerGains, deltas: tuple[float, float, float]) -> ControllerGains:
    """K = K0 + dK for each gain, never below 1e-4 of K0.

    The increment is an offset from the initial gain, it does not accumulate across calls.

    Args:
        base (ControllerGains): The initial gains, all positive.
        deltas (tuple[float, float, float]): Fuzzy increments for (kp, kd, kl).

    Returns:
        ControllerGains: The gains to use for the next step.
    """
    gains, clamped = apply_increments(base, deltas)
    for name in clamped:
        logging.debug(f"Gain {name} clamped to its floor {getattr(gains, name):.3g}")
    return gains


class GainScheduler:
    """Online gain tuning: maps the current trolley error and its rate to a set of gains.

    Keeps a count of clamp events (one per gain clamped per update).
    """
    
    def __init__(self, base: ControllerGains, table: FuzzyRuleTable | None = None, domains: FuzzyDomains | None = None):
        self.base = base
        self.table = table or DEFAULT_RULE_TABLE
        self.domains = domains or FuzzyDomains()
        self.clamp_events = 0
    
    def deltas_for(self, e: float, e_dot: float) -> tuple[float, float, float]:
        e_mu = fuzzify(self.domains.normalize(e, self.domains.e_range))
        e_dot_mu = fuzzify(self.domains.normalize(e_dot, self.domains.e_dot_range))
        return infer(self.table, e_mu, e_dot_mu, self.domains)
    
    def gains_for(self, e: float, e_dot: float) -> ControllerGains:
        gains, clamped = apply_increments(self.base, self.deltas_for(e, e_dot))
        if clamped:
            self.clamp_events += len(clamped)
            logging.debug(f"Clamped {', '.join(clamped)} at e={e:.4g}, e_dot={e_dot:.4g}")
        return gains
    
    def gains_for_state(self, cs: ControllerState, state: CraneState) -> ControllerGains:
        """Schedules on e = x - x_d and its rate, the trolley error the rule table is written for."""
        return self.gains_for(state.x - cs.x_d, state.x_dot)
