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

class CraneError(Exception):
    """Base exception for crane simulation and control."""
    pass

class ArgumentTypeError(CraneError):
    """Occurs when an argument is not of the correct type or names an unknown option."""
    pass

class InsufficientArgsError(CraneError):
    """Occurs when there are not enough arguments passed."""
    pass

class ValidationError(CraneError):
    """Occurs when a value breaks one of its invariants. `field` names the offending field."""
    
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message
    
    def __reduce__(self):
        return (self.__class__, (self.field, self.message))

class ParseError(CraneError):
    """Occurs when a scenario or rule-table file cannot be parsed."""
    
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        where = []
        if line is not None: where.append(f"line {line}")
        if key is not None: where.append(f"key '{key}'")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.message = message
        self.line = line
        self.key = key
    
    def __reduce__(self):
        return (self.__class__, (self.message, self.line, self.key))

class SingularMass(CraneError):
    """Occurs when the 3x3 inertia system cannot be solved."""
    pass

class MismatchedScenarios(CraneError):
    """Occurs when scenarios that are compared do not share the same plant and target."""
    pass

class SimulationError(CraneError):
    """Base exception for a simulation that stopped before its horizon.

    `t` is the failure time and `partial` optionally holds whatever was recorded up to it.
    """
    
    def __init__(self, message: str, t: float, partial=None):
        self.message = message
        super().__init__(f"{message} at t={t:.6g} s")
        self.t = t
        self.partial = partial
    
    def __reduce__(self):
        return (self.__class__, (self.message, self.t, self.partial))

class NonFiniteState(SimulationError):
    """Occurs when the integrator produces a NaN or Inf component."""
    pass

class Unstable(SimulationError):
    """Occurs when a closed-loop run blows up."""
    pass

class AngleLimit(SimulationError):
    """Occurs when a swing angle reaches horizontal, where the crane model no longer applies."""
    
    def __init__(self, angle: str, value: float, t: float, partial=None):
        super().__init__(f"|{angle}| = {abs(value):.6g} rad reached pi/2", t, partial)
        self.angle = angle
        self.value = value
    
    def __reduce__(self):
        return (self.__class__, (self.angle, self.value, self.t, self.partial))
