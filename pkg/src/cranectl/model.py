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

import copy
import json
import logging
from abc import ABC
from pathlib import Path

import requests
from packaging import version

from cranectl.control import ControllerGains
from cranectl.controllers import Controller as ControllerKind
from cranectl.core import Scenario
from cranectl.dynamics import CraneParams, CraneState
from cranectl.errors import *
from cranectl.fuzzy import load_rule_table
from cranectl.helpers import all_class_properties, is_url
from cranectl.integrator import IntegratorConfig, Method

SCHEMA_VERSION = "1.0"
PRESET_PREFIX = "preset:"


class Base(ABC):
    """A section of a scenario document backed by the raw JSON dict.

    Keys that are not properties of the section are rejected, missing keys read as their default.
    """
    _src = {}
    _defaults = {}
    _section = ""
    
    def __init__(self, src: dict | None = None):
        if src is None:
            src = {}
        if not isinstance(src, dict):
            raise ParseError(f"Section must be a JSON object, got {type(src).__name__}", key=self._section or None)
        for key in src.keys():
            if key not in all_class_properties(self.__class__):
                raise ParseError("Unknown key", key=self._qualified(key))
        self._src = dict(src)
    
    def __eq__(self, other):
        if isinstance(other, self.__class__):
            return dict(self) == dict(other)
        return NotImplemented
    
    def __iter__(self):
        for key in all_class_properties(self.__class__):
            value = getattr(self, key)
            if value is None: continue
            if issubclass(value.__class__, Base): yield (key, dict(value))
            else: yield (key, value)
    
    def __str__(self):
        return str(dict(self))
    
    def to_dict(self) -> dict:
        return dict(self)
    
    def _qualified(self, key: str) -> str:
        return f"{self._section}.{key}" if self._section else key
    
    def _get(self, key: str):
        return self._src.get(key, self._defaults.get(key))
    
    def _number(self, key: str) -> float:
        value = self._get(key)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(self._qualified(key), f"must be a number, got {value!r}")
        return float(value)
    
    def _flag(self, key: str) -> bool:
        value = self._get(key)
        if not isinstance(value, bool):
            raise ValidationError(self._qualified(key), f"must be true or false, got {value!r}")
        return value


class ScenarioFile(Base):
    """JSON scenario document. Every section is optional and defaults to the reference setup."""
    
    class Params(Base):
        _section = "params"
        _defaults = {"m": 10.0, "m1": 1.0, "m2": 2.0, "l1": 0.7, "l2": 0.3, "g": 9.81}
        
        def to_params(self) -> CraneParams:
            return CraneParams(*(self._number(key) for key in ("m", "m1", "m2", "l1", "l2", "g")))
        
        @property
        def m(self) -> float:
            return self._get("m")
        @m.setter
        def m(self, value: float):
            self._src["m"] = value
        
        @property
        def m1(self) -> float:
            return self._get("m1")
        @m1.setter
        def m1(self, value: float):
            self._src["m1"] = value
        
        @property
        def m2(self) -> float:
            return self._get("m2")
        @m2.setter
        def m2(self, value: float):
            self._src["m2"] = value
        
        @property
        def l1(self) -> float:
            return self._get("l1")
        @l1.setter
        def l1(self, value: float):
            self._src["l1"] = value
        
        @property
        def l2(self) -> float:
            return self._get("l2")
        @l2.setter
        def l2(self, value: float):
            self._src["l2"] = value
        
        @property
        def g(self) -> float:
            return self._get("g")
        @g.setter
        def g(self, value: float):
            self._src["g"] = value
    # End class Params
    
    class Target(Base):
        _section = "target"
        _defaults = {"x_d": 0.7}
        
        @property
        def x_d(self) -> float:
            return self._get("x_d")
        @x_d.setter
        def x_d(self, value: float):
            self._src["x_d"] = value
    # End class Target
    
    class Gains(Base):
        _section = "gains"
        _defaults = {"kp0": 1.5, "kd0": 250.0, "kl0": 0.01}
        
        def to_gains(self) -> ControllerGains:
            values = [self._number(key) for key in ("kp0", "kd0", "kl0")]
            for key, value in zip(("kp0", "kd0", "kl0"), values):
                if value <= 0:
                    raise ValidationError(self._qualified(key), f"must be > 0, got {value!r}")
            return ControllerGains(*values)
        
        @property
        def kp0(self) -> float:
            return self._get("kp0")
        @kp0.setter
        def kp0(self, value: float):
            self._src["kp0"] = value
        
        @property
        def kd0(self) -> float:
            return self._get("kd0")
        @kd0.setter
        def kd0(self, value: float):
            self._src["kd0"] = value
        
        @property
        def kl0(self) -> float:
            return self._get("kl0")
        @kl0.setter
        def kl0(self, value: float):
            self._src["kl0"] = value
    # End class Gains
    
    class Integrator(Base):
        _section = "integrator"
        _defaults = {"dt": 1e-3, "t_end": 15.0, "method": Method.RK4.value}
        
        def to_config(self) -> IntegratorConfig:
            try:
                method = Method(str(self.method).lower())
            except ValueError:
                raise ValidationError("integrator.method", f"must be one of {[m.value for m in Method]}, got {self.method!r}")
            return IntegratorConfig(self._number("dt"), self._number("t_end"), method)
        
        @property
        def dt(self) -> float:
            return self._get("dt")
        @dt.setter
        def dt(self, value: float):
            self._src["dt"] = value
        
        @property
        def t_end(self) -> float:
            return self._get("t_end")
        @t_end.setter
        def t_end(self, value: float):
            self._src["t_end"] = value
        
        @property
        def method(self) -> str:
            return self._get("method")
        @method.setter
        def method(self, value: str):
            self._src["method"] = value
    # End class Integrator
    
    class Controller(Base):
        _section = "controller"
        _defaults = {"kind": ControllerKind.FUZZY_TUNED.kind}
        
        class Fuzzy(Base):
            _section = "controller.fuzzy"
            _defaults = {"enabled": True, "table_override_path": None}
            
            @property
            def enabled(self) -> bool:
                return self._get("enabled")
            @enabled.setter
            def enabled(self, value: bool):
                self._src["enabled"] = value
            
            @property
            def table_override_path(self) -> str | None:
                return self._get("table_override_path")
            @table_override_path.setter
            def table_override_path(self, value: str | None):
                self._src["table_override_path"] = value
        # End class Fuzzy
        
        def __init__(self, src: dict | None = None):
            super().__init__(src)
            self._src["fuzzy"] = self.Fuzzy(self._src.get("fuzzy"))
        
        def effective_kind(self) -> ControllerKind:
            """The controller to run. A fuzzy_tuned controller with fuzzy.enabled = false runs with fixed gains."""
            try:
                kind = ControllerKind.from_kind(self.kind)
            except ArgumentTypeError as err:
                raise ValidationError("controller.kind", str(err))
            if kind is ControllerKind.FUZZY_TUNED and not self.fuzzy._flag("enabled"):
                return ControllerKind.FIXED_GAIN
            return kind
        
        @property
        def kind(self) -> str:
            return self._get("kind")
        @kind.setter
        def kind(self, value: str):
            self._src["kind"] = value
        
        @property
        def fuzzy(self) -> Fuzzy:
            return self._src["fuzzy"]
        @fuzzy.setter
        def fuzzy(self, value: Fuzzy):
            self._src["fuzzy"] = value
    # End class Controller
    
    class Baseline(Base):
        _section = "baseline"
        _defaults = {"kp": 20.0, "kd": 25.0}
        
        @property
        def kp(self) -> float:
            return self._get("kp")
        @kp.setter
        def kp(self, value: float):
            self._src["kp"] = value
        
        @property
        def kd(self) -> float:
            return self._get("kd")
        @kd.setter
        def kd(self, value: float):
            self._src["kd"] = value
    # End class Baseline
    
    class Initial(Base):
        _section = "initial"
        _defaults = {"x": 0.0, "x_dot": 0.0, "theta1": 0.0, "theta1_dot": 0.0, "theta2": 0.0, "theta2_dot": 0.0}
        
        def to_state(self) -> CraneState:
            return CraneState(*(self._number(key) for key in ("x", "x_dot", "theta1", "theta1_dot", "theta2", "theta2_dot")))
        
        @property
        def x(self) -> float:
            return self._get("x")
        @x.setter
        def x(self, value: float):
            self._src["x"] = value
        
        @property
        def x_dot(self) -> float:
            return self._get("x_dot")
        @x_dot.setter
        def x_dot(self, value: float):
            self._src["x_dot"] = value
        
        @property
        def theta1(self) -> float:
            return self._get("theta1")
        @theta1.setter
        def theta1(self, value: float):
            self._src["theta1"] = value
        
        @property
        def theta1_dot(self) -> float:
            return self._get("theta1_dot")
        @theta1_dot.setter
        def theta1_dot(self, value: float):
            self._src["theta1_dot"] = value
        
        @property
        def theta2(self) -> float:
            return self._get("theta2")
        @theta2.setter
        def theta2(self, value: float):
            self._src["theta2"] = value
        
        @property
        def theta2_dot(self) -> float:
            return self._get("theta2_dot")
        @theta2_dot.setter
        def theta2_dot(self, value: float):
            self._src["theta2_dot"] = value
    # End class Initial
    
    class Output(Base):
        _section = "output"
        _defaults = {"decimate": 1, "relative_v": False, "v_dot": "auto"}
        
        def decimation(self) -> int:
            value = self.decimate
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValidationError("output.decimate", f"must be an integer >= 1, got {value!r}")
            return value
        
        @property
        def decimate(self) -> int:
            return self._get("decimate")
        @decimate.setter
        def decimate(self, value: int):
            self._src["decimate"] = value
        
        @property
        def relative_v(self) -> bool:
            return self._get("relative_v")
        @relative_v.setter
        def relative_v(self, value: bool):
            self._src["relative_v"] = value
        
        @property
        def v_dot(self) -> str:
            return self._get("v_dot")
        @v_dot.setter
        def v_dot(self, value: str):
            self._src["v_dot"] = value
    # End class Output
    
    _defaults = {"version": SCHEMA_VERSION, "label": "default"}
    _sections = {
        "params": Params, "target": Target, "gains": Gains, "integrator": Integrator,
        "controller": Controller, "baseline": Baseline, "initial": Initial, "output": Output,
    }
    
    def __init__(self, src: dict | None = None, path: Path | str | None = None):
        """Creates a scenario document. Sections that are missing are filled with their defaults.

        Args:
            src (dict | None, optional): The parsed JSON document. Defaults to None.
            path (Path | str | None, optional): Where the document was loaded from, used to resolve relative paths. Defaults to None.

        Raises:
            ParseError: The document has a key that is not part of the schema.
        """
        super().__init__(src)
        for name, section in self._sections.items():
            self._src[name] = section(self._src.get(name))
        self.path = Path(path) if path is not None and not is_url(str(path)) else None
    
    def check_version(self):
        """Rejects documents written for a newer major schema and warns about older ones."""
        try:
            file_version = version.Version(str(self.version))
        except version.InvalidVersion:
            raise ValidationError("version", f"'{self.version}' is not a valid version")
        current = version.Version(SCHEMA_VERSION)
        if file_version.major > current.major:
            raise ValidationError("version", f"{file_version} is newer than the supported schema {current}")
        if file_version < current:
            logging.warning(f"Scenario schema {file_version} is older than {current}; missing keys use defaults.")
    
    def to_scenario(self) -> Scenario:
        """Converts the document into a validated Scenario.

        Raises:
            ValidationError: A value has the wrong type or breaks an invariant; `field` names it.
            RuleTableError: The fuzzy table override cannot be loaded.
        """
        self.check_version()
        rule_table = None
        override = self.controller.fuzzy.table_override_path
        if override:
            override = Path(override)
            if not override.is_absolute() and self.path is not None:
                override = self.path.parent / override
            rule_table = load_rule_table(override)
        
        scenario = Scenario(
            params=self.params.to_params(),
            x_d=self.target._number("x_d"),
            gains0=self.gains.to_gains(),
            integrator=self.integrator.to_config(),
            controller_kind=self.controller.effective_kind(),
            label=str(self.label),
            rule_table=rule_table,
            pd_gains=(self.baseline._number("kp"), self.baseline._number("kd")),
            initial=self.initial.to_state(),
            relative_v=self.output._flag("relative_v"),
            v_dot_mode=str(self.output.v_dot),
        )
        self.output.decimation()
        scenario.validate()
        return scenario
    
    def effective_dict(self) -> dict:
        """The document with every default filled in, the form echoed by print-config."""
        ret = {"version": self.version, "label": self.label}
        for name in self._sections:
            section = self._src[name]
            ret[name] = {**section._defaults, **dict(section)}
            if name == "controller":
                ret[name]["fuzzy"] = {**section.fuzzy._defaults, **dict(section.fuzzy)}
        return ret
    
    @property
    def version(self) -> str:
        return self._get("version")
    @version.setter
    def version(self, value: str):
        self._src["version"] = value
    
    @property
    def label(self) -> str:
        return self._get("label")
    @label.setter
    def label(self, value: str):
        self._src["label"] = value
    
    @property
    def params(self) -> Params:
        return self._src["params"]
    
    @property
    def target(self) -> Target:
        return self._src["target"]
    
    @property
    def gains(self) -> Gains:
        return self._src["gains"]
    
    @property
    def integrator(self) -> Integrator:
        return self._src["integrator"]
    
    @property
    def controller(self) -> Controller:
        return self._src["controller"]
    
    @property
    def baseline(self) -> Baseline:
        return self._src["baseline"]
    
    @property
    def initial(self) -> Initial:
        return self._src["initial"]
    
    @property
    def output(self) -> Output:
        return self._src["output"]


PRESETS = {
    "group1": {"label": "group1"},
    "group2": {"label": "group2", "params": {"l2": 0.4, "m2": 1.5}},
    "fixed_gain": {"label": "fixed_gain", "controller": {"kind": ControllerKind.FIXED_GAIN.kind}},
    "pd_baseline": {"label": "pd_baseline", "controller": {"kind": ControllerKind.PD_BASELINE.kind}},
}


def preset(name: str) -> ScenarioFile:
    if name not in PRESETS:
        raise ArgumentTypeError(f"Unknown preset '{name}', expected one of {list(PRESETS)}")
    return ScenarioFile(copy.deepcopy(PRESETS[name]))


def scenario_from_text(text: str, path: Path | str | None = None) -> ScenarioFile:
    try:
        src = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"Malformed JSON: {err.msg}", line=err.lineno) from err
    if not isinstance(src, dict):
        raise ParseError("A scenario must be a JSON object", line=1)
    return ScenarioFile(src, path)


def scenario_from_file(location: Path | str | None = None) -> ScenarioFile:
    """Loads a scenario document from a file path, an http(s) URL, or a "preset:NAME" token.

    Args:
        location (Path | str | None, optional): Where to load from. None gives the default scenario.

    Raises:
        ParseError: The location cannot be read or does not hold a valid scenario document.
        ArgumentTypeError: An unknown preset name.

    Returns:
        ScenarioFile: The parsed document.
    """
    if location is None:
        return ScenarioFile()
    if isinstance(location, str) and location.startswith(PRESET_PREFIX):
        return preset(location[len(PRESET_PREFIX):])
    if isinstance(location, str) and is_url(location):
        try:
            response = requests.get(location, timeout=30)
            response.raise_for_status()
        except requests.RequestException as err:
            raise ParseError(f"Unable to fetch scenario from {location}: {err}") from err
        return scenario_from_text(response.text, location)
    
    path = Path(location)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ParseError(f"Unable to read scenario file {path}: {err}") from err
    return scenario_from_text(text, path)
