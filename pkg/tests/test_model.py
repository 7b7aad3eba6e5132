"""
Project: cranectl
Module: tests
Created Date: 17 Oct 2026
Author: Noah Keck
:------------------------------------------------------------------------------:
MIT License
Copyright (c) 2026
:------------------------------------------------------------------------------:
"""

import json
import sys
import tempfile
import unittest
from pathlib import Path
from unittest import mock

import requests

# required for testing in an environment without cranectl installed as a package
sys.path.insert(0, './src')

from cranectl.controllers import Controller
from cranectl.core import Scenario
from cranectl.dynamics import CraneParams
from cranectl.errors import *
from cranectl.fuzzy import DEFAULT_RULE_TABLE
from cranectl.fuzzy.helpers import format_rule_table
from cranectl.helpers import NUMBER_FORMAT, is_url, write_atomic
from cranectl.integrator import Method
from cranectl.model import PRESETS, ScenarioFile, preset, scenario_from_file, scenario_from_text


class TestScenarioFile(unittest.TestCase):
    
    def test_defaults_are_the_reference_setup(self):
        self.assertEqual(ScenarioFile().to_scenario(), Scenario())
        self.assertEqual(scenario_from_file(None).to_scenario(), Scenario())
    
    def test_values_are_read(self):
        sf = scenario_from_text(json.dumps({
            "label": "slow",
            "params": {"m": 12, "l2": 0.4},
            "target": {"x_d": 1.2},
            "integrator": {"dt": 0.002, "t_end": 4, "method": "Euler"},
            "controller": {"kind": "pd_baseline"},
            "baseline": {"kp": 10, "kd": 15},
            "initial": {"theta1": 0.05},
            "output": {"relative_v": True, "v_dot": "analytic"},
        }))
        scenario = sf.to_scenario()
        self.assertEqual(scenario.params, CraneParams(m=12.0, l2=0.4))
        self.assertEqual(scenario.x_d, 1.2)
        self.assertIs(scenario.integrator.method, Method.EULER)
        self.assertEqual(scenario.integrator.n_steps, 2000)
        self.assertIs(scenario.controller_kind, Controller.PD_BASELINE)
        self.assertEqual(scenario.pd_gains, (10.0, 15.0))
        self.assertEqual(scenario.initial.theta1, 0.05)
        self.assertTrue(scenario.relative_v)
        self.assertEqual(scenario.v_dot_mode, "analytic")
        self.assertEqual(scenario.label, "slow")
    
    def test_unknown_keys(self):
        with self.assertRaises(ParseError) as ctx:
            ScenarioFile({"params": {"mass": 3}})
        self.assertEqual(ctx.exception.key, "params.mass")
        with self.assertRaises(ParseError) as ctx:
            ScenarioFile({"solver": {}})
        self.assertEqual(ctx.exception.key, "solver")
        with self.assertRaises(ParseError) as ctx:
            ScenarioFile({"controller": {"fuzzy": {"on": True}}})
        self.assertEqual(ctx.exception.key, "controller.fuzzy.on")
    
    def test_invalid_values_name_the_field(self):
        cases = [
            ({"params": {"m1": 0}}, "params.m1"),
            ({"params": {"l1": "long"}}, "params.l1"),
            ({"gains": {"kd0": -1}}, "gains.kd0"),
            ({"integrator": {"t_end": 0}}, "integrator.t_end"),
            ({"integrator": {"method": "rk45"}}, "integrator.method"),
            ({"controller": {"kind": "lqr"}}, "controller.kind"),
            ({"initial": {"theta2": 1.6}}, "initial.theta2"),
            ({"output": {"decimate": 0}}, "output.decimate"),
            ({"output": {"relative_v": "yes"}}, "output.relative_v"),
        ]
        for src, field in cases:
            with self.assertRaises(ValidationError, msg=field) as ctx:
                ScenarioFile(src).to_scenario()
            self.assertEqual(ctx.exception.field, field)
    
    def test_malformed_json_reports_line(self):
        with self.assertRaises(ParseError) as ctx:
            scenario_from_text('{\n  "params": {\n    "m": 10,\n  }\n}')
        self.assertEqual(ctx.exception.line, 4)
        with self.assertRaises(ParseError):
            scenario_from_text("[1, 2]")
    
    def test_schema_version(self):
        with self.assertRaises(ValidationError) as ctx:
            ScenarioFile({"version": "2.0"}).to_scenario()
        self.assertEqual(ctx.exception.field, "version")
        with self.assertRaises(ValidationError):
            ScenarioFile({"version": "one"}).to_scenario()
        with self.assertLogs(level="WARNING"):
            ScenarioFile({"version": "0.9"}).to_scenario()
        ScenarioFile({"version": "1.3"}).to_scenario()
    
    def test_fuzzy_switch(self):
        scenario = ScenarioFile({"controller": {"fuzzy": {"enabled": False}}}).to_scenario()
        self.assertIs(scenario.controller_kind, Controller.FIXED_GAIN)
        scenario = ScenarioFile({"controller": {"kind": "pd_baseline", "fuzzy": {"enabled": False}}}).to_scenario()
        self.assertIs(scenario.controller_kind, Controller.PD_BASELINE)
    
    def test_effective_dict_round_trip(self):
        sf = ScenarioFile({"params": {"m2": 1.5}, "output": {"decimate": 5}})
        echoed = sf.effective_dict()
        self.assertEqual(echoed["params"]["l1"], 0.7)
        self.assertEqual(echoed["controller"]["fuzzy"]["enabled"], True)
        again = ScenarioFile(json.loads(json.dumps(echoed)))
        self.assertEqual(again.to_scenario(), sf.to_scenario())
        self.assertEqual(again.effective_dict(), echoed)


class TestLoading(unittest.TestCase):
    
    def test_presets(self):
        self.assertEqual(preset("group1").to_scenario().params, CraneParams())
        self.assertEqual(scenario_from_file("preset:group2").to_scenario().params, CraneParams(m2=1.5, l2=0.4))
        self.assertIs(preset("fixed_gain").to_scenario().controller_kind, Controller.FIXED_GAIN)
        for name in PRESETS:
            self.assertEqual(preset(name).to_scenario().label, name)
        with self.assertRaises(ArgumentTypeError):
            scenario_from_file("preset:group9")
    
    def test_presets_are_not_shared(self):
        sf = preset("group2")
        sf.params.m2 = 3.0
        self.assertEqual(preset("group2").params.m2, 1.5)
    
    def test_file_with_relative_table(self):
        with tempfile.TemporaryDirectory() as tmp:
            tmp = Path(tmp)
            write_atomic(tmp / "tables" / "swapped.txt", format_rule_table(DEFAULT_RULE_TABLE.transposed()))
            path = tmp / "scenario.json"
            path.write_text(json.dumps({"controller": {"fuzzy": {"table_override_path": "tables/swapped.txt"}}}))
            scenario = scenario_from_file(str(path)).to_scenario()
            self.assertEqual(scenario.rule_table, DEFAULT_RULE_TABLE.transposed())
            with self.assertRaises(ParseError):
                scenario_from_file(str(tmp / "missing.json"))
    
    @mock.patch("cranectl.model.requests.get")
    def test_url(self, get):
        get.return_value = mock.Mock(text=json.dumps({"label": "remote", "target": {"x_d": 0.5}}))
        scenario = scenario_from_file("https://example.com/scenario.json").to_scenario()
        get.assert_called_once_with("https://example.com/scenario.json", timeout=30)
        self.assertEqual(scenario.label, "remote")
        self.assertEqual(scenario.x_d, 0.5)
        
        get.side_effect = requests.ConnectionError("offline")
        with self.assertRaises(ParseError):
            scenario_from_file("https://example.com/scenario.json")


class TestHelpers(unittest.TestCase):
    
    def test_is_url(self):
        self.assertTrue(is_url("https://example.com/a.json"))
        self.assertFalse(is_url("scenarios/a.json"))
        self.assertFalse(is_url("preset:group1"))
    
    def test_number_format(self):
        self.assertEqual(NUMBER_FORMAT % 0.0, "0")
        self.assertEqual(NUMBER_FORMAT % 0.7000000012, "0.700000001")
        self.assertEqual(NUMBER_FORMAT % 3, "3")
    
    def test_write_atomic_leaves_no_temp_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "out" / "metrics.json"
            write_atomic(path, "{}\n")
            write_atomic(path, "[]\n")
            self.assertEqual(path.read_text(), "[]\n")
            self.assertEqual(sorted(p.name for p in path.parent.iterdir()), ["metrics.json"])


if __name__ == "__main__":
    unittest.main()
