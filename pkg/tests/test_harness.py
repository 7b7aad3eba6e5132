"""
Project: cranectl
Module: tests
Created Date: 16 Oct 2026
Author: Noah Keck
:------------------------------------------------------------------------------:
MIT License
Copyright (c) 2026
:------------------------------------------------------------------------------:
"""

import math
import sys
import unittest
from types import SimpleNamespace
from unittest import mock

import numpy as np
from scipy.integrate import cumulative_trapezoid

# required for testing in an environment without cranectl installed as a package
sys.path.insert(0, './src')

from cranectl.control import ControllerGains, output_bound
from cranectl.controllers import Controller, pd_baseline_force, pd_gains_from_law
from cranectl.core import RECORD_FIELDS, Scenario, compare, run, sweep, tune_pd_baseline
from cranectl.dynamics import CraneParams, CraneState
from cranectl.errors import *
from cranectl.integrator import IntegratorConfig
from cranectl.metrics import check_lyapunov, compute_metrics

GROUP1 = Scenario(label="group1")
GROUP2 = Scenario(params=CraneParams(m2=1.5, l2=0.4), label="group2")
SHORT = Scenario(integrator=IntegratorConfig(t_end=1.0), label="short")


class TestClosedLoop(unittest.TestCase):
    
    @classmethod
    def setUpClass(cls):
        cls.group1 = run(GROUP1)
        cls.group2 = run(GROUP2)
        cls.pd = run(GROUP1.replace(controller_kind=Controller.PD_BASELINE, label="pd"))
        cls.fixed = run(GROUP1.replace(controller_kind=Controller.FIXED_GAIN, label="fixed"))
    
    def test_target_at_origin_stays_at_rest(self):
        result = run(Scenario(x_d=0.0, integrator=IntegratorConfig(t_end=2.0)))
        self.assertTrue(np.all(result.table[:, 1:7] == 0.0))
        self.assertTrue(np.all(result.column("u") == 0.0))
        metrics = result.metrics
        self.assertEqual(metrics.settling_time, 0.0)
        self.assertEqual(metrics.peak_theta2, 0.0)
        self.assertEqual(metrics.iae, 0.0)
        self.assertEqual(metrics.max_u, 0.0)
    
    def test_reaches_target_without_residual_swing(self):
        for result in (self.group1, self.group2, self.fixed):
            self.assertLess(abs(result.column("x")[-1] - 0.7), 0.01, result.scenario.label)
            self.assertLess(result.metrics.residual_theta, 0.5, result.scenario.label)
            self.assertTrue(result.metrics.settled, result.scenario.label)
    
    def test_closed_form_derivative_is_non_positive(self):
        for result in (self.group1, self.group2, self.fixed):
            self.assertLessEqual(result.lyapunov.v_dot_max, 1e-8)
            self.assertTrue(result.lyapunov.v_dot_ok)
    
    def test_tuned_gains_stay_above_floor(self):
        base = GROUP1.gains0
        for name in ("kp", "kd", "kl"):
            floor = 1e-4 * getattr(base, name)
            self.assertTrue(np.all(self.group1.column(name) >= floor * (1 - 1e-12)), name)
        self.assertGreater(self.group1.clamp_events, 0)
        self.assertEqual(self.fixed.clamp_events, 0)
        self.assertTrue(np.all(self.fixed.column("kd") == 250.0))
    
    def test_records(self):
        t = self.group1.column("t")
        self.assertEqual(self.group1.table.shape, (15001, len(RECORD_FIELDS)))
        self.assertEqual(t[0], 0.0)
        self.assertAlmostEqual(t[-1], 15.0, places=9)
        self.assertTrue(np.all(np.diff(t) > 0))
        self.assertEqual(len(self.group1.records), 15001)
        self.assertAlmostEqual(self.fixed.records[0].u, 10.44472, places=5)
    
    def test_initial_force_within_bound(self):
        self.assertLess(abs(self.fixed.column("u")[0]), 13.7142857)
        # the tuned kp at t = 0 widens the bound accordingly
        bound = output_bound(GROUP1.params, ControllerGains(kp=self.group1.column("kp")[0]))
        self.assertLess(abs(self.group1.column("u")[0]), bound)
    
    def test_swing_exceeds_baseline_without_coupling(self):
        self.assertGreater(self.pd.metrics.peak_theta2, self.group1.metrics.peak_theta2)
    
    def test_swing_exceeds_baseline_tuned_to_same_settling(self):
        tuning = tune_pd_baseline(GROUP1, target_settling=self.group1.metrics.settling_time)
        self.assertTrue(tuning.within_tolerance)
        pd = run(GROUP1.replace(controller_kind=Controller.PD_BASELINE, pd_gains=(tuning.kp_pd, tuning.kd_pd), label="pd tuned"))
        self.assertEqual(pd.metrics.settling_time, tuning.settling_time)
        self.assertGreater(pd.metrics.peak_theta2, self.group1.metrics.peak_theta2)
    
    def test_integrals_track_swing_angles(self):
        t = self.group1.column("t")
        for k, name in enumerate(("theta1", "theta2")):
            expected = cumulative_trapezoid(np.sin(self.group1.column(name)), t, initial=0.0)
            np.testing.assert_allclose(self.group1.integrals[:, k], expected, rtol=0, atol=1e-5)
    
    def test_same_scenario_same_records(self):
        again = run(GROUP1)
        self.assertEqual(again.table.tobytes(), self.group1.table.tobytes())
    
    def test_final_sample_reuses_held_gains(self):
        # kl is clamped at every schedule while the trolley is still far behind the target
        result = run(GROUP1.replace(integrator=IntegratorConfig(t_end=0.005), label="five steps"))
        gains = result.table[:, [RECORD_FIELDS.index(name) for name in ("kp", "kd", "kl")]]
        floors = 1e-4 * np.array([1.5, 250.0, 0.01])
        self.assertEqual(len(gains), 6)
        np.testing.assert_array_equal(gains[-1], gains[-2])
        at_floor = np.isclose(gains[:-1], floors, rtol=1e-9, atol=0.0)
        self.assertEqual(result.clamp_events, int(at_floor.sum()))
        self.assertEqual(result.clamp_events, 5)


class TestFailures(unittest.TestCase):
    
    def test_invalid_scenario(self):
        with self.assertRaises(ValidationError) as ctx:
            run(GROUP1.replace(params=CraneParams(m1=0.0)))
        self.assertEqual(ctx.exception.field, "params.m1")
        with self.assertRaises(ValidationError) as ctx:
            run(GROUP1.replace(integrator=IntegratorConfig(t_end=0.0)))
        self.assertEqual(ctx.exception.field, "integrator.t_end")
    
    def test_negative_damping_diverges(self):
        scenario = GROUP1.replace(controller_kind=Controller.FIXED_GAIN, gains0=ControllerGains(kd=-250.0))
        with self.assertRaises((Unstable, AngleLimit)) as ctx:
            run(scenario, check=False)
        err = ctx.exception
        self.assertLess(err.t, 15.0)
        self.assertIsNotNone(err.partial)
        self.assertTrue(np.all(np.isfinite(err.partial.table)))
        self.assertLessEqual(err.partial.column("t")[-1], err.t)


class TestCompare(unittest.TestCase):
    
    def test_identical_scenarios_tie(self):
        report = compare([SHORT, SHORT.replace(label="again")])
        self.assertEqual(report.labels, ["short", "again"])
        for name, delta in report.deltas[1].items():
            self.assertIn(delta, (0.0, 0, None), name)
            self.assertIsNone(report.winners[name], name)
        self.assertEqual(report.to_dict()["reference"], "short")
    
    def test_controllers_on_same_plant(self):
        report = compare([SHORT, SHORT.replace(controller_kind=Controller.PD_BASELINE, label="pd")])
        self.assertEqual(len(report.metrics), 2)
        self.assertIn(report.winners["max_u"], ("short", "pd", None))
    
    def test_rejects_bad_inputs(self):
        with self.assertRaises(InsufficientArgsError):
            compare([SHORT])
        with self.assertRaises(MismatchedScenarios):
            compare([SHORT, SHORT.replace(x_d=1.0)])


class TestSweep(unittest.TestCase):
    
    def test_single_point_matches_run(self):
        rows = sweep(SHORT, "m2", [2.0])
        self.assertEqual(len(rows), 1)
        self.assertTrue(rows[0].ok)
        self.assertEqual(rows[0].metrics, run(SHORT).metrics)
    
    def test_failed_point_does_not_stop_sweep(self):
        with self.assertLogs(level="ERROR") as logs:
            rows = sweep(SHORT, "m1", [0.0, 1.0])
        self.assertFalse(rows[0].ok)
        self.assertIn("ValidationError", rows[0].error)
        self.assertIsNone(rows[0].lyapunov)
        self.assertIsNone(rows[0].min_gains)
        self.assertTrue(rows[1].ok)
        self.assertEqual(len(logs.output), 2)
    
    def test_lyapunov_and_floors_hold_across_loads(self):
        floors = [1e-4 * getattr(GROUP1.gains0, name) for name in ("kp", "kd", "kl")]
        for axis, values in (("l2", [0.2, 0.3, 0.4, 0.5]), ("m2", [1.5, 2.0])):
            rows = sweep(GROUP1, axis, values)
            for row in rows:
                label = f"{axis}={row.value:g}"
                self.assertTrue(row.ok, label)
                self.assertTrue(row.metrics.settled, label)
                self.assertLess(row.metrics.residual_theta, 0.5, label)
                self.assertLess(row.metrics.steady_state_error, 0.01, label)
                self.assertLessEqual(row.lyapunov.v_dot_max, 1e-8, label)
                for name, floor in zip(("kp", "kd", "kl"), floors):
                    self.assertGreaterEqual(getattr(row.min_gains, name), floor * (1 - 1e-12), f"{label} {name}")
    
    def test_rejects_bad_axis_and_values(self):
        with self.assertRaises(ArgumentTypeError):
            sweep(SHORT, "mass", [1.0])
        with self.assertRaises(InsufficientArgsError):
            sweep(SHORT, "m2", [])


class TestBaseline(unittest.TestCase):
    
    def test_pd_force(self):
        self.assertAlmostEqual(pd_baseline_force(CraneState(x=0.2, x_dot=0.1), 0.7, 20.0, 25.0), 7.5, places=12)
        self.assertEqual(pd_baseline_force(CraneState(x=0.7), 0.7, 20.0, 25.0), 0.0)
    
    def test_matched_strength_gains(self):
        kp_pd, kd_pd = pd_gains_from_law(CraneParams(), ControllerGains())
        self.assertAlmostEqual(kp_pd, 1.5 * (10.0 - 6.0 / 7.0) / 0.7, places=9)
        self.assertAlmostEqual(kd_pd, 25.0, places=12)
    
    @staticmethod
    def fake_run(scenario, check=True):
        return SimpleNamespace(metrics=SimpleNamespace(settling_time=40.0 / scenario.pd_gains[0]))
    
    def test_tuning_picks_closest_settling(self):
        with mock.patch("cranectl.core.run", side_effect=self.fake_run) as patched:
            tuning = tune_pd_baseline(GROUP1, target_settling=4.0)
        self.assertEqual(patched.call_count, 7)
        base_kp, base_kd = pd_gains_from_law(GROUP1.params, GROUP1.gains0)
        self.assertAlmostEqual(tuning.kp_pd, 0.5 * base_kp, places=12)
        self.assertAlmostEqual(tuning.kd_pd, 0.5 * base_kd, places=12)
        self.assertTrue(tuning.within_tolerance)
    
    def test_tuning_warns_when_out_of_reach(self):
        with mock.patch("cranectl.core.run", side_effect=self.fake_run):
            with self.assertLogs(level="WARNING"):
                tuning = tune_pd_baseline(GROUP1, target_settling=100.0)
        self.assertFalse(tuning.within_tolerance)
        self.assertEqual(tuning.target_settling, 100.0)


class TestMetrics(unittest.TestCase):
    
    def test_exponential_approach(self):
        t = np.linspace(0.0, 10.0, 1001)
        x = 0.7 * (1.0 - np.exp(-t))
        theta = 0.01 * np.exp(-t) * np.sin(5.0 * t)
        u = 3.0 * np.exp(-t)
        metrics = compute_metrics(t, x, theta, -2.0 * theta, u, 0.7, clamp_events=4)
        self.assertAlmostEqual(metrics.settling_time, 3.92, places=9)
        self.assertAlmostEqual(metrics.iae, 0.7 * (1.0 - math.exp(-10.0)), places=4)
        self.assertAlmostEqual(metrics.max_u, 3.0, places=12)
        self.assertAlmostEqual(metrics.peak_theta2, 2.0 * metrics.peak_theta1, places=9)
        self.assertLess(metrics.residual_theta, 0.01)
        self.assertEqual(metrics.clamp_events, 4)
        self.assertTrue(metrics.settled)
    
    def test_not_settled(self):
        t = np.linspace(0.0, 1.0, 11)
        zeros = np.zeros_like(t)
        metrics = compute_metrics(t, zeros, zeros, zeros, zeros, 0.7)
        self.assertIsNone(metrics.settling_time)
        self.assertFalse(metrics.settled)
        self.assertAlmostEqual(metrics.steady_state_error, 0.7, places=12)
    
    def test_target_at_origin_settles(self):
        t = np.linspace(0.0, 10.0, 1001)
        x = 0.1 * np.exp(-t)
        zeros = np.zeros_like(t)
        metrics = compute_metrics(t, x, zeros, zeros, zeros, 0.0)
        # 0.1*exp(-t) drops to the 1 mm floor at t = ln(100) = 4.605
        self.assertAlmostEqual(metrics.settling_time, 4.61, places=9)
        self.assertLess(metrics.steady_state_error, 1e-3)
    
    def test_lyapunov_check_consistent(self):
        t = np.linspace(0.0, 1.0, 101)
        report = check_lyapunov(t, np.exp(-t), -np.exp(-t))
        self.assertEqual(report.fd_mismatch_fraction, 0.0)
        self.assertEqual(report.fd_checked, 99)
        self.assertEqual(report.v_increase_count, 0)
        self.assertEqual(report.v_dot_source, "analytic")
    
    def test_lyapunov_check_systematic_mismatch(self):
        t = np.linspace(0.0, 1.0, 101)
        with self.assertLogs(level="WARNING"):
            report = check_lyapunov(t, np.exp(-t), -3.0 * np.exp(-t))
        self.assertTrue(report.systematic_mismatch)
        self.assertEqual(report.v_dot_source, "finite_difference")
        with self.assertLogs(level="WARNING"):
            kept = check_lyapunov(t, np.exp(-t), -3.0 * np.exp(-t), mode="analytic")
        self.assertEqual(kept.v_dot_source, "analytic")
        with self.assertRaises(ValueError):
            check_lyapunov(t, np.exp(-t), -np.exp(-t), mode="exact")
    
    def test_increase_of_v_is_counted(self):
        t = np.linspace(0.0, 1.0, 5)
        report = check_lyapunov(t, np.array([1.0, 0.9, 0.95, 0.8, 0.7]), np.full(5, -0.1), mode="analytic")
        self.assertEqual(report.v_increase_count, 1)
        self.assertFalse(report.v_non_increasing)
        self.assertAlmostEqual(report.v_increase_max, 0.05, places=12)


if __name__ == "__main__":
    unittest.main()
