"""
Project: cranectl
Module: tests
Created Date: 14 Oct 2026
Author: Noah Keck
:------------------------------------------------------------------------------:
MIT License
Copyright (c) 2026
:------------------------------------------------------------------------------:
"""

import math
import sys
import unittest

import numpy as np

# required for testing in an environment without cranectl installed as a package
sys.path.insert(0, './src')

from cranectl.control import (ControllerGains, ControllerState, composite_error, control_force, equilibrium,
                              lyapunov, lyapunov_offset, output_bound, warn_if_degenerate)
from cranectl.dynamics import CraneParams, CraneState
from cranectl.errors import ValidationError

GROUP1 = CraneParams()
GAINS = ControllerGains()


class TestCompositeError(unittest.TestCase):
    
    def test_at_rest(self):
        e, e_dot = composite_error(GROUP1, ControllerState(x_d=0.7), CraneState(), GAINS.kl)
        self.assertEqual(e, -0.7)
        self.assertEqual(e_dot, 0.0)
    
    def test_with_integrals_and_swing(self):
        cs = ControllerState(0.2, -0.1, 0.7)
        state = CraneState(x=0.5, x_dot=0.1, theta1=0.1, theta2=-0.05)
        e, e_dot = composite_error(GROUP1, cs, state, 0.01)
        self.assertAlmostEqual(e, -0.2007, places=12)
        self.assertAlmostEqual(e_dot, 0.099651020269, places=11)
        moved = cs.advance(0.0, 0.0)
        self.assertEqual((moved.int_sum, moved.x_d), (0.0, 0.7))
        self.assertEqual(ControllerState.from_augmented([0, 0, 0, 0, 0, 0, 0.2, -0.1], 0.7), cs)


class TestControlForce(unittest.TestCase):
    
    def test_initial_force(self):
        u = control_force(GROUP1, GAINS, ControllerState(x_d=0.7), CraneState())
        self.assertAlmostEqual(u, 10.44472, places=5)
        self.assertAlmostEqual(output_bound(GROUP1, GAINS), 13.7142857, places=6)
    
    def test_initial_force_is_bounded_for_any_target(self):
        bound = output_bound(GROUP1, GAINS)
        for x_d in (0.1, 0.7, 5.0, 50.0):
            u = control_force(GROUP1, GAINS, ControllerState(x_d=x_d), CraneState())
            self.assertLess(abs(u), 13.7143)
            self.assertLessEqual(abs(u), bound)
        # tanh has not saturated yet, so the bound is strict here
        u = control_force(GROUP1, GAINS, ControllerState(x_d=5.0), CraneState())
        self.assertLess(abs(u), bound)
    
    def test_zero_at_target(self):
        u = control_force(GROUP1, GAINS, ControllerState(x_d=0.7), CraneState(x=0.7))
        self.assertEqual(u, 0.0)
    
    def test_continuous_in_state(self):
        rng = np.random.default_rng(5)
        cs = ControllerState(0.05, -0.02, 0.7)
        for _ in range(500):
            y = rng.uniform(-0.5, 0.5, size=6)
            dy = rng.normal(size=6)
            dy *= 1e-7 / np.linalg.norm(dy)
            u0 = control_force(GROUP1, GAINS, cs, CraneState(*y))
            u1 = control_force(GROUP1, GAINS, cs, CraneState(*(y + dy)))
            self.assertLess(abs(u1 - u0) / 1e-7, 1e3)


class TestLyapunov(unittest.TestCase):
    
    def test_value_at_equilibrium(self):
        cs = ControllerState(x_d=0.7)
        sample = lyapunov(GROUP1, GAINS, cs, CraneState(x=0.7))
        self.assertAlmostEqual(sample.v, 84.0857142857, places=9)
        self.assertAlmostEqual(lyapunov_offset(GROUP1), 84.0857142857, places=9)
        self.assertEqual(sample.v_dot, 0.0)
        relative = lyapunov(GROUP1, GAINS, cs, CraneState(x=0.7), relative=True)
        self.assertAlmostEqual(relative.v, 0.0, places=12)
    
    def test_derivative_example(self):
        # l1*e_dot equals theta1_dot, so only the swing-rate term dissipates
        state = CraneState(x_dot=1.0, theta1_dot=0.7)
        self.assertAlmostEqual(lyapunov(GROUP1, GAINS, ControllerState(x_d=0.7), state).v_dot, -0.0049, places=15)
        self.assertEqual(lyapunov(GROUP1, GAINS, ControllerState(x_d=0.7), CraneState()).v_dot, 0.0)
    
    def test_derivative_never_positive(self):
        rng = np.random.default_rng(9)
        limit = math.pi / 2 - 0.01
        for _ in range(2000):
            state = CraneState(
                x=rng.uniform(-2, 2), x_dot=rng.uniform(-2, 2),
                theta1=rng.uniform(-limit, limit), theta1_dot=rng.uniform(-3, 3),
                theta2=rng.uniform(-limit, limit), theta2_dot=rng.uniform(-3, 3),
            )
            gains = ControllerGains(*rng.uniform(1e-3, 500, size=3))
            cs = ControllerState(*rng.uniform(-1, 1, size=3))
            self.assertLessEqual(lyapunov(GROUP1, gains, cs, state).v_dot, 0.0)
    
    def test_far_target_does_not_overflow(self):
        sample = lyapunov(GROUP1, GAINS, ControllerState(x_d=1e4), CraneState())
        self.assertTrue(math.isfinite(sample.v))


class TestEquilibrium(unittest.TestCase):
    
    def test_without_integrals(self):
        x, theta1, theta2 = equilibrium(GROUP1, GAINS, ControllerState(x_d=0.7))
        self.assertAlmostEqual(x, 0.7, places=12)
        self.assertAlmostEqual(theta1, 0.0, places=12)
        self.assertAlmostEqual(theta2, 0.0, places=12)
    
    def test_integrals_shift_the_rest_position(self):
        cs = ControllerState(0.2, -0.1, 0.7)
        x, theta1, theta2 = equilibrium(GROUP1, GAINS, cs)
        self.assertAlmostEqual(x, 0.7007, places=12)
        self.assertAlmostEqual(theta1, 0.0, places=12)
        self.assertAlmostEqual(theta2, 0.0, places=12)
        u = control_force(GROUP1, GAINS, cs, CraneState(x=x, theta1=theta1, theta2=theta2))
        self.assertAlmostEqual(u, 0.0, places=9)
    
    def test_degenerate_trolley_mass(self):
        params = GROUP1.replace(m=1.0, l2=0.35)
        self.assertEqual(params.position_scale, 0.0)
        with self.assertRaises(ValidationError) as ctx:
            equilibrium(params, GAINS, ControllerState(x_d=0.7))
        self.assertEqual(ctx.exception.field, "m")
        with self.assertLogs(level="WARNING") as logs:
            warn_if_degenerate(params)
        self.assertIn("m2*l2/l1", logs.output[0])
    
    def test_gain_problems(self):
        self.assertTrue(GAINS.is_valid())
        problems = ControllerGains(kd=0.0).problems()
        self.assertEqual(len(problems), 1)
        self.assertTrue(problems[0].startswith("kd:"))


if __name__ == "__main__":
    unittest.main()
