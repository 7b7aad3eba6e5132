# __init__.py
from cranectl.core import Scenario, compare, run, sweep, tune_pd_baseline
from cranectl.dynamics import CraneParams, CraneState, accelerations, mass_matrix, mechanical_energy
from cranectl.control import ControllerGains, ControllerState, composite_error, control_force, lyapunov
from cranectl.model import ScenarioFile, scenario_from_file
