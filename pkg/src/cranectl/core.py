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
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from cranectl.control import ControllerGains, ControllerState, lyapunov, warn_if_degenerate
from cranectl.controllers import Controller, pd_gains_from_law
from cranectl.dynamics import STATE_FIELDS, CraneParams, CraneState, check_angle_limit, plant_derivative
from cranectl.errors import *
from cranectl.fuzzy import FuzzyRuleTable
from cranectl.integrator import IntegratorConfig, integrate
from cranectl.metrics import METRIC_NAMES, V_DOT_MODES, LyapunovReport, Metrics, check_lyapunov, compute_metrics

RECORD_FIELDS = ("t", *STATE_FIELDS, "u", "kp", "kd", "kl", "v", "v_dot")
SWEEP_AXES = ("m2", "l2", "l1", "m1", "x_d")


@dataclass(frozen=True, slots=True)
class Scenario:
    """Everything needed to reproduce one closed-loop run."""
    params: CraneParams = field(default_factory=CraneParams)
    x_d: float = 0.7
    gains0: ControllerGains = field(default_factory=ControllerGains)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    controller_kind: Controller = Controller.FUZZY_TUNED
    label: str = "default"
    rule_table: FuzzyRuleTable | None = None
    pd_gains: tuple[float, float] = (20.0, 25.0)
    initial: CraneState = field(default_factory=CraneState)
    relative_v: bool = False
    v_dot_mode: str = "auto"
    
    def problems(self) -> list[str]:
        """Collects every invariant violation as "<section>.<field>: <reason>".
        
        Note that if the list is empty, it will evaluate as False.
        """
        problems = [f"params.{p}" for p in self.params.problems()]
        problems += [f"gains.{p}" for p in self.gains0.problems()]
        problems += [f"integrator.{p}" for p in self.integrator.problems()]
        if not self.integrator.problems() and self.integrator.t_end <= 0:
            problems.append(f"integrator.t_end: must be > 0, got {self.integrator.t_end!r}")
        if not isinstance(self.x_d, (int, float)) or not math.isfinite(self.x_d):
            problems.append(f"target.x_d: must be finite, got {self.x_d!r}")
        problems += [f"initial.{p}" for p in self.initial.problems()]
        for name in ("theta1", "theta2"):
            if abs(getattr(self.initial, name)) >= 0.5 * math.pi:
                problems.append(f"initial.{name}: must satisfy |{name}| < pi/2")
        for name, value in zip(("kp", "kd"), self.pd_gains):
            if not math.isfinite(value) or value <= 0:
                problems.append(f"baseline.{name}: must be > 0, got {value!r}")
        if self.v_dot_mode not in V_DOT_MODES:
            problems.append(f"output.v_dot: must be one of {V_DOT_MODES}, got {self.v_dot_mode!r}")
        return problems
    
    def is_valid(self) -> bool:
        return not self.problems()
    
    def validate(self):
        """Raises ValidationError naming the first offending field."""
        problems = self.problems()
        if problems:
            name, _, message = problems[0].partition(": ")
            raise ValidationError(name, message)
    
    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)
    
    def with_axis(self, axis: str, value: float) -> "Scenario":
        """A copy with one sweep axis (a crane parameter or x_d) set to `value`."""
        if axis not in SWEEP_AXES:
            raise ArgumentTypeError(f"Unknown sweep axis '{axis}', valid axes are {list(SWEEP_AXES)}")
        label = f"{self.label} [{axis}={value:g}]"
        if axis == "x_d":
            return self.replace(x_d=float(value), label=label)
        return self.replace(params=self.params.replace(**{axis: float(value)}), label=label)
    
    def same_plant(self, other: "Scenario") -> bool:
        return self.params == other.params and self.x_d == other.x_d and self.initial == other.initial


@dataclass(frozen=True, slots=True)
class SimRecord:
    t: float
    x: float
    x_dot: float
    theta1: float
    theta1_dot: float
    theta2: float
    theta2_dot: float
    u: float
    kp: float
    kd: float
    kl: float
    v: float
    v_dot: float


@dataclass(slots=True)
class RunResult:
    """Recorded trajectory of a run, one row per integrator step plus the initial sample.

    `table` holds the rows in RECORD_FIELDS order and `integrals` the two controller integrals at
    the same instants.
    """
    scenario: Scenario
    table: np.ndarray
    integrals: np.ndarray
    metrics: Metrics
    lyapunov: LyapunovReport | None = None
    final_state: np.ndarray | None = None
    
    def column(self, name: str) -> np.ndarray:
        return self.table[:, RECORD_FIELDS.index(name)]
    
    @property
    def records(self) -> list[SimRecord]:
        return [SimRecord(*(float(v) for v in row)) for row in self.table]
    
    @property
    def clamp_events(self) -> int:
        return self.metrics.clamp_events
    
    def reported_v_dot(self) -> np.ndarray:
        """The v_dot column as written to disk, closed-form or finite-difference per the Lyapunov check."""
        if self.lyapunov is not None and self.lyapunov.v_dot_source == "finite_difference":
            return self.lyapunov.fd_v_dot
        return self.column("v_dot")


def _result(scenario: Scenario, rows: list, integrals: list, clamp_events: int,
            final_state: np.ndarray | None = None, check_v: bool = True) -> RunResult:
    table = np.array(rows, dtype=float).reshape(-1, len(RECORD_FIELDS))
    col = lambda name: table[:, RECORD_FIELDS.index(name)]
    metrics = compute_metrics(col("t"), col("x"), col("theta1"), col("theta2"), col("u"), scenario.x_d, clamp_events)
    report = check_lyapunov(col("t"), col("v"), col("v_dot"), scenario.v_dot_mode) if check_v else None
    return RunResult(scenario, table, np.array(integrals, dtype=float).reshape(-1, 2), metrics, report, final_state)


def run(scenario: Scenario, check: bool = True) -> RunResult:
    """Integrates the closed loop from the scenario's initial state (rest at the origin by default).

    Each step schedules the gains once from the current state, then integrates the 8-entry state
    (plant plus the two sin-integrals) with the force re-evaluated at every stage.

    Args:
        scenario (Scenario): The run to perform.
        check (bool, optional): Validate the scenario first. Defaults to True.

    Raises:
        ValidationError: The scenario breaks an invariant.
        Unstable: The state became non-finite. Carries the failure time and the partial result.
        AngleLimit: A swing angle reached pi/2. Carries the failure time and the partial result.

    Returns:
        RunResult: Records, metrics and the Lyapunov check.
    """
    if check:
        scenario.validate()
    params, x_d = scenario.params, scenario.x_d
    warn_if_degenerate(params)
    
    kwargs = {"table": scenario.rule_table, "kp_pd": scenario.pd_gains[0], "kd_pd": scenario.pd_gains[1]}
    controller = scenario.controller_kind.create(params, scenario.gains0, **kwargs)
    logging.info(f"Running '{scenario.label}' ({controller.kind}, {scenario.integrator.n_steps} steps of {scenario.integrator.dt} s)")
    
    rows = []
    integrals = []
    held = {}
    
    def record(t: float, y: np.ndarray, schedule: bool = True):
        state = CraneState.from_vector(y)
        cs = ControllerState.from_augmented(y, x_d)
        # the sample at t_end drives no further step, so it reports the held gains
        gains = controller.schedule(cs, state) if schedule else held["gains"]
        held["gains"] = gains
        u = controller.force(cs, state, gains)
        law_gains = gains if controller.uses_coupling_law else scenario.gains0
        sample = lyapunov(params, law_gains, cs, state, relative=scenario.relative_v)
        rows.append((t, *y[:6], u, gains.kp, gains.kd, gains.kl, sample.v, sample.v_dot))
        integrals.append((y[6], y[7]))
    
    def deriv(t: float, y: np.ndarray) -> np.ndarray:
        if not np.all(np.isfinite(y)):
            raise NonFiniteState("Closed loop produced a non-finite state", t)
        state = CraneState.from_vector(y)
        try:
            u = controller.force(ControllerState.from_augmented(y, x_d), state, held["gains"])
            plant = plant_derivative(params, y, u)
        except (OverflowError, ValueError, SingularMass) as err:
            raise NonFiniteState(f"Closed loop diverged ({err})", t) from err
        return np.concatenate((plant, (math.sin(y[2]), math.sin(y[4]))))
    
    n_steps = scenario.integrator.n_steps
    
    def observer(t: float, y: np.ndarray):
        check_angle_limit(CraneState.from_vector(y), t)
        record(t, y, schedule=len(rows) < n_steps)
    
    y0 = np.concatenate((scenario.initial.as_vector(), (0.0, 0.0)))
    record(0.0, y0)
    try:
        y_final = integrate(deriv, y0, scenario.integrator, observer)
    except NonFiniteState as err:
        partial = _result(scenario, rows, integrals, controller.clamp_events, check_v=False)
        raise Unstable(err.message, err.t, partial) from err
    except AngleLimit as err:
        err.partial = _result(scenario, rows, integrals, controller.clamp_events, check_v=False)
        raise
    
    result = _result(scenario, rows, integrals, controller.clamp_events, y_final)
    if result.metrics.clamp_events:
        logging.warning(f"'{scenario.label}': {result.metrics.clamp_events} gain clamp events")
    logging.info(f"Finished '{scenario.label}': settling_time={result.metrics.settling_time}, peak_theta2={result.metrics.peak_theta2:.4g} deg")
    return result


def run_many(scenarios: list[Scenario], workers: int = 1) -> list[RunResult]:
    """Runs independent scenarios, in a process pool when workers > 1. Results keep input order."""
    if workers > 1 and len(scenarios) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, scenarios))
    return [run(scenario) for scenario in scenarios]


@dataclass(slots=True)
class ComparisonReport:
    """Metrics of several runs on the same plant and target, aligned against the first run.

    `winners` maps each metric to the label with the smallest value, or None on a tie.
    """
    labels: list[str]
    metrics: list[Metrics]
    deltas: list[dict[str, float | None]]
    winners: dict[str, str | None]
    results: list[RunResult] = field(default_factory=list, repr=False)
    
    def to_dict(self) -> dict:
        return {
            "reference": self.labels[0],
            "rows": [
                {"label": label, "metrics": metrics.to_dict(), "deltas": deltas}
                for label, metrics, deltas in zip(self.labels, self.metrics, self.deltas)
            ],
            "winners": self.winners,
        }


def _metric_value(metrics: Metrics, name: str) -> float:
    value = getattr(metrics, name)
    # not settled ranks last
    return math.inf if value is None else float(value)


def compare(scenarios: list[Scenario], workers: int = 1) -> ComparisonReport:
    """Runs every scenario and tabulates metric deltas against the first one.

    Raises:
        InsufficientArgsError: Fewer than two scenarios.
        MismatchedScenarios: The scenarios do not share params, x_d and initial state.
    """
    if len(scenarios) < 2:
        raise InsufficientArgsError(f"compare needs at least 2 scenarios, got {len(scenarios)}")
    reference = scenarios[0]
    for scenario in scenarios[1:]:
        if not reference.same_plant(scenario):
            raise MismatchedScenarios(f"'{scenario.label}' does not share the plant and target of '{reference.label}'")
    
    results = run_many(scenarios, workers)
    metrics = [result.metrics for result in results]
    deltas = []
    for m in metrics:
        row = {}
        for name in METRIC_NAMES:
            a, b = getattr(m, name), getattr(metrics[0], name)
            row[name] = None if a is None or b is None else a - b
        deltas.append(row)
    
    winners = {}
    for name in METRIC_NAMES:
        values = [_metric_value(m, name) for m in metrics]
        best = min(values)
        leaders = [i for i, value in enumerate(values) if value == best]
        winners[name] = scenarios[leaders[0]].label if len(leaders) == 1 else None
    return ComparisonReport([s.label for s in scenarios], metrics, deltas, winners, results)


@dataclass(slots=True)
class SweepRow:
    """Outcome of one sweep point. A failed point carries only `error`."""
    axis: str
    value: float
    metrics: Metrics | None = None
    error: str | None = None
    lyapunov: LyapunovReport | None = None
    min_gains: ControllerGains | None = None
    
    @property
    def ok(self) -> bool:
        return self.metrics is not None


def _sweep_task(scenario: Scenario) -> tuple[Metrics | None, str | None, LyapunovReport | None, ControllerGains | None]:
    try:
        result = run(scenario)
    except CraneError as err:
        logging.error(f"Unable to run sweep point '{scenario.label}'")
        logging.error(f"{type(err).__name__}: {str(err)}")
        return None, f"{type(err).__name__}: {str(err)}", None, None
    min_gains = ControllerGains(*(float(result.column(name).min()) for name in ("kp", "kd", "kl")))
    return result.metrics, None, result.lyapunov, min_gains


def sweep(base: Scenario, axis: str, values: list[float], workers: int = 1) -> list[SweepRow]:
    """Runs `base` once per value of `axis`; a failing point is recorded and the sweep continues.

    Raises:
        ArgumentTypeError: `axis` is not one of SWEEP_AXES.
        InsufficientArgsError: `values` is empty.
    """
    if axis not in SWEEP_AXES:
        raise ArgumentTypeError(f"Unknown sweep axis '{axis}', valid axes are {list(SWEEP_AXES)}")
    if not values:
        raise InsufficientArgsError("sweep needs at least one value")
    
    scenarios = [base.with_axis(axis, value) for value in values]
    if workers > 1 and len(scenarios) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_sweep_task, scenarios))
    else:
        outcomes = [_sweep_task(scenario) for scenario in scenarios]
    rows = [SweepRow(axis, float(value), *outcome) for value, outcome in zip(values, outcomes)]
    for row in rows:
        if row.lyapunov is not None and not row.lyapunov.v_dot_ok:
            logging.warning(f"Sweep point {axis}={row.value:g}: V_dot reached {row.lyapunov.v_dot_max:.3g}")
    return rows


@dataclass(frozen=True, slots=True)
class PDTuning:
    kp_pd: float
    kd_pd: float
    settling_time: float | None
    target_settling: float | None
    within_tolerance: bool


PD_SCALES = (0.25, 0.35, 0.5, 0.7, 1.0, 1.4, 2.0)


def tune_pd_baseline(scenario: Scenario, target_settling: float | None = None, tolerance: float = 0.2,
                     scales: tuple[float, ...] = PD_SCALES) -> PDTuning:
    """Picks PD baseline gains whose settling time is closest to the coupling controller's.

    Candidates are the matched-strength PD gains from pd_gains_from_law scaled by each factor in `scales`.

    Args:
        scenario (Scenario): The coupling-law scenario to match.
        target_settling (float | None, optional): Settling time to match. Defaults to running `scenario`.
        tolerance (float, optional): Accepted relative settling-time mismatch. Defaults to 0.2.
        scales (tuple[float, ...], optional): Scale factors applied to both PD gains.

    Returns:
        PDTuning: The chosen gains, their settling time, and whether it lands within tolerance.
    """
    if target_settling is None:
        target_settling = run(scenario).metrics.settling_time
    if target_settling is None:
        logging.warning(f"'{scenario.label}' does not settle; using the matched-strength PD gains as is")
    base_kp, base_kd = pd_gains_from_law(scenario.params, scenario.gains0)
    
    best = None
    for scale in scales:
        candidate = scenario.replace(
            controller_kind=Controller.PD_BASELINE,
            pd_gains=(scale * base_kp, scale * base_kd),
            label=f"pd x{scale:g}",
        )
        if target_settling is None:
            best = (0.0, candidate.pd_gains, None)
            break
        try:
            settling = run(candidate).metrics.settling_time
        except CraneError as err:
            logging.error(f"Unable to run PD candidate x{scale:g}")
            logging.error(f"{type(err).__name__}: {str(err)}")
            continue
        if settling is None:
            continue
        gap = abs(settling - target_settling)
        if best is None or gap < best[0]:
            best = (gap, candidate.pd_gains, settling)
    
    if best is None:
        logging.warning("No PD candidate settled; using the matched-strength PD gains")
        best = (math.inf, (base_kp, base_kd), None)
    _, (kp_pd, kd_pd), settling = best
    within = settling is not None and target_settling is not None \
        and abs(settling - target_settling) <= tolerance * target_settling
    if target_settling is not None and not within:
        logging.warning(f"Best PD settling time {settling} is not within {tolerance:.0%} of {target_settling:.4g} s")
    return PDTuning(kp_pd, kd_pd, settling, target_settling, within)
