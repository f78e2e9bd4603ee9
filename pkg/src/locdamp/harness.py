"""Scenario orchestration: load, run, verify, export.

A scenario JSON file fixes the system, the stripe geometry, the grid, and
the initial data.  Three kinds are supported: ``verify-envelope`` runs the
localized-damping solver and checks its norms against delayed decay
envelopes calibrated on the constant-damping reference; ``conservation-probe``
tracks the loss-free plateau of a bump seeded on one characteristic inside
a stripe; ``fullspace`` runs the periodic reference evolution alone.

Reruns of the same scenario write byte-identical CSV and summary files.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from locdamp import kernels, solver
from locdamp.chartimes import (
    UndampedRegion,
    sharp_delay_table,
    residence_bound,
    horizon_bounds,
)
from locdamp.model import (
    EigenStructure,
    HyperbolicSystem,
    ValidationReport,
    diagonalize,
    validate_system,
)
from locdamp.spectral import FullspaceResult, SpectralScan, fullspace_evolve, gamma_estimate

SCENARIO_KINDS = ("verify-envelope", "conservation-probe", "fullspace")
# Envelope bookkeeping: multiplicative headroom baked into the calibrated
# constants, multiplicative slack allowed at verification time, and the
# relative norm floor below which a band is considered numerically empty.
CALIBRATION_HEADROOM = 1.1
ENVELOPE_SLACK = 1.05
NORM_FLOOR_RTOL = 1e-14
# The probe's plateau ends when total energy first drops below this
# fraction of its initial value.
ONSET_FRACTION = 0.99
MIN_FIT_POINTS = 10
# Reference-evolution layout: grid points per gaussian width and the cap
# on how many trajectory times the calibration re-evaluates.
REF_POINTS_PER_SIGMA = 4
REF_MAX_TIMES = 33

CSV_NAME = "norms.csv"
SUMMARY_NAME = "summary.json"


class ScenarioError(ValueError):
    """Scenario file rejected; ``errors`` lists one message per problem."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class Scenario:
    name: str
    kind: str
    system: HyperbolicSystem
    region: UndampedRegion
    x_min: float
    x_max: float
    n_cells: int | None
    t_final: float
    stride: int
    data: solver.InitialDataSpec


# ---------------------------------------------------------------------------
# strict loader
# ---------------------------------------------------------------------------


def _check_keys(
    obj: dict, path: str, required: dict[str, type], optional: dict[str, type], errors: list[str]
) -> bool:
    ok = True
    prefix = f"{path}." if path else ""
    for key in obj:
        if key not in required and key not in optional:
            errors.append(f"{prefix}{key}: unknown key")
            ok = False
    for key, typ in required.items():
        if key not in obj:
            errors.append(f"{prefix}{key}: missing required key")
            ok = False
        elif not _type_ok(obj[key], typ):
            errors.append(f"{prefix}{key}: expected {_type_name(typ)}")
            ok = False
    for key, typ in optional.items():
        if key in obj and not _type_ok(obj[key], typ):
            errors.append(f"{prefix}{key}: expected {_type_name(typ)}")
            ok = False
    return ok


def _type_ok(value: Any, typ: type) -> bool:
    if typ is float:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if typ is int:
        return isinstance(value, int) and not isinstance(value, bool)
    return isinstance(value, typ)


def _type_name(typ: type) -> str:
    return {float: "a number", int: "an integer", str: "a string", dict: "an object", list: "a list"}[typ]


def _matrix(value: Any, path: str, errors: list[str]) -> list[list[float]] | None:
    if not isinstance(value, list) or not value:
        errors.append(f"{path}: expected a nonempty list of rows")
        return None
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or not all(_type_ok(v, float) for v in row):
            errors.append(f"{path}[{i}]: expected a list of numbers")
            return None
        rows.append([float(v) for v in row])
    return rows


def load_scenario(path: str | Path) -> Scenario:
    """Parse and validate a scenario file.

    Unknown keys are rejected; every problem is reported with the path of
    the offending field.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ScenarioError([f"{path}: {exc}"]) from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"{path}: invalid JSON ({exc})"]) from exc
    if not isinstance(raw, dict):
        raise ScenarioError([f"{path}: top level must be an object"])

    errors: list[str] = []
    _check_keys(
        raw,
        "",
        {
            "name": str,
            "kind": str,
            "system": dict,
            "region": dict,
            "domain": dict,
            "time": dict,
            "initial_data": dict,
        },
        {},
        errors,
    )
    if errors:
        raise ScenarioError(errors)

    if raw["kind"] not in SCENARIO_KINDS:
        errors.append(f"kind: expected one of {SCENARIO_KINDS}, got {raw['kind']!r}")

    sys_obj = raw["system"]
    _check_keys(sys_obj, "system", {"a": list, "n1": int, "dd": list}, {}, errors)
    a = _matrix(sys_obj.get("a"), "system.a", errors) if "a" in sys_obj else None
    dd = _matrix(sys_obj.get("dd"), "system.dd", errors) if "dd" in sys_obj else None

    reg_obj = raw["region"]
    _check_keys(reg_obj, "region", {"stripes": list}, {}, errors)
    stripes: list[tuple[float, float]] = []
    if isinstance(reg_obj.get("stripes"), list):
        for i, pair in enumerate(reg_obj["stripes"]):
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(_type_ok(v, float) for v in pair)
            ):
                errors.append(f"region.stripes[{i}]: expected a pair [left, right]")
            else:
                stripes.append((float(pair[0]), float(pair[1])))

    dom_obj = raw["domain"]
    _check_keys(dom_obj, "domain", {"x_min": float, "x_max": float}, {"n_cells": int}, errors)

    time_obj = raw["time"]
    _check_keys(time_obj, "time", {"t_final": float, "stride": int}, {}, errors)
    if _type_ok(time_obj.get("t_final"), float) and float(time_obj["t_final"]) <= 0.0:
        errors.append("time.t_final: must be positive")
    if _type_ok(time_obj.get("stride"), int) and int(time_obj["stride"]) < 1:
        errors.append("time.stride: must be at least 1")

    data_obj = raw["initial_data"]
    _check_keys(data_obj, "initial_data", {"bumps": list}, {"basis": str}, errors)
    bumps: list[solver.Bump] = []
    if isinstance(data_obj.get("bumps"), list):
        if not data_obj["bumps"]:
            errors.append("initial_data.bumps: must not be empty")
        for i, b in enumerate(data_obj["bumps"]):
            bpath = f"initial_data.bumps[{i}]"
            if not isinstance(b, dict):
                errors.append(f"{bpath}: expected an object")
                continue
            if not _check_keys(
                b,
                bpath,
                {"kind": str, "component": int, "center": float, "width": float},
                {"amplitude": float},
                errors,
            ):
                continue
            try:
                bumps.append(
                    solver.Bump(
                        kind=b["kind"],
                        component=int(b["component"]),
                        center=float(b["center"]),
                        width=float(b["width"]),
                        amplitude=float(b.get("amplitude", 1.0)),
                    )
                )
            except ValueError as exc:
                errors.append(f"{bpath}.{exc}")

    if errors:
        raise ScenarioError(errors)

    try:
        system = HyperbolicSystem(a=np.array(a), n1=int(sys_obj["n1"]), dd=np.array(dd))
    except ValueError as exc:
        raise ScenarioError([str(exc)]) from exc
    try:
        region = UndampedRegion(stripes=tuple(stripes))
    except ValueError as exc:
        raise ScenarioError([str(exc)]) from exc
    try:
        data = solver.InitialDataSpec(
            bumps=tuple(bumps), basis=data_obj.get("basis", "physical")
        )
    except ValueError as exc:
        raise ScenarioError([f"initial_data.{exc}"]) from exc
    for i, b in enumerate(bumps):
        if not 0 <= b.component < system.n:
            raise ScenarioError(
                [f"initial_data.bumps[{i}].component: out of range for {system.n} components"]
            )

    return Scenario(
        name=str(raw["name"]),
        kind=str(raw["kind"]),
        system=system,
        region=region,
        x_min=float(dom_obj["x_min"]),
        x_max=float(dom_obj["x_max"]),
        n_cells=int(dom_obj["n_cells"]) if "n_cells" in dom_obj else None,
        t_final=float(time_obj["t_final"]),
        stride=int(time_obj["stride"]),
        data=data,
    )


# ---------------------------------------------------------------------------
# fits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    rate: float
    log_intercept: float
    n_points: int
    max_residual: float


def fit_decay_rate(times, values, t_min: float, t_max: float) -> FitResult:
    """Exponential-rate fit: least squares on log(values) over [t_min, t_max].

    Positive ``rate`` means decay.  Requires at least 10 usable points.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    mask = (t >= t_min) & (t <= t_max) & (v > 0.0)
    if mask.sum() < MIN_FIT_POINTS:
        raise ValueError(
            f"fit_decay_rate: need at least {MIN_FIT_POINTS} points in [{t_min}, {t_max}]"
        )
    ts, logs = t[mask], np.log(v[mask])
    slope, intercept = np.polyfit(ts, logs, 1)
    resid = float(np.max(np.abs(logs - (slope * ts + intercept))))
    return FitResult(
        rate=float(-slope),
        log_intercept=float(intercept),
        n_points=int(mask.sum()),
        max_residual=resid,
    )


def fit_loglog_slope(times, values, t_min: float, t_max: float) -> FitResult:
    """Power-law fit: slope of log(values) against log(times)."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    mask = (t >= t_min) & (t <= t_max) & (t > 0.0) & (v > 0.0)
    if mask.sum() < MIN_FIT_POINTS:
        raise ValueError(
            f"fit_loglog_slope: need at least {MIN_FIT_POINTS} points in [{t_min}, {t_max}]"
        )
    logt, logs = np.log(t[mask]), np.log(v[mask])
    slope, intercept = np.polyfit(logt, logs, 1)
    resid = float(np.max(np.abs(logs - (slope * logt + intercept))))
    return FitResult(
        rate=float(slope),
        log_intercept=float(intercept),
        n_points=int(mask.sum()),
        max_residual=resid,
    )


# ---------------------------------------------------------------------------
# calibration and envelope verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EnvelopeCalibration:
    """Constants tying the localized run to the constant-damping reference."""

    gamma: float
    c_high: float
    c_low: float
    ref: FullspaceResult


def calibrate(
    sys: HyperbolicSystem,
    data: solver.InitialDataSpec,
    times,
    gamma: float,
    *,
    eigs: EigenStructure | None = None,
) -> EnvelopeCalibration:
    """Fix the envelope constants from a constant-damping reference run.

    The high-band constant makes the reference satisfy its own envelope
    with 10% headroom; likewise the low-band constant for the dispersive
    sup bound.  Needs gaussian data (band-limited on a modest grid) and a
    strictly positive uniform rate.
    """
    if gamma <= 0.0:
        raise ValueError("calibrate: uniform decay rate must be positive")
    if any(b.kind != "gaussian" for b in data.bumps):
        raise ValueError("calibrate: reference calibration needs gaussian bumps")
    if eigs is None:
        eigs = diagonalize(sys.a)

    t_arr = np.asarray(list(times), dtype=float)
    t_pos = t_arr[t_arr > 0.0]
    if t_pos.size > REF_MAX_TIMES:
        idx = np.linspace(0, t_pos.size - 1, REF_MAX_TIMES).round().astype(int)
        t_pos = t_pos[np.unique(idx)]
    t_max = float(t_pos.max())

    lo, hi = data.support()
    sigma_min = min(b.width for b in data.bumps)
    vmax = float(np.abs(eigs.lambdas).max())
    span = (hi - lo) + 2.0 * vmax * t_max + 16.0 * sigma_min + 8.0
    dx_ref = sigma_min / REF_POINTS_PER_SIGMA
    m = 1 << int(np.ceil(np.log2(span / dx_ref)))
    length = m * dx_ref
    mid = 0.5 * (lo + hi)
    x = (mid - 0.5 * length) + dx_ref * np.arange(m)

    samples = data.sample(x, sys.n)
    u0 = samples if data.basis == "physical" else eigs.basis @ samples
    ref = fullspace_evolve(sys, x, u0, [0.0, *t_pos], eigs=eigs)

    l2_0 = float(ref.l2_total[0])
    l1_0 = float(ref.l1[0])
    if l2_0 <= 0.0 or l1_0 <= 0.0:
        raise ValueError("calibrate: initial data has zero mass")
    high_ratios = ref.l2_high * np.exp(gamma * ref.times) / l2_0
    c_high = CALIBRATION_HEADROOM * float(high_ratios.max())
    pos = ref.times > 0.0
    low_ratios = ref.linf_low[pos] * np.sqrt(ref.times[pos]) / l1_0
    c_low = CALIBRATION_HEADROOM * float(low_ratios.max())
    return EnvelopeCalibration(gamma=gamma, c_high=c_high, c_low=c_low, ref=ref)


@dataclass(frozen=True)
class Violation:
    t: float
    band: str
    measured: float
    allowed: float


@dataclass(frozen=True)
class EnvelopeReport:
    """Delayed-envelope verification outcome for one trajectory."""

    residence_bound: float
    gamma: float
    c_high: float
    c_low: float
    n_checked: int
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_envelope(
    traj: solver.Trajectory,
    region: UndampedRegion,
    cal: EnvelopeCalibration,
) -> EnvelopeReport:
    """Check both decay envelopes, each delayed by the residence bound.

    High band: energy above wavenumber one under C * exp(-gamma (t - tau)).
    Low band: sup of the smoothed field under C_low (t - tau)^(-1/2) times
    the initial integral.  Times earlier than one sampling stride past the
    delay are exempt; a 5% multiplicative slack absorbs discretisation.
    """
    tb = residence_bound(traj.eigs, region)
    times = traj.times
    stride_dt = float(times[1] - times[0]) if times.size > 1 else 0.0
    l2_0 = float(traj.l2_total[0])
    l1_0 = float(traj.l1[0])
    floor_high = NORM_FLOOR_RTOL * l2_0
    floor_low = NORM_FLOOR_RTOL * l1_0

    violations: list[Violation] = []
    n_checked = 0
    t_start = tb + stride_dt * (1.0 - 1e-9)
    for i, t in enumerate(times):
        if t < t_start:
            continue
        n_checked += 1
        lag = t - tb
        allowed_high = cal.c_high * math.exp(-cal.gamma * lag) * l2_0
        measured_high = float(traj.l2_high[i])
        if measured_high > floor_high and measured_high > allowed_high * ENVELOPE_SLACK:
            violations.append(Violation(float(t), "high", measured_high, allowed_high))
        allowed_low = cal.c_low * l1_0 / math.sqrt(lag)
        measured_low = float(traj.linf_low[i])
        if measured_low > floor_low and measured_low > allowed_low * ENVELOPE_SLACK:
            violations.append(Violation(float(t), "low", measured_low, allowed_low))
    return EnvelopeReport(
        residence_bound=tb,
        gamma=cal.gamma,
        c_high=cal.c_high,
        c_low=cal.c_low,
        n_checked=n_checked,
        violations=tuple(violations),
    )


# ---------------------------------------------------------------------------
# conservation probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeReport:
    """Plateau/onset measurement for a single-characteristic bump."""

    component: int
    speed: float
    t_pred: float
    onset: float
    plateau_min: float
    stride_dt: float

    @property
    def within_one_stride(self) -> bool:
        return abs(self.onset - self.t_pred) <= self.stride_dt * (1.0 + 1e-9)


def probe_prediction(
    eigs: EigenStructure, region: UndampedRegion, data: solver.InitialDataSpec
) -> tuple[int, float, float]:
    """(component, speed, predicted loss onset) for a probe data spec.

    The data must live on exactly one characteristic component, entirely
    inside one stripe; the prediction is the time its leading edge crosses
    the downstream stripe edge.
    """
    if data.basis != "characteristic":
        raise ValueError("probe: initial data must be given on characteristic components")
    comps = {b.component for b in data.bumps}
    if len(comps) != 1:
        raise ValueError("probe: all bumps must sit on the same component")
    comp = comps.pop()
    lam = float(eigs.lambdas[comp])
    lo, hi = data.support()
    stripe = next((s for s in region.stripes if s[0] <= lo and hi <= s[1]), None)
    if stripe is None:
        raise ValueError("probe: initial data must lie inside a single stripe")
    if lam > 0.0:
        t_pred = (stripe[1] - hi) / lam
    else:
        t_pred = (lo - stripe[0]) / (-lam)
    return comp, lam, t_pred


def conservation_probe(
    traj: solver.Trajectory, region: UndampedRegion, data: solver.InitialDataSpec
) -> ProbeReport:
    """Measure the loss-free plateau and the onset of decay.

    ``plateau_min`` is the worst energy ratio up to the predicted onset;
    ``onset`` the first sampled time with total energy below 99% of its
    initial value (inf if never).
    """
    comp, lam, t_pred = probe_prediction(traj.eigs, region, data)
    times = traj.times
    stride_dt = float(times[1] - times[0]) if times.size > 1 else 0.0
    ratio = traj.l2_total / traj.l2_total[0]
    before = times <= t_pred * (1.0 + 1e-12) + 1e-12
    plateau_min = float(ratio[before].min()) if before.any() else float("nan")
    dropped = np.flatnonzero(ratio < ONSET_FRACTION)
    onset = float(times[dropped[0]]) if dropped.size else float("inf")
    return ProbeReport(
        component=comp,
        speed=lam,
        t_pred=t_pred,
        onset=onset,
        plateau_min=plateau_min,
        stride_dt=stride_dt,
    )


# ---------------------------------------------------------------------------
# scenario dispatch and export
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioResult:
    scenario: Scenario
    validation: ValidationReport
    series: "solver.Trajectory | FullspaceResult"
    scan: SpectralScan | None
    envelope: EnvelopeReport | None
    probe: ProbeReport | None


def run_scenario(scenario: Scenario) -> ScenarioResult:
    """Execute a scenario according to its kind."""
    sys = scenario.system
    eigs = diagonalize(sys.a)
    validation = validate_system(sys)

    if scenario.kind == "fullspace":
        series = _run_fullspace(scenario, eigs)
        return ScenarioResult(scenario, validation, series, None, None, None)

    traj = solver.run(
        sys,
        scenario.region,
        scenario.data,
        x_min=scenario.x_min,
        x_max=scenario.x_max,
        t_final=scenario.t_final,
        stride=scenario.stride,
        n_cells=scenario.n_cells,
        eigs=eigs,
    )
    if scenario.kind == "conservation-probe":
        probe = conservation_probe(traj, scenario.region, scenario.data)
        return ScenarioResult(scenario, validation, traj, None, None, probe)

    scan = gamma_estimate(sys, eigs=eigs)
    cal = calibrate(sys, scenario.data, traj.times, scan.gamma, eigs=eigs)
    envelope = verify_envelope(traj, scenario.region, cal)
    return ScenarioResult(scenario, validation, traj, scan, envelope, None)


def _run_fullspace(scenario: Scenario, eigs: EigenStructure) -> FullspaceResult:
    n_cells = scenario.n_cells
    if n_cells is None:
        n_cells = solver.default_cell_count(scenario.region, scenario.x_min, scenario.x_max)
    dx = (scenario.x_max - scenario.x_min) / n_cells
    v_unit, _ = solver.rational_shifts(eigs.lambdas)
    dt = dx / v_unit
    n_total = int(round(scenario.t_final / dt))
    steps = list(range(0, n_total + 1, scenario.stride))
    if steps[-1] != n_total:
        steps.append(n_total)
    times = [k * dt for k in steps]
    x = scenario.x_min + dx * np.arange(n_cells)
    samples = scenario.data.sample(x, scenario.system.n)
    u0 = samples if scenario.data.basis == "physical" else eigs.basis @ samples
    return fullspace_evolve(scenario.system, x, u0, times, eigs=eigs)


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def write_csv(series: "solver.Trajectory | FullspaceResult", path: Path) -> None:
    """Norm history as CSV; floats at full precision so reruns are
    byte-identical."""
    n = series.comp_l2.shape[0]
    header = ["t", "l2_total", "l2_high", "l2_low", "linf", "l1"] + [
        f"comp_{k + 1}" for k in range(n)
    ]
    lines = [",".join(header)]
    for i, t in enumerate(series.times):
        row = [
            _fmt(float(t)),
            _fmt(float(series.l2_total[i])),
            _fmt(float(series.l2_high[i])),
            _fmt(float(series.l2_low[i])),
            _fmt(float(series.linf[i])),
            _fmt(float(series.l1[i])),
        ]
        row.extend(_fmt(float(series.comp_l2[k, i])) for k in range(n))
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def _jsonable(value: Any) -> Any:
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def summarize(result: ScenarioResult) -> dict[str, Any]:
    """Flat summary of everything a reader needs without the CSV."""
    s = result.scenario
    out: dict[str, Any] = {
        "name": s.name,
        "kind": s.kind,
        "kernel_backend": kernels.BACKEND,
        "n_components": s.system.n,
        "validation_ok": result.validation.ok,
        "checks": {c.name: c.passed for c in result.validation.checks},
        "t_final": s.t_final,
        "n_samples": int(result.series.times.size),
    }
    if isinstance(result.series, solver.Trajectory):
        g = result.series.grid
        out.update(
            {
                "dx": g.dx,
                "dt": g.dt,
                "stripe_snap_error": g.snap_error,
                "shifts": [int(v) for v in g.shifts],
            }
        )
    if result.scan is not None:
        out.update(
            {
                "gamma": result.scan.gamma,
                "c_low_curvature": result.scan.c_low,
                "tail_stabilized": result.scan.tail_stabilized,
            }
        )
    if result.envelope is not None:
        e = result.envelope
        out.update(
            {
                "residence_bound": e.residence_bound,
                "c_high": e.c_high,
                "c_low": e.c_low,
                "envelope_checked": e.n_checked,
                "envelope_violations": [
                    {"t": v.t, "band": v.band, "measured": v.measured, "allowed": v.allowed}
                    for v in e.violations
                ],
                "envelope_ok": e.ok,
            }
        )
    if result.probe is not None:
        p = result.probe
        out.update(
            {
                "probe_component": p.component,
                "probe_speed": p.speed,
                "probe_t_pred": p.t_pred,
                "probe_onset": p.onset,
                "probe_plateau_min": p.plateau_min,
                "probe_within_one_stride": p.within_one_stride,
            }
        )
    return _jsonable(out)


def export(result: ScenarioResult, out_dir: str | Path) -> tuple[Path, Path]:
    """Write norms.csv and summary.json under ``out_dir``."""
    out = Path(out_dir)
    os.makedirs(out, exist_ok=True)
    csv_path = out / CSV_NAME
    write_csv(result.series, csv_path)
    summary_path = out / SUMMARY_NAME
    summary_path.write_text(json.dumps(summarize(result), indent=2, sort_keys=True) + "\n")
    return csv_path, summary_path


__all__ = [
    "Scenario",
    "ScenarioError",
    "ScenarioResult",
    "EnvelopeCalibration",
    "EnvelopeReport",
    "ProbeReport",
    "FitResult",
    "load_scenario",
    "run_scenario",
    "fit_decay_rate",
    "fit_loglog_slope",
    "calibrate",
    "verify_envelope",
    "conservation_probe",
    "probe_prediction",
    "write_csv",
    "summarize",
    "export",
    "residence_bound",
    "horizon_bounds",
    "sharp_delay_table",
]
