"""Scenario loading, fits, calibration, envelope verification, export, CLI.

The strict loader is exercised with systematically corrupted copies of a
known-good scenario; the envelope machinery is checked both on a passing
run and with artificially shrunken constants that must trip violations.
"""

import dataclasses
import json
from pathlib import Path

import numpy as np
import pytest

from locdamp import cli, harness
from locdamp.chartimes import UndampedRegion
from locdamp.model import EigenStructure
from locdamp.solver import Bump, InitialDataSpec, Trajectory
from locdamp.spectral import FullspaceResult

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def _good_raw() -> dict:
    return json.loads((SCENARIOS / "probe_scalar.json").read_text())


def _write(tmp_path: Path, raw) -> Path:
    p = tmp_path / "scenario.json"
    p.write_text(raw if isinstance(raw, str) else json.dumps(raw))
    return p


def _errors_of(tmp_path: Path, raw) -> list[str]:
    with pytest.raises(harness.ScenarioError) as err:
        harness.load_scenario(_write(tmp_path, raw))
    return err.value.errors


class TestLoader:
    def test_roundtrip(self):
        s = harness.load_scenario(SCENARIOS / "probe_scalar.json")
        assert s.name == "probe_scalar"
        assert s.kind == "conservation-probe"
        assert s.system.n == 1 and s.system.n1 == 0
        assert s.region.stripes == ((-1.0, 1.0),)
        assert (s.x_min, s.x_max, s.n_cells) == (-2.0, 4.0, 600)
        assert (s.t_final, s.stride) == (4.0, 10)
        assert s.data.basis == "characteristic"
        assert s.data.bumps[0] == Bump(
            kind="box", component=0, center=-0.95, width=0.1, amplitude=1.0
        )

    def test_all_shipped_scenarios_load(self):
        for path in sorted(SCENARIOS.glob("*.json")):
            s = harness.load_scenario(path)
            assert s.kind in harness.SCENARIO_KINDS

    def test_missing_file(self, tmp_path):
        with pytest.raises(harness.ScenarioError):
            harness.load_scenario(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        errors = _errors_of(tmp_path, "{nope")
        assert any("invalid JSON" in e for e in errors)

    def test_top_level_not_object(self, tmp_path):
        errors = _errors_of(tmp_path, "[1, 2]")
        assert any("top level must be an object" in e for e in errors)

    def test_unknown_top_key(self, tmp_path):
        raw = _good_raw()
        raw["extra"] = 1
        assert any("extra: unknown key" in e for e in _errors_of(tmp_path, raw))

    def test_missing_stride(self, tmp_path):
        raw = _good_raw()
        del raw["time"]["stride"]
        errors = _errors_of(tmp_path, raw)
        assert any("time.stride: missing required key" in e for e in errors)

    def test_bool_is_not_a_number(self, tmp_path):
        raw = _good_raw()
        raw["time"]["t_final"] = True
        errors = _errors_of(tmp_path, raw)
        assert any("time.t_final: expected a number" in e for e in errors)

    def test_bad_matrix_row(self, tmp_path):
        raw = _good_raw()
        raw["system"]["a"] = [[1.0], "x"]
        errors = _errors_of(tmp_path, raw)
        assert any("system.a[1]: expected a list of numbers" in e for e in errors)

    def test_bad_kind(self, tmp_path):
        raw = _good_raw()
        raw["kind"] = "explode"
        assert any("kind: expected one of" in e for e in _errors_of(tmp_path, raw))

    def test_bad_stripe_pair(self, tmp_path):
        raw = _good_raw()
        raw["region"]["stripes"] = [[0.0]]
        errors = _errors_of(tmp_path, raw)
        assert any("region.stripes[0]: expected a pair" in e for e in errors)

    def test_overlapping_stripes_rejected(self, tmp_path):
        raw = _good_raw()
        raw["region"]["stripes"] = [[-1.0, 1.0], [0.5, 2.0]]
        assert _errors_of(tmp_path, raw)

    def test_nonpositive_time(self, tmp_path):
        raw = _good_raw()
        raw["time"]["t_final"] = 0.0
        assert any("must be positive" in e for e in _errors_of(tmp_path, raw))

    def test_zero_stride(self, tmp_path):
        raw = _good_raw()
        raw["time"]["stride"] = 0
        assert any("at least 1" in e for e in _errors_of(tmp_path, raw))

    def test_empty_bumps(self, tmp_path):
        raw = _good_raw()
        raw["initial_data"]["bumps"] = []
        assert any("must not be empty" in e for e in _errors_of(tmp_path, raw))

    def test_bad_bump_kind(self, tmp_path):
        raw = _good_raw()
        raw["initial_data"]["bumps"][0]["kind"] = "spike"
        errors = _errors_of(tmp_path, raw)
        assert any("initial_data.bumps[0]" in e and "unknown kind" in e for e in errors)

    def test_bad_bump_width(self, tmp_path):
        raw = _good_raw()
        raw["initial_data"]["bumps"][0]["width"] = -1.0
        assert any("must be positive" in e for e in _errors_of(tmp_path, raw))

    def test_component_out_of_range(self, tmp_path):
        raw = _good_raw()
        raw["initial_data"]["bumps"][0]["component"] = 3
        assert any("out of range" in e for e in _errors_of(tmp_path, raw))

    def test_multiple_problems_collected(self, tmp_path):
        raw = _good_raw()
        raw["kind"] = "explode"
        raw["time"]["stride"] = 0
        raw["initial_data"]["bumps"][0]["width"] = -1.0
        assert len(_errors_of(tmp_path, raw)) >= 3


class TestFits:
    def test_exponential_rate_recovered_exactly(self):
        t = np.linspace(0.0, 5.0, 26)
        fit = harness.fit_decay_rate(t, 3.0 * np.exp(-0.7 * t), 0.0, 5.0)
        assert fit.rate == pytest.approx(0.7, abs=1e-12)
        assert fit.log_intercept == pytest.approx(np.log(3.0), abs=1e-12)
        assert fit.n_points == 26
        assert fit.max_residual <= 1e-12

    def test_window_restricts_points(self):
        t = np.linspace(0.0, 5.0, 26)
        fit = harness.fit_decay_rate(t, np.exp(-t), 1.0, 4.0)
        assert fit.n_points == 16

    def test_too_few_points(self):
        t = np.linspace(0.0, 1.0, 5)
        with pytest.raises(ValueError, match="at least 10"):
            harness.fit_decay_rate(t, np.exp(-t), 0.0, 1.0)

    def test_nonpositive_values_dropped(self):
        t = np.linspace(0.0, 5.0, 26)
        v = np.exp(-t)
        v[::2] = 0.0
        with pytest.raises(ValueError, match="at least 10"):
            harness.fit_decay_rate(t, v, 0.0, 1.0)

    def test_power_law_slope_recovered(self):
        t = np.linspace(1.0, 50.0, 40)
        fit = harness.fit_loglog_slope(t, 2.0 * t**-0.5, 1.0, 50.0)
        assert fit.rate == pytest.approx(-0.5, abs=1e-12)
        assert fit.log_intercept == pytest.approx(np.log(2.0), abs=1e-12)


@pytest.fixture(scope="module")
def damped_wave_result():
    scenario = harness.load_scenario(SCENARIOS / "damped_wave.json")
    return scenario, harness.run_scenario(scenario)


class TestCalibrate:
    def test_rejects_nonpositive_rate(self):
        data = InitialDataSpec(
            bumps=(Bump(kind="gaussian", component=0, center=0.0, width=0.25),)
        )
        scenario = harness.load_scenario(SCENARIOS / "damped_wave.json")
        with pytest.raises(ValueError, match="positive"):
            harness.calibrate(scenario.system, data, [1.0, 2.0], 0.0)

    def test_rejects_nongaussian_data(self):
        data = InitialDataSpec(
            bumps=(Bump(kind="box", component=0, center=0.0, width=0.5),)
        )
        scenario = harness.load_scenario(SCENARIOS / "damped_wave.json")
        with pytest.raises(ValueError, match="gaussian"):
            harness.calibrate(scenario.system, data, [1.0, 2.0], 0.5)

    def test_reference_satisfies_its_own_envelopes(self):
        scenario = harness.load_scenario(SCENARIOS / "damped_wave.json")
        times = np.linspace(0.0, 8.0, 17)
        cal = harness.calibrate(scenario.system, scenario.data, times, 0.5)
        ref = cal.ref
        l2_0, l1_0 = float(ref.l2_total[0]), float(ref.l1[0])
        # the constants were chosen with 10% headroom over the worst ratio,
        # so the reference run sits strictly below its own envelopes
        bound_high = cal.c_high * np.exp(-cal.gamma * ref.times) * l2_0
        assert np.all(ref.l2_high <= bound_high * (1.0 + 1e-9))
        pos = ref.times > 0.0
        bound_low = cal.c_low * l1_0 / np.sqrt(ref.times[pos])
        assert np.all(ref.linf_low[pos] <= bound_low * (1.0 + 1e-9))
        assert cal.gamma == 0.5


class TestVerifyEnvelope:
    def test_shipped_scenario_passes(self, damped_wave_result):
        _, result = damped_wave_result
        env = result.envelope
        assert env is not None
        assert env.ok
        assert env.n_checked > 100
        assert env.residence_bound == pytest.approx(2.0, rel=1e-12)
        assert env.gamma == pytest.approx(0.5, abs=1e-9)

    def test_shrunken_constants_trip_violations(self, damped_wave_result):
        scenario, result = damped_wave_result
        traj = result.series
        assert isinstance(traj, Trajectory)
        scan = result.scan
        cal = harness.calibrate(
            scenario.system, scenario.data, traj.times, scan.gamma
        )
        starved = dataclasses.replace(
            cal, c_high=cal.c_high / 50.0, c_low=cal.c_low / 50.0
        )
        report = harness.verify_envelope(traj, scenario.region, starved)
        assert not report.ok
        bands = {v.band for v in report.violations}
        assert bands == {"high", "low"}
        for v in report.violations:
            assert v.measured > v.allowed

    def test_checks_start_one_stride_past_delay(self, damped_wave_result):
        scenario, result = damped_wave_result
        traj = result.series
        env = result.envelope
        stride_dt = traj.times[1] - traj.times[0]
        expected = int(np.sum(traj.times >= env.residence_bound + stride_dt * (1 - 1e-9)))
        assert env.n_checked == expected


class TestProbe:
    def test_prediction_scalar(self):
        s = harness.load_scenario(SCENARIOS / "probe_scalar.json")
        eigs = EigenStructure.from_speeds([1.0])
        comp, lam, t_pred = harness.probe_prediction(eigs, s.region, s.data)
        assert comp == 0 and lam == 1.0
        assert t_pred == pytest.approx(1.9, rel=1e-12)

    def test_prediction_requires_characteristic_basis(self):
        eigs = EigenStructure.from_speeds([1.0])
        region = UndampedRegion(stripes=((-1.0, 1.0),))
        data = InitialDataSpec(
            bumps=(Bump(kind="box", component=0, center=0.0, width=0.1),)
        )
        with pytest.raises(ValueError, match="characteristic"):
            harness.probe_prediction(eigs, region, data)

    def test_prediction_requires_single_component(self):
        eigs = EigenStructure.from_speeds([-1.0, 1.0])
        region = UndampedRegion(stripes=((-1.0, 1.0),))
        data = InitialDataSpec(
            bumps=(
                Bump(kind="box", component=0, center=0.0, width=0.1),
                Bump(kind="box", component=1, center=0.0, width=0.1),
            ),
            basis="characteristic",
        )
        with pytest.raises(ValueError, match="same component"):
            harness.probe_prediction(eigs, region, data)

    def test_prediction_requires_data_inside_stripe(self):
        eigs = EigenStructure.from_speeds([1.0])
        region = UndampedRegion(stripes=((-1.0, 1.0),))
        data = InitialDataSpec(
            bumps=(Bump(kind="box", component=0, center=2.0, width=0.1),),
            basis="characteristic",
        )
        with pytest.raises(ValueError, match="inside a single stripe"):
            harness.probe_prediction(eigs, region, data)

    def test_scalar_probe_run(self):
        s = harness.load_scenario(SCENARIOS / "probe_scalar.json")
        result = harness.run_scenario(s)
        p = result.probe
        assert p is not None and result.scan is None and result.envelope is None
        assert p.t_pred == pytest.approx(1.9, rel=1e-12)
        assert p.plateau_min == 1.0
        assert p.onset == pytest.approx(2.0, rel=1e-12)
        assert p.within_one_stride


class TestFullspaceScenario:
    def test_run_and_shape(self):
        s = harness.load_scenario(SCENARIOS / "fullspace_damped_wave.json")
        result = harness.run_scenario(s)
        series = result.series
        assert isinstance(series, FullspaceResult)
        assert series.times[0] == 0.0
        assert series.times[-1] == pytest.approx(100.0)
        assert series.times.size == 101
        assert series.l2_total[-1] < series.l2_total[0]
        summary = harness.summarize(result)
        assert summary["kind"] == "fullspace"
        assert summary["n_samples"] == 101


class TestExport:
    def test_header_and_determinism(self, tmp_path):
        s = harness.load_scenario(SCENARIOS / "probe_scalar.json")
        paths = []
        for name in ("one", "two"):
            result = harness.run_scenario(s)
            paths.append(harness.export(result, tmp_path / name))
        (csv1, sum1), (csv2, sum2) = paths
        assert csv1.read_bytes() == csv2.read_bytes()
        assert sum1.read_bytes() == sum2.read_bytes()
        first_line = csv1.read_text().splitlines()[0]
        assert first_line == "t,l2_total,l2_high,l2_low,linf,l1,comp_1"

    def test_csv_rows_match_series(self, tmp_path):
        s = harness.load_scenario(SCENARIOS / "probe_scalar.json")
        result = harness.run_scenario(s)
        csv_path, _ = harness.export(result, tmp_path)
        lines = csv_path.read_text().splitlines()
        assert len(lines) == 1 + result.series.times.size
        last = lines[-1].split(",")
        assert float(last[0]) == result.series.times[-1]
        assert float(last[1]) == result.series.l2_total[-1]

    def test_summary_fields(self, tmp_path, damped_wave_result):
        _, result = damped_wave_result
        _, summary_path = harness.export(result, tmp_path)
        blob = json.loads(summary_path.read_text())
        assert blob["name"] == "damped_wave"
        assert blob["validation_ok"] is True
        assert blob["envelope_ok"] is True
        assert blob["envelope_violations"] == []
        assert set(blob["checks"]) == {
            "velocity_symmetric",
            "damping_coercive",
            "speeds_distinct",
            "speeds_nonzero",
            "coupling_eigvec",
            "coupling_rank",
        }
        assert blob["kernel_backend"] in ("compiled", "python")
        assert blob["shifts"] == [-1, 1]


class TestCli:
    def test_check_ok(self, capsys):
        code = cli.main(["check", str(SCENARIOS / "probe_scalar.json")])
        out = capsys.readouterr().out
        assert code == 0
        assert "admissible" in out

    def test_check_rejects_inadmissible(self, tmp_path, capsys):
        raw = _good_raw()
        raw["system"] = {"a": [[1.0, 0.0], [0.0, 1.0]], "n1": 1, "dd": [[1.0]]}
        raw["initial_data"]["bumps"][0]["component"] = 0
        code = cli.main(["check", str(_write(tmp_path, raw))])
        out = capsys.readouterr().out
        assert code == 1
        assert "NOT admissible" in out

    def test_check_bad_file(self, tmp_path, capsys):
        code = cli.main(["check", str(_write(tmp_path, "{nope"))])
        out = capsys.readouterr().out
        assert code == 2
        assert "scenario rejected" in out

    def test_times_table(self, capsys):
        code = cli.main(["times", str(SCENARIOS / "damped_wave.json")])
        out = capsys.readouterr().out
        assert code == 0
        assert "residence delay bound: 2" in out
        assert "conservation horizon upper bound" in out
        assert "sup_undamped" in out

    def test_times_custom_grid(self, capsys):
        code = cli.main(
            ["times", str(SCENARIOS / "damped_wave.json"), "--t-grid", "0:4:1"]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert len([l for l in out.splitlines() if l.lstrip()[:1].isdigit()]) >= 5

    def test_times_bad_grid(self, capsys):
        code = cli.main(
            ["times", str(SCENARIOS / "damped_wave.json"), "--t-grid", "1:2"]
        )
        assert code == 2
        assert "start:stop:step" in capsys.readouterr().out

    def test_spectrum(self, capsys):
        code = cli.main(
            ["spectrum", str(SCENARIOS / "damped_wave.json"), "--samples", "64"]
        )
        out = capsys.readouterr().out
        assert code == 0
        rate_line = next(l for l in out.splitlines() if "uniform decay rate" in l)
        assert float(rate_line.split(":")[1]) == pytest.approx(0.5, abs=1e-9)

    def test_simulate_writes_outputs(self, tmp_path, capsys):
        out_dir = tmp_path / "run"
        code = cli.main(
            ["simulate", str(SCENARIOS / "probe_scalar.json"), "--out", str(out_dir)]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert (out_dir / "norms.csv").exists()
        assert (out_dir / "summary.json").exists()
        assert "kernel backend:" in out

    def test_verify_wrong_kind(self, capsys):
        code = cli.main(["verify", str(SCENARIOS / "probe_scalar.json")])
        assert code == 2
        assert "verify-envelope" in capsys.readouterr().out

    def test_verify_passes(self, tmp_path, capsys):
        out_dir = tmp_path / "run"
        code = cli.main(
            ["verify", str(SCENARIOS / "damped_wave.json"), "--out", str(out_dir)]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "envelopes hold" in out
        assert (out_dir / "summary.json").exists()
