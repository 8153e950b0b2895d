import math

import numpy as np
import pytest

from ferrosim.harness import (
    TrajectoryLog,
    hold_error_stats,
    open_loop_sweep,
    path_errors,
    polyline_distances,
    pooled_stats,
    run_batch,
    run_hold_trial,
    run_path_trial,
    stats_json,
    trial_stats,
    velocity_stats,
)
from ferrosim.paths import PathKind, make_path, preset_path
from ferrosim.plant import PlantParams


def synthetic_log(positions, dt=1 / 30):
    positions = np.asarray(positions, dtype=float)
    n = len(positions)
    return TrajectoryLog(
        t=np.arange(1, n + 1) * dt,
        pos=positions,
        target=np.full((n, 2), np.nan),
        pattern=np.zeros(n, dtype=int),
        commanded_speed=np.zeros(n),
        err=np.zeros(n),
        metadata={},
    )


class TestPathErrors:
    def test_on_path_log_is_zero(self):
        path = make_path(PathKind.LINE)
        log = synthetic_log(path.samples[::4])
        stats = path_errors(log, path)
        assert (stats.mean_err, stats.std_err, stats.max_err) == (0.0, 0.0, 0.0)

    def test_constant_lateral_offset(self):
        path = make_path(PathKind.LINE)
        points = np.column_stack((np.linspace(-1.5, 1.5, 40), np.full(40, 0.1)))
        stats = path_errors(synthetic_log(points), path)
        assert stats.mean_err == pytest.approx(100.0, abs=1e-9)
        assert stats.max_err == pytest.approx(100.0, abs=1e-9)
        assert stats.std_err == pytest.approx(0.0, abs=1e-9)

    def test_matches_dense_sample_brute_force(self):
        path = make_path(PathKind.SQUARE)
        rng = np.random.default_rng(4)
        points = rng.uniform(-2.0, 2.0, (200, 2))
        exact = polyline_distances(points, path.samples)
        for point, d in zip(points, exact):
            brute = np.hypot(*(path.samples - point).T).min()
            assert d <= brute + 1e-12
            assert brute - d <= path.spacing / 2

    def test_rotation_invariance_of_metrics(self):
        path = make_path(PathKind.LINE)
        rng = np.random.default_rng(5)
        points = path.samples[::3] + rng.normal(0, 0.05, (len(path.samples[::3]), 2))
        ang = 1.1
        rot = np.array([[math.cos(ang), -math.sin(ang)], [math.sin(ang), math.cos(ang)]])
        a = polyline_distances(points, path.samples)
        b = polyline_distances(points @ rot.T, path.samples @ rot.T)
        np.testing.assert_allclose(a, b, atol=1e-9)

    def test_empty_log_rejected(self):
        path = make_path(PathKind.LINE)
        with pytest.raises(ValueError):
            path_errors(synthetic_log(np.empty((0, 2))), path)


class TestVelocityStats:
    def test_uniform_motion(self):
        dt = 1 / 30
        xs = np.arange(50) * 0.3 * dt
        stats = velocity_stats(synthetic_log(np.column_stack((xs, np.zeros(50))), dt))
        assert stats.mean_v == pytest.approx(300.0, rel=1e-9)
        assert stats.std_v == pytest.approx(0.0, abs=1e-6)

    def test_stationary(self):
        stats = velocity_stats(synthetic_log(np.zeros((10, 2))))
        assert (stats.mean_v, stats.std_v, stats.max_v) == (0.0, 0.0, 0.0)

    def test_needs_two_rows(self):
        with pytest.raises(ValueError):
            velocity_stats(synthetic_log(np.zeros((1, 2))))

    def test_arc_length_consistency(self, quiet_params):
        path = preset_path("line")
        log = run_path_trial(path, plant_params=quiet_params)
        stats = velocity_stats(log)
        duration = log.t[-1] - log.t[0]
        traced = np.hypot(*np.diff(log.pos, axis=0).T).sum() * 1e3
        assert abs(stats.mean_v * duration - traced) / traced < 0.02


class TestRunPathTrial:
    def test_noise_free_line_completes_tightly(self, quiet_params):
        path = preset_path("line")
        log = run_path_trial(path, plant_params=quiet_params)
        assert log.completed
        assert path_errors(log, path).max_err < 50.0

    def test_same_seed_identical_csv(self):
        path = preset_path("circle")
        params = PlantParams(seed=11)
        a = run_path_trial(path, plant_params=params)
        b = run_path_trial(path, plant_params=params)
        assert a.to_csv() == b.to_csv()

    def test_batch_bookkeeping(self):
        path = preset_path("line")
        logs = run_batch(path, reps=3, seed=50)
        assert len(logs) == 3
        seeds = [log.metadata["seed"] for log in logs]
        assert seeds == [50, 51, 52]
        assert len({log.to_csv() for log in logs}) == 3  # distinct trajectories
        assert all(log.metadata["path_kind"] == "line" for log in logs)

    def test_timeout_marks_incomplete(self):
        path = preset_path("circle")
        log = run_path_trial(path, plant_params=PlantParams(seed=1), timeout_s=0.5)
        assert not log.completed
        assert len(log) == 15  # 0.5 s at 30 Hz

    def test_monotone_time_axis(self, quiet_params):
        log = run_path_trial(preset_path("line"), plant_params=quiet_params)
        assert np.all(np.diff(log.t) > 0)
        np.testing.assert_allclose(np.diff(log.t), 1 / 30, rtol=1e-9)


class TestRunHoldTrial:
    def test_quiet_hold_stays_within_deadband(self, quiet_params):
        log = run_hold_trial((0.0, 0.0), 5.0, plant_params=quiet_params)
        mean, _, peak = hold_error_stats(log)
        assert peak <= 50.0  # deadband radius in micrometres

    def test_noisy_hold_bounded(self):
        log = run_hold_trial((0.0, 0.0), 20.0, plant_params=PlantParams(seed=3))
        mean, _, _ = hold_error_stats(log)
        assert mean <= 100.0
        assert np.isfinite(log.err).all()

    def test_approach_phase_reaches_target(self):
        log = run_hold_trial(
            (0.0, 0.0), 5.0, plant_params=PlantParams(seed=4), start=(2.0, 0.0)
        )
        # only the hold phase is logged, so errors start small
        assert log.err[0] * 1e3 < 200.0
        assert len(log) == 150


class TestOpenLoopSweep:
    def test_noise_free_matches_law_exactly(self):
        rows = open_loop_sweep(
            plant_params=PlantParams(lag_tau=0.1, drift_rms=0.0),
            distances=(2.7,),
            reps=1,
        )
        assert rows[0]["mean_mm_s"] == pytest.approx(3.17 / 2.7 + 0.03, rel=1e-9)
        assert rows[0]["std_mm_s"] == 0.0

    def test_lag_free_also_matches(self):
        rows = open_loop_sweep(
            plant_params=PlantParams(lag_tau=0.0, drift_rms=0.0),
            distances=(5.1,),
            reps=1,
        )
        assert rows[0]["mean_mm_s"] == pytest.approx(3.17 / 5.1 + 0.03, rel=1e-12)

    def test_default_noise_monotone_means(self):
        rows = open_loop_sweep(distances=(2.7, 3.8, 4.9, 5.9, 7.0), reps=5, seed=2)
        means = [row["mean_mm_s"] for row in rows]
        assert all(a > b for a, b in zip(means, means[1:]))

    def test_rep_bookkeeping(self):
        rows = open_loop_sweep(distances=(2.7, 3.8, 4.9, 5.9, 7.0), reps=5)
        assert sum(len(row["speeds_mm_s"]) for row in rows) == 25

    def test_unreachable_distance_rejected(self):
        with pytest.raises(ValueError):
            open_loop_sweep(distances=(9.5,))


class TestStatsJson:
    def test_keys(self):
        path = preset_path("line")
        logs = run_batch(path, reps=2, seed=0)
        payload = stats_json("line", 2, pooled_stats(logs, path))
        assert set(payload) == {
            "path",
            "reps",
            "mean_err_um",
            "std_err_um",
            "max_err_um",
            "mean_v_ums",
            "std_v_ums",
            "max_v_ums",
        }
        assert payload["path"] == "line"
        assert payload["reps"] == 2
        assert payload["max_err_um"] >= payload["mean_err_um"] >= 0.0


class TestCsv:
    def test_header_and_shape(self, quiet_params, tmp_path):
        log = run_path_trial(preset_path("line"), plant_params=quiet_params)
        file = tmp_path / "log.csv"
        log.write_csv(file)
        lines = file.read_text().splitlines()
        assert lines[0] == "t_s,x_mm,y_mm,tx_mm,ty_mm,pattern,err_mm"
        assert len(lines) == len(log) + 1
        first = lines[1].split(",")
        assert len(first) == 7
        assert 0 <= int(first[5]) <= 255
