import math

import numpy as np
import pytest

from ifalign import io as ifio
from ifalign.errors import FormatError, GapError, RateMismatch
from ifalign.simulate import (
    ScenarioConfig,
    SensorErrors,
    SineProfile,
    generate_truth,
    gps_fixes,
    sample_imu,
    simulation_sensor_defaults,
)


@pytest.fixture(scope="module")
def tiny_truth():
    return generate_truth(ScenarioConfig(duration_s=2.0))


class TestSensorCsvRoundTrip:
    def test_imu(self, tiny_truth, tmp_path):
        dtheta, dv = sample_imu(tiny_truth)
        t_end = (np.arange(dtheta.shape[0]) + 1) * tiny_truth.cfg.sample_dt
        path = tmp_path / "imu.csv"
        ifio.write_imu(path, t_end, dtheta, dv)
        t2, dtheta2, dv2 = ifio.read_imu(path)
        np.testing.assert_allclose(t2, t_end, rtol=1e-11)
        np.testing.assert_allclose(dtheta2, dtheta, rtol=1e-11, atol=1e-22)
        np.testing.assert_allclose(dv2, dv, rtol=1e-11, atol=1e-22)

    def test_gps(self, tiny_truth, tmp_path):
        t, v, p = gps_fixes(tiny_truth)
        path = tmp_path / "gps.csv"
        ifio.write_gps(path, t, v, p)
        t2, v2, p2 = ifio.read_gps(path)
        np.testing.assert_allclose(v2, v, rtol=1e-11, atol=1e-22)
        np.testing.assert_allclose(p2, p, rtol=1e-11, atol=1e-22)

    def test_truth(self, tiny_truth, tmp_path):
        from ifalign.attitude import dcm_to_quat

        idx = tiny_truth.update_indices()
        q = np.stack([dcm_to_quat(tiny_truth.c_b_n[i].T) for i in idx])
        path = tmp_path / "truth.csv"
        ifio.write_truth(path, tiny_truth.t[idx], q, tiny_truth.v[idx], tiny_truth.p[idx])
        t2, q2, v2, p2 = ifio.read_truth(path)
        np.testing.assert_allclose(q2, q, rtol=1e-11, atol=1e-13)
        np.testing.assert_allclose(p2, tiny_truth.p[idx], rtol=1e-11, atol=1e-22)

    def test_header_mismatch(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("not,a,header\n")
        with pytest.raises(FormatError) as err:
            ifio.read_imu(path)
        assert err.value.line == 1

    def test_malformed_row_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(ifio.IMU_HEADER + "\n0.01,0,0,0,0,0,0\n0.02,x,0,0,0,0,0\n")
        with pytest.raises(FormatError) as err:
            ifio.read_imu(path)
        assert err.value.line == 3

    def test_wrong_field_count(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(ifio.IMU_HEADER + "\n0.01,0,0\n")
        with pytest.raises(FormatError) as err:
            ifio.read_imu(path)
        assert err.value.line == 2


class TestConfigFiles:
    def test_round_trip(self, tmp_path):
        cfg = ScenarioConfig(duration_s=50.0, vel_mean_mps=(10.0, 1.0, -3.0))
        errors = simulation_sensor_defaults(seed=99)
        path = tmp_path / "scenario.yaml"
        ifio.save_config(path, cfg, errors)
        cfg2, errors2 = ifio.load_config(path)
        assert cfg2 == cfg
        assert errors2 == errors

    def test_default_yaml_matches_code_defaults(self):
        from importlib.resources import files

        path = files("ifalign.data") / "default_scenario.yaml"
        import yaml

        doc = yaml.safe_load(path.read_text())
        cfg, errors = ifio.config_from_dict(doc)
        assert cfg == ScenarioConfig()
        assert errors == simulation_sensor_defaults()

    def test_hash_changes_with_config(self):
        cfg = ScenarioConfig()
        errors = simulation_sensor_defaults()
        h1 = ifio.config_hash(cfg, errors)
        h2 = ifio.config_hash(ScenarioConfig(duration_s=60.0), errors)
        assert h1 != h2
        assert h1 == ifio.config_hash(ScenarioConfig(), simulation_sensor_defaults())


class TestInterpolation:
    def test_identity_at_fix_times(self):
        t = np.arange(11) * 0.5
        v = np.random.default_rng(1).standard_normal((11, 3))
        p = np.random.default_rng(2).standard_normal((11, 3)) * 0.01
        v2, p2 = ifio.interpolate_fixes(t, v, p, t)
        np.testing.assert_allclose(v2, v, atol=1e-15)
        np.testing.assert_allclose(p2, p, atol=1e-15)

    def test_linear_midpoints(self):
        t = np.array([0.0, 1.0])
        v = np.array([[0.0, 0.0, 0.0], [2.0, -4.0, 6.0]])
        p = np.array([[0.0, 0.0, 0.0], [0.2, 0.1, 100.0]])
        grid = np.array([0.5])
        v2, p2 = ifio.interpolate_fixes(t, v, p, grid)
        np.testing.assert_allclose(v2[0], [1.0, -2.0, 3.0])
        np.testing.assert_allclose(p2[0], [0.1, 0.05, 50.0])

    def test_longitude_wrap(self):
        # crossing the dateline: interpolation must go the short way
        t = np.array([0.0, 1.0])
        v = np.zeros((2, 3))
        p = np.array([[math.pi - 0.01, 0.5, 0.0], [-math.pi + 0.01, 0.5, 0.0]])
        v2, p2 = ifio.interpolate_fixes(t, v, p, np.array([0.5]))
        assert abs(p2[0, 0]) == pytest.approx(math.pi, abs=1e-12)

    def test_gap_detection(self):
        t = np.array([0.0, 0.5, 3.5, 4.0])
        v = np.zeros((4, 3))
        p = np.zeros((4, 3))
        with pytest.raises(GapError):
            ifio.interpolate_fixes(t, v, p, np.array([0.0, 4.0]), max_gap_s=2.0)

    def test_coverage_required(self):
        t = np.array([0.5, 1.0])
        with pytest.raises(GapError):
            ifio.interpolate_fixes(t, np.zeros((2, 3)), np.zeros((2, 3)),
                                   np.array([0.0, 1.0]))

    def test_non_monotone_rejected(self):
        t = np.array([0.0, 0.5, 0.5])
        with pytest.raises(FormatError):
            ifio.interpolate_fixes(t, np.zeros((3, 3)), np.zeros((3, 3)),
                                   np.array([0.0, 0.5]))


class TestIngest:
    def _write_logs(self, truth, tmp_path, gps_stride=None):
        dtheta, dv = sample_imu(truth)
        t_end = (np.arange(dtheta.shape[0]) + 1) * truth.cfg.sample_dt
        ifio.write_imu(tmp_path / "imu.csv", t_end, dtheta, dv)
        t, v, p = gps_fixes(truth, stride_s=gps_stride)
        ifio.write_gps(tmp_path / "gps.csv", t, v, p)
        return tmp_path / "imu.csv", tmp_path / "gps.csv"

    def test_round_trip_at_endpoints(self, tiny_truth, tmp_path):
        imu_path, gps_path = self._write_logs(tiny_truth, tmp_path)
        dtheta, dv, fix_t, fix_v, fix_p = ifio.ingest_logs(
            imu_path, gps_path, tiny_truth.cfg.update_interval_s
        )
        idx = tiny_truth.update_indices()
        assert fix_t.size == idx.size
        np.testing.assert_allclose(fix_v, tiny_truth.v[idx], rtol=1e-10, atol=1e-12)

    def test_2hz_interpolation_counts(self, tmp_path):
        truth = generate_truth(ScenarioConfig(duration_s=4.0))
        imu_path, gps_path = self._write_logs(truth, tmp_path, gps_stride=0.5)
        dtheta, dv, fix_t, fix_v, fix_p = ifio.ingest_logs(
            imu_path, gps_path, truth.cfg.update_interval_s
        )
        # 25 update endpoints per 0.5 s gap; endpoints exact
        assert fix_t.size == truth.cfg.n_updates + 1
        idx = truth.update_indices()
        on_fix = np.isclose(fix_t % 0.5, 0.0, atol=1e-9)
        np.testing.assert_allclose(
            fix_v[on_fix], truth.v[idx][on_fix], rtol=1e-10, atol=1e-12
        )

    def test_rate_mismatch(self, tiny_truth, tmp_path):
        imu_path, gps_path = self._write_logs(tiny_truth, tmp_path)
        with pytest.raises(RateMismatch):
            ifio.ingest_logs(imu_path, gps_path, 0.05)

    def test_irregular_imu_rejected(self, tmp_path, tiny_truth):
        imu_path, gps_path = self._write_logs(tiny_truth, tmp_path)
        rows = imu_path.read_text().splitlines()
        rows[3] = rows[3].replace(rows[3].split(",")[0], "0.031")
        imu_path.write_text("\n".join(rows) + "\n")
        with pytest.raises(RateMismatch):
            ifio.ingest_logs(imu_path, gps_path, tiny_truth.cfg.update_interval_s)
