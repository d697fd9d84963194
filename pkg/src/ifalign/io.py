"""File formats: sensor-log CSVs, scenario config, log ingestion.

CSV conventions (decimal dot, 12 significant digits, headered):

* IMU -- ``t_end_s,dtheta_x,dtheta_y,dtheta_z,dv_x,dv_y,dv_z`` with one row
  per IMU sample (half update interval); angles in rad, velocities in m/s.
* GPS -- ``t_s,lat_rad,lon_rad,h_m,vN_mps,vU_mps,vE_mps``.
* Truth -- ``t_s,q_s,q_x,q_y,q_z,vN,vU,vE,lat,lon,h`` where the quaternion
  encodes the nav-to-body rotation (``quat_to_dcm(q)`` is the nav-to-body
  matrix).

The scenario/sensor configuration is a single YAML document with
``scenario`` and ``sensors`` sections; see ``data/default_scenario.yaml``
for the full schema with the default values.
"""

import hashlib
import json
from dataclasses import asdict

import numpy as np
import yaml

from .errors import FormatError, GapError, RateMismatch
from .simulate import ScenarioConfig, SensorErrors, SineProfile

_FMT = "%.12g"

IMU_HEADER = "t_end_s,dtheta_x,dtheta_y,dtheta_z,dv_x,dv_y,dv_z"
GPS_HEADER = "t_s,lat_rad,lon_rad,h_m,vN_mps,vU_mps,vE_mps"
TRUTH_HEADER = "t_s,q_s,q_x,q_y,q_z,vN,vU,vE,lat,lon,h"


def _write_csv(path, header, columns):
    rows = np.column_stack(columns)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_FMT % x for x in row) + "\n")


def _read_csv(path, header, n_cols):
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        first = fh.readline().rstrip("\n")
        if first != header:
            raise FormatError(
                f"expected header {header!r}, got {first!r}", path=path, line=1
            )
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != n_cols:
                raise FormatError(
                    f"expected {n_cols} fields, got {len(parts)}",
                    path=path,
                    line=lineno,
                )
            try:
                rows.append([float(x) for x in parts])
            except ValueError as exc:
                raise FormatError(str(exc), path=path, line=lineno) from None
    return np.array(rows, dtype=float).reshape(-1, n_cols)


def write_imu(path, t_end, dtheta, dv):
    """IMU sample log: one row per half-interval increment."""
    _write_csv(
        path,
        IMU_HEADER,
        [t_end, dtheta[:, 0], dtheta[:, 1], dtheta[:, 2], dv[:, 0], dv[:, 1], dv[:, 2]],
    )


def read_imu(path):
    data = _read_csv(path, IMU_HEADER, 7)
    return data[:, 0], data[:, 1:4], data[:, 4:7]


def write_gps(path, t, v, p):
    """GPS fix log; positions internally [lon, lat, h], stored lat-first."""
    _write_csv(
        path,
        GPS_HEADER,
        [t, p[:, 1], p[:, 0], p[:, 2], v[:, 0], v[:, 1], v[:, 2]],
    )


def read_gps(path):
    data = _read_csv(path, GPS_HEADER, 7)
    t = data[:, 0]
    p = np.stack([data[:, 2], data[:, 1], data[:, 3]], axis=-1)
    v = data[:, 4:7]
    return t, v, p


def write_truth(path, t, q, v, p):
    """Reference trajectory log (simulation mode only)."""
    _write_csv(
        path,
        TRUTH_HEADER,
        [
            t,
            q[:, 0], q[:, 1], q[:, 2], q[:, 3],
            v[:, 0], v[:, 1], v[:, 2],
            p[:, 1], p[:, 0], p[:, 2],
        ],
    )


def read_truth(path):
    data = _read_csv(path, TRUTH_HEADER, 11)
    t = data[:, 0]
    q = data[:, 1:5]
    v = data[:, 5:8]
    p = np.stack([data[:, 9], data[:, 8], data[:, 10]], axis=-1)
    return t, q, v, p


# ---------------------------------------------------------------------------
# Configuration files.


def _profile_to_dict(profile):
    return {
        "amplitude": profile.amplitude,
        "period_s": profile.period_s,
        "phase_deg": profile.phase_deg,
    }


def _profile_from_dict(d):
    return SineProfile(
        amplitude=float(d.get("amplitude", 0.0)),
        period_s=float(d.get("period_s", 1.0)),
        phase_deg=float(d.get("phase_deg", 0.0)),
    )


def config_to_dict(cfg, errors):
    return {
        "scenario": {
            "latitude_deg": cfg.latitude_deg,
            "longitude_deg": cfg.longitude_deg,
            "height_m": cfg.height_m,
            "duration_s": cfg.duration_s,
            "imu_rate_hz": cfg.imu_rate_hz,
            "update_interval_s": cfg.update_interval_s,
            "substep_s": cfg.substep_s,
            "attitude": {
                "roll": _profile_to_dict(cfg.roll),
                "pitch": _profile_to_dict(cfg.pitch),
                "yaw": _profile_to_dict(cfg.yaw),
            },
            "velocity": {
                "mean_mps": list(cfg.vel_mean_mps),
                "north": _profile_to_dict(cfg.vel_north),
                "up": _profile_to_dict(cfg.vel_up),
                "east": _profile_to_dict(cfg.vel_east),
            },
        },
        "sensors": {
            "gyro_drift_deg_h": errors.gyro_drift_deg_h,
            "gyro_noise_deg_h_sqrt_hz": errors.gyro_noise_deg_h_sqrt_hz,
            "accel_bias_ug": errors.accel_bias_ug,
            "accel_noise_ug_sqrt_hz": errors.accel_noise_ug_sqrt_hz,
            "gps_vel_sigma_mps": errors.gps_vel_sigma_mps,
            "gps_pos_sigma_m": errors.gps_pos_sigma_m,
            "lever_arm_m": list(errors.lever_arm_m),
            "seed": errors.seed,
        },
    }


def config_from_dict(doc):
    sc = doc.get("scenario", {})
    att = sc.get("attitude", {})
    vel = sc.get("velocity", {})
    cfg = ScenarioConfig(
        latitude_deg=float(sc.get("latitude_deg", 30.0)),
        longitude_deg=float(sc.get("longitude_deg", 0.0)),
        height_m=float(sc.get("height_m", 0.0)),
        duration_s=float(sc.get("duration_s", 300.0)),
        imu_rate_hz=float(sc.get("imu_rate_hz", 100.0)),
        update_interval_s=float(sc.get("update_interval_s", 0.02)),
        substep_s=float(sc.get("substep_s", 0.001)),
        roll=_profile_from_dict(att.get("roll", {})),
        pitch=_profile_from_dict(att.get("pitch", {})),
        yaw=_profile_from_dict(att.get("yaw", {})),
        vel_mean_mps=tuple(float(x) for x in vel.get("mean_mps", (0.0, 0.0, 0.0))),
        vel_north=_profile_from_dict(vel.get("north", {})),
        vel_up=_profile_from_dict(vel.get("up", {})),
        vel_east=_profile_from_dict(vel.get("east", {})),
    )
    se = doc.get("sensors", {})
    errors = SensorErrors(
        gyro_drift_deg_h=float(se.get("gyro_drift_deg_h", 0.0)),
        gyro_noise_deg_h_sqrt_hz=float(se.get("gyro_noise_deg_h_sqrt_hz", 0.0)),
        accel_bias_ug=float(se.get("accel_bias_ug", 0.0)),
        accel_noise_ug_sqrt_hz=float(se.get("accel_noise_ug_sqrt_hz", 0.0)),
        gps_vel_sigma_mps=float(se.get("gps_vel_sigma_mps", 0.0)),
        gps_pos_sigma_m=float(se.get("gps_pos_sigma_m", 0.0)),
        lever_arm_m=tuple(float(x) for x in se.get("lever_arm_m", (0.0, 0.0, 0.0))),
        seed=int(se.get("seed", 0)),
    )
    return cfg, errors


def save_config(path, cfg, errors):
    with open(path, "w", encoding="ascii") as fh:
        yaml.safe_dump(config_to_dict(cfg, errors), fh, sort_keys=False)


def load_config(path):
    with open(path, "r", encoding="ascii") as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise FormatError("config must be a YAML mapping", path=path)
    return config_from_dict(doc)


def config_hash(cfg, errors):
    """Stable hex digest of a scenario + sensor configuration."""
    doc = json.dumps(config_to_dict(cfg, errors), sort_keys=True)
    return hashlib.sha256(doc.encode("ascii")).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Log ingestion.


def interpolate_fixes(gps_t, gps_v, gps_p, grid_t, max_gap_s=2.0):
    """Linear interpolation of GPS fixes onto the update-endpoint grid.

    Longitude is unwrapped before interpolation so dateline crossings stay
    continuous.  Raises :class:`GapError` when fixes do not cover the grid
    or any gap between consecutive fixes exceeds ``max_gap_s``.
    """
    if np.any(np.diff(gps_t) <= 0.0):
        raise FormatError("GPS timestamps must be strictly increasing")
    gaps = np.diff(gps_t)
    if gaps.size and float(np.max(gaps)) > max_gap_s:
        raise GapError(
            f"GPS gap of {float(np.max(gaps)):.3f} s exceeds {max_gap_s} s"
        )
    tol = 1e-9
    if gps_t[0] > grid_t[0] + tol or gps_t[-1] < grid_t[-1] - tol:
        raise GapError(
            f"GPS span [{gps_t[0]}, {gps_t[-1]}] does not cover "
            f"[{grid_t[0]}, {grid_t[-1]}]"
        )
    v = np.stack([np.interp(grid_t, gps_t, gps_v[:, i]) for i in range(3)], axis=-1)
    lon = np.interp(grid_t, gps_t, np.unwrap(gps_p[:, 0]))
    lat = np.interp(grid_t, gps_t, gps_p[:, 1])
    h = np.interp(grid_t, gps_t, gps_p[:, 2])
    from .earth import wrap_longitude

    p = np.stack([wrap_longitude(lon), lat, h], axis=-1)
    return v, p


def ingest_logs(imu_path, gps_path, T, max_gap_s=2.0):
    """Pair an IMU sample log with interpolated GPS aiding.

    Returns ``(dtheta, dv, fix_t, fix_v, fix_p)`` where the increment
    arrays hold one row per IMU sample and the fix arrays one row per
    update-interval endpoint.

    Raises
    ------
    FormatError, RateMismatch, GapError
        On malformed rows, an IMU rate incompatible with ``T``, or GPS
        coverage/gap violations.
    """
    t_end, dtheta, dv = read_imu(imu_path)
    if t_end.size < 2:
        raise FormatError("IMU log needs at least two samples", path=imu_path)
    dt = float(t_end[1] - t_end[0])
    if dt <= 0.0 or np.max(np.abs(np.diff(t_end) - dt)) > 1e-6:
        raise RateMismatch("IMU samples are not at a fixed rate")
    if abs(2.0 * dt - T) > 1e-9:
        raise RateMismatch(
            f"IMU sample period {dt} s is incompatible with update interval {T} s"
        )
    n_updates = t_end.size // 2
    if n_updates == 0:
        raise RateMismatch("IMU log shorter than one update interval")
    n_samples = 2 * n_updates
    dtheta = dtheta[:n_samples]
    dv = dv[:n_samples]

    t0 = float(t_end[0] - dt)
    grid_t = t0 + np.arange(n_updates + 1) * T
    gps_t, gps_v, gps_p = read_gps(gps_path)
    fix_v, fix_p = interpolate_fixes(gps_t, gps_v, gps_p, grid_t, max_gap_s)
    return dtheta, dv, grid_t, fix_v, fix_p
