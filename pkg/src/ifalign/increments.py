"""Two-sample compensation of the incremental attitude/velocity integrals.

An update interval ``[t_k, t_k + T]`` is covered by two equal IMU samples.
From the four increments the closed forms below approximate, to third order
in ``T`` for smooth rates:

* the rotation-compensated velocity integral (sculling correction),
* its nested double integral over the interval,
* the body-frame rotation vector (coning correction).

All three are exact when angular rate and specific force vary linearly in
time over the interval.
"""

import math
from dataclasses import dataclass

import numpy as np

from .attitude import cross3

_CONING_BOUND = 0.1  # rad; sanity bound for one update interval


@dataclass(frozen=True)
class ImuInterval:
    """Gyro/accelerometer increments over the two halves of one update interval.

    Attributes
    ----------
    dtheta1, dtheta2 : ndarray, shape (3,)
        Incremental angles (rad) integrated over the first/second half.
    dv1, dv2 : ndarray, shape (3,)
        Incremental velocities (m/s) integrated over the first/second half.
    """

    dtheta1: np.ndarray
    dtheta2: np.ndarray
    dv1: np.ndarray
    dv2: np.ndarray

    def __post_init__(self):
        checksum = 0.0
        for name in ("dtheta1", "dtheta2", "dv1", "dv2"):
            value = getattr(self, name)
            if type(value) is not np.ndarray or value.dtype != np.float64:
                value = np.asarray(value, dtype=float)
                object.__setattr__(self, name, value)
            if value.shape != (3,):
                raise ValueError(f"{name} must be a 3-vector")
            checksum += value[0] + value[1] + value[2]
        if not math.isfinite(checksum):
            raise ValueError("increments must be finite")
        total = self.dtheta1 + self.dtheta2
        if float(total @ total) >= _CONING_BOUND ** 2:
            raise ValueError(
                "angular increment exceeds 0.1 rad over one update interval"
            )


def sculling_increment(interval):
    """Rotation-compensated velocity increment over one update interval.

    ``dv1 + dv2 + (dtheta1 + dtheta2) x (dv1 + dv2) / 2
    + 2 (dtheta1 x dv2 + dv1 x dtheta2) / 3``
    """
    dth1, dth2 = interval.dtheta1, interval.dtheta2
    dv1, dv2 = interval.dv1, interval.dv2
    return (
        dv1
        + dv2
        + 0.5 * cross3(dth1 + dth2, dv1 + dv2)
        + (2.0 / 3.0) * (cross3(dth1, dv2) + cross3(dv1, dth2))
    )


def double_integral_increment(interval, T):
    """Nested double integral of the rotated specific force over one interval.

    ``(T/30) (25 dv1 + 5 dv2 + 12 dtheta1 x dv1 + 8 dtheta1 x dv2
    + 2 dv1 x dtheta2 + 2 dtheta2 x dv2)``
    """
    if T <= 0.0:
        raise ValueError("update interval T must be positive")
    dth1, dth2 = interval.dtheta1, interval.dtheta2
    dv1, dv2 = interval.dv1, interval.dv2
    return (T / 30.0) * (
        25.0 * dv1
        + 5.0 * dv2
        + 12.0 * cross3(dth1, dv1)
        + 8.0 * cross3(dth1, dv2)
        + 2.0 * cross3(dv1, dth2)
        + 2.0 * cross3(dth2, dv2)
    )


def body_rotvec(interval):
    """Body rotation vector with the two-sample coning correction.

    ``dtheta1 + dtheta2 + 2 (dtheta1 x dtheta2) / 3``
    """
    dth1, dth2 = interval.dtheta1, interval.dtheta2
    return dth1 + dth2 + (2.0 / 3.0) * cross3(dth1, dth2)
