"""Recursive in-flight coarse alignment from aided velocity/position.

Two aligners estimate the constant initial body-to-nav attitude of a moving
vehicle.  Both chain two incremental DCMs -- the body frame relative to its
t=0 orientation (from gyro increments) and the navigation frame relative to
its t=0 orientation (from earth/transport rates) -- and accumulate a pair of
3-vectors (alpha, beta) that the initial attitude must map onto each other:

* :class:`VelocityIntegrationAligner`: alpha is the integral of the rotated
  specific force, beta combines the aided velocity with earth-rate and
  gravity integrals.
* :class:`PositionIntegrationAligner`: alpha and beta are the corresponding
  nested double integrals, which smooth aiding noise harder at the price of
  slower transient response.

Every update folds the current pair into a 4x4 accumulator whose
smallest-eigenvalue eigenvector is the optimal attitude quaternion.
"""

from dataclasses import dataclass

import numpy as np

from . import earth
from .attitude import compose_attitude, cross3, quat_to_dcm, rotvec_to_dcm
from .errors import DegenerateSpectrum
from .increments import body_rotvec, double_integral_increment, sculling_increment
from .quest import accumulate, optimal_quaternion


@dataclass(frozen=True)
class AidFix:
    """Aided ground velocity and curvilinear position at one time instant.

    Attributes
    ----------
    t : float
        Time since the start of alignment (s).
    v : ndarray, shape (3,)
        Ground velocity [vN, vU, vE] (m/s).
    p : ndarray, shape (3,)
        Curvilinear position [lon, lat, h] (rad, rad, m).
    """

    t: float
    v: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float))


class AlignmentEstimate:
    """Result of one aligner update.

    ``q`` encodes the estimated constant nav-to-body attitude at t=0
    (via :func:`ifalign.attitude.quat_to_dcm`); ``c_b_n`` is the estimated
    body-to-nav matrix at the current time (composed lazily from the chain
    snapshots), and ``lambda_min`` the smallest eigenvalue of the
    accumulator, a residual-energy figure of merit.
    """

    __slots__ = ("t", "q", "lambda_min", "_c_nav", "_c_body")

    def __init__(self, t, q, lambda_min, c_nav, c_body):
        self.t = t
        self.q = q
        self.lambda_min = lambda_min
        self._c_nav = c_nav
        self._c_body = c_body

    @property
    def c_b_n(self):
        return compose_attitude(
            self._c_nav.T, quat_to_dcm(self.q).T, self._c_body
        )

    def __repr__(self):
        return (
            f"AlignmentEstimate(t={self.t!r}, q={self.q!r}, "
            f"lambda_min={self.lambda_min!r})"
        )


class _AlignerBase:
    """Shared chain propagation, eigen solve and bookkeeping."""

    def __init__(self, v0, p0, T, solve_every=1):
        if T <= 0.0:
            raise ValueError("update interval T must be positive")
        if solve_every < 1:
            raise ValueError("solve_every must be >= 1")
        self.T = float(T)
        self.M = 0
        self.v0 = np.asarray(v0, dtype=float).copy()
        self.p0 = np.asarray(p0, dtype=float).copy()
        self.solve_every = int(solve_every)
        self.c_nav = np.eye(3)   # C_{n(t_M)}^{n(0)}
        self.c_body = np.eye(3)  # C_{b(t_M)}^{b(0)}
        self.K = np.zeros((4, 4))
        self._last_q = None
        self._last_lambda = None

    @property
    def t(self):
        """Elapsed alignment time (s)."""
        return self.M * self.T

    def _check_fixes(self, fix_prev, fix_next):
        if not isinstance(fix_prev, AidFix) or not isinstance(fix_next, AidFix):
            raise TypeError("fixes must be AidFix instances")
        if abs((fix_next.t - fix_prev.t) - self.T) > 1e-6:
            raise ValueError(
                f"fixes must straddle one update interval of {self.T} s, "
                f"got {fix_prev.t} -> {fix_next.t}"
            )

    def _advance_chains(self, interval, omega_in):
        """Rotate both chains across one interval; returns their prior values."""
        c_nav_prev = self.c_nav
        c_body_prev = self.c_body
        self.c_nav = c_nav_prev @ rotvec_to_dcm(self.T * omega_in)
        self.c_body = c_body_prev @ rotvec_to_dcm(body_rotvec(interval))
        return c_nav_prev, c_body_prev

    def _solve(self):
        """Extract the attitude estimate; may raise DegenerateSpectrum."""
        if self.M % self.solve_every == 0:
            q, lam = optimal_quaternion(self.K)
            self._last_q = q
            self._last_lambda = lam
        elif self._last_q is None:
            raise DegenerateSpectrum("no attitude estimate available yet")
        return AlignmentEstimate(
            t=self.t,
            q=self._last_q,
            lambda_min=self._last_lambda,
            c_nav=self.c_nav,
            c_body=self.c_body,
        )

    def current_attitude(self, q):
        """Body-to-nav matrix at the current time for a given initial-attitude q."""
        return compose_attitude(self.c_nav.T, quat_to_dcm(q).T, self.c_body)

    def _state_dict(self, extra):
        state = {
            "T": self.T,
            "M": self.M,
            "v0": self.v0.tolist(),
            "p0": self.p0.tolist(),
            "solve_every": self.solve_every,
            "c_nav": self.c_nav.tolist(),
            "c_body": self.c_body.tolist(),
            "K": self.K.tolist(),
        }
        state.update(extra)
        return state

    def _restore_base(self, state):
        self.M = int(state["M"])
        self.c_nav = np.array(state["c_nav"], dtype=float)
        self.c_body = np.array(state["c_body"], dtype=float)
        self.K = np.array(state["K"], dtype=float)


class VelocityIntegrationAligner(_AlignerBase):
    """Recursive aligner driven by the velocity integration formula.

    Parameters
    ----------
    v0 : array_like, shape (3,)
        Aided ground velocity at the start of alignment (m/s).
    p0 : array_like, shape (3,)
        Curvilinear position [lon, lat, h] at the start of alignment.
    T : float
        Update interval (s); aiding fixes are required at both ends of
        every interval.
    solve_every : int, optional
        Run the eigen extraction every k-th update (default 1: every
        update).  The accumulator is maintained every update regardless.
    """

    def __init__(self, v0, p0, T, solve_every=1):
        super().__init__(v0, p0, T, solve_every)
        self.alpha = np.zeros(3)
        self.beta_partial = np.zeros(3)
        self.beta = np.zeros(3)

    def update(self, interval, fix_prev, fix_next):
        """Absorb one IMU interval with its bracketing fixes.

        Returns an :class:`AlignmentEstimate`.  Raises
        :class:`DegenerateSpectrum` while the attitude is unobservable;
        the internal state is committed first, so feeding further updates
        after catching the error is valid.
        """
        self._check_fixes(fix_prev, fix_next)
        T = self.T
        omega_ie, omega_in, g_n = earth.aiding_kinematics(fix_prev.v, fix_prev.p)

        c_nav_prev, c_body_prev = self._advance_chains(interval, omega_in)

        self.alpha = self.alpha + c_body_prev @ sculling_increment(interval)

        w_prev = cross3(omega_ie, fix_prev.v)
        w_next = cross3(omega_ie, fix_next.v)
        bracket = (
            (T / 2.0) * w_prev
            + (T * T / 6.0) * cross3(omega_in, w_prev)
            + (T / 2.0) * w_next
            + (T * T / 3.0) * cross3(omega_in, w_next)
            - T * g_n
            - (T * T / 2.0) * cross3(omega_in, g_n)
        )
        self.beta_partial = self.beta_partial + c_nav_prev @ bracket
        self.beta = self.c_nav @ fix_next.v - self.v0 + self.beta_partial

        self.K = accumulate(self.K, self.alpha, self.beta)
        self.M += 1
        return self._solve()

    def to_dict(self):
        """JSON-serializable snapshot of the full state."""
        return self._state_dict(
            {
                "kind": "vif",
                "alpha": self.alpha.tolist(),
                "beta_partial": self.beta_partial.tolist(),
                "beta": self.beta.tolist(),
            }
        )

    @classmethod
    def from_dict(cls, state):
        """Rebuild an aligner from :meth:`to_dict` output."""
        if state.get("kind") != "vif":
            raise ValueError("state is not a velocity-integration snapshot")
        out = cls(state["v0"], state["p0"], state["T"], state["solve_every"])
        out._restore_base(state)
        out.alpha = np.array(state["alpha"], dtype=float)
        out.beta_partial = np.array(state["beta_partial"], dtype=float)
        out.beta = np.array(state["beta"], dtype=float)
        return out


class PositionIntegrationAligner(_AlignerBase):
    """Recursive aligner driven by the position integration formula.

    Same call contract as :class:`VelocityIntegrationAligner`.  The nested
    double sums are carried by five O(1)-per-step prefix accumulators:
    ``s_body`` (rotated single-interval velocity integrals), ``s_nav_v`` and
    ``s_nav_g`` (nav-frame earth-rate and gravity single integrals), plus
    the running ``u_r``, ``u_v``, ``u_g`` terms of beta.
    """

    def __init__(self, v0, p0, T, solve_every=1):
        super().__init__(v0, p0, T, solve_every)
        self.alpha = np.zeros(3)
        self.beta = np.zeros(3)
        self.s_body = np.zeros(3)
        self.s_nav_v = np.zeros(3)
        self.s_nav_g = np.zeros(3)
        self.u_r = np.zeros(3)
        self.u_v = np.zeros(3)
        self.u_g = np.zeros(3)

    def update(self, interval, fix_prev, fix_next):
        """Absorb one IMU interval with its bracketing fixes.

        Same semantics and error behavior as the velocity-integration
        aligner.
        """
        self._check_fixes(fix_prev, fix_next)
        T = self.T
        omega_ie, omega_in, g_n = earth.aiding_kinematics(fix_prev.v, fix_prev.p)

        c_nav_prev, c_body_prev = self._advance_chains(interval, omega_in)

        # Double integral of rotated specific force: completed-interval
        # prefix times T, plus the within-interval two-sample tail.
        self.alpha = (
            self.alpha
            + T * self.s_body
            + c_body_prev @ double_integral_increment(interval, T)
        )
        self.s_body = self.s_body + c_body_prev @ sculling_increment(interval)

        v_prev, v_next = fix_prev.v, fix_next.v
        w_prev = cross3(omega_ie, v_prev)
        w_next = cross3(omega_ie, v_next)
        rot_v_prev = cross3(omega_in, v_prev)
        rot_v_next = cross3(omega_in, v_next)
        rot_w_prev = cross3(omega_in, w_prev)
        rot_w_next = cross3(omega_in, w_next)
        rot_g = cross3(omega_in, g_n)

        self.u_r = self.u_r + c_nav_prev @ (
            (T / 2.0) * (v_prev + v_next)
            + (T * T / 6.0) * rot_v_prev
            + (T * T / 3.0) * rot_v_next
        )

        self.u_v = (
            self.u_v
            + c_nav_prev
            @ (
                (T * T / 3.0) * w_prev
                + (T * T / 6.0) * w_next
                + (T ** 3 / 12.0) * (rot_w_prev + rot_w_next)
            )
            + T * self.s_nav_v
        )
        self.s_nav_v = self.s_nav_v + c_nav_prev @ (
            (T / 2.0) * (w_prev + w_next)
            + (T * T / 6.0) * rot_w_prev
            + (T * T / 3.0) * rot_w_next
        )

        self.u_g = (
            self.u_g
            + c_nav_prev @ ((T * T / 2.0) * g_n + (T ** 3 / 6.0) * rot_g)
            + T * self.s_nav_g
        )
        self.s_nav_g = self.s_nav_g + c_nav_prev @ (T * g_n + (T * T / 2.0) * rot_g)

        self.M += 1
        self.beta = self.u_r - self.t * self.v0 + self.u_v - self.u_g

        self.K = accumulate(self.K, self.alpha, self.beta)
        return self._solve()

    def to_dict(self):
        """JSON-serializable snapshot of the full state."""
        return self._state_dict(
            {
                "kind": "pif",
                "alpha": self.alpha.tolist(),
                "beta": self.beta.tolist(),
                "s_body": self.s_body.tolist(),
                "s_nav_v": self.s_nav_v.tolist(),
                "s_nav_g": self.s_nav_g.tolist(),
                "u_r": self.u_r.tolist(),
                "u_v": self.u_v.tolist(),
                "u_g": self.u_g.tolist(),
            }
        )

    @classmethod
    def from_dict(cls, state):
        """Rebuild an aligner from :meth:`to_dict` output."""
        if state.get("kind") != "pif":
            raise ValueError("state is not a position-integration snapshot")
        out = cls(state["v0"], state["p0"], state["T"], state["solve_every"])
        out._restore_base(state)
        for name in ("alpha", "beta", "s_body", "s_nav_v", "s_nav_g", "u_r", "u_v", "u_g"):
            setattr(out, name, np.array(state[name], dtype=float))
        return out


ALIGNER_CLASSES = {
    "vif": VelocityIntegrationAligner,
    "pif": PositionIntegrationAligner,
}


def make_aligner(method, v0, p0, T, solve_every=1):
    """Factory keyed by method name ('vif' or 'pif')."""
    try:
        cls = ALIGNER_CLASSES[method]
    except KeyError:
        raise ValueError(f"unknown alignment method {method!r}") from None
    return cls(v0, p0, T, solve_every=solve_every)
