import math

import numpy as np
import pytest

from ifalign import earth
from ifalign.errors import PolarSingularity

D2R = math.pi / 180.0


class TestRadii:
    def test_equator_transverse_equals_semi_major(self):
        r_n, r_e = earth.radii_of_curvature(0.0)
        assert r_e == pytest.approx(6378137.0, abs=1e-6)

    def test_equator_meridian(self):
        # a (1 - e^2), evaluated with the WGS-84 defining constants
        r_n, _ = earth.radii_of_curvature(0.0)
        assert r_n == pytest.approx(6335439.3272928195, abs=1e-6)

    def test_polar_radii_equal(self):
        r_n, r_e = earth.radii_of_curvature(math.pi / 2.0)
        expected = 6378137.0 / math.sqrt(1.0 - earth.ECCENTRICITY_SQ)
        assert r_n == pytest.approx(expected, rel=1e-12)
        assert r_e == pytest.approx(expected, rel=1e-12)

    def test_broadcasting(self):
        lats = np.linspace(-1.4, 1.4, 7)
        r_n, r_e = earth.radii_of_curvature(lats)
        assert r_n.shape == lats.shape
        assert np.all(r_e >= r_n)


class TestCurvatureMatrix:
    def test_pure_climb_changes_only_height(self):
        rc = earth.curvature_matrix(np.array([0.0, 0.0, 0.0]))
        pdot = rc @ np.array([0.0, 1.0, 0.0])
        np.testing.assert_allclose(pdot, [0.0, 0.0, 1.0])

    def test_northward_motion_latitude_rate(self):
        p = np.array([0.0, 0.0, 0.0])
        r_n, _ = earth.radii_of_curvature(0.0)
        pdot = earth.curvature_matrix(p) @ np.array([r_n, 0.0, 0.0])
        assert pdot[1] == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("lat_deg", [-80.0, -45.0, 0.0, 30.0, 60.0, 80.0])
    def test_inverse_pair(self, lat_deg):
        p = np.array([0.3, lat_deg * D2R, 1200.0])
        prod = earth.curvature_matrix(p) @ earth.curvature_matrix_inv(p)
        np.testing.assert_allclose(prod, np.eye(3), atol=1e-12)

    def test_polar_rejection(self):
        with pytest.raises(PolarSingularity):
            earth.curvature_matrix(np.array([0.0, math.pi / 2.0, 0.0]))


class TestEarthRate:
    def test_equator(self):
        np.testing.assert_allclose(
            earth.earth_rate_n(0.0), [earth.EARTH_RATE, 0.0, 0.0], atol=1e-20
        )

    def test_pole(self):
        np.testing.assert_allclose(
            earth.earth_rate_n(math.pi / 2.0),
            [0.0, earth.EARTH_RATE, 0.0],
            atol=1e-20,
        )

    def test_30deg(self):
        w = earth.earth_rate_n(30.0 * D2R)
        np.testing.assert_allclose(
            w,
            [earth.EARTH_RATE * math.sqrt(3.0) / 2.0, earth.EARTH_RATE / 2.0, 0.0],
            rtol=1e-15,
        )


class TestTransportRate:
    def test_zero_velocity(self):
        p = np.array([0.1, 0.5, 100.0])
        np.testing.assert_allclose(
            earth.transport_rate_n(np.zeros(3), p), np.zeros(3), atol=1e-20
        )

    def test_vertical_motion_no_rotation(self):
        p = np.array([0.1, 0.5, 100.0])
        w = earth.transport_rate_n(np.array([0.0, 50.0, 0.0]), p)
        np.testing.assert_allclose(w, np.zeros(3), atol=1e-20)

    def test_pure_north_motion(self):
        p = np.array([0.0, 0.6, 0.0])
        v = np.array([120.0, 0.0, 0.0])
        r_n, _ = earth.radii_of_curvature(0.6)
        np.testing.assert_allclose(
            earth.transport_rate_n(v, p), [0.0, 0.0, -120.0 / r_n], rtol=1e-12
        )

    @pytest.mark.parametrize("lat_deg", [-60.0, -30.0, 0.0, 30.0, 60.0])
    @pytest.mark.parametrize(
        "v", [(300.0, 0.0, 0.0), (0.0, 0.0, 300.0), (150.0, -30.0, 200.0)]
    )
    def test_matches_finite_difference_of_nav_frame(self, lat_deg, v):
        # Advance the position by pdot = Rc v over +-dt and difference the
        # analytic nav-to-ECEF DCM: skew(w_en) = C^T dC/dt.
        p = np.array([0.4, lat_deg * D2R, 500.0])
        v = np.array(v)
        dt = 1e-3
        pdot = earth.curvature_matrix(p) @ v
        c_mid = earth.nav_to_ecef_dcm(p)
        c_plus = earth.nav_to_ecef_dcm(p + pdot * dt)
        c_minus = earth.nav_to_ecef_dcm(p - pdot * dt)
        skew_w = c_mid.T @ (c_plus - c_minus) / (2.0 * dt)
        w_fd = np.array([skew_w[2, 1], skew_w[0, 2], skew_w[1, 0]])
        w = earth.transport_rate_n(v, p)
        np.testing.assert_allclose(w, w_fd, atol=1e-8)

    def test_inertial_rate_is_sum(self):
        p = np.array([0.2, 0.7, 300.0])
        v = np.array([100.0, 5.0, -50.0])
        total = earth.inertial_rate_n(v, p)
        np.testing.assert_allclose(
            total, earth.earth_rate_n(p[1]) + earth.transport_rate_n(v, p)
        )

    def test_inertial_rate_norm_bound(self):
        p = np.array([0.2, 0.7, 300.0])
        v = np.array([100.0, 5.0, -50.0])
        r_n, r_e = earth.radii_of_curvature(p[1])
        bound = (
            earth.EARTH_RATE
            + np.linalg.norm(v) / (r_n + p[2])
            + abs(v[2] * math.tan(p[1])) / (r_e + p[2])
        )
        assert np.linalg.norm(earth.inertial_rate_n(v, p)) <= bound


class TestGravity:
    def test_equatorial_value(self):
        g = earth.gravity_magnitude(0.0, 0.0)
        assert g == pytest.approx(9.7803253359, abs=1e-10)

    def test_direction_is_minus_up(self):
        g_vec = earth.gravity_n(np.array([0.3, 0.8, 2000.0]))
        assert g_vec[0] == 0.0 and g_vec[2] == 0.0
        assert g_vec[1] < 0.0

    @pytest.mark.parametrize("lat_deg", [-75.0, -10.0, 0.0, 30.0, 89.0])
    def test_free_air_sign(self, lat_deg):
        lat = lat_deg * D2R
        assert earth.gravity_magnitude(lat, 1000.0) < earth.gravity_magnitude(lat, 0.0)

    def test_poleward_increase(self):
        assert earth.gravity_magnitude(math.pi / 2.0) > earth.gravity_magnitude(0.0)


class TestAidingKinematics:
    @pytest.mark.parametrize("lat_deg", [-55.0, 0.0, 30.0, 72.0])
    def test_matches_reference_functions(self, lat_deg):
        p = np.array([-0.8, lat_deg * D2R, 850.0])
        v = np.array([123.0, -4.0, 67.0])
        omega_ie, omega_in, g_n = earth.aiding_kinematics(v, p)
        np.testing.assert_allclose(omega_ie, earth.earth_rate_n(p[1]), rtol=1e-15)
        np.testing.assert_allclose(omega_in, earth.inertial_rate_n(v, p), rtol=1e-12)
        np.testing.assert_allclose(g_n, earth.gravity_n(p), rtol=1e-15)

    def test_polar_rejection(self):
        with pytest.raises(PolarSingularity):
            earth.aiding_kinematics(np.zeros(3), np.array([0.0, math.pi / 2, 0.0]))


class TestWrapLongitude:
    @pytest.mark.parametrize(
        "lon, expected",
        [(0.0, 0.0), (math.pi, math.pi), (-math.pi, math.pi),
         (1.5 * math.pi, -0.5 * math.pi), (2.0 * math.pi, 0.0)],
    )
    def test_values(self, lon, expected):
        assert earth.wrap_longitude(lon) == pytest.approx(expected, abs=1e-12)
