import numpy as np
import pytest

from pfl.dispersion import (ProbeSpec, bogoliubov_group_velocity, bogoliubov_omega,
                            bogoliubov_sound_speed, dispersion_from_group_velocity,
                            measure_group_velocity, packet_displacement,
                            demodulated_envelope)
from pfl.medium import MediumParams
from pfl.solver import StepPlan

from conftest import WAVELENGTH, defocusing_setup

K0 = 2 * np.pi / WAVELENGTH


class TestBogoliubovForms:
    def test_omega_asymptotics(self):
        dn = 1e-4
        k_low = np.array([1.0])
        c_s = bogoliubov_sound_speed(1.0, dn)
        assert bogoliubov_omega(k_low, K0, 1.0, dn)[0] == pytest.approx(
            c_s * k_low[0], rel=1e-6)
        k_high = np.array([1e7])
        assert bogoliubov_omega(k_high, K0, 1.0, dn)[0] == pytest.approx(
            k_high[0]**2 / (2 * K0), rel=1e-2)

    def test_group_velocity_limits(self):
        dn = 1e-4
        c_s = bogoliubov_sound_speed(1.0, dn)
        assert bogoliubov_group_velocity(np.array([0.0]), K0, 1.0, dn)[0] == \
            pytest.approx(c_s)
        k = np.array([1e3])
        assert bogoliubov_group_velocity(k, K0, 1.0, dn)[0] == \
            pytest.approx(c_s, rel=1e-3)

    def test_sound_speed_vanishes_without_interactions(self):
        assert bogoliubov_sound_speed(1.0, 0.0) == 0.0
        assert bogoliubov_sound_speed(1.0, 1e-12) < 1e-5


class TestDispersionIntegration:
    def test_constant_vg_gives_exact_sonic_line(self):
        med = MediumParams(wavelength=WAVELENGTH, n0=1.0, chi3=-1e-20, length=0.01)
        c = 3.3e-3
        k = np.linspace(1e4, 1e5, 8)
        curve = dispersion_from_group_velocity([(kk, c) for kk in k], med)
        assert np.allclose(curve.omega, c * k, rtol=1e-12)

    def test_linear_vg_gives_exact_parabola(self):
        med = MediumParams(wavelength=WAVELENGTH, n0=1.0, chi3=-1e-20, length=0.01)
        k = np.linspace(1e4, 1e5, 8)
        samples = [(kk, kk / (K0 * 1.0)) for kk in k]
        curve = dispersion_from_group_velocity(samples, med)
        assert np.allclose(curve.omega, k**2 / (2 * K0), rtol=1e-12)

    def test_closed_loop_bogoliubov_fit(self):
        # synthesize v_g from the model, integrate, fit: c_s within 1%
        dn_true = 7.3e-5
        med = MediumParams(wavelength=WAVELENGTH, n0=1.0, chi3=-1e-20, length=0.01)
        xi = 1.0 / np.sqrt(K0**2 * dn_true)  # 1/(k0 sqrt(n0 dn))
        k = np.linspace(0.05, 3.0, 20) / xi
        v = bogoliubov_group_velocity(k, K0, 1.0, dn_true)
        curve = dispersion_from_group_velocity(list(zip(k, v)), med)
        assert curve.c_s == pytest.approx(bogoliubov_sound_speed(1.0, dn_true),
                                          rel=0.01)
        assert curve.xi_fit == pytest.approx(xi, rel=0.02)

    def test_rejects_sparse_or_unsorted(self):
        med = MediumParams(wavelength=WAVELENGTH, n0=1.0, chi3=-1e-20, length=0.01)
        with pytest.raises(ValueError, match="at least 5"):
            dispersion_from_group_velocity([(1.0, 1.0)] * 3, med)
        bad = [(1.0, 1.0), (2.0, 1.0), (2.0, 1.0), (3.0, 1.0), (4.0, 1.0)]
        with pytest.raises(ValueError, match="strictly increasing"):
            dispersion_from_group_velocity(bad, med)


class TestEnvelopeTools:
    def test_demodulated_envelope_recovers_gaussian(self):
        x = (np.arange(256) - 128) * 1.0
        k = 0.5
        env_true = np.exp(-((x - 20.0) ** 2) / (2 * 15.0**2))
        profile = env_true * np.cos(k * x + 0.3)
        env = demodulated_envelope(profile, x, k, 15.0)
        peak = x[np.argmax(env)]
        assert abs(peak - 20.0) <= 2.0

    def test_packet_displacement_pair(self):
        x = (np.arange(256) - 128) * 1.0
        bump = lambda c: np.exp(-((x - c) ** 2) / (2 * 8.0**2))
        env = bump(+30.0) + 0.8 * bump(-30.0)
        d, paired = packet_displacement(env, x, 256.0)
        assert paired
        assert d == pytest.approx(30.0, abs=1.0)

    def test_packet_displacement_single(self):
        x = (np.arange(256) - 128) * 1.0
        env = np.exp(-((x - 12.0) ** 2) / (2 * 8.0**2))
        d, paired = packet_displacement(env, x, 256.0)
        assert not paired
        assert d == pytest.approx(12.0, abs=0.5)


class TestMeasurement:
    def test_free_particle_slope(self):
        # chi3 = 0: v_g = k / (k0 n0) exactly
        grid, medium, background, scales = defocusing_setup(nx=128, dx=5e-6,
                                                            xi_cells=2.0, tau=8.0)
        free = MediumParams(wavelength=WAVELENGTH, n0=1.0, chi3=0.0,
                            length=medium.length)
        k = 10 * grid.dk_x
        plan = StepPlan(n_steps=120, snapshot_every=10)
        probe = ProbeSpec(waist=12e-5, k_perp=k, power_ratio=1e-4)
        m = measure_group_velocity(background, probe, free, plan)
        assert m.v_g == pytest.approx(k / K0, rel=0.02)

    def test_zero_k_symmetric_spreading(self):
        grid, medium, background, scales = defocusing_setup(nx=128, dx=5e-6,
                                                            xi_cells=2.0, tau=8.0)
        plan = StepPlan(n_steps=160, snapshot_every=16)
        probe = ProbeSpec(waist=10 * scales["xi"], k_perp=0.0, power_ratio=1e-4)
        m = measure_group_velocity(background, probe, medium, plan)
        assert abs(m.v_g) < 0.1 * scales["c_s"]

    def test_sonic_point(self):
        grid, medium, background, scales = defocusing_setup(nx=256, dx=5e-6,
                                                            xi_cells=1.5, tau=30.0)
        plan = StepPlan(n_steps=450, snapshot_every=10)
        k = 0.25 / scales["xi"]
        probe = ProbeSpec(waist=15 * scales["xi"], k_perp=k, power_ratio=1e-5)
        m = measure_group_velocity(background, probe, medium, plan)
        vg_true = bogoliubov_group_velocity(np.array([k]), K0, 1.0,
                                            scales["dn_nl"])[0]
        assert m.v_g == pytest.approx(vg_true, rel=0.05)

    def test_requires_snapshots(self):
        grid, medium, background, scales = defocusing_setup(nx=64)
        probe = ProbeSpec(waist=10 * scales["xi"], k_perp=1e4)
        with pytest.raises(ValueError, match="snapshot_every"):
            measure_group_velocity(background, probe, medium, StepPlan(n_steps=10))

    def test_chi3_and_density_enter_through_product(self):
        # doubling chi3 at fixed density and doubling density at fixed chi3
        # give the same sound speed: both enter through |g| rho
        import dataclasses
        grid, medium, background, scales = defocusing_setup(nx=192, dx=5e-6,
                                                            xi_cells=1.8, rho=1.0,
                                                            tau=25.0)
        medium_2chi = dataclasses.replace(medium, chi3=2.0 * medium.chi3)
        background_2rho = background.with_values(np.sqrt(2.0) * background.values)
        xi_half = scales["xi"] / np.sqrt(2.0)  # both cases halve z_nl identically
        plan = StepPlan(n_steps=500, snapshot_every=10)
        probe = ProbeSpec(waist=14 * xi_half, k_perp=0.22 / xi_half,
                          power_ratio=1e-5)
        m_chi = measure_group_velocity(background, probe, medium_2chi, plan)
        m_rho = measure_group_velocity(background_2rho, probe, medium, plan)
        assert m_chi.v_g == pytest.approx(m_rho.v_g, rel=0.03)
