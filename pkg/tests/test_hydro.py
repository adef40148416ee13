import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfl.grid import Field2D, make_grid
from pfl.hydro import (circulation, circulation_batch, detect_vortices, madelung,
                       wrap_phase)
from pfl.medium import MediumParams
from pfl.sources import gaussian_beam, imprint_vortex, plane_wave

from conftest import WAVELENGTH


class TestMadelung:
    def test_phase_ramp_velocity(self, small_grid):
        k_x = 5 * small_grid.dk_x
        xx, _ = small_grid.meshgrid()
        f = Field2D(grid=small_grid, values=np.exp(1j * k_x * xx))
        d = madelung(f)
        assert np.allclose(d.velocity_x, k_x, rtol=1e-10)
        assert np.allclose(d.velocity_y, 0.0, atol=1e-10 * k_x)

    def test_real_field_zero_velocity(self, small_grid):
        f = gaussian_beam(small_grid, 1e-4, 1.0, 1.0, WAVELENGTH)
        d = madelung(f)
        scale = np.max(np.abs(d.velocity_x)) + np.max(np.abs(d.velocity_y))
        assert scale < 1e-12 / small_grid.dx

    def test_vortex_circulation(self, small_grid):
        base = plane_wave(small_grid, 10.0, 1.0, WAVELENGTH)
        v = imprint_vortex(base, +1, center=(0.5e-5, 0.5e-5))
        circ = circulation(v, 8, 8, 56, 56)
        assert circ == pytest.approx(2 * np.pi, abs=1e-9)

    def test_density_floor_masking(self, small_grid):
        f = gaussian_beam(small_grid, 8e-5, 1.0, 1.0, WAVELENGTH)
        d = madelung(f, density_floor=1e-3)
        assert not d.mask.all()
        assert np.all(d.velocity_x[~d.mask] == 0.0)

    def test_round_trip_density_and_velocity(self, small_grid):
        # construct a field from (rho, phi), decompose, recover both
        xx, yy = small_grid.meshgrid()
        rho = 1.0 + 0.3 * np.cos(2 * np.pi * xx / small_grid.extent_x)
        k_x = 3 * small_grid.dk_x
        phi = k_x * xx
        f = Field2D(grid=small_grid, values=np.sqrt(rho) * np.exp(1j * phi))
        d = madelung(f)
        assert np.allclose(d.density, rho, rtol=1e-12)
        assert np.allclose(d.velocity_x[d.mask], k_x, rtol=1e-6)

    def test_zero_field_rejected(self, small_grid):
        f = Field2D(grid=small_grid, values=np.zeros((64, 64), dtype=complex))
        with pytest.raises(ValueError):
            madelung(f)

    def test_scales_filled_with_medium(self, small_grid):
        med = MediumParams(wavelength=WAVELENGTH, n0=1.0, chi3=-1e-20, length=0.01)
        f = plane_wave(small_grid, 100.0, 1.0, WAVELENGTH)
        d = madelung(f, medium=med)
        assert d.xi is not None and d.z_nl is not None
        assert d.sound_speed == pytest.approx(d.xi / d.z_nl, rel=1e-12)


class TestDetectVortices:
    def test_single_vortex_position(self, small_grid):
        base = plane_wave(small_grid, 10.0, 1.0, WAVELENGTH)
        center = (7.5e-5, -4.5e-5)
        found = detect_vortices(imprint_vortex(base, +1, center=center))
        assert len(found) == 1
        assert found.charges[0] == 1
        assert abs(found.positions[0, 0] - center[0]) <= small_grid.dx
        assert abs(found.positions[0, 1] - center[1]) <= small_grid.dy

    def test_vortex_antivortex_pair(self, small_grid):
        base = plane_wave(small_grid, 10.0, 1.0, WAVELENGTH)
        f = imprint_vortex(base, +1, center=(-5.5e-5, 0.5e-5))
        f = imprint_vortex(f, -1, center=(4.5e-5, 0.5e-5))
        found = detect_vortices(f)
        assert len(found) == 2
        assert found.total_winding == 0
        assert sorted(found.charges) == [-1, 1]

    def test_smooth_field_empty(self, small_grid):
        f = gaussian_beam(small_grid, 1e-4, 1.0, 1.0, WAVELENGTH)
        assert len(detect_vortices(f)) == 0

    @pytest.mark.parametrize("charge", [-3, -2, -1, 1, 2, 3])
    def test_total_winding_exact(self, charge):
        grid = make_grid(128, 128, 1e-5)
        base = gaussian_beam(grid, 2.4e-4, 1.0, 1.0, WAVELENGTH)
        f = imprint_vortex(base, charge, center=(0.5e-5, 0.5e-5), core_width=3e-5)
        found = detect_vortices(f)
        assert found.total_winding == charge
        assert np.all(np.abs(found.charges) == 1)

    def test_invariance_under_global_phase_and_scale(self, small_grid):
        base = plane_wave(small_grid, 10.0, 1.0, WAVELENGTH)
        f = imprint_vortex(base, +1, center=(2.5e-5, -1.5e-5))
        ref = detect_vortices(f)
        rotated = f.with_values(2.7 * np.exp(1j * 1.23) * f.values)
        found = detect_vortices(rotated)
        assert found.total_winding == ref.total_winding
        assert np.array_equal(found.positions, ref.positions)


class TestCirculation:
    def test_quantization_random_loops(self):
        grid = make_grid(128, 128, 1e-5)
        base = plane_wave(grid, 10.0, 1.0, WAVELENGTH)
        f = imprint_vortex(base, +1, center=(10.5e-5, 0.5e-5))
        f = imprint_vortex(f, -1, center=(-10.5e-5, 0.5e-5))
        rng = np.random.default_rng(12)
        n_loops = 10_000
        ix0 = rng.integers(1, 100, n_loops)
        iy0 = rng.integers(1, 100, n_loops)
        ix1 = ix0 + rng.integers(4, 26, n_loops)
        iy1 = iy0 + rng.integers(4, 26, n_loops)
        circs = circulation_batch(f, np.column_stack([ix0, iy0, ix1, iy1]))
        windings = circs / (2 * np.pi)
        assert np.max(np.abs(windings - np.rint(windings))) < 1e-6

    def test_batch_matches_single(self, small_grid):
        base = plane_wave(small_grid, 10.0, 1.0, WAVELENGTH)
        f = imprint_vortex(base, +2, center=(0.5e-5, 0.5e-5))
        loops = np.array([[4, 6, 50, 40], [10, 10, 20, 20]])
        batch = circulation_batch(f, loops)
        singles = [circulation(f, *loop) for loop in loops]
        assert np.allclose(batch, singles, atol=1e-12)

    def test_enclosed_charge(self, small_grid):
        base = plane_wave(small_grid, 10.0, 1.0, WAVELENGTH)
        f = imprint_vortex(base, +1, center=(0.5e-5, 0.5e-5))
        enclosing = circulation(f, 16, 16, 48, 48)
        missing = circulation(f, 40, 40, 60, 60)
        assert enclosing / (2 * np.pi) == pytest.approx(1.0, abs=1e-9)
        assert missing / (2 * np.pi) == pytest.approx(0.0, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_circulation_always_quantized(seed):
    # the wrapped-phase line integral around a closed loop is an exact
    # multiple of 2 pi for any field whatsoever
    rng = np.random.default_rng(seed)
    g = make_grid(16, 16, 1.0)
    values = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    f = Field2D(grid=g, values=values)
    c = circulation(f, 1, 2, 13, 11)
    assert abs(c / (2 * np.pi) - round(c / (2 * np.pi))) < 1e-9


@settings(max_examples=25, deadline=None)
@given(delta=st.floats(-50.0, 50.0))
def test_wrap_phase_range(delta):
    w = float(wrap_phase(np.array([delta]))[0])
    assert -np.pi <= w <= np.pi
    assert np.isclose(np.exp(1j * w), np.exp(1j * delta), atol=1e-9)
