import numpy as np
import pytest

from pfl.grid import fft2, make_grid
from pfl.potentials import build_potential, mirror_x, pt_symmetrize


def test_uniform_zero(small_grid):
    dn = build_potential(small_grid, "uniform", {"value": 0.0})
    assert not np.any(dn)


def test_uniform_complex_value(small_grid):
    dn = build_potential(small_grid, "uniform", {"value": 1e-4 - 2e-5j})
    assert np.all(dn == 1e-4 - 2e-5j)


def test_gaussian_defect_peak_and_width(small_grid):
    dn = build_potential(small_grid, "gaussian_defect",
                         {"amplitude": -3e-4, "width": 8e-5})
    iy, ix = np.unravel_index(np.argmin(dn.real), dn.shape)
    assert small_grid.x_coords()[ix] == 0.0
    assert small_grid.y_coords()[iy] == 0.0
    assert dn.real.min() == pytest.approx(-3e-4)


def test_honeycomb_matches_three_beam_sum(small_grid):
    # oracle: evaluate the interference of three unit plane waves directly
    period = 8e-5
    dn = build_potential(small_grid, "lattice",
                         {"amplitude": 2e-4, "period": period})
    q = 2.0 * np.pi / period
    xx, yy = small_grid.meshgrid()
    total = np.zeros_like(xx, dtype=complex)
    for j in range(3):
        ang = 2.0 * np.pi * j / 3.0
        total += np.exp(1j * q * (np.cos(ang) * xx + np.sin(ang) * yy))
    expected = 2e-4 * np.abs(total) ** 2 / 9.0
    assert np.allclose(dn.real, expected, atol=1e-18)
    assert dn.real.max() == pytest.approx(2e-4, rel=1e-9)


def test_honeycomb_sixfold_spectrum():
    g = make_grid(128, 128, 1e-6)
    period = 16e-6
    dn = build_potential(g, "lattice", {"amplitude": 1.0, "period": period})
    spec = np.abs(fft2(dn - dn.mean())) ** 2
    kxx, kyy = g.k_meshgrid()
    # six difference-vector peaks of magnitude sqrt(3) q, 60 degrees apart
    q_diff = np.sqrt(3.0) * 2.0 * np.pi / period
    peaks = spec > 0.1 * spec.max()
    kk = np.hypot(kxx, kyy)[peaks]
    angles = np.sort(np.degrees(np.arctan2(kyy, kxx)[peaks]))
    assert len(kk) == 6
    assert np.allclose(kk, q_diff, rtol=0.05)
    assert np.allclose(np.diff(angles), 60.0, atol=2.0)


def test_lattice_unresolved_period(small_grid):
    with pytest.raises(ValueError, match="unresolved"):
        build_potential(small_grid, "lattice", {"amplitude": 1.0, "period": 2.5e-5})


def test_custom_samples_roundtrip(small_grid):
    samples = np.full((64, 64), 0.5 + 0.1j)
    dn = build_potential(small_grid, "custom_samples", {"samples": samples})
    assert np.array_equal(dn, samples)
    with pytest.raises(ValueError):
        build_potential(small_grid, "custom_samples",
                        {"samples": np.zeros((8, 8))})


def test_unknown_kind(small_grid):
    with pytest.raises(ValueError, match="unknown potential kind"):
        build_potential(small_grid, "moat", {})


def test_pt_symmetry_exact(small_grid):
    # an off-center complex defect is not PT symmetric; the projection is,
    # exactly: dn(-x, y) == conj(dn(x, y)) sample for sample
    dn = build_potential(small_grid, "gaussian_defect",
                         {"amplitude": 1e-4 + 5e-5j, "width": 6e-5,
                          "center": (8e-5, 0.0), "pt_symmetrize": True})
    assert np.array_equal(mirror_x(dn), np.conj(dn))
    assert np.any(dn.imag)  # the loss/gain profile survived the projection


def test_pt_symmetrize_is_projection(small_grid):
    rng = np.random.default_rng(3)
    dn = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
    once = pt_symmetrize(dn)
    twice = pt_symmetrize(once)
    assert np.allclose(once, twice, atol=1e-15)
    assert np.allclose(mirror_x(once), np.conj(once), atol=1e-15)
