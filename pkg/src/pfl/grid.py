"""Uniform periodic transverse grids and complex scalar fields on them.

Conventions used throughout the package:

* arrays are indexed ``[iy, ix]`` (shape ``(ny, nx)``), x varies along the
  last axis,
* real-space coordinates are centered on the grid, ``x[i] = (i - nx/2) * dx``,
* spectral transforms are unitary (``norm="ortho"``), so Parseval holds to
  machine precision and unitary propagation steps conserve power exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

UNIT_TAGS = ("physical", "dimensionless")


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid in the transverse (x, y) plane."""

    nx: int
    ny: int
    dx: float
    dy: float

    @property
    def extent_x(self) -> float:
        return self.nx * self.dx

    @property
    def extent_y(self) -> float:
        return self.ny * self.dy

    @property
    def dk_x(self) -> float:
        """Reciprocal spacing 2*pi / (nx*dx)."""
        return 2.0 * np.pi / (self.nx * self.dx)

    @property
    def dk_y(self) -> float:
        return 2.0 * np.pi / (self.ny * self.dy)

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    def x_coords(self) -> np.ndarray:
        return (np.arange(self.nx) - self.nx // 2) * self.dx

    def y_coords(self) -> np.ndarray:
        return (np.arange(self.ny) - self.ny // 2) * self.dy

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """(xx, yy) coordinate arrays of shape (ny, nx)."""
        return np.meshgrid(self.x_coords(), self.y_coords())

    def kx(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.nx, d=self.dx)

    def ky(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.ny, d=self.dy)

    def k_meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.kx(), self.ky())

    def gradient_k_meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """Wavenumbers for spectral first derivatives.

        The unpaired Nyquist mode of an even grid is zeroed: its sampled
        cosine has zero derivative at the nodes, and keeping it would leak
        a spurious imaginary component into derivatives of real fields.
        """
        kx = self.kx()
        ky = self.ky()
        kx[self.nx // 2] = 0.0
        ky[self.ny // 2] = 0.0
        return np.meshgrid(kx, ky)

    def k_squared(self) -> np.ndarray:
        kxx, kyy = self.k_meshgrid()
        return kxx**2 + kyy**2

    @property
    def k_nyquist_x(self) -> float:
        return np.pi / self.dx

    @property
    def k_nyquist_y(self) -> float:
        return np.pi / self.dy


def make_grid(nx: int, ny: int, dx: float, dy: float | None = None) -> Grid:
    """Build a validated Grid. Counts must be even and at least 8."""
    if dy is None:
        dy = dx
    for name, n in (("nx", nx), ("ny", ny)):
        if int(n) != n or n < 8:
            raise ValueError(f"{name} must be an integer >= 8, got {n}")
        if n % 2 != 0:
            raise ValueError(f"{name} must be even, got {n}")
    if dx <= 0 or dy <= 0:
        raise ValueError(f"grid spacings must be positive, got dx={dx}, dy={dy}")
    return Grid(nx=int(nx), ny=int(ny), dx=float(dx), dy=float(dy))


@dataclass
class Field2D:
    """Complex scalar field sampled on a Grid.

    ``values`` has shape (ny, nx). ``unit_tag`` is "physical" (V/m) or
    "dimensionless" (after rescaling by the output density).
    """

    grid: Grid
    values: np.ndarray
    unit_tag: str = "physical"

    def __post_init__(self):
        if self.unit_tag not in UNIT_TAGS:
            raise ValueError(f"unit_tag must be one of {UNIT_TAGS}, got {self.unit_tag!r}")
        values = np.asarray(self.values, dtype=np.complex128)
        if values.shape != (self.grid.ny, self.grid.nx):
            raise ValueError(
                f"values shape {values.shape} does not match grid "
                f"({self.grid.ny}, {self.grid.nx})"
            )
        self.values = values

    def copy(self) -> "Field2D":
        return replace(self, values=self.values.copy())

    def with_values(self, values: np.ndarray) -> "Field2D":
        """New field on the same grid with the same unit tag."""
        return Field2D(grid=self.grid, values=np.asarray(values, dtype=np.complex128),
                       unit_tag=self.unit_tag)

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def phase(self) -> np.ndarray:
        return np.angle(self.values)

    def power(self) -> float:
        """Discrete power integral sum(|E|^2) * dx * dy."""
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.cell_area)

    def spectrum(self) -> np.ndarray:
        return fft2(self.values)

    def validate_finite(self) -> "Field2D":
        if not np.all(np.isfinite(self.values)):
            raise FloatingPointError("field contains non-finite samples")
        return self


def fft2(values: np.ndarray) -> np.ndarray:
    """Unitary forward transform."""
    return np.fft.fft2(values, norm="ortho")


def ifft2(values: np.ndarray) -> np.ndarray:
    """Unitary inverse transform."""
    return np.fft.ifft2(values, norm="ortho")


def spectral_power(spectrum: np.ndarray, grid: Grid) -> float:
    """Power computed in spectral space; equals Field2D.power under the
    unitary convention."""
    return float(np.sum(np.abs(spectrum) ** 2) * grid.cell_area)


def zero_field(grid: Grid, unit_tag: str = "physical") -> Field2D:
    return Field2D(grid=grid, values=np.zeros((grid.ny, grid.nx), dtype=np.complex128),
                   unit_tag=unit_tag)
