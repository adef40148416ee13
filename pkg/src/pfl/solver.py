"""Symmetric split-step spectral integrator for the paraxial envelope.

The propagation equation integrated here is

    i dE/dz = [ -1/(2 n0 k0) Lap_perp - k0 dn(r,z)
                - k0/(2 n0) chi3 |E|^2 - i alpha/2 ] E

with dn complex (Im dn > 0 is loss) and an optional saturable nonlinearity
chi_eff = chi3 / (1 + I/I_sat). Each step is a Strang composition: half a
kinetic step in spectral space, a full pointwise nonlinear step, half a
kinetic step. Adjacent half steps are merged between snapshots, so the
inner loop costs one forward and one inverse transform per step.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .grid import Field2D, fft2, ifft2
from .medium import MediumParams, density_to_intensity

# Fraction of total spectral power a mode must carry to count as occupied
# when estimating the kinetic phase rate.
OCCUPIED_MODE_FLOOR = 1e-9

WARN_PHASE_PER_STEP = 0.5
ABORT_PHASE_PER_STEP = np.pi


@dataclass
class StepPlan:
    """Stepping schedule for one propagation.

    dz defaults to length / n_steps; when given explicitly it must satisfy
    n_steps * dz = length to 1e-12 relative. snapshot_every = 0 disables
    intermediate snapshots.
    """

    n_steps: int
    dz: float | None = None
    scheme: str = "symmetric_strang"
    snapshot_every: int = 0

    def __post_init__(self):
        if self.n_steps < 0:
            raise ValueError(f"n_steps must be non-negative, got {self.n_steps}")
        if self.dz is not None and self.dz <= 0:
            raise ValueError(f"dz must be positive, got {self.dz}")
        if self.scheme != "symmetric_strang":
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.snapshot_every < 0:
            raise ValueError("snapshot_every must be non-negative")

    def resolve_dz(self, length: float) -> float:
        if self.n_steps == 0:
            return 0.0
        dz = length / self.n_steps if self.dz is None else self.dz
        if abs(self.n_steps * dz - length) > 1e-12 * max(abs(length), 1.0):
            raise ValueError(
                f"n_steps * dz = {self.n_steps * dz!r} does not match the "
                f"medium length {length!r}"
            )
        return dz


@dataclass
class PropagationRecord:
    """Final field plus per-run diagnostics."""

    final_field: Field2D
    z_final: float
    n_steps: int
    dz: float
    power_trace: np.ndarray            # columns (z, power), one row per step boundary
    snapshots: list[tuple[float, Field2D]] = field(default_factory=list)
    max_phase_per_step: float = 0.0
    wall_time: float = 0.0

    def snapshot_fields(self) -> list[Field2D]:
        return [f for _, f in self.snapshots]


def kinetic_half_step(field_in: Field2D, dz: float, k0: float, n0: float) -> Field2D:
    """Apply half a kinetic step: exp(-i |k|^2 dz / (4 n0 k0)) in k-space."""
    spectrum = fft2(field_in.values)
    spectrum *= kinetic_multiplier(field_in.grid.k_squared(), dz / 2.0, k0, n0)
    return field_in.with_values(ifft2(spectrum))


def kinetic_multiplier(k_squared: np.ndarray, dz: float, k0: float, n0: float) -> np.ndarray:
    """Spectral factor for a kinetic step of length dz."""
    return np.exp(-1j * k_squared * dz / (2.0 * n0 * k0))


def nonlinear_step(field_in: Field2D, dz: float, medium: MediumParams,
                   z: float = 0.0) -> Field2D:
    """Full pointwise step: Kerr phase, potential phase, loss and gain.

    |E|^2 is frozen at step entry. The applied multiplier is
    exp(i dz (k0 Re dn + k0/(2 n0) chi_eff |E|^2)) *
    exp(-dz (alpha/2 + k0 Im dn)).
    """
    values, _ = _nonlinear_apply(field_in.values, dz, medium, z)
    out = field_in.with_values(values)
    out.validate_finite()
    return out


def _nonlinear_apply(values: np.ndarray, dz: float, medium: MediumParams,
                     z: float) -> tuple[np.ndarray, float]:
    k0 = medium.k0
    density = np.abs(values) ** 2
    if medium.i_sat is None:
        chi_eff = medium.chi3
    else:
        chi_eff = medium.chi3 / (1.0 + density_to_intensity(density, medium.n0) / medium.i_sat)
    phase = dz * (k0 / (2.0 * medium.n0)) * chi_eff * density
    decay = np.full_like(density, 0.5 * medium.alpha * dz)
    dn = medium.potential_at(z, values.shape)
    if dn is not None:
        phase = phase + dz * k0 * dn.real
        decay = decay + dz * k0 * dn.imag
    max_phase = float(np.max(np.abs(phase))) if phase.size else 0.0
    gain = -float(np.min(decay))
    if gain > 0 and np.exp(2.0 * gain) > 10.0:
        warnings.warn(
            f"gain profile would grow power by more than 10x in one step "
            f"(amplitude factor {np.exp(gain):.3g})",
            stacklevel=3,
        )
    out = values * np.exp(1j * phase - decay)
    return out, max_phase


def occupied_kinetic_rate(field_in: Field2D, k0: float, n0: float) -> float:
    """Largest kinetic phase rate |k|^2 / (2 n0 k0) over occupied modes.

    A mode counts as occupied when it carries more than OCCUPIED_MODE_FLOOR
    of the total spectral power; this keeps the step-resolution guard tied
    to the field rather than to the grid Nyquist.
    """
    spectrum_power = np.abs(fft2(field_in.values)) ** 2
    total = float(np.sum(spectrum_power))
    if total == 0.0:
        return 0.0
    occupied = spectrum_power > OCCUPIED_MODE_FLOOR * total
    k2_max = float(np.max(field_in.grid.k_squared()[occupied]))
    return k2_max / (2.0 * n0 * k0)


def propagate(field_in: Field2D, medium: MediumParams, plan: StepPlan) -> PropagationRecord:
    """Propagate through the medium with symmetric Strang splitting.

    Snapshots are recorded every plan.snapshot_every steps (and at z = L).
    The power trace has one row per step boundary, computed in spectral
    space where it costs nothing extra. Raises FloatingPointError on
    non-finite samples and RuntimeError when the per-step phase exceeds
    ABORT_PHASE_PER_STEP.
    """
    field_in.validate_finite()
    length = medium.length
    n_steps = plan.n_steps
    if n_steps == 0:
        out = field_in.copy()
        trace = np.array([[0.0, out.power()]])
        return PropagationRecord(final_field=out, z_final=0.0, n_steps=0, dz=0.0,
                                 power_trace=trace)
    dz = plan.resolve_dz(length)
    grid = field_in.grid
    k0, n0 = medium.k0, medium.n0

    kinetic_rate = occupied_kinetic_rate(field_in, k0, n0)
    nl_rate = _nonlinear_rate(field_in, medium)
    fastest = dz * max(kinetic_rate, nl_rate)
    if fastest >= WARN_PHASE_PER_STEP:
        warnings.warn(
            f"step size dz={dz:.3g} gives {fastest:.2f} rad of phase per step "
            f"on occupied modes; results may be under-resolved",
            stacklevel=2,
        )
    if fastest > ABORT_PHASE_PER_STEP:
        raise RuntimeError(
            f"step size dz={dz:.3g} gives {fastest:.2f} rad of phase per step "
            f"(> pi); refine the stepping plan"
        )

    k2 = grid.k_squared()
    half_kick = kinetic_multiplier(k2, dz / 2.0, k0, n0)
    full_kick = kinetic_multiplier(k2, dz, k0, n0)
    cell_area = grid.cell_area

    t0 = time.perf_counter()
    values = field_in.values.copy()
    power_trace = np.empty((n_steps + 1, 2))
    power_trace[0] = (0.0, float(np.sum(np.abs(values) ** 2) * cell_area))
    snapshots: list[tuple[float, Field2D]] = []
    max_phase = dz * kinetic_rate

    every = plan.snapshot_every
    pending = None  # spectrum carrying this step's leading half kick, if merged
    for step in range(n_steps):
        z_mid = (step + 0.5) * dz
        if pending is None:
            spectrum = fft2(values)
            spectrum *= half_kick
        else:
            spectrum = pending
            pending = None
        values = ifft2(spectrum)
        values, step_phase = _nonlinear_apply(values, dz, medium, z_mid)
        max_phase = max(max_phase, step_phase + dz * kinetic_rate)
        if step_phase > ABORT_PHASE_PER_STEP:
            raise RuntimeError(
                f"nonlinear phase per step reached {step_phase:.2f} rad (> pi) "
                f"at z = {z_mid:.6g}; refine the stepping plan"
            )
        z_next = (step + 1) * dz
        boundary = (every and (step + 1) % every == 0) or step == n_steps - 1
        if boundary:
            spectrum = fft2(values)
            spectrum *= half_kick
            values = ifft2(spectrum)
            power = float(np.sum(np.abs(values) ** 2) * cell_area)
            if every and (step + 1) % every == 0 and step != n_steps - 1:
                snapshots.append((z_next, Field2D(grid=grid, values=values.copy(),
                                                  unit_tag=field_in.unit_tag)))
        else:
            # merge this step's trailing half kick with the next one's leading half
            pending = fft2(values)
            power = float(np.sum(np.abs(pending) ** 2) * cell_area)
            pending *= full_kick
        power_trace[step + 1] = (z_next, power)
        if not np.isfinite(power):
            raise FloatingPointError(
                f"non-finite power at z = {z_next:.6g}; propagation aborted"
            )

    final = Field2D(grid=grid, values=values, unit_tag=field_in.unit_tag)
    final.validate_finite()
    if every:
        snapshots.append((length, final.copy()))
    return PropagationRecord(
        final_field=final,
        z_final=length,
        n_steps=n_steps,
        dz=dz,
        power_trace=power_trace,
        snapshots=snapshots,
        max_phase_per_step=max_phase,
        wall_time=time.perf_counter() - t0,
    )


def _nonlinear_rate(field_in: Field2D, medium: MediumParams) -> float:
    density_max = float(np.max(np.abs(field_in.values) ** 2))
    rate = abs(medium.g) * density_max
    dn = medium.potential_at(0.0, field_in.values.shape)
    if dn is not None:
        rate += medium.k0 * float(np.max(np.abs(dn.real)))
    return rate


@dataclass
class RescaledField:
    """Dimensionless form of an output field with its fluid scales."""

    psi: Field2D
    tau: float
    xi: float
    z_nl: float
    density: float


def rescale_dimensionless(field_in: Field2D, medium: MediumParams,
                          density: float | None = None) -> RescaledField:
    """Normalize by the output density and return the fluid scales.

    density defaults to the spatial mean of |E|^2 on the grid (appropriate
    for quasi-homogeneous fluids). The returned scales are
    z_nl = 1 / (|g| rho), xi = sqrt(z_nl / (n0 k0)), tau = L / z_nl.
    """
    if medium.chi3 == 0.0:
        raise ValueError("rescaling requires a nonzero chi3")
    if density is None:
        density = float(np.mean(np.abs(field_in.values) ** 2))
    if density <= 0.0:
        raise ValueError("rescaling requires a positive output density")
    g_abs = abs(medium.g)
    z_nl = 1.0 / (g_abs * density)
    xi = np.sqrt(z_nl / medium.k_medium)
    tau = medium.length / z_nl
    psi = Field2D(grid=field_in.grid,
                  values=field_in.values / np.sqrt(density),
                  unit_tag="dimensionless")
    return RescaledField(psi=psi, tau=tau, xi=float(xi), z_nl=float(z_nl),
                         density=float(density))


def fluid_scales(medium: MediumParams, density: float) -> tuple[float, float, float]:
    """(z_nl, xi, c_s) for a homogeneous fluid of the given density."""
    g_abs = abs(medium.g)
    if g_abs == 0.0 or density <= 0.0:
        return np.inf, np.inf, 0.0
    z_nl = 1.0 / (g_abs * density)
    xi = float(np.sqrt(z_nl / medium.k_medium))
    dn_nl = medium.nonlinear_index_shift(density)
    c_s = float(np.sqrt(dn_nl / medium.n0))
    return z_nl, xi, c_s
