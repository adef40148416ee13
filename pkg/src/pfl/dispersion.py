"""Bogoliubov dispersion probed the way the experiment does it.

A weak Gaussian probe riding a phase ramp exp(i k_perp x) is superposed on
a homogeneous background fluid; the density perturbation wavepacket it
seeds travels a transverse distance proportional to the propagation depth,
and the slope is the group velocity (transverse meters per axial meter).
Integrating v_g over k_perp reconstructs the dispersion curve, which is
fitted with the Bogoliubov form

    Omega(k) = sqrt( E_k (E_k + 2 k0 dn_nl) ),   E_k = k^2 / (2 k0 n0)

whose low-k slope is the sound speed c_s = sqrt(dn_nl / n0).

The entrance quench splits a low-k probe into counter-propagating phonon
packets of nearly equal density weight, so a whole-plane centroid would
cancel. The tracker instead demodulates the density difference at the
known probe carrier and follows the envelope: when both packets are
resolved, their half separation is the displacement; a lone packet is
followed by its peak; the slope is fitted over the trailing run of
snapshots where the packets stay resolved. At k_perp = 0 there is no
preferred direction and the whole-plane centroid is kept, so symmetric
spreading reads v_g = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats

from .grid import Field2D
from .medium import MediumParams
from .sources import add_probe
from .solver import PropagationRecord, StepPlan, fluid_scales, propagate


@dataclass(frozen=True)
class ProbeSpec:
    """Probe beam riding on the background fluid.

    power_ratio sets how weak the probe is: the ratio of its peak intensity
    to the mean background intensity (default 1e-2, i.e. a 10% amplitude
    perturbation). The entrance quench amplifies the density modulation of
    a low-k probe by roughly (1 + s)/2 with s = (E_k + 2 mu)/Omega, so
    sweeps that reach deep into the sonic band should use a smaller ratio
    to stay in the linear-response regime. k_perp is the transverse
    wavevector of the probe phase ramp.
    """

    waist: float
    k_perp: float
    power_ratio: float = 1e-2


@dataclass
class GroupVelocityMeasurement:
    k_perp: float
    v_g: float
    stderr: float
    z_samples: np.ndarray
    displacements: np.ndarray
    fit_start_index: int


@dataclass
class DispersionCurve:
    """Sampled dispersion relation and its Bogoliubov fit."""

    k_perp: np.ndarray
    v_g: np.ndarray
    omega: np.ndarray
    dn_fit: float
    dn_stderr: float
    c_s: float
    c_s_stderr: float
    xi_fit: float

    def rows(self):
        return zip(self.k_perp, self.v_g, self.omega)


def bogoliubov_omega(k: np.ndarray, k0: float, n0: float, dn_nl: float) -> np.ndarray:
    """Axial dispersion Omega(k) of excitations on a defocusing fluid."""
    e_k = np.asarray(k, dtype=float) ** 2 / (2.0 * k0 * n0)
    return np.sqrt(e_k * (e_k + 2.0 * k0 * dn_nl))


def bogoliubov_group_velocity(k: np.ndarray, k0: float, n0: float, dn_nl: float) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    e_k = k**2 / (2.0 * k0 * n0)
    omega = np.sqrt(e_k * (e_k + 2.0 * k0 * dn_nl))
    de = k / (k0 * n0)
    with np.errstate(invalid="ignore", divide="ignore"):
        vg = de * (e_k + k0 * dn_nl) / omega
    return np.where(k == 0.0, np.sqrt(dn_nl / n0), vg)


def bogoliubov_sound_speed(n0: float, dn_nl: float) -> float:
    return float(np.sqrt(dn_nl / n0))


def _wrap_coord(delta: np.ndarray, extent: float) -> np.ndarray:
    """Map coordinate differences into (-extent/2, extent/2]."""
    return delta - extent * np.round(delta / extent)


def _trailing_run(flags: np.ndarray) -> np.ndarray:
    """Mask selecting the unbroken run of True values ending at the last
    sample (empty if the last sample is False)."""
    out = np.zeros(len(flags), dtype=bool)
    for i in range(len(flags) - 1, -1, -1):
        if not flags[i]:
            break
        out[i] = True
    return out


def _centroid(profile: np.ndarray, x: np.ndarray, extent: float) -> float:
    """Whole-line centroid in wrapped coordinates around the origin."""
    mass = float(np.sum(profile))
    if mass <= 0.0:
        return 0.0
    rel = _wrap_coord(x, extent)
    return float(np.sum(profile * rel)) / mass


def demodulated_envelope(profile: np.ndarray, x: np.ndarray, k_carrier: float,
                         waist: float) -> np.ndarray:
    """Envelope of the density wave riding at the known probe carrier.

    Multiplies by exp(-i k x), applies a Gaussian low-pass (cutting well
    below 2 k, where the conjugate image sits, while passing the envelope
    bandwidth ~2/waist) and returns the magnitude.
    """
    dx = x[1] - x[0]
    signal = profile * np.exp(-1j * k_carrier * x)
    k_axis = 2.0 * np.pi * np.fft.fftfreq(len(x), d=dx)
    k_cut = min(k_carrier, 4.0 / waist)
    window = np.exp(-((k_axis / k_cut) ** 2))
    return np.abs(np.fft.ifft(np.fft.fft(signal) * window))


def _parabolic_peak(envelope: np.ndarray, x: np.ndarray, idx: int, dx: float,
                    extent: float) -> float:
    """Sub-cell peak position from a parabola through three samples."""
    n = len(envelope)
    em = envelope[(idx - 1) % n]
    e0 = envelope[idx]
    ep = envelope[(idx + 1) % n]
    denom = em - 2.0 * e0 + ep
    shift = 0.0 if denom == 0.0 else 0.5 * (em - ep) / denom
    shift = float(np.clip(shift, -0.5, 0.5))
    return float(_wrap_coord(np.array([x[idx] + shift * dx]), extent)[0])


def _threshold_islands(envelope: np.ndarray, x: np.ndarray, extent: float,
                       rel_height: float = 0.35) -> list[tuple[float, float]]:
    """(peak position, mass) of contiguous above-threshold islands, periodic.

    Positions are parabolic refinements of each island's maximum, which are
    insensitive to how the threshold slices overlapping tails.
    """
    dx = float(x[1] - x[0])
    mask = envelope > rel_height * float(np.max(envelope))
    if mask.all():
        idx = int(np.argmax(envelope))
        return [(_parabolic_peak(envelope, x, idx, dx, extent), float(np.sum(envelope)))]
    # rotate so the scan starts in a below-threshold gap
    start = int(np.argmin(mask))
    mask_r = np.roll(mask, -start)
    env_r = np.roll(envelope, -start)
    islands = []
    i = 0
    n = len(mask_r)
    while i < n:
        if not mask_r[i]:
            i += 1
            continue
        j = i
        while j < n and mask_r[j]:
            j += 1
        seg = slice(i, j)
        mass = float(np.sum(env_r[seg]))
        idx = (start + i + int(np.argmax(env_r[seg]))) % n
        islands.append((_parabolic_peak(envelope, x, idx, dx, extent), mass))
        i = j
    islands.sort(key=lambda t: -t[1])
    return islands


def packet_displacement(envelope: np.ndarray, x: np.ndarray,
                        extent: float) -> tuple[float, bool]:
    """Signed transverse displacement of the probe wavepacket.

    The entrance quench seeds a pair of counter-propagating packets; when
    both are visible (one island on each side of the origin) their half
    separation is returned with paired=True, otherwise the centroid of the
    dominant island with paired=False.
    """
    islands = _threshold_islands(envelope, x, extent)
    if not islands:
        return 0.0, False
    if len(islands) >= 2:
        (c1, m1), (c2, m2) = islands[0], islands[1]
        if m2 > 0.2 * m1 and c1 * c2 < 0.0:
            forward, backward = (c1, c2) if c1 > 0 else (c2, c1)
            return 0.5 * (forward - backward), True
    return islands[0][0], False


def measure_group_velocity(background: Field2D, probe: ProbeSpec,
                           medium: MediumParams, plan: StepPlan,
                           background_record: PropagationRecord | None = None,
                           fit_fraction: float = 0.5,
                           max_residual: float = 0.15) -> GroupVelocityMeasurement:
    """Group velocity of a weak probe at probe.k_perp on the background.

    Runs the background with and without the probe (snapshots along z),
    subtracts densities and fits the transverse drift of the |delta rho|
    wavepacket. The background run can be passed in to amortize sweeps; it
    must use the same plan.
    """
    grid = background.grid
    if plan.snapshot_every <= 0:
        raise ValueError("plan.snapshot_every must be positive to track the packet")
    if probe.k_perp >= grid.k_nyquist_x:
        raise ValueError("probe k_perp is at or beyond the grid Nyquist wavevector")

    if background_record is None:
        background_record = propagate(background, medium, plan)
    elif background_record.n_steps != plan.n_steps:
        raise ValueError("background record does not match the stepping plan")

    # peak probe intensity = power_ratio * mean background intensity
    mean_intensity = float(np.mean(medium.intensity(background.values)))
    probe_watts = probe.power_ratio * mean_intensity * np.pi * probe.waist**2 / 2.0
    angle = np.arcsin(probe.k_perp / medium.k0) if probe.k_perp else 0.0
    with_probe = add_probe(background, probe.waist, probe_watts, angle,
                           medium.wavelength, medium.n0)
    probe_record = propagate(with_probe, medium, plan)

    z_samples, displacements, paired = _packet_displacements(
        background_record, probe_record, probe, grid)

    n = len(z_samples)
    trailing = _trailing_run(paired)
    if int(np.sum(trailing)) >= 5:
        # counter-propagating packets stay resolved through the end of the
        # run: their half separation is the clean displacement observable
        sel = trailing
    else:
        start = int(np.floor(n * (1.0 - fit_fraction)))
        start = min(max(start, 0), n - 3)
        sel = np.zeros(n, dtype=bool)
        sel[start:] = True
    fit = stats.linregress(z_samples[sel], displacements[sel])
    span = max(float(np.ptp(displacements[sel])), grid.dx)
    residuals = displacements[sel] - (fit.intercept + fit.slope * z_samples[sel])
    rel_residual = float(np.sqrt(np.mean(residuals**2))) / span
    if rel_residual > max_residual:
        raise RuntimeError(
            f"packet tracking fit residual {rel_residual:.3f} exceeds "
            f"{max_residual}; the wavepacket is not moving ballistically"
        )
    if np.max(np.abs(displacements)) > 0.4 * grid.extent_x:
        raise RuntimeError("probe packet wrapped around the grid; shorten the run")
    return GroupVelocityMeasurement(
        k_perp=probe.k_perp, v_g=float(fit.slope), stderr=float(fit.stderr),
        z_samples=z_samples, displacements=displacements,
        fit_start_index=int(np.argmax(sel)))


def _packet_displacements(background_record: PropagationRecord,
                          probe_record: PropagationRecord, probe: ProbeSpec,
                          grid) -> tuple[np.ndarray, np.ndarray]:
    x = grid.x_coords()
    extent = grid.extent_x
    z_list = []
    profiles = []
    pairs = list(zip(background_record.snapshots, probe_record.snapshots))
    for (z_b, f_b), (z_p, f_p) in pairs:
        if abs(z_b - z_p) > 1e-12 * max(z_b, 1.0):
            raise ValueError("background and probe snapshots are misaligned in z")
        delta = f_p.density() - f_b.density()
        if probe.k_perp == 0.0:
            profiles.append(np.abs(delta).sum(axis=0))
        else:
            profiles.append(delta.sum(axis=0))  # signed, carrier demodulated later
        z_list.append(z_b)
    if len(profiles) < 4:
        raise ValueError("need at least 4 snapshots to fit a displacement slope")
    z_samples = np.asarray(z_list)
    profiles = np.asarray(profiles)

    if probe.k_perp == 0.0:
        displacements = np.array([_centroid(p, x, extent) for p in profiles])
        paired = np.zeros(len(profiles), dtype=bool)
    else:
        displacements = np.empty(len(profiles))
        paired = np.empty(len(profiles), dtype=bool)
        for j, p in enumerate(profiles):
            env = demodulated_envelope(p, x, probe.k_perp, probe.waist)
            displacements[j], paired[j] = packet_displacement(env, x, extent)
    return z_samples, displacements, paired


def dispersion_from_group_velocity(samples, medium: MediumParams) -> DispersionCurve:
    """Integrate (k, v_g) samples into Omega(k) and fit the Bogoliubov form.

    The integral is a cumulative trapezoid from k = 0; v_g(0) is linearly
    extrapolated from the first two samples, which makes both the constant
    (sonic) and linear (free-particle) cases integrate exactly.
    """
    pts = sorted((float(k), float(v)) for k, v in samples)
    k = np.array([p[0] for p in pts])
    v = np.array([p[1] for p in pts])
    if len(k) < 5:
        raise ValueError("need at least 5 (k, v_g) samples")
    if np.any(np.diff(k) <= 0):
        raise ValueError("k samples must be strictly increasing")
    if k[0] < 0:
        raise ValueError("k samples must be non-negative")

    if k[0] > 0.0:
        v0 = v[0] - k[0] * (v[1] - v[0]) / (k[1] - k[0])
        k_full = np.concatenate([[0.0], k])
        v_full = np.concatenate([[v0], v])
    else:
        k_full, v_full = k, v
    omega_full = np.concatenate([[0.0], np.cumsum(
        0.5 * (v_full[1:] + v_full[:-1]) * np.diff(k_full))])
    omega = omega_full[-len(k):]

    k0, n0 = medium.k0, medium.n0

    def model(kk, dn):
        return bogoliubov_omega(kk, k0, n0, abs(dn))

    dn_guess = max(np.max(v) ** 2 * n0, 1e-18)
    try:
        popt, pcov = optimize.curve_fit(model, k, omega, p0=[dn_guess], maxfev=10000)
    except RuntimeError as exc:
        raise RuntimeError(f"Bogoliubov fit did not converge: {exc}") from exc
    dn_fit = abs(float(popt[0]))
    dn_err = float(np.sqrt(pcov[0, 0])) if np.isfinite(pcov[0, 0]) else np.inf
    c_s = bogoliubov_sound_speed(n0, dn_fit)
    c_s_err = 0.5 * c_s * dn_err / dn_fit if dn_fit > 0 else np.inf
    z_nl = 1.0 / (k0 * dn_fit) if dn_fit > 0 else np.inf
    xi_fit = float(np.sqrt(z_nl / (k0 * n0))) if np.isfinite(z_nl) else np.inf
    return DispersionCurve(k_perp=k, v_g=v, omega=omega, dn_fit=dn_fit,
                           dn_stderr=dn_err, c_s=c_s, c_s_stderr=c_s_err,
                           xi_fit=xi_fit)


@dataclass
class SoundSpeedScaling:
    densities: np.ndarray
    sound_speeds: np.ndarray
    exponent: float
    stderr: float


def sound_speed_scaling(densities, medium: MediumParams, grid,
                        tau: float = 25.0, steps_per_z_nl: int = 15,
                        k_perp_xi: float = 0.2, probe_waist_xi: float = 10.0,
                        power_ratio: float = 1e-5) -> SoundSpeedScaling:
    """Fit the scaling exponent of the sound speed against the density.

    For each background density (|E|^2) a plane-wave fluid is propagated
    for the same number of nonlinear lengths (so every member is measured
    at the same dimensionless depth) and the group velocity of a probe at
    k_perp = k_perp_xi / xi is taken as the sound speed. Returns the
    log-log slope with its standard error.
    """
    densities = np.asarray(sorted(float(d) for d in densities))
    if len(densities) < 4:
        raise ValueError("need at least 4 densities")
    if densities[0] <= 0:
        raise ValueError("densities must be positive")
    if densities[-1] / densities[0] < 10.0 - 1e-9:
        raise ValueError("densities must span at least one decade")

    speeds = []
    for rho in densities:
        z_nl, xi, _ = fluid_scales(medium, rho)
        run_medium = medium.with_length(tau * z_nl)
        n_steps = int(np.ceil(tau * steps_per_z_nl))
        every = max(1, n_steps // 50)
        plan = StepPlan(n_steps=n_steps, snapshot_every=every)
        values = np.full((grid.ny, grid.nx), np.sqrt(rho), dtype=np.complex128)
        background = Field2D(grid=grid, values=values)
        probe = ProbeSpec(waist=probe_waist_xi * xi, k_perp=k_perp_xi / xi,
                          power_ratio=power_ratio)
        m = measure_group_velocity(background, probe, run_medium, plan)
        speeds.append(m.v_g)
    speeds = np.asarray(speeds)
    fit = stats.linregress(np.log(densities), np.log(speeds))
    return SoundSpeedScaling(densities=densities, sound_speeds=speeds,
                             exponent=float(fit.slope), stderr=float(fit.stderr))
