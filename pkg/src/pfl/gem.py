"""One-dimensional gradient-echo-memory simulator.

The memory is described in normalized units by the coupled system

    d(alpha)/dt = -(i eta(t) z + gamma) alpha + i g C(t) E
    dE/dz       = i N C(t) alpha

with alpha(z, t) the atomic polarization, E(z, t) the field envelope in the
co-moving frame, eta(t) the signed gradient slope (a piecewise-constant
zigzag that flips sign at listed times), and C(t) in {0, 1} the coupling
gate standing in for the Raman beam: with the gate off nothing is absorbed
or re-emitted and the coherence only accumulates gradient phase.

The z lattice is centered, z in [-z_extent/2, +z_extent/2], so the gradient
detuning covers the pulse spectrum symmetrically about its carrier.

Integration is operator-split per time step: the stiff gradient phase is
applied as an exact rotation (using the exact piecewise integral of eta, so
flip times need not align with the time grid), and the coupling terms are
advanced with a Heun (trapezoidal predictor-corrector) kick at the midpoint,
second order in dt and dz overall.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

MIN_LATTICE = 32


@dataclass(frozen=True)
class GaussianPulse:
    center: float
    width: float
    amplitude: complex = 1.0
    label: str = ""

    def sample(self, t: np.ndarray) -> np.ndarray:
        return self.amplitude * np.exp(-((t - self.center) ** 2) / (2.0 * self.width**2))

    def energy(self) -> float:
        """Continuous integral of |amplitude|^2 exp(-(t-c)^2/w^2)."""
        return float(abs(self.amplitude) ** 2 * self.width * np.sqrt(np.pi))


@dataclass
class PulseTrain:
    pulses: list[GaussianPulse]

    def sample(self, t: np.ndarray) -> np.ndarray:
        out = np.zeros_like(t, dtype=np.complex128)
        for p in self.pulses:
            out += p.sample(t)
        return out

    def validate(self, t_extent: float):
        for p in self.pulses:
            if p.width <= 0:
                raise ValueError(f"pulse width must be positive, got {p.width}")
            if p.center - 4.0 * p.width < 0.0 or p.center + 4.0 * p.width > t_extent:
                raise ValueError(
                    f"pulse at t={p.center} with width {p.width} does not fit "
                    f"in [0, {t_extent}] with 4 sigma margins"
                )


@dataclass
class GemConfig:
    """Lattice, coupling and schedule parameters of one memory run.

    eta_flips lists the times at which the gradient slope changes sign,
    starting from +eta0. coupling_windows lists (t_on, t_off) intervals
    during which the coupling gate is open; None means always on.
    """

    g: float
    density: float
    eta0: float
    z_extent: float
    nz: int
    t_extent: float
    nt: int
    eta_flips: tuple[float, ...] = ()
    coupling_windows: tuple[tuple[float, float], ...] | None = None
    decay: float = 0.0

    def __post_init__(self):
        if self.nz < MIN_LATTICE or self.nt < MIN_LATTICE:
            raise ValueError(f"nz and nt must be at least {MIN_LATTICE}")
        if self.z_extent <= 0 or self.t_extent <= 0:
            raise ValueError("z_extent and t_extent must be positive")
        if self.decay < 0:
            raise ValueError("decay must be non-negative")
        times = list(self.eta_flips)
        if times != sorted(times) or len(set(times)) != len(times):
            raise ValueError("eta flip times must be strictly increasing")
        if any(t < 0 or t > self.t_extent for t in times):
            raise ValueError("eta flip times must lie within [0, t_extent]")
        if self.coupling_windows is not None:
            flat = [t for w in self.coupling_windows for t in w]
            if flat != sorted(flat):
                raise ValueError("coupling windows must be ordered and disjoint")
        phase_per_step = abs(self.eta0) * 0.5 * self.z_extent * self.dt
        if phase_per_step > 0.5:
            raise ValueError(
                f"time step dt={self.dt:.3g} under-resolves the gradient phase: "
                f"|eta| z_max dt = {phase_per_step:.3g} > 0.5 rad"
            )

    @property
    def dt(self) -> float:
        return self.t_extent / (self.nt - 1)

    @property
    def dz(self) -> float:
        return self.z_extent / (self.nz - 1)

    def z_coords(self) -> np.ndarray:
        return np.linspace(-self.z_extent / 2.0, self.z_extent / 2.0, self.nz)

    def t_coords(self) -> np.ndarray:
        return np.linspace(0.0, self.t_extent, self.nt)

    def eta_at(self, t: float) -> float:
        flips = np.searchsorted(np.asarray(self.eta_flips), t, side="right")
        return self.eta0 * (-1.0) ** flips

    def eta_integral(self, t0: float, t1: float) -> float:
        """Exact integral of eta over [t0, t1] across any sign flips."""
        edges = [t0] + [t for t in self.eta_flips if t0 < t < t1] + [t1]
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            total += self.eta_at(0.5 * (a + b)) * (b - a)
        return total

    def coupling_at(self, t: float) -> float:
        if self.coupling_windows is None:
            return 1.0
        for t_on, t_off in self.coupling_windows:
            if t_on <= t <= t_off:
                return 1.0
        return 0.0

    @property
    def pi_pulse_ratio(self) -> float:
        """The figure of merit 2 pi g N / |eta| entering the efficiency."""
        return 2.0 * np.pi * self.g * self.density / abs(self.eta0)


@dataclass
class GemState:
    """Polarization and field on the (z, t) lattice."""

    z: np.ndarray
    t: np.ndarray
    alpha: np.ndarray  # shape (nz, nt)
    field: np.ndarray  # shape (nz, nt)


@dataclass
class GemResult:
    config: GemConfig
    times: np.ndarray
    input_field: np.ndarray
    output_field: np.ndarray
    state: GemState | None = None


def _field_from_alpha(alpha: np.ndarray, e_in: complex, coupling: float,
                      density: float, dz: float) -> np.ndarray:
    """Solve dE/dz = i N C alpha by cumulative trapezoid from the input edge."""
    if coupling == 0.0:
        return np.full_like(alpha, e_in)
    segments = 0.5 * (alpha[1:] + alpha[:-1]) * dz
    cumulative = np.concatenate([[0.0 + 0.0j], np.cumsum(segments)])
    return e_in + 1j * density * coupling * cumulative


def gem_evolve(config: GemConfig, pulses: PulseTrain, store_state: bool = True) -> GemResult:
    """Integrate the memory equations for one input pulse train."""
    pulses.validate(config.t_extent)
    dt, dz = config.dt, config.dz
    z = config.z_coords()
    t = config.t_coords()

    e_in = pulses.sample(t)
    alpha = np.zeros(config.nz, dtype=np.complex128)
    output = np.empty(config.nt, dtype=np.complex128)
    if store_state:
        alpha_zt = np.zeros((config.nz, config.nt), dtype=np.complex128)
        field_zt = np.zeros((config.nz, config.nt), dtype=np.complex128)
        field_zt[:, 0] = _field_from_alpha(alpha, e_in[0], config.coupling_at(0.0),
                                           config.density, dz)
    output[0] = _field_from_alpha(alpha, e_in[0], config.coupling_at(0.0),
                                  config.density, dz)[-1]

    g, density, gamma = config.g, config.density, config.decay
    for n in range(config.nt - 1):
        t0, t1 = t[n], t[n + 1]
        t_mid = 0.5 * (t0 + t1)
        coupling = config.coupling_at(t_mid)
        e_mid = 0.5 * (e_in[n] + e_in[n + 1])

        phase_first = config.eta_integral(t0, t_mid)
        phase_second = config.eta_integral(t_mid, t1)
        alpha = alpha * np.exp(-1j * z * phase_first - gamma * (t_mid - t0))
        if coupling != 0.0:
            e1 = _field_from_alpha(alpha, e_mid, coupling, density, dz)
            predictor = alpha + dt * 1j * g * coupling * e1
            e2 = _field_from_alpha(predictor, e_mid, coupling, density, dz)
            alpha = alpha + dt * 1j * g * coupling * 0.5 * (e1 + e2)
        alpha = alpha * np.exp(-1j * z * phase_second - gamma * (t1 - t_mid))

        if not np.all(np.isfinite(alpha)):
            raise FloatingPointError(f"non-finite polarization at t = {t1:.6g}")
        coupling_out = config.coupling_at(t1)
        e_full = _field_from_alpha(alpha, e_in[n + 1], coupling_out, density, dz)
        output[n + 1] = e_full[-1]
        if store_state:
            alpha_zt[:, n + 1] = alpha
            field_zt[:, n + 1] = e_full

    state = None
    if store_state:
        state = GemState(z=z, t=t, alpha=alpha_zt, field=field_zt)
    return GemResult(config=config, times=t, input_field=e_in, output_field=output,
                     state=state)


def gem_efficiency_theory(g: float, density: float, eta: float) -> float:
    """Closed-form recall efficiency sigma = (1 - exp(-2 pi g N / |eta|))^2."""
    if eta == 0:
        raise ValueError("eta must be nonzero")
    if g * density < 0:
        raise ValueError("g * density must be non-negative")
    return float((1.0 - np.exp(-2.0 * np.pi * g * density / abs(eta))) ** 2)


@dataclass
class EfficiencyMeasurement:
    sigma: float
    echo_window: tuple[float, float]
    input_window: tuple[float, float]
    echo_time: float
    result: GemResult


def gem_efficiency_measured(config: GemConfig, pulse: GaussianPulse,
                            n_widths: float = 4.0) -> EfficiencyMeasurement:
    """Recall efficiency as the echo-to-input energy ratio.

    The config must contain exactly one gradient flip, at time tau; the echo
    is integrated over 2 tau - center +- n_widths * width and the input over
    center +- n_widths * width. The windows must not overlap.
    """
    if len(config.eta_flips) != 1:
        raise ValueError("efficiency measurement expects exactly one gradient flip")
    tau = config.eta_flips[0]
    echo_center = 2.0 * tau - pulse.center
    input_window = (pulse.center - n_widths * pulse.width,
                    pulse.center + n_widths * pulse.width)
    echo_window = (echo_center - n_widths * pulse.width,
                   echo_center + n_widths * pulse.width)
    if echo_window[0] <= input_window[1]:
        raise ValueError(
            f"echo window {echo_window} overlaps the input window {input_window}; "
            "move the flip later or shorten the pulse"
        )
    if echo_window[1] > config.t_extent:
        raise ValueError("echo window extends past t_extent")

    result = gem_evolve(config, PulseTrain([pulse]), store_state=False)
    t = result.times
    in_sel = (t >= input_window[0]) & (t <= input_window[1])
    echo_sel = (t >= echo_window[0]) & (t <= echo_window[1])
    energy_in = float(np.trapezoid(np.abs(result.input_field[in_sel]) ** 2, t[in_sel]))
    energy_echo = float(np.trapezoid(np.abs(result.output_field[echo_sel]) ** 2, t[echo_sel]))
    echo_power = np.abs(result.output_field) ** 2
    masked = np.where(echo_sel, echo_power, 0.0)
    echo_time = float(t[int(np.argmax(masked))])
    return EfficiencyMeasurement(sigma=energy_echo / energy_in,
                                 echo_window=echo_window,
                                 input_window=input_window,
                                 echo_time=echo_time,
                                 result=result)


@dataclass
class PulseOrderingResult:
    mode: str
    peak_times: list[float]
    labels: list[str]
    expected_times: list[float]
    result: GemResult


def fifo_filo_experiment(config: GemConfig, train: PulseTrain, mode: str,
                         rel_height: float = 0.2) -> PulseOrderingResult:
    """Run a two-pulse store-and-recall and verify the recall ordering.

    FILO: one gradient flip at tau, coupling always on; pulse stored at
    time t_p re-emits at 2 tau - t_p, so the later pulse exits first.
    FIFO: coupling gated off across the would-be FILO echoes, a second flip
    at tau2, coupling restored; the echo of a pulse stored at t_p then lands
    at t_p + 2 (tau2 - tau), preserving the input order.

    Raises RuntimeError when the detected ordering does not match the mode.
    """
    mode = mode.upper()
    if mode not in ("FIFO", "FILO"):
        raise ValueError(f"mode must be FIFO or FILO, got {mode!r}")
    if len(train.pulses) != 2:
        raise ValueError("the ordering experiment expects exactly two pulses")
    first, second = sorted(train.pulses, key=lambda p: p.center)
    gap = second.center - first.center
    min_width = 4.0 * max(first.width, second.width)
    if gap < min_width:
        raise ValueError(
            f"pulses are not temporally resolved: separation {gap} < 4 widths"
        )

    if mode == "FILO":
        if len(config.eta_flips) != 1:
            raise ValueError("FILO expects exactly one gradient flip")
        if config.coupling_windows is not None:
            raise ValueError("FILO expects the coupling on throughout")
        tau = config.eta_flips[0]
        expected = [(2.0 * tau - second.center, second.label or "B"),
                    (2.0 * tau - first.center, first.label or "A")]
    else:
        if len(config.eta_flips) != 2:
            raise ValueError("FIFO expects two gradient flips")
        if config.coupling_windows is None:
            raise ValueError("FIFO expects a coupling-off window")
        tau, tau2 = config.eta_flips
        delay = 2.0 * (tau2 - tau)
        expected = [(first.center + delay, first.label or "A"),
                    (second.center + delay, second.label or "B")]
        _check_fifo_schedule(config, first, second, tau, tau2)

    result = gem_evolve(config, train, store_state=False)
    t = result.times
    power = np.abs(result.output_field) ** 2
    recall_start = (config.eta_flips[0] if mode == "FILO" else config.eta_flips[1])
    sel = t > recall_start
    distance = max(1, int(0.5 * gap / config.dt))
    peaks, _ = find_peaks(np.where(sel, power, 0.0),
                          height=rel_height * float(np.max(power[sel])),
                          distance=distance)
    peak_times = [float(t[i]) for i in peaks]
    if len(peak_times) != 2:
        raise RuntimeError(
            f"expected two echo peaks after t = {recall_start}, found "
            f"{len(peak_times)} at {peak_times}"
        )
    labels = []
    for pt in peak_times:
        nearest = min(expected, key=lambda e: abs(e[0] - pt))
        labels.append(nearest[1])
    expected_labels = [e[1] for e in sorted(expected)]
    if labels != expected_labels:
        raise RuntimeError(
            f"recall ordering {labels} does not match the {mode} expectation "
            f"{expected_labels} (peaks at {peak_times})"
        )
    return PulseOrderingResult(mode=mode, peak_times=peak_times, labels=labels,
                               expected_times=[e[0] for e in expected], result=result)


def _check_fifo_schedule(config: GemConfig, first: GaussianPulse, second: GaussianPulse,
                         tau: float, tau2: float):
    """The off window must cover both suppressed first-flip echoes."""
    filo_echoes = (2.0 * tau - second.center, 2.0 * tau - first.center)
    for echo in filo_echoes:
        if config.coupling_at(echo) != 0.0:
            raise ValueError(
                f"coupling is on at the suppressed echo time {echo}; gate it "
                "off across both first-flip echoes for FIFO recall"
            )
