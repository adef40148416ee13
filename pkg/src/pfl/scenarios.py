"""Scenario orchestration: build objects from a RunConfig, run, write
artifacts, and emit a manifest of exactly the files produced."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .config import RunConfig
from .dispersion import (ProbeSpec, dispersion_from_group_velocity,
                         measure_group_velocity, sound_speed_scaling)
from .fileio import ArtifactWriter, fmt, load_field
from .gem import (GaussianPulse, GemConfig, PulseTrain, fifo_filo_experiment,
                  gem_efficiency_measured, gem_efficiency_theory, gem_evolve)
from .grid import Field2D, Grid, fft2, ifft2, make_grid
from .hydro import detect_vortices
from .medium import MediumParams, intensity_to_density
from .potentials import build_potential
from .seeding import stream_rng, stream_seed
from .solver import StepPlan, fluid_scales, propagate
from .sources import gaussian_beam, imprint_dark_stripe, imprint_vortex, plane_wave, speckle
from .stats import intensity_statistics, coherence_g1, structure_factor


def build_grid(cfg: RunConfig) -> Grid:
    g = cfg.grid
    return make_grid(g["nx"], g["ny"], g["dx"], g["dy"])


def build_medium(cfg: RunConfig, grid: Grid | None = None) -> MediumParams:
    m = cfg.medium
    kwargs = dict(alpha=m["alpha"], length=m["length"], i_sat=m["isat"])
    if cfg.potential is not None and grid is not None:
        kwargs["potential"] = _build_potential(cfg, grid)
    if m["chi3"] is not None:
        return MediumParams(wavelength=m["lambda"], n0=m["n0"], chi3=m["chi3"], **kwargs)
    return MediumParams.from_n2(wavelength=m["lambda"], n0=m["n0"], n2=m["n2"], **kwargs)


def _build_potential(cfg: RunConfig, grid: Grid) -> np.ndarray:
    p = cfg.potential
    kind = p["kind"]
    params: dict = {"pt_symmetrize": p["pt_symmetrize"]}
    if kind == "uniform":
        params["value"] = complex(p["value_re"], p["value_im"])
    elif kind == "gaussian_defect":
        params.update(amplitude=complex(p["amplitude_re"], p["amplitude_im"]),
                      width=p["width"], center=(p["center_x"], p["center_y"]))
    elif kind == "lattice":
        params.update(amplitude=complex(p["amplitude_re"], p["amplitude_im"]),
                      period=p["period"], orientation=p["orientation"])
    return build_potential(grid, kind, params)


def build_plan(cfg: RunConfig) -> StepPlan:
    p = cfg.plan
    return StepPlan(n_steps=p["n_steps"], dz=p["dz"], snapshot_every=p["snapshot_every"])


def build_source(cfg: RunConfig, grid: Grid, medium: MediumParams,
                 member: int = 0) -> Field2D:
    s = cfg.source
    if s is None:
        raise ValueError(f"scenario {cfg.scenario!r} needs a [source] section")
    if s["kind"] == "gaussian":
        return gaussian_beam(grid, s["waist"], s["power"], medium.n0, medium.wavelength)
    if s["kind"] == "plane":
        return plane_wave(grid, s["intensity"], medium.n0, medium.wavelength)
    if s["kind"] == "file":
        field, _ = load_field(s["path"])
        if field.grid != grid:
            raise ValueError(
                f"snapshot {s['path']} grid {field.grid} does not match the "
                f"configured grid {grid}")
        return field
    return speckle(grid, s["correlation_length"], s["intensity"],
                   seed=stream_seed(cfg.seed, "source", member), n0=medium.n0)


def _map_jobs(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def run_scenario(cfg: RunConfig, out_dir) -> ArtifactWriter:
    """Dispatch a validated RunConfig; returns the writer after the manifest
    is on disk. Raises on any failure (the CLI maps that to exit code 3)."""
    writer = ArtifactWriter(out_dir)
    handler = _HANDLERS[cfg.scenario]
    handler(cfg, writer)
    writer.write_manifest()
    return writer


def _scenario_propagate(cfg: RunConfig, w: ArtifactWriter):
    grid = build_grid(cfg)
    medium = build_medium(cfg, grid)
    plan = build_plan(cfg)
    field = build_source(cfg, grid, medium)
    record = propagate(field, medium, plan)
    w.field("input.pfl1", field, 0.0)
    w.field("final.pfl1", record.final_field, record.z_final)
    if cfg.emit_snapshots:
        for i, (z, snap) in enumerate(record.snapshots):
            w.field(f"snapshot_{i:04d}.pfl1", snap, z)
    if cfg.emit_csv:
        w.csv("power.csv", ["z", "power"], record.power_trace)
    if cfg.emit_pgm:
        w.pgm("final_density.pgm", record.final_field)
    w.metrics("metrics.txt", record)


def _scenario_dispersion(cfg: RunConfig, w: ArtifactWriter):
    grid = build_grid(cfg)
    medium = build_medium(cfg, grid)
    plan = build_plan(cfg)
    if plan.snapshot_every <= 0:
        raise ValueError("dispersion needs plan.snapshot_every > 0 to track packets")
    background = build_source(cfg, grid, medium)
    background_record = propagate(background, medium, plan)

    def measure(k_perp):
        probe = ProbeSpec(waist=cfg.params["probe_waist"], k_perp=k_perp,
                          power_ratio=cfg.params["power_ratio"])
        m = measure_group_velocity(background, probe, medium, plan,
                                   background_record=background_record)
        return (m.k_perp, m.v_g)

    samples = _map_jobs(measure, sorted(cfg.params["k_perp_list"]), cfg.jobs)
    curve = dispersion_from_group_velocity(samples, medium)
    if cfg.emit_csv:
        w.csv("dispersion.csv", ["k_perp", "v_g", "omega"], curve.rows())
    w.text("fit.txt", "\n".join([
        f"c_s = {fmt(curve.c_s)}",
        f"c_s_stderr = {fmt(curve.c_s_stderr)}",
        f"xi_fit = {fmt(curve.xi_fit)}",
        f"dn_fit = {fmt(curve.dn_fit)}",
    ]) + "\n")


def _scenario_sound_scaling(cfg: RunConfig, w: ArtifactWriter):
    grid = build_grid(cfg)
    medium = build_medium(cfg, grid)
    p = cfg.params
    densities = [intensity_to_density(i, medium.n0) for i in p["intensities"]]
    result = sound_speed_scaling(densities, medium, grid, tau=p["tau"],
                                 k_perp_xi=p["k_perp_xi"],
                                 probe_waist_xi=p["probe_waist_xi"],
                                 power_ratio=p["power_ratio"])
    if cfg.emit_csv:
        w.csv("sound_scaling.csv", ["density", "c_s"],
              zip(result.densities, result.sound_speeds))
    w.text("fit.txt", f"exponent = {fmt(result.exponent)}\n"
                      f"stderr = {fmt(result.stderr)}\n")


def _scenario_precondensation(cfg: RunConfig, w: ArtifactWriter):
    grid = build_grid(cfg)
    medium = build_medium(cfg, grid)
    p = cfg.params
    n_real = p["realizations"]
    rho = intensity_to_density(cfg.source["intensity"], medium.n0)
    z_nl, _, _ = fluid_scales(medium, rho)
    members = [build_source(cfg, grid, medium, member=i) for i in range(n_real)]
    moments = []
    for tau in sorted(p["tau_list"]):
        run_medium = medium.with_length(tau * z_nl)
        plan = build_plan(cfg)

        def evolve(field):
            return propagate(field, run_medium, plan).final_field

        finals = _map_jobs(evolve, members, cfg.jobs)
        stats = intensity_statistics(finals, bins=p["bins"])
        tag = fmt(tau).replace(".", "p")
        if cfg.emit_csv:
            w.csv(f"pi_hist_tau{tag}.csv", ["intensity", "pdf"], stats.rows())
            g1 = coherence_g1(finals, method="rotate_pair" if n_real == 1 else "ensemble")
            w.csv(f"g1_tau{tag}.csv", ["separation", "g1"], g1.rows())
        moments.append((tau, stats.mode, stats.g2))
    if cfg.emit_csv:
        w.csv("moments.csv", ["tau", "mode", "g2"], moments)


def _scenario_structure_factor(cfg: RunConfig, w: ArtifactWriter):
    grid = build_grid(cfg)
    medium = build_medium(cfg, grid)
    plan = build_plan(cfg)
    p = cfg.params
    rho = intensity_to_density(cfg.source["intensity"], medium.n0)
    amplitude = np.sqrt(rho)
    band = np.sqrt(grid.k_squared()) <= p["band_fraction"] * min(grid.k_nyquist_x,
                                                                 grid.k_nyquist_y)
    eps = p["noise_amplitude"] * amplitude

    def member(i):
        rng = stream_rng(cfg.seed, "sf-noise", i)
        white = (rng.standard_normal((grid.ny, grid.nx))
                 + 1j * rng.standard_normal((grid.ny, grid.nx))) / np.sqrt(2.0)
        noise = ifft2(fft2(white * eps) * band)
        field = Field2D(grid=grid, values=amplitude + noise)
        reference = field.density()
        signal = propagate(field, medium, plan).final_field.density()
        return signal, reference

    results = _map_jobs(member, list(range(p["realizations"])), cfg.jobs)
    signal = [r[0] for r in results]
    reference = [r[1] for r in results]
    sf = structure_factor(signal, reference, grid=grid, nbins=p["nbins"],
                          min_realizations=min(p["realizations"], 100))
    if cfg.emit_csv:
        w.csv("structure_factor.csv", ["k", "s_k", "sigma"], sf.rows())


def _scenario_vortices(cfg: RunConfig, w: ArtifactWriter):
    grid = build_grid(cfg)
    medium = build_medium(cfg, grid)
    p = cfg.params
    field = build_source(cfg, grid, medium)
    if p["mode"] == "imprint":
        for charge, x, y in zip(p["charges"], p["xs"], p["ys"]):
            field = imprint_vortex(field, charge, center=(x, y),
                                   core_width=p["core_width"])
    else:
        field = imprint_dark_stripe(field, position=p["stripe_position"],
                                    angle=p["stripe_angle"],
                                    contrast=p["stripe_contrast"])
    w.field("initial.pfl1", field, 0.0)
    if p["evolve"]:
        record = propagate(field, medium, build_plan(cfg))
        field = record.final_field
        w.metrics("metrics.txt", record)
        w.field("final.pfl1", field, record.z_final)
    vortices = detect_vortices(field)
    if cfg.emit_csv:
        w.csv("vortices.csv", ["x", "y", "charge"], vortices.as_rows())
    if cfg.emit_pgm:
        w.pgm("density.pgm", field)


def _gem_config_from_params(p: dict, decay_key: bool = True) -> GemConfig:
    windows = p.get("coupling_windows", ())
    coupling = None
    if windows:
        coupling = tuple((windows[i], windows[i + 1]) for i in range(0, len(windows), 2))
    return GemConfig(
        g=p["g"], density=p["density"], eta0=p["eta0"],
        z_extent=p["z_extent"], nz=p["nz"], t_extent=p["t_extent"], nt=p["nt"],
        eta_flips=tuple(p["flip_times"]),
        coupling_windows=coupling,
        decay=p.get("decay", 0.0),
    )


def _pulse_train_from_params(p: dict) -> PulseTrain:
    labels = list(p.get("pulse_labels", ())) or [
        chr(ord("A") + i) for i in range(len(p["pulse_centers"]))]
    pulses = [GaussianPulse(center=c, width=wd, label=lb)
              for c, wd, lb in zip(p["pulse_centers"], p["pulse_widths"], labels)]
    return PulseTrain(pulses)


def _scenario_gem(cfg: RunConfig, w: ArtifactWriter):
    gem_cfg = _gem_config_from_params(cfg.params)
    train = _pulse_train_from_params(cfg.params)
    result = gem_evolve(gem_cfg, train, store_state=True)
    if cfg.emit_csv:
        w.csv("input.csv", ["t", "re", "im", "power"],
              ((t, e.real, e.imag, abs(e) ** 2)
               for t, e in zip(result.times, result.input_field)))
        w.csv("output.csv", ["t", "re", "im", "power"],
              ((t, e.real, e.imag, abs(e) ** 2)
               for t, e in zip(result.times, result.output_field)))
    if cfg.emit_pgm and result.state is not None:
        w.pgm("polarization.pgm", np.abs(result.state.alpha))


def _scenario_gem_sweep(cfg: RunConfig, w: ArtifactWriter):
    p = cfg.params

    def run(ratio):
        g_n = ratio * abs(p["eta0"]) / (2.0 * np.pi)
        g = density = float(np.sqrt(g_n))
        gem_cfg = GemConfig(g=g, density=density, eta0=p["eta0"],
                            z_extent=p["z_extent"], nz=p["nz"],
                            t_extent=p["t_extent"], nt=p["nt"],
                            eta_flips=(p["flip_time"],))
        pulse = GaussianPulse(center=p["pulse_center"], width=p["pulse_width"])
        measured = gem_efficiency_measured(gem_cfg, pulse)
        theory = gem_efficiency_theory(g, density, p["eta0"])
        return (ratio, theory, measured.sigma)

    rows = _map_jobs(run, sorted(p["ratios"]), cfg.jobs)
    if cfg.emit_csv:
        w.csv("efficiency_sweep.csv", ["ratio", "sigma_theory", "sigma_sim"], rows)


def _scenario_fifo_filo(cfg: RunConfig, w: ArtifactWriter):
    gem_cfg = _gem_config_from_params(cfg.params)
    train = _pulse_train_from_params(cfg.params)
    result = fifo_filo_experiment(gem_cfg, train, cfg.params["mode"])
    if cfg.emit_csv:
        w.csv("output.csv", ["t", "re", "im", "power"],
              ((t, e.real, e.imag, abs(e) ** 2)
               for t, e in zip(result.result.times, result.result.output_field)))
        w.csv("peaks.csv", ["time", "label"],
              zip(result.peak_times, result.labels))
    w.text("ordering.txt",
           f"mode = {result.mode}\norder = {','.join(result.labels)}\n")


_HANDLERS = {
    "propagate": _scenario_propagate,
    "dispersion": _scenario_dispersion,
    "sound-scaling": _scenario_sound_scaling,
    "precondensation": _scenario_precondensation,
    "structure-factor": _scenario_structure_factor,
    "vortices": _scenario_vortices,
    "gem": _scenario_gem,
    "gem-efficiency-sweep": _scenario_gem_sweep,
    "fifo-filo": _scenario_fifo_filo,
}
