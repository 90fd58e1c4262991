"""Ensemble harnesses: Born-rule measurement trials, decoherence-rate
scans, fringe-visibility runs, and heating / momentum-diffusion runs.

Every harness is reproducible from (config, master_seed) and independent
of thread count; see ensemble.map_trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np
from scipy import stats

from .collapse import (
    CollapseParams,
    apply_hit,
    effective_reduction_rate,
    grw_trajectory,
    hit_position_density,
    localization_amplitude,
    sample_hit_center,
    _density_convolution,
)
from .ensemble import map_trajectories
from .errors import ConfigError, DecisionTimeoutError, DomainError, StatisticsError
from .propagator import Potential, Stepper, spread_analytic
from .qstate import Grid1D, HybridState, WaveFunction, gaussian_packet, superpose
from .rngstream import exponential_variate, trajectory_rng
from .units import DEFAULT_UNITS, UnitSystem


@dataclass
class EnsembleReport:
    n_trajectories: int
    outcome_counts: dict[str, int]
    estimate: float
    stderr: float
    fit_diagnostics: dict[str, float]
    seed: int

    def __post_init__(self):
        total = sum(self.outcome_counts.values())
        if self.outcome_counts and total != self.n_trajectories:
            raise DomainError(
                f"outcome counts sum to {total}, expected {self.n_trajectories}"
            )

    def to_json_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# Born-rule measurement model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasurementConfig:
    """Spin-1/2 system coupled to a single collective pointer coordinate.

    The apparatus is modeled as one center-of-mass coordinate whose
    amplified collapse rate is pointer_n_nucleons * lambda; the spin is a
    two-valued label carried by the branch structure.  Branches start
    already displaced by +-pointer_separation/2 (instantaneous premeasured
    entanglement).
    """

    c_up: complex
    c_down: complex
    pointer_n_nucleons: float = 1e8
    pointer_separation: float = 16.0
    pointer_sigma: float = 1.0
    decision_epsilon: float = 1e-6
    grid_n: int = 1024
    grid_extent: float = 48.0
    hits_budget: float = 20.0  # Lambda * t_max
    hit_resolution: float = 0.1  # Lambda * dt

    def __post_init__(self):
        w = abs(self.c_up) ** 2 + abs(self.c_down) ** 2
        if abs(w - 1.0) > 1e-9:
            raise ConfigError(f"|c_up|^2 + |c_down|^2 = {w}, must be 1")
        if not (0 < self.decision_epsilon < 1):
            raise ConfigError("decision_epsilon must be in (0, 1)")
        if self.pointer_separation <= 4.0 * self.pointer_sigma:
            raise ConfigError(
                "pointer_separation must exceed 4 * pointer_sigma "
                f"({self.pointer_separation} <= {4 * self.pointer_sigma})"
            )


def _initial_hybrid(cfg: MeasurementConfig) -> HybridState:
    grid = Grid1D.centered(cfg.grid_n, cfg.grid_extent)
    mass = cfg.pointer_n_nucleons
    d = cfg.pointer_separation
    left = gaussian_packet(grid, -d / 2.0, 0.0, cfg.pointer_sigma, mass)
    right = gaussian_packet(grid, +d / 2.0, 0.0, cfg.pointer_sigma, mass)
    up = left.with_amps(cfg.c_up * left.amps)
    down = right.with_amps(cfg.c_down * right.amps)
    return HybridState(up, down).normalized()


def born_trial(
    cfg: MeasurementConfig,
    params: CollapseParams,
    rng: np.random.Generator,
    units: UnitSystem = DEFAULT_UNITS,
) -> str:
    """One measurement trial; returns "up" or "down".

    Hits are applied jointly: the center is drawn from the branch-weighted
    total position density and L(a) multiplies both branch wavefunctions.
    """
    state = _initial_hybrid(cfg)
    rate = params.total_rate_internal(units)
    if rate <= 0:
        raise ConfigError("born_trial needs a positive total collapse rate")
    dt = cfg.hit_resolution / rate
    n_max = int(round(cfg.hits_budget / cfg.hit_resolution))
    grid = state.branch_up.grid
    stepper = Stepper(grid, Potential.free(), dt, state.branch_up.mass)

    t_next = exponential_variate(rng, rate)
    next_step = int(round(t_next / dt))

    for b in range(n_max + 1):
        while next_step == b:
            rho = state.branch_up.density() + state.branch_down.density()
            p = _density_convolution(rho, grid, params.r_c)
            a = sample_hit_center(p, grid, rng)
            g = localization_amplitude(grid, a, params.r_c)
            up = state.branch_up.with_amps(g * state.branch_up.amps)
            down = state.branch_down.with_amps(g * state.branch_down.amps)
            state = HybridState(up, down).normalized()
            t_next += exponential_variate(rng, rate)
            next_step = int(round(t_next / dt))
        w_up, w_down = state.weights()
        if w_down < cfg.decision_epsilon:
            return "up"
        if w_up < cfg.decision_epsilon:
            return "down"
        if b < n_max:
            state = HybridState(
                state.branch_up.with_amps(stepper.step(state.branch_up.amps)),
                state.branch_down.with_amps(stepper.step(state.branch_down.amps)),
            )
    raise DecisionTimeoutError(
        f"no outcome after {cfg.hits_budget} expected hits "
        f"(weights {state.weights()}); pointer too slow for this budget"
    )


def _born_worker(job, master_seed: int, index: int) -> str:
    cfg, params = job
    return born_trial(cfg, params, trajectory_rng(master_seed, index))


def born_ensemble(
    cfg: MeasurementConfig,
    params: CollapseParams,
    n_trajectories: int,
    master_seed: int,
    threads: int = 1,
) -> EnsembleReport:
    outcomes = map_trajectories(
        _born_worker, (cfg, params), n_trajectories, master_seed, threads
    )
    n_up = sum(1 for o in outcomes if o == "up")
    n = n_trajectories
    freq = n_up / n
    stderr = float(np.sqrt(max(freq * (1 - freq), 1e-12) / n))
    p_up = abs(cfg.c_up) ** 2
    expected = np.array([p_up * n, (1 - p_up) * n])
    observed = np.array([n_up, n - n_up])
    if 0 < p_up < 1:
        chi2 = float(np.sum((observed - expected) ** 2 / expected))
        p_value = float(stats.chi2.sf(chi2, df=1))
    else:
        chi2, p_value = 0.0, 1.0
    return EnsembleReport(
        n_trajectories=n,
        outcome_counts={"up": n_up, "down": n - n_up},
        estimate=freq,
        stderr=stderr,
        fit_diagnostics={"p_up_expected": p_up, "chi2": chi2, "p_value": p_value},
        seed=master_seed,
    )


# ---------------------------------------------------------------------------
# Decoherence-rate scan
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecoherenceConfig:
    """Two narrow packets at +-d/2 on a heavy, almost frozen coordinate."""

    packet_sigma_over_rc: float = 0.05
    mass: float = 1e6
    grid_n: int = 1024
    grid_extent: float = 32.0
    hit_resolution: float = 0.05  # Lambda * dt
    n_efoldings: float = 2.0
    n_samples: int = 16


def _coherence_samples(job, master_seed: int, index: int) -> np.ndarray:
    """One trajectory; returns a_L * conj(a_R) at the sample times."""
    cfg, params, d, units = job
    rng = trajectory_rng(master_seed, index)
    grid = Grid1D.centered(cfg.grid_n, cfg.grid_extent)
    sigma = cfg.packet_sigma_over_rc * params.r_c
    phi_l = gaussian_packet(grid, -d / 2.0, 0.0, sigma, cfg.mass)
    phi_r = gaussian_packet(grid, +d / 2.0, 0.0, sigma, cfg.mass)
    psi = superpose(phi_l, phi_r, 1.0, 1.0)

    rate = params.total_rate_internal(units)
    gamma = units.rate_to_internal(effective_reduction_rate(d, params))
    t_total = cfg.n_efoldings / (gamma if gamma > 0 else rate)
    dt = cfg.hit_resolution / rate
    n_steps = max(1, int(round(t_total / dt)))
    sample_every = max(1, n_steps // cfg.n_samples)
    stepper = Stepper(grid, Potential.free(), dt, cfg.mass)

    t_next = exponential_variate(rng, rate)
    next_step = int(round(t_next / dt))
    out = []
    for b in range(n_steps + 1):
        while next_step == b:
            p = hit_position_density(psi, params.r_c)
            a = sample_hit_center(p, grid, rng)
            psi, _ = apply_hit(psi, a, params.r_c)
            t_next += exponential_variate(rng, rate)
            next_step = int(round(t_next / dt))
        if b % sample_every == 0 or b == n_steps:
            out.append(phi_l.overlap(psi) * np.conj(phi_r.overlap(psi)))
        if b < n_steps:
            psi = psi.with_amps(stepper.step(psi.amps))
    return np.asarray(out, dtype=np.complex128)


def _decoherence_times(cfg: DecoherenceConfig, params, d, units) -> np.ndarray:
    rate = params.total_rate_internal(units)
    gamma = units.rate_to_internal(effective_reduction_rate(d, params))
    t_total = cfg.n_efoldings / (gamma if gamma > 0 else rate)
    dt = cfg.hit_resolution / rate
    n_steps = max(1, int(round(t_total / dt)))
    sample_every = max(1, n_steps // cfg.n_samples)
    bounds = [b for b in range(n_steps + 1) if b % sample_every == 0 or b == n_steps]
    return np.array([b * dt for b in bounds])


def decoherence_scan(
    separations: list[float],
    params: CollapseParams,
    ensemble_size: int,
    cfg: DecoherenceConfig,
    master_seed: int,
    threads: int = 1,
    units: UnitSystem = DEFAULT_UNITS,
) -> list[EnsembleReport]:
    """Fit exp(-Gamma t) to ensemble-averaged branch coherence per separation."""
    reports = []
    for j, d in enumerate(separations):
        job = (cfg, params, float(d), units)
        seed_d = master_seed + j  # distinct stream block per separation
        traces = map_trajectories(
            _coherence_samples, job, ensemble_size, seed_d, threads
        )
        t = _decoherence_times(cfg, params, d, units)
        mean_c = np.abs(np.mean(np.stack(traces), axis=0))
        gamma_analytic = units.rate_to_internal(effective_reduction_rate(d, params))
        if gamma_analytic > 0:
            slope, intercept, r2, slope_err = _linear_fit(t, np.log(mean_c))
            gamma_fit, gamma_err = -slope, slope_err
        else:
            # flat-coherence case: report the direct drift estimate
            drift = (mean_c[-1] - mean_c[0]) / (t[-1] - t[0]) / mean_c[0]
            sem = float(np.std(np.abs(np.stack(traces))[:, -1], ddof=1)
                        / np.sqrt(ensemble_size))
            gamma_fit, gamma_err, r2 = -drift, sem / mean_c[0] / (t[-1] - t[0]), 1.0
        reports.append(EnsembleReport(
            n_trajectories=ensemble_size,
            outcome_counts={},
            estimate=float(gamma_fit),
            stderr=float(gamma_err),
            fit_diagnostics={
                "separation": float(d),
                "gamma_analytic_internal": float(gamma_analytic),
                "gamma_fit_internal": float(gamma_fit),
                "r2": float(r2),
                "coherence_initial": float(mean_c[0]),
                "coherence_final": float(mean_c[-1]),
            },
            seed=seed_d,
        ))
    return reports


def _linear_fit(x: np.ndarray, y: np.ndarray):
    """OLS slope, intercept, R^2 and slope standard error."""
    res = stats.linregress(x, y)
    return res.slope, res.intercept, res.rvalue**2, res.stderr


# ---------------------------------------------------------------------------
# Fringe visibility
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VisibilityConfig:
    """Far-field interferometry: two packets held at separation d while the
    hit process acts, then read out on a momentum-space (far-field) screen.

    The fringes at period 2 pi / d in momentum sample the coherence at
    branch separation exactly d, which decays at exactly Gamma(d); a
    position-space screen would mix shorter separations and decay slower.
    The heavy mass freezes dispersion during the exposure.
    """

    sigma0: float = 1.0
    mass: float = 1e6
    grid_n: int = 1024
    grid_extent: float = 128.0
    hit_resolution: float = 1e-3  # Lambda * dt
    n_batches: int = 10
    n_fringes: float = 5.0


def momentum_screen(psi: WaveFunction, pad: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Far-field intensity: (p axis, |psi(p)|^2), both in ascending p order.

    Zero-padding by `pad` evaluates the transform on a p grid `pad` times
    finer; this is exact interpolation for a state supported inside the box.
    """
    n = psi.grid.n_points * pad
    phi = np.fft.fftshift(np.fft.fft(psi.amps, n=n))
    p_axis = np.fft.fftshift(2.0 * np.pi * np.fft.fftfreq(n, d=psi.grid.dx))
    intensity = np.abs(phi) ** 2 * psi.grid.dx**2 / (2.0 * np.pi)
    return p_axis, intensity


def _screen_worker(job, master_seed: int, index: int) -> np.ndarray:
    cfg, params, d, t_flight, units = job
    rng = trajectory_rng(master_seed, index)
    grid = Grid1D.centered(cfg.grid_n, cfg.grid_extent)
    left = gaussian_packet(grid, -d / 2.0, 0.0, cfg.sigma0, cfg.mass)
    right = gaussian_packet(grid, +d / 2.0, 0.0, cfg.sigma0, cfg.mass)
    psi0 = superpose(left, right, 1.0, 1.0)
    rate = params.total_rate_internal(units)
    dt = cfg.hit_resolution / rate if rate > 0 else t_flight / 1000.0
    rec = grw_trajectory(
        psi0, Potential.free(), params, t_flight, dt,
        sample_every=10**9, rng=rng, units=units, seed=index,
    )
    return momentum_screen(rec.final_state)[1]


def fringe_contrast(
    intensity: np.ndarray, axis: np.ndarray, fringe_spacing: float,
    n_fringes: float = 5.0,
) -> float:
    """Fringe contrast by lock-in demodulation at the known fringe period.

    For I(x) = E(x) (1 + V cos(2 pi x / spacing)) with a slowly varying
    envelope, projecting onto the quadratures over an integer number of
    fringes returns V.  Linear in I, so it stays unbiased when applied to a
    noisy ensemble mean (an extremum-picking estimator would not).
    """
    x = axis
    window = np.abs(x) <= 0.5 * n_fringes * fringe_spacing
    if not np.any(window):
        raise StatisticsError("empty fringe window")
    xi, yi = x[window], intensity[window]
    total = float(yi.sum())
    if total <= 0.0:
        raise StatisticsError("no intensity in the fringe window")
    phase = 2.0 * np.pi * xi / fringe_spacing
    c = float((yi * np.cos(phase)).sum())
    s = float((yi * np.sin(phase)).sum())
    return 2.0 * np.hypot(c, s) / total


def visibility_experiment(
    d: float,
    params: CollapseParams,
    t_flight: float,
    ensemble_size: int,
    cfg: VisibilityConfig,
    master_seed: int,
    threads: int = 1,
    units: UnitSystem = DEFAULT_UNITS,
    keep_screen: bool = False,
) -> dict:
    """Ensemble-averaged far-field pattern vs the no-collapse control.

    The far-field fringe period is 2 pi / d; its contrast tracks the
    coherence between the two arms at separation exactly d.
    """
    if d < 12.0 * cfg.sigma0:
        raise ConfigError(
            f"arms are not well separated: d = {d:g} < 12 sigma0 = "
            f"{12 * cfg.sigma0:g}"
        )
    if d + 12.0 * cfg.sigma0 > cfg.grid_extent:
        raise ConfigError(
            f"arms do not fit the box: d + 12 sigma0 = "
            f"{d + 12 * cfg.sigma0:g} > extent = {cfg.grid_extent:g}"
        )
    fringe_spacing = 2.0 * np.pi / d
    grid = Grid1D.centered(cfg.grid_n, cfg.grid_extent)
    pad = 8
    p_axis = momentum_screen(
        gaussian_packet(grid, 0.0, 0.0, cfg.sigma0, cfg.mass), pad
    )[0]
    if pad * cfg.grid_extent / d < 8.0:
        raise ConfigError(
            f"far-field sampling too coarse: {pad * cfg.grid_extent / d:.1f} "
            "points per fringe (need >= 8)"
        )

    # no-collapse control is deterministic: a single trajectory suffices
    control_params = CollapseParams(0.0, params.r_c, params.n_nucleons)
    job0 = (cfg, control_params, d, t_flight, units)
    ideal = _screen_worker(job0, master_seed, 0)
    v_ideal = fringe_contrast(ideal, p_axis, fringe_spacing, cfg.n_fringes)

    job = (cfg, params, d, t_flight, units)
    densities = map_trajectories(_screen_worker, job, ensemble_size, master_seed, threads)
    stack = np.stack(densities)
    mean_intensity = stack.mean(axis=0)
    v_measured = fringe_contrast(mean_intensity, p_axis, fringe_spacing, cfg.n_fringes)

    # batch-means error bar on the contrast ratio
    batches = np.array_split(stack, cfg.n_batches)
    ratios = []
    for batch in batches:
        if len(batch) == 0:
            continue
        try:
            v_b = fringe_contrast(batch.mean(axis=0), p_axis, fringe_spacing, cfg.n_fringes)
        except StatisticsError:
            v_b = 0.0
        ratios.append(v_b / v_ideal)
    ratios = np.asarray(ratios)
    stderr = float(np.std(ratios, ddof=1) / np.sqrt(len(ratios))) if len(ratios) > 1 else 0.0

    v_analytic = float(
        np.exp(-effective_reduction_rate(d, params) * units.time_to_si(t_flight))
    )
    result = {
        "V_measured": float(v_measured),
        "V_ideal": float(v_ideal),
        "ratio": float(v_measured / v_ideal),
        "ratio_stderr": stderr,
        "V_analytic": v_analytic,
        "fringe_spacing": float(fringe_spacing),
        "n_trajectories": ensemble_size,
        "seed": master_seed,
    }
    if keep_screen:
        result["screen"] = {"p": p_axis, "mean": mean_intensity, "ideal": ideal}
    return result


# ---------------------------------------------------------------------------
# Heating and momentum diffusion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeatingConfig:
    sigma0: float = 2.0
    mass: float = 1.0
    grid_n: int = 512
    grid_extent: float = 128.0
    dt: float = 0.025
    sample_every: int = 10


def _heating_worker(job, master_seed: int, index: int):
    cfg, params, t_total, units = job
    rng = trajectory_rng(master_seed, index)
    grid = Grid1D.centered(cfg.grid_n, cfg.grid_extent)
    psi0 = gaussian_packet(grid, 0.0, 0.0, cfg.sigma0, cfg.mass)
    rec = grw_trajectory(
        psi0, Potential.free(), params, t_total, cfg.dt,
        cfg.sample_every, rng, units=units, seed=index,
    )
    energy = np.array([o["energy"] for o in rec.observables_at_samples])
    p2 = np.array([o["mean_p2"] for o in rec.observables_at_samples])
    return np.array(rec.sample_times), energy, p2, rec.n_hits()


def heating_experiment(
    params: CollapseParams,
    t_total: float,
    ensemble_size: int,
    cfg: HeatingConfig,
    master_seed: int,
    threads: int = 1,
    units: UnitSystem = DEFAULT_UNITS,
    keep_curves: bool = False,
) -> dict:
    """Linear fit of ensemble-mean energy and <p^2> growth vs time."""
    from .rates import heating_rate, momentum_diffusion_rate

    rate = params.total_rate_internal(units, cfg.mass)
    if rate * t_total < 5.0:
        raise StatisticsError(
            f"expected hits {rate * t_total:.2f} < 5; increase t_total or lambda"
        )
    job = (cfg, params, t_total, units)
    results = map_trajectories(_heating_worker, job, ensemble_size, master_seed, threads)
    t = results[0][0]
    energy = np.stack([r[1] for r in results]).mean(axis=0)
    p2 = np.stack([r[2] for r in results]).mean(axis=0)
    hits = float(np.mean([r[3] for r in results]))

    slope_e, _, r2_e, err_e = _linear_fit(t, energy)
    slope_p2, _, r2_p2, err_p2 = _linear_fit(t, p2)
    result = {
        "slope_energy": float(slope_e),
        "slope_energy_stderr": float(err_e),
        "slope_energy_analytic": heating_rate(rate, cfg.mass, params.r_c),
        "slope_p2": float(slope_p2),
        "slope_p2_stderr": float(err_p2),
        "slope_p2_analytic": momentum_diffusion_rate(rate, params.r_c),
        "r2_energy": float(r2_e),
        "r2_p2": float(r2_p2),
        "mean_hits": hits,
        "n_trajectories": ensemble_size,
        "seed": master_seed,
    }
    if keep_curves:
        result["curves"] = {"t": t, "energy": energy, "p2": p2}
    return result
