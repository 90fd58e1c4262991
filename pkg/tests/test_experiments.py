"""Small-ensemble smoke checks; the full-size gates live in test_acceptance."""

import numpy as np
import pytest

from grwlab.collapse import CollapseParams
from grwlab.errors import ConfigError, StatisticsError
from grwlab.experiments import (
    DecoherenceConfig,
    EnsembleReport,
    HeatingConfig,
    MeasurementConfig,
    VisibilityConfig,
    born_ensemble,
    born_trial,
    decoherence_scan,
    fringe_contrast,
    heating_experiment,
    momentum_screen,
    visibility_experiment,
)
from grwlab.qstate import Grid1D, gaussian_packet, superpose
from grwlab.rngstream import trajectory_rng
from grwlab.units import convert_rate_to_si

THREADS = 2


def _params(lambda_internal, r_c, **kw):
    return CollapseParams(convert_rate_to_si(lambda_internal), r_c, **kw)


def test_born_trial_decides():
    cfg = MeasurementConfig(c_up=np.sqrt(0.5), c_down=np.sqrt(0.5))
    params = _params(1.0, 1.0, n_nucleons=cfg.pointer_n_nucleons)
    outcome = born_trial(cfg, params, trajectory_rng(0, 0))
    assert outcome in ("up", "down")


def test_born_degenerate_amplitudes():
    cfg = MeasurementConfig(c_up=1.0, c_down=0.0)
    params = _params(1.0, 1.0, n_nucleons=cfg.pointer_n_nucleons)
    report = born_ensemble(cfg, params, 20, master_seed=1, threads=THREADS)
    assert report.outcome_counts == {"up": 20, "down": 0}
    assert report.fit_diagnostics["p_value"] == 1.0


def test_born_small_ensemble_tracks_weights():
    cfg = MeasurementConfig(c_up=np.sqrt(0.8), c_down=np.sqrt(0.2))
    params = _params(1.0, 1.0, n_nucleons=cfg.pointer_n_nucleons)
    report = born_ensemble(cfg, params, 200, master_seed=2, threads=THREADS)
    # 5 sigma guard band at this small n
    assert abs(report.estimate - 0.8) < 5 * np.sqrt(0.8 * 0.2 / 200)


def test_born_normalization_enforced():
    with pytest.raises(ConfigError):
        MeasurementConfig(c_up=1.0, c_down=1.0)


def test_decoherence_zero_separation_keeps_coherence():
    params = _params(2.0, 1.0)
    cfg = DecoherenceConfig(n_samples=8)
    (report,) = decoherence_scan([0.0], params, 40, cfg, master_seed=3,
                                 threads=THREADS)
    assert report.fit_diagnostics["gamma_analytic_internal"] == 0.0
    assert report.fit_diagnostics["coherence_final"] == pytest.approx(
        report.fit_diagnostics["coherence_initial"], rel=0.05
    )


def test_decoherence_fit_tracks_analytic_small_n():
    params = _params(2.0, 1.0)
    cfg = DecoherenceConfig(n_samples=8)
    (report,) = decoherence_scan([2.0], params, 150, cfg, master_seed=4,
                                 threads=THREADS)
    gamma = report.fit_diagnostics["gamma_analytic_internal"]
    assert report.estimate == pytest.approx(gamma, rel=0.25)
    assert report.fit_diagnostics["r2"] > 0.9


def test_fringe_contrast_synthetic():
    x = np.linspace(-3.0, 3.0, 4001)
    spacing = 0.5
    for v in (1.0, 0.5, 0.1):
        pattern = np.exp(-0.1 * x**2) * (1 + v * np.cos(2 * np.pi * x / spacing))
        assert fringe_contrast(pattern, x, spacing, 6.0) == pytest.approx(v, rel=0.02)
    flat = np.exp(-0.1 * x**2)
    assert fringe_contrast(flat, x, spacing, 6.0) < 0.01


def test_momentum_screen_of_two_packets_has_fringes():
    grid = Grid1D.centered(1024, 128.0)
    d = 64.0
    psi = superpose(
        gaussian_packet(grid, -d / 2, 0.0, 1.0, 1e6),
        gaussian_packet(grid, +d / 2, 0.0, 1.0, 1e6),
        1.0, 1.0,
    )
    p, intensity = momentum_screen(psi)
    assert fringe_contrast(intensity, p, 2 * np.pi / d, 5.0) == pytest.approx(
        1.0, abs=0.02
    )


def test_visibility_separation_preconditions():
    cfg = VisibilityConfig()
    with pytest.raises(ConfigError):
        visibility_experiment(4.0, _params(1.0, 1.0), 1.0, 4, cfg, 0)
    with pytest.raises(ConfigError):
        visibility_experiment(200.0, _params(1.0, 1.0), 1.0, 4, cfg, 0)


def test_visibility_zero_rate_control():
    cfg = VisibilityConfig()
    res = visibility_experiment(64.0, CollapseParams(0.0, 4.0), 1.0, 8, cfg, 5,
                                threads=THREADS)
    assert res["ratio"] == pytest.approx(1.0, abs=1e-9)
    assert res["V_analytic"] == 1.0


def test_heating_needs_enough_hits():
    cfg = HeatingConfig()
    with pytest.raises(StatisticsError):
        heating_experiment(_params(0.1, 1.0), 1.0, 4, cfg, 0)


def test_heating_small_ensemble_sane():
    cfg = HeatingConfig()
    res = heating_experiment(_params(4.0, 1.0), 5.0, 200, cfg, master_seed=6,
                             threads=THREADS)
    assert res["slope_energy_analytic"] == pytest.approx(1.0)
    assert res["slope_p2_analytic"] == pytest.approx(2.0)
    # generous band: the tight 5% gate runs at n = 1e4 in the acceptance suite
    assert res["slope_energy"] == pytest.approx(res["slope_energy_analytic"], rel=0.3)
    assert res["slope_p2"] == pytest.approx(res["slope_p2_analytic"], rel=0.3)
    assert res["mean_hits"] == pytest.approx(20.0, rel=0.1)


def test_report_rejects_bad_counts():
    with pytest.raises(Exception):
        EnsembleReport(
            n_trajectories=10,
            outcome_counts={"up": 4, "down": 4},  # does not sum to n
            estimate=0.4,
            stderr=0.1,
            fit_diagnostics={},
            seed=0,
        )
