import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from grwlab.collapse import (
    CollapseParams,
    apply_hit,
    effective_reduction_rate,
    grw_trajectory,
    hit_position_density,
    localization_amplitude,
    sample_hit_center,
    sample_next_hit_time,
)
from grwlab.errors import DomainError, GridMismatchError
from grwlab.propagator import Potential, split_step
from grwlab.qstate import Grid1D, gaussian_packet, superpose
from grwlab.rngstream import trajectory_rng
from grwlab.units import DEFAULT_UNITS, convert_rate_to_si

GRID = Grid1D.centered(512, 64.0)


def _params(lambda_internal: float, r_c: float, **kw) -> CollapseParams:
    return CollapseParams(convert_rate_to_si(lambda_internal), r_c, **kw)


def test_params_validation():
    with pytest.raises(DomainError):
        CollapseParams(-1e-16, 1.0)
    with pytest.raises(DomainError):
        CollapseParams(1e-16, 0.0)
    with pytest.raises(DomainError):
        CollapseParams(1e-16, 1.0, n_nucleons=0.5)


def test_total_rate_amplification():
    p = CollapseParams(1e-16, 1.0, n_nucleons=2)
    assert p.total_rate_si() == pytest.approx(2e-16)
    csl = CollapseParams(1e-16, 1.0, mass_scaling=True)
    assert csl.total_rate_si(mass_in_mN=1e8) == pytest.approx(1e-8)
    with pytest.raises(DomainError):
        csl.total_rate_si()  # mass scaling needs the state mass


def test_waiting_times_exponential(rng):
    rate = 2.0
    taus = np.array([sample_next_hit_time(rate, rng) for _ in range(20_000)])
    assert taus.mean() == pytest.approx(1.0 / rate, rel=0.03)
    assert taus.std() == pytest.approx(1.0 / rate, rel=0.03)
    assert sample_next_hit_time(0.0, rng) is None


def test_localization_amplitude_shape():
    r_c = 2.0
    g = localization_amplitude(GRID, 0.0, r_c)
    peak = (np.pi * r_c**2) ** -0.25
    assert g.max() == pytest.approx(peak, rel=1e-12)
    # Gaussian in the displacement with width r_c (of the amplitude)
    x = GRID.x
    expected = peak * np.exp(-(x**2) / (2 * r_c**2))
    np.testing.assert_allclose(g, expected, rtol=1e-10)


def test_localization_uses_minimum_image():
    g = localization_amplitude(GRID, GRID.x_min, 1.0)
    # the point one cell inside the opposite edge is close on the ring
    assert g[-1] > 0.5 * g.max()


def test_hit_suppresses_far_branch():
    a = gaussian_packet(GRID, -10.0, 0.0, 1.0, 1.0)
    b = gaussian_packet(GRID, +10.0, 0.0, 1.0, 1.0)
    psi = superpose(a, b, 1.0, 1.0)
    hit, weight = apply_hit(psi, -10.0, r_c=1.0)
    # half the weight sits in the left branch; the Gaussian overlap integral
    # of kernel (var 1/2) against density (var 1) contributes 1/sqrt(3 pi)
    assert weight == pytest.approx(0.5 / np.sqrt(3 * np.pi), rel=1e-3)
    rho = hit.density()
    left = rho[GRID.x < 0].sum()
    right = rho[GRID.x > 0].sum()
    assert right / left < 1e-20


def test_per_hit_momentum_kick_is_exact():
    # <p^2> grows by exactly hbar^2 / (2 r_c^2) on average, any state
    from grwlab.qstate import observables

    r_c = 1.5
    rng = trajectory_rng(7, 0)
    psi = gaussian_packet(GRID, 0.0, 0.5, 1.0, 1.0)
    before = observables(psi)["mean_p2"]
    deltas = []
    for _ in range(400):
        p = hit_position_density(psi, r_c)
        a = sample_hit_center(p, GRID, rng)
        hit, _ = apply_hit(psi, a, r_c)
        deltas.append(observables(hit)["mean_p2"] - before)
    assert np.mean(deltas) == pytest.approx(1.0 / (2 * r_c**2), rel=0.02)


def test_hit_center_distribution(rng):
    r_c = 1.0
    psi = gaussian_packet(GRID, 0.5, 0.0, 1.0, 1.0)
    p = hit_position_density(psi, r_c)
    centers = np.array([sample_hit_center(p, GRID, rng) for _ in range(20_000)])
    # density is |psi|^2 convolved with a Gaussian of variance r_c^2 / 2
    assert centers.mean() == pytest.approx(0.5, abs=0.03)
    assert centers.var() == pytest.approx(1.0 + r_c**2 / 2, rel=0.05)


def test_hit_density_normalized():
    psi = gaussian_packet(GRID, -3.0, 1.0, 2.0, 1.0)
    p = hit_position_density(psi, 1.0)
    assert p.sum() * GRID.dx == pytest.approx(1.0, rel=1e-9)
    assert (p >= 0).all()


def test_kernel_resolution_guards():
    psi = gaussian_packet(GRID, 0.0, 0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        hit_position_density(psi, r_c=0.1)  # < 2 dx
    with pytest.raises(DomainError):
        hit_position_density(psi, r_c=10.0)  # > extent / 8


def test_effective_reduction_rate_limits():
    params = CollapseParams(1e-16, 1.0, n_nucleons=2)
    lam = params.total_rate_si()
    assert effective_reduction_rate(0.0, params) == 0.0
    assert effective_reduction_rate(2.0, params) == pytest.approx(
        lam * (1 - np.exp(-1.0)), rel=1e-12
    )
    assert effective_reduction_rate(1e4, params) == pytest.approx(lam, rel=1e-12)


def test_zero_rate_trajectory_is_schrodinger():
    psi = gaussian_packet(GRID, 0.0, 1.0, 1.0, 1.0)
    params = CollapseParams(0.0, 1.0)
    rec = grw_trajectory(
        psi, Potential.free(), params, 2.0, 0.004, 100, trajectory_rng(0, 0)
    )
    ref = split_step(psi, Potential.free(), 0.004, 500)
    np.testing.assert_array_equal(rec.final_state.amps, ref.amps)
    assert rec.events == []


def test_trajectory_seed_determinism():
    psi = gaussian_packet(GRID, 0.0, 0.0, 1.0, 200.0)
    params = _params(2.0, 1.0)
    runs = [
        grw_trajectory(
            psi, Potential.free(), params, 2.0, 0.004, 100,
            trajectory_rng(42, 3), seed=42,
        )
        for _ in range(2)
    ]
    np.testing.assert_array_equal(runs[0].final_state.amps, runs[1].final_state.amps)
    assert [e.t for e in runs[0].events] == [e.t for e in runs[1].events]


def test_two_packet_reduction_is_one_sided():
    # after Lambda t >> 1 the surviving density is (almost) all on one side
    psi = superpose(
        gaussian_packet(GRID, -8.0, 0.0, 1.0, 200.0),
        gaussian_packet(GRID, +8.0, 0.0, 1.0, 200.0),
        1.0, 1.0,
    )
    params = _params(2.5, 1.0)
    fractions = []
    for i in range(40):
        rec = grw_trajectory(
            psi, Potential.free(), params, 2.0, 0.004, 10**9,
            trajectory_rng(11, i), seed=11,
        )
        rho = rec.final_state.density()
        side = max(rho[GRID.x < 0].sum(), rho[GRID.x > 0].sum()) * GRID.dx
        fractions.append(side)
    assert np.median(fractions) > 0.99


def test_record_serializes():
    psi = gaussian_packet(GRID, 0.0, 0.0, 1.0, 200.0)
    rec = grw_trajectory(
        psi, Potential.free(), _params(3.0, 1.0), 1.0, 0.004, 50,
        trajectory_rng(5, 0), seed=5,
    )
    d = rec.to_json_dict()
    assert len(d["events"]) == rec.n_hits()
    assert len(d["sample_times"]) == len(d["observables_at_samples"])
    import json

    json.dumps(d)  # must be JSON-clean


@given(st.floats(min_value=0.3, max_value=3.0), st.floats(min_value=-8, max_value=8))
def test_povm_completeness(r_c, shift):
    # summing L(a)^2 over all hit centers resolves the identity
    g2 = np.array(
        [localization_amplitude(GRID, a + shift, r_c) ** 2 for a in GRID.x]
    )
    total = g2.sum(axis=0) * GRID.dx
    np.testing.assert_allclose(total, 1.0, rtol=1e-8)


@given(st.floats(min_value=0.0, max_value=50.0))
def test_reduction_rate_monotone_in_separation(d):
    params = CollapseParams(1e-16, 1.5, n_nucleons=10)
    g1 = effective_reduction_rate(d, params)
    g2 = effective_reduction_rate(d + 0.5, params)
    assert 0.0 <= g1 <= g2 <= params.total_rate_si()
