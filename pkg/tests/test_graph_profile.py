import math

import numpy as np
import pytest

from lensshrinker import (MonitorViolation, StepControl, integrate_graph,
                          j_function, picard_analytic, seed_from_series,
                          transversality_monitor)
from lensshrinker.graph_profile import (ProfileSample, comparison_ratio,
                                        seed_quadratures, trajectory_to_csv)
from lensshrinker.series import R_STAR

SQRT2 = math.sqrt(2.0)


def make_trajectory(a, x_stop=None, ctl=None, x_seed=1e-3):
    h = picard_analytic(a, R_STAR)
    seed = seed_from_series(h, a, x_seed)
    return integrate_graph(seed, a, x_stop=x_stop, step_ctl=ctl, series=h)


# ---------------------------------------------------------------------------
# seeding
# ---------------------------------------------------------------------------

def test_seed_limits_toward_axis():
    a = 0.8
    h = picard_analytic(a, R_STAR)
    for x_seed in (1e-3, 1e-5, 1e-7):
        p = seed_from_series(h, a, x_seed)
        assert abs(p.f - a) < a * x_seed
        assert abs(p.fp) < a * x_seed
        assert p.fpp == pytest.approx(-a / 2.0, rel=1e-5)
    tiny = seed_from_series(h, a, 1e-9)
    assert tiny.fpp == pytest.approx(-a / 2.0, rel=1e-12)


def test_seed_rejects_outside_certified_radius():
    h = picard_analytic(1.0, R_STAR)
    with pytest.raises(ValueError):
        seed_from_series(h, 1.0, R_STAR)
    with pytest.raises(ValueError):
        seed_from_series(h, 1.0, -1e-3)


def test_seed_tracks_linear_solution_for_small_height():
    a = 1e-2
    h = picard_analytic(a, R_STAR)
    J = j_function(64)
    x_seed = 1e-3
    p = seed_from_series(h, a, x_seed)
    rel = abs(p.f / a - (1.0 - J(x_seed)))
    assert rel < 10.0 * a * a


# ---------------------------------------------------------------------------
# integration against the exact circle
# ---------------------------------------------------------------------------

def test_circle_pointwise_regression():
    traj = make_trajectory(SQRT2)
    xs = np.linspace(1e-3, 0.99, 400)
    f = traj.at(xs)[0]
    assert np.max(np.abs(f - np.sqrt(2.0 - xs * xs))) < 1e-9


def test_circle_stops_at_slope_cap():
    traj = make_trajectory(SQRT2)
    assert traj.stop_reason == "slope_cap"
    assert traj.x_end > 1.0
    assert traj.fp[-1] == pytest.approx(-50.0, abs=1e-6)


def test_circle_arclength_at_one():
    traj = make_trajectory(SQRT2, x_stop=1.0)
    assert traj.stop_reason == "x_stop"
    assert traj.s[-1] == pytest.approx(math.pi * SQRT2 / 4.0, abs=1e-10)


def test_small_height_stops_at_floor():
    traj = make_trajectory(0.05)
    assert traj.stop_reason == "height_floor"
    assert traj.f[-1] == pytest.approx(0.01 * 0.05, rel=1e-9)
    assert traj.x_end > 1.0


# ---------------------------------------------------------------------------
# monitors
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("a", [0.1, 0.5, 1.0, SQRT2])
def test_proved_bounds_hold(a):
    traj = make_trajectory(a)
    assert min(traj.monitors.values()) >= -1e-9
    strip = (traj.x > 0.0) & (traj.x < 1.0)
    xs, fs, fps = traj.x[strip], traj.f[strip], traj.fp[strip]
    assert np.all(fs > a * np.sqrt(1.0 - xs * xs))
    assert np.all(fs < a)
    assert np.all(fps < 0.0)
    assert np.all(fps > -a * xs / (1.0 - xs * xs))
    assert np.all(traj.fpp < 0.0)


def test_comparison_ratio_increases():
    traj = make_trajectory(1.0)
    F = comparison_ratio(traj)
    assert np.all(np.diff(F) > 0.0)


def test_samples_strictly_increasing_from_seed():
    traj = make_trajectory(1.0)
    assert traj.x[0] == 1e-3
    assert np.all(np.diff(traj.x) > 0.0)
    assert np.all(np.diff(traj.s) > 0.0)


def test_height_at_one_is_interior():
    for a in (0.1, 1.0, SQRT2):
        traj = make_trajectory(a)
        f1 = float(traj.at(1.0)[0])
        assert 0.0 < f1 < a


def test_transversality_floor_at_origin_is_trivial():
    # at x = 0 the floor reads a - a/sqrt(1+a^2) > 0
    for a in (0.1, 1.0, 2.0):
        assert a - a / math.sqrt(1.0 + a * a) > 0.0


def test_transversality_on_exact_circle():
    # for the circle the quantity is the constant sqrt(2)
    xs = np.linspace(0.01, 0.99, 50)
    f = np.sqrt(2.0 - xs * xs)
    fp = -xs / f
    val = (f - xs * fp) / np.sqrt(1.0 + fp * fp)
    assert np.allclose(val, SQRT2, rtol=1e-13)
    assert np.all(val >= SQRT2 / math.sqrt(3.0))


def test_transversality_monitor_positive():
    for a in (0.1, 1.0, SQRT2):
        traj = make_trajectory(a)
        assert transversality_monitor(traj, a) > 0.0


def test_monitor_violation_on_inconsistent_seed():
    # a seed with positive slope contradicts every slope bound
    bad = ProfileSample(1e-3, 1.0, +0.5, 0.0)
    with pytest.raises(MonitorViolation):
        integrate_graph(bad, 1.0, x_stop=0.5)


# ---------------------------------------------------------------------------
# numerical consistency
# ---------------------------------------------------------------------------

def test_seed_independence():
    a = 1.0
    h = picard_analytic(a, R_STAR)
    vals = []
    for x_seed in (1e-3, 5e-4):
        seed = seed_from_series(h, a, x_seed)
        traj = integrate_graph(seed, a, x_stop=0.9, series=h)
        vals.append(float(traj.at(0.5)[0]))
    assert abs(vals[0] - vals[1]) < 1e-10


def test_step_size_convergence():
    a = 1.0
    h = picard_analytic(a, R_STAR)
    seed = seed_from_series(h, a, 1e-3)
    coarse = integrate_graph(seed, a, x_stop=1.0,
                             step_ctl=StepControl(rtol=1e-9, atol=1e-9),
                             series=h)
    fine = integrate_graph(seed, a, x_stop=1.0,
                           step_ctl=StepControl(rtol=5e-10, atol=5e-10),
                           series=h)
    assert abs(coarse.f[-1] - fine.f[-1]) < 1e-9


def test_quadrature_seed_values():
    # over [0, x_seed] the arclength is x_seed to fourth order
    a = 1.0
    h = picard_analytic(a, R_STAR)
    s0, iphi0, iv0 = seed_quadratures(h, a, 1e-3)
    assert s0 == pytest.approx(1e-3, rel=1e-6)
    # i_phi integrand tends to -(a/2) e^{-a^2/2} at the axis
    assert iphi0 == pytest.approx(-0.5 * math.exp(-0.5) * 1e-3, rel=1e-5)
    assert iv0 == pytest.approx(math.exp(-0.5) * 1e-3, rel=1e-5)


def test_csv_export(tmp_path):
    traj = make_trajectory(0.5)
    path = tmp_path / "traj.csv"
    trajectory_to_csv(traj, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,f,fp,fpp,F,slack_lower,slack_upper,slack_transversality"
    assert len(lines) == len(traj.x) + 1
    first = [float(v) for v in lines[1].split(",")]
    assert first[0] == pytest.approx(traj.x[0], rel=1e-16)
