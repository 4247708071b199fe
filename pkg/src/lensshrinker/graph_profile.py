"""Continuation of the profile through the graph region y = f(x).

Away from the axis the profile height satisfies the regular ODE

    f'' = (1 + f'^2) [ f' (x - 1/x) - f ],

which we integrate from a series-seeded point x_seed > 0 with an adaptive
high-order Runge-Kutta scheme.  Three running quadratures ride along as
extra state components so that the later arclength stage inherits them at
integrator accuracy:

    s     = arclength from the axis,
    i_phi = int e^{-(x^2+f^2)/2} f' / (x sqrt(1+f'^2)) dx   (curvature kernel),
    i_v   = int e^{-(x^2+f^2)/2} f  sqrt(1+f'^2) dx.

Every inequality proved for this region is monitored at the accepted steps:
the height bounds a sqrt(1-x^2) < f < a, the slope bounds
-a x/(1-x^2) < f' < 0, concavity f'' < 0, monotonicity of the comparison
ratio F = f / sqrt(1-x^2), and the transversality floor
(f - x f') / sqrt(1+f'^2) >= a / sqrt(1+a^2) on [0, 1].  A violation beyond
tolerance raises, since it can only mean the integration is wrong.

Integration stops when the slope escapes a configured cap (the graph
description is near-vertical and the arclength system takes over) or, for
small heights where the slope stays tame all the way to the axis crossing,
when f falls below a small fraction of a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import MonitorViolation, StepFailure
from .series import EvenSeries, gauss_legendre_composite

MONITOR_SLACK_TOL = -1e-9

DEFAULT_X_SEED = 1e-3
DEFAULT_SLOPE_CAP = 50.0
DEFAULT_FLOOR_FRACTION = 0.01
DEFAULT_X_MAX = 3.0
DEFAULT_RTOL = 1e-12
DEFAULT_ATOL = 1e-12


@dataclass(frozen=True)
class ProfileSample:
    """One point of the graph solution y = f(x)."""

    x: float
    f: float
    fp: float
    fpp: float


@dataclass(frozen=True)
class StepControl:
    """Integrator and stopping controls for the graph region."""

    rtol: float = DEFAULT_RTOL
    atol: float = DEFAULT_ATOL
    slope_cap: float = DEFAULT_SLOPE_CAP
    floor_fraction: float = DEFAULT_FLOOR_FRACTION
    x_max: float = DEFAULT_X_MAX


@dataclass
class ProfileTrajectory:
    """Accepted-step record of one graph integration, with quadratures.

    Arrays are aligned; ``x`` is strictly increasing and starts at the seed
    abscissa.  ``monitors`` maps each monitored inequality to its worst
    slack (nonnegative means satisfied).  The seeding series is retained so
    downstream stages can reproduce the segment [0, x_seed] analytically.
    """

    a: float
    x: np.ndarray
    f: np.ndarray
    fp: np.ndarray
    fpp: np.ndarray
    s: np.ndarray
    i_phi: np.ndarray
    i_v: np.ndarray
    x_end: float
    stop_reason: str
    monitors: dict = field(default_factory=dict)
    series: EvenSeries | None = None
    x_seed: float = DEFAULT_X_SEED
    _dense = None

    @property
    def samples(self) -> list[ProfileSample]:
        return [ProfileSample(float(x), float(f), float(fp), float(fpp))
                for x, f, fp, fpp in zip(self.x, self.f, self.fp, self.fpp)]

    @property
    def last_sample(self) -> ProfileSample:
        return ProfileSample(float(self.x[-1]), float(self.f[-1]),
                             float(self.fp[-1]), float(self.fpp[-1]))

    def at(self, x):
        """Dense-output evaluation (f, f', s, i_phi, i_v) at abscissa x."""
        if self._dense is None:
            raise ValueError("trajectory has no dense output")
        return self._dense(x)


def graph_rhs(x, y):
    """State (f, f', s, i_phi, i_v); the profile ODE plus quadratures."""
    f, fp = y[0], y[1]
    w = 1.0 + fp * fp
    sq = math.sqrt(w)
    e = math.exp(-0.5 * (x * x + f * f))
    return [fp,
            w * (fp * (x - 1.0 / x) - f),
            sq,
            e * fp / (x * sq),
            e * f * sq]


def seed_from_series(h: EvenSeries, a: float, x_seed: float) -> ProfileSample:
    """Evaluate the axis series at x_seed as the graph initial condition.

    Returns (x_seed, a + h, h', h''); rejects seeds at or beyond the
    certified radius of the series.
    """
    if not 0.0 < x_seed:
        raise ValueError("x_seed must be positive")
    if x_seed >= h.radius:
        raise ValueError(f"x_seed={x_seed} is not inside the certified "
                         f"radius {h.radius}")
    return ProfileSample(x_seed, a + h(x_seed), h.deriv(x_seed), h.deriv2(x_seed))


def seed_quadratures(h: EvenSeries, a: float, x_seed: float,
                     nodes: int = 40) -> tuple[float, float, float]:
    """Initial (s, i_phi, i_v) from the series on [0, x_seed].

    Gauss-Legendre on the analytic segment; the i_phi integrand uses the
    even function h'(x)/x directly, so its removable singularity at the
    axis (limit -(a/2) e^{-a^2/2}) never meets a numerical 1/x.
    """
    t, w = gauss_legendre_composite(0.0, x_seed, 1, nodes)
    f = a + h(t)
    hp_over_x = h.deriv_over_x(t)
    fp = hp_over_x * t
    sq = np.sqrt(1.0 + fp * fp)
    e = np.exp(-0.5 * (t * t + f * f))
    return (float(np.sum(w * sq)),
            float(np.sum(w * e * hp_over_x / sq)),
            float(np.sum(w * e * f * sq)))


def integrate_graph(seed: ProfileSample, a: float, x_stop: float | None = None,
                    step_ctl: StepControl | None = None, *,
                    series: EvenSeries | None = None) -> ProfileTrajectory:
    """Integrate the graph ODE from the seed until the handoff trigger.

    Stops at the first of: |f'| reaching the slope cap (near-vertical
    tangent), f dropping to floor_fraction * a (the crossing is imminent
    and belongs to the arclength stage), or x reaching x_stop when given.
    The trajectory always extends past x = 1 with f(1) > 0.

    When the seeding series is supplied, the running quadratures start from
    their exact values on [0, x_seed]; otherwise they start at zero and the
    trajectory only supports geometry, not the curvature integral identity.

    Raises MonitorViolation if any proved inequality fails beyond tolerance
    and StepFailure if the integrator gives up.
    """
    ctl = step_ctl or StepControl()
    if series is not None:
        s0, iphi0, iv0 = seed_quadratures(series, a, seed.x)
    else:
        s0, iphi0, iv0 = 0.0, 0.0, 0.0

    def slope_event(x, y):
        return y[1] + ctl.slope_cap

    slope_event.terminal = True
    slope_event.direction = -1

    def floor_event(x, y):
        return y[0] - ctl.floor_fraction * a

    floor_event.terminal = True
    floor_event.direction = -1

    x_end = ctl.x_max if x_stop is None else x_stop
    sol = solve_ivp(graph_rhs, (seed.x, x_end),
                    [seed.f, seed.fp, s0, iphi0, iv0],
                    method="DOP853", rtol=ctl.rtol, atol=ctl.atol,
                    dense_output=True, events=[slope_event, floor_event])
    if sol.status < 0:
        raise StepFailure(f"graph integration failed at a={a}: {sol.message}")
    if sol.status == 1:
        stop_reason = "slope_cap" if len(sol.t_events[0]) else "height_floor"
    else:
        stop_reason = "x_stop" if x_stop is not None else "x_max"

    x = sol.t
    f, fp, s, i_phi, i_v = sol.y
    fpp = np.array([graph_rhs(xi, yi)[1] for xi, yi in zip(x, sol.y.T)])
    traj = ProfileTrajectory(a=a, x=x, f=f, fp=fp, fpp=fpp, s=s,
                             i_phi=i_phi, i_v=i_v, x_end=float(x[-1]),
                             stop_reason=stop_reason, series=series,
                             x_seed=seed.x)
    traj._dense = sol.sol
    traj.monitors = evaluate_monitors(traj, a)
    worst = min(traj.monitors.values())
    if worst < MONITOR_SLACK_TOL:
        bad = {k: v for k, v in traj.monitors.items() if v < MONITOR_SLACK_TOL}
        raise MonitorViolation(f"graph monitors violated at a={a}: {bad}")
    return traj


def comparison_ratio(traj: ProfileTrajectory) -> np.ndarray:
    """F(x) = f / sqrt(1 - x^2) on samples with x < 1; strictly increasing."""
    mask = traj.x < 1.0
    return traj.f[mask] / np.sqrt(1.0 - traj.x[mask] ** 2)


def transversality_monitor(traj: ProfileTrajectory, a: float) -> float:
    """Worst slack of (f - x f')/sqrt(1+f'^2) - a/sqrt(1+a^2) on [0, 1]."""
    mask = traj.x <= 1.0
    x, f, fp = traj.x[mask], traj.f[mask], traj.fp[mask]
    lhs = (f - x * fp) / np.sqrt(1.0 + fp * fp)
    return float(np.min(lhs - a / math.sqrt(1.0 + a * a)))


def evaluate_monitors(traj: ProfileTrajectory, a: float) -> dict:
    """Worst slack of every proved inequality over the accepted steps."""
    x, f, fp, fpp = traj.x, traj.f, traj.fp, traj.fpp
    strip = (x > 0.0) & (x < 1.0)
    xs, fs, fps = x[strip], f[strip], fp[strip]
    lower = fs - a * np.sqrt(1.0 - xs * xs)
    upper = a - fs
    slope_low = fps + a * xs / (1.0 - xs * xs)
    slope_high = -fps
    ratio = fs / np.sqrt(1.0 - xs * xs)
    monitors = {
        "height_lower": float(np.min(lower)) if len(xs) else math.inf,
        "height_upper": float(np.min(upper)) if len(xs) else math.inf,
        "slope_lower": float(np.min(slope_low)) if len(xs) else math.inf,
        "slope_upper": float(np.min(slope_high)) if len(xs) else math.inf,
        "ratio_monotone": float(np.min(np.diff(ratio))) if len(xs) > 1 else math.inf,
        "concavity": float(np.min(-fpp)),
        "height_positive": float(np.min(f)),
        "slope_negative": float(np.min(-fp[x > traj.x_seed]))
        if np.any(x > traj.x_seed) else math.inf,
        "transversality": transversality_monitor(traj, a),
    }
    return monitors


def trajectory_to_csv(traj: ProfileTrajectory, path) -> None:
    """Write x, f, fp, fpp, F, slack_lower, slack_upper, slack_transversality."""
    a = traj.a
    x, f, fp, fpp = traj.x, traj.f, traj.fp, traj.fpp
    with np.errstate(divide="ignore", invalid="ignore"):
        one_minus = 1.0 - x * x
        F = np.where(one_minus > 0.0, f / np.sqrt(np.abs(one_minus)), np.nan)
        slack_lower = np.where(one_minus > 0.0,
                               f - a * np.sqrt(np.abs(one_minus)), np.nan)
    slack_upper = a - f
    slack_trans = ((f - x * fp) / np.sqrt(1.0 + fp * fp)
                   - a / math.sqrt(1.0 + a * a))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,f,fp,fpp,F,slack_lower,slack_upper,slack_transversality\n")
        for row in zip(x, f, fp, fpp, F, slack_lower, slack_upper, slack_trans):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
