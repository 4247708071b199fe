"""Arclength continuation of the profile curve down to the horizontal axis.

The curve gamma(s) = (u(s), v(s)), parametrized by arclength, satisfies

    u'' = -v'^2 (u - 1/u) + u' v' v,
    v'' =  v' u' (u - 1/u) - u'^2 v,

with the shrinker identity -v' u'' + u' v'' + v'/u - u v' + v u' = 0 as a
consequence of unit speed.  Two quadratures ride in the state vector,

    i_phi(s) = int_0^s e^{-(u^2+v^2)/2} u' v' / u dt,
    i_v(s)   = int_0^s e^{-(u^2+v^2)/2} v dt,

because the curvature k = -v' u'' + u' v'' admits two integral forms tied
to the axis-orthogonal start,

    k = i_phi e^{(u^2+v^2)/2} / u
      = -v'/u - e^{(u^2+v^2)/2} i_v / u,

whose pointwise agreement with the algebraic form -v'/u + u v' - v u' is
the central consistency oracle of this stage.

The crossing v = 0 is located by root refinement on the dense output; the
first passage of u through 1 is recorded as s_star.  Transversality floors,
polar annulus bounds and the strict decrease of the polar angle (which
certifies that the curve cannot self-intersect) are monitored on the
computed states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InconsistentPrefix, MonitorViolation, NoCrossing, StepFailure
from .graph_profile import ProfileSample, ProfileTrajectory

MONITOR_SLACK_TOL = -1e-9
DRIFT_PROJECT_THRESHOLD = 1e-12
ARCLENGTH_HARD_CAP = 50.0

DEFAULT_RTOL = 1e-12
DEFAULT_ATOL = 1e-12
DEFAULT_EVENT_TOL = 1e-12


@dataclass(frozen=True)
class CurveState:
    """Arclength state with running quadratures."""

    s: float
    u: float
    v: float
    up: float
    vp: float
    i_phi: float = 0.0
    i_v: float = 0.0

    @property
    def rho(self) -> float:
        return math.hypot(self.u, self.v)

    @property
    def theta(self) -> float:
        return math.atan2(self.v, self.u)

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v, self.up, self.vp,
                         self.i_phi, self.i_v])


@dataclass(frozen=True)
class ArcControl:
    rtol: float = DEFAULT_RTOL
    atol: float = DEFAULT_ATOL
    event_tol: float = DEFAULT_EVENT_TOL


@dataclass
class LensProfile:
    """The full profile curve from the axis to the horizontal crossing.

    Arrays cover the graph region (converted to arclength states, including
    the exact axis point at s = 0 when a prefix is supplied) followed by the
    arclength integration; ``s`` is strictly increasing up to s_bar.
    """

    a: float
    s: np.ndarray
    u: np.ndarray
    v: np.ndarray
    up: np.ndarray
    vp: np.ndarray
    i_phi: np.ndarray
    i_v: np.ndarray
    s_bar: float
    s_star: float
    xi: float
    alpha: float
    v_residual: float
    drift_max: float
    projections: list
    monitors: dict

    @property
    def states(self) -> list[CurveState]:
        return [CurveState(*map(float, row))
                for row in zip(self.s, self.u, self.v, self.up, self.vp,
                               self.i_phi, self.i_v)]

    @property
    def end_state(self) -> CurveState:
        return CurveState(float(self.s[-1]), float(self.u[-1]),
                          float(self.v[-1]), float(self.up[-1]),
                          float(self.vp[-1]), float(self.i_phi[-1]),
                          float(self.i_v[-1]))


def arclength_rhs(s, y):
    u, v, up, vp = y[0], y[1], y[2], y[3]
    w = u - 1.0 / u
    e = math.exp(-0.5 * (u * u + v * v))
    return [up, vp,
            -vp * vp * w + up * vp * v,
            vp * up * w - up * up * v,
            e * up * vp / u,
            e * v]


def handoff_to_arclength(p: ProfileSample, prefix: ProfileTrajectory) -> CurveState:
    """Convert the last graph sample into an arclength state.

    The tangent is the normalized graph tangent, u' = 1/sqrt(1+f'^2) and
    v' = f'/sqrt(1+f'^2); arclength and quadratures continue from the
    running values the prefix accumulated (series segment included).
    """
    if abs(p.x - prefix.x[-1]) > 1e-12 or abs(p.f - prefix.f[-1]) > 1e-9:
        raise InconsistentPrefix("sample does not match the trajectory end")
    sq = math.sqrt(1.0 + p.fp * p.fp)
    return CurveState(s=float(prefix.s[-1]), u=p.x, v=p.f,
                      up=1.0 / sq, vp=p.fp / sq,
                      i_phi=float(prefix.i_phi[-1]), i_v=float(prefix.i_v[-1]))


def transversality_floor(a: float) -> float:
    """Lower bound (pi sqrt(e) / 8) a e^{-a^2/2} for the radial transversality
    (-u v' + v u') / rho along the whole curve."""
    return math.pi * math.sqrt(math.e) / 8.0 * a * math.exp(-0.5 * a * a)


def annulus_log_halfwidth(a: float) -> float:
    """Half-width of the band |log rho| < C pi/2 with C = sqrt(1-K^2)/K."""
    K = transversality_floor(a)
    return math.sqrt(1.0 - K * K) / K * math.pi / 2.0


def turning_floor(a: float) -> float:
    """Strict lower bound for -theta' along the curve; underflows to zero
    for tiny a, where the bound is void anyway."""
    K = transversality_floor(a)
    return K * math.exp(-annulus_log_halfwidth(a))


def _graph_states(prefix: ProfileTrajectory) -> tuple[np.ndarray, ...]:
    sq = np.sqrt(1.0 + prefix.fp ** 2)
    return (prefix.s, prefix.x, prefix.f, 1.0 / sq, prefix.fp / sq,
            prefix.i_phi, prefix.i_v)


def integrate_to_axis(start: CurveState, a: float,
                      step_ctl: ArcControl | None = None,
                      prefix: ProfileTrajectory | None = None) -> LensProfile:
    """Integrate the arclength system from the handoff state to v = 0.

    The crossing is event-detected on the dense output; s_star (first
    passage of u through 1) comes from the prefix when the crossing of
    x = 1 happened in the graph region, which it always does.  Integration
    fails safe at s_max = pi / (2 c_a) -- reaching it contradicts the
    guaranteed crossing and raises NoCrossing.

    The tangent is projected back to the unit circle whenever its norm
    drifts beyond 1e-12 (each projection is logged); all proved monitors
    are evaluated afterwards and violations raise MonitorViolation.
    """
    ctl = step_ctl or ArcControl()
    if a <= 0.0:
        raise ValueError("a must be positive")
    c_a = turning_floor(a)
    s_max = min(math.pi / (2.0 * c_a) if c_a > 0.0 else math.inf,
                start.s + ARCLENGTH_HARD_CAP)

    def crossing(s, y):
        return y[1]

    crossing.terminal = True
    crossing.direction = -1

    def u_passes_one(s, y):
        return y[0] - 1.0

    u_passes_one.direction = 1

    chunks_t, chunks_y = [], []
    projections = []
    s_star_arc = math.nan
    s_cur, y_cur = start.s, start.as_array()
    crossed = False
    s_bar = math.nan
    y_bar = None
    for _ in range(64):
        sol = solve_ivp(arclength_rhs, (s_cur, s_max), y_cur, method="DOP853",
                        rtol=ctl.rtol, atol=ctl.atol, dense_output=True,
                        events=[crossing, u_passes_one])
        if sol.status < 0:
            raise StepFailure(f"arclength integration failed at a={a}: "
                              f"{sol.message}")
        if len(sol.t_events[1]) and math.isnan(s_star_arc):
            s_star_arc = float(sol.t_events[1][0])
        drift = np.abs(sol.y[2] ** 2 + sol.y[3] ** 2 - 1.0)
        bad = np.flatnonzero(drift > DRIFT_PROJECT_THRESHOLD)
        if len(bad) and bad[0] < len(sol.t) - 1:
            cut = max(int(bad[0]), 1)
            chunks_t.append(sol.t[:cut])
            chunks_y.append(sol.y[:, :cut])
            s_cur = float(sol.t[cut])
            y_cur = sol.y[:, cut].copy()
            norm = math.hypot(y_cur[2], y_cur[3])
            projections.append((s_cur, norm - 1.0))
            y_cur[2] /= norm
            y_cur[3] /= norm
            continue
        chunks_t.append(sol.t)
        chunks_y.append(sol.y)
        if sol.status == 1:
            crossed = True
            s_bar = float(sol.t_events[0][0])
            y_bar = sol.y_events[0][0]
        break
    if not crossed:
        raise NoCrossing(f"no v=0 crossing before s_max={s_max} at a={a}; "
                         "this contradicts the guaranteed crossing")

    s_arc = np.concatenate(chunks_t)
    y_arc = np.concatenate(chunks_y, axis=1)
    # keep the refined event state as the final row
    keep = s_arc < s_bar
    s_arc = np.append(s_arc[keep], s_bar)
    y_arc = np.column_stack([y_arc[:, keep], y_bar])
    v_residual = abs(float(y_bar[1]))
    if v_residual > ctl.event_tol:
        raise NoCrossing(f"event refinement left |v(s_bar)|={v_residual}")

    if prefix is not None:
        gs, gu, gv, gup, gvp, gphi, gv2 = _graph_states(prefix)
        s_all = np.concatenate([[0.0], gs, s_arc])
        u_all = np.concatenate([[0.0], gu, y_arc[0]])
        v_all = np.concatenate([[a], gv, y_arc[1]])
        up_all = np.concatenate([[1.0], gup, y_arc[2]])
        vp_all = np.concatenate([[0.0], gvp, y_arc[3]])
        iphi_all = np.concatenate([[0.0], gphi, y_arc[4]])
        iv_all = np.concatenate([[0.0], gv2, y_arc[5]])
        if prefix.x[-1] >= 1.0:
            s_star = float(prefix.at(1.0)[2])
        else:
            s_star = s_star_arc
    else:
        s_all, u_all, v_all = s_arc, y_arc[0], y_arc[1]
        up_all, vp_all = y_arc[2], y_arc[3]
        iphi_all, iv_all = y_arc[4], y_arc[5]
        s_star = s_star_arc if start.u < 1.0 else math.nan

    # deduplicate the handoff point if it repeats
    keep = np.concatenate([[True], np.diff(s_all) > 0.0])
    s_all, u_all, v_all = s_all[keep], u_all[keep], v_all[keep]
    up_all, vp_all = up_all[keep], vp_all[keep]
    iphi_all, iv_all = iphi_all[keep], iv_all[keep]

    drift_max = float(np.max(np.abs(up_all ** 2 + vp_all ** 2 - 1.0)))
    alpha = math.atan2(float(vp_all[-1]), float(up_all[-1]))
    profile = LensProfile(a=a, s=s_all, u=u_all, v=v_all, up=up_all,
                          vp=vp_all, i_phi=iphi_all, i_v=iv_all,
                          s_bar=float(s_all[-1]), s_star=s_star,
                          xi=float(u_all[-1]), alpha=alpha,
                          v_residual=v_residual, drift_max=drift_max,
                          projections=projections, monitors={})
    report = polar_monitors(profile, a)
    profile.monitors = {m.monitor_id: m.worst_slack for m in report.results}
    profile.monitors["unit_speed"] = float(1e-10 - drift_max)
    profile.monitors["shrinker_residual"] = float(
        1e-8 - np.max(np.abs(shrinker_residual(profile))))
    bad = {k: v for k, v in profile.monitors.items() if v < MONITOR_SLACK_TOL}
    if bad:
        raise MonitorViolation(f"arclength monitors violated at a={a}: {bad}")
    return profile


def curvature_three_ways(st: CurveState) -> tuple[float, float, float]:
    """Curvature by the algebraic, variation-of-constants and integral forms.

    All three agree along true solutions started orthogonally to the axis;
    the two integral forms are meaningless for other initial data, which is
    exactly what makes the comparison a sharp consistency check.
    """
    if st.u <= 0.0:
        raise ValueError("curvature forms require u > 0")
    u, v, up, vp = st.u, st.v, st.up, st.vp
    grow = math.exp(0.5 * (u * u + v * v)) / u
    k_alg = -vp / u + u * vp - v * up
    k_var = st.i_phi * grow
    k_int = -vp / u - grow * st.i_v
    return k_alg, k_var, k_int


def curvature_arrays(profile: LensProfile) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized curvature forms over the profile states with u > 0."""
    m = profile.u > 0.0
    u, v = profile.u[m], profile.v[m]
    up, vp = profile.up[m], profile.vp[m]
    grow = np.exp(0.5 * (u * u + v * v)) / u
    k_alg = -vp / u + u * vp - v * up
    k_var = profile.i_phi[m] * grow
    k_int = -vp / u - grow * profile.i_v[m]
    return k_alg, k_var, k_int


def shrinker_residual(profile: LensProfile) -> np.ndarray:
    """Pointwise residual of the shrinker identity on states with u > 0,

        -v' u'' + u' v'' + v'/u - u v' + v u',

    with u'', v'' substituted from the arclength system.  Identically zero
    in exact arithmetic for unit tangents, so it doubles as a scaled
    unit-speed check.
    """
    m = profile.u > 0.0
    u, v = profile.u[m], profile.v[m]
    up, vp = profile.up[m], profile.vp[m]
    w = u - 1.0 / u
    upp = -vp * vp * w + up * vp * v
    vpp = vp * up * w - up * up * v
    return -vp * upp + up * vpp + vp / u - u * vp + v * up


@dataclass(frozen=True)
class MonitorResult:
    monitor_id: str
    valid_range: str
    worst_slack: float
    passed: bool

    def to_dict(self) -> dict:
        return {"monitor_id": self.monitor_id, "range": self.valid_range,
                "worst_slack": self.worst_slack, "pass": self.passed}


@dataclass(frozen=True)
class PolarReport:
    a: float
    results: tuple[MonitorResult, ...]
    all_passed: bool

    def to_json_list(self) -> list[dict]:
        return [r.to_dict() for r in self.results]


def polar_monitors(profile: LensProfile, a: float) -> PolarReport:
    """Evaluate the transversality, annulus and turning bounds on the states.

    The radial transversality (-u v' + v u')/rho must exceed the global
    floor K_a everywhere and a/(1+a^2) up to the first passage of u = 1;
    |rho'| stays below sqrt(1-K_a^2); log rho stays inside the certified
    annulus band; -theta' stays above the turning floor, and theta strictly
    decreases from pi/2 at the axis to 0 at the crossing, which certifies
    that the curve is injective.  Pure report, never raises.
    """
    s = profile.s
    u, v = profile.u, profile.v
    up, vp = profile.up, profile.vp
    rho = np.hypot(u, v)
    trans = (-u * vp + v * up) / rho
    K_a = transversality_floor(a)
    band = annulus_log_halfwidth(a)
    c_a = turning_floor(a)
    rho_p = (u * up + v * vp) / rho
    theta = np.arctan2(v, u)
    minus_theta_p = trans / rho
    graph_part = (s <= profile.s_star) if math.isfinite(profile.s_star) \
        else np.zeros(len(s), dtype=bool)

    def worst(values) -> float:
        return float(np.min(values)) if len(values) else math.inf

    start_gap = abs(theta[0] - math.pi / 2.0) if u[0] == 0.0 else 0.0
    slacks = {
        "radial_transversality_global": worst(trans - K_a),
        "radial_transversality_graph": worst(trans[graph_part]
                                             - a / (1.0 + a * a)),
        "radial_speed_cone": worst((1.0 - K_a * K_a) - rho_p ** 2),
        "annulus_lower": worst(np.log(rho) + band),
        "annulus_upper": worst(band - np.log(rho)),
        "turning_rate": worst(minus_theta_p - c_a),
        "theta_decreasing": worst(-np.diff(theta)),
        "theta_endpoints": -float(max(start_gap, abs(theta[-1]))),
    }
    ranges = {
        "radial_transversality_global": "[0, s_bar]",
        "radial_transversality_graph": "[0, s_star]",
        "radial_speed_cone": "[0, s_bar]",
        "annulus_lower": "[0, s_bar]",
        "annulus_upper": "[0, s_bar]",
        "turning_rate": "[0, s_bar]",
        "theta_decreasing": "[0, s_bar]",
        "theta_endpoints": "{0, s_bar}",
    }
    results = tuple(
        MonitorResult(name, ranges[name], float(slack),
                      bool(slack >= MONITOR_SLACK_TOL))
        for name, slack in slacks.items())
    return PolarReport(a, results, all(r.passed for r in results))


def terminal_angle(profile: LensProfile) -> float:
    """Angle of the tangent (cos alpha, sin alpha) at the crossing."""
    return profile.alpha


def profile_to_csv(profile: LensProfile, path) -> None:
    """Write s, u, v, up, vp, k_alg, k_int, rho, theta, residual_shrinker."""
    m = profile.u > 0.0
    k_alg, _, k_int = curvature_arrays(profile)
    res = shrinker_residual(profile)
    s = profile.s[m]
    u, v = profile.u[m], profile.v[m]
    up, vp = profile.up[m], profile.vp[m]
    rho = np.hypot(u, v)
    theta = np.arctan2(v, u)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("s,u,v,up,vp,k_alg,k_int,rho,theta,residual_shrinker\n")
        for row in zip(s, u, v, up, vp, k_alg, k_int, rho, theta, res):
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def profile_summary(profile: LensProfile) -> dict:
    """JSON-ready summary {a, s_bar, s_star, xi_a, alpha, monitors}."""
    return {
        "a": profile.a,
        "s_bar": profile.s_bar,
        "s_star": profile.s_star,
        "xi_a": profile.xi,
        "alpha": profile.alpha,
        "monitors": {k: float(v) for k, v in profile.monitors.items()},
    }
