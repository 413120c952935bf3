"""Phase-plane geometry: nullclines, the unstable manifold of E1, and the
stable set of the origin ("extinction separatrix").

For m1 < 1 the origin attracts a full open set in finite time and the
boundary of that basin is the curve of interest.  Persistence-to-horizon is
the wrong classifier for it: there are parameter regimes (e.g. a1 = 2,
b1 = 0.21 on the otherwise-standard set) where *every* interior orbit dies
in finite time, yet the basin boundary of "dies while prey decays
monotonically" is still well defined.  The classifier used here:

  * an orbit is ABOVE the stable set iff x1 decreases monotonically all the
    way into the prey-extinction event;
  * the first accepted state with dx1/dt > 0 (a turnaround) certifies BELOW;
  * reaching the horizon without either also counts as BELOW.

Above the prey nullcline x2 = psi(x1) the prey derivative is negative, so
orbits that stay above it can only march left; the boundary orbit is the one
that limits into the origin itself.  Bisection in the launch ordinate x2 at
a fixed prey abscissa (a "probe") then brackets the boundary point; a fan of
probes assembles the curve.
"""
from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .equilibria import predator_free_equilibrium
from .extinction import dissipative_bound_K2
from .integrate import IntegratorOptions, TerminationKind, integrate
from .model import DomainError, ModelParams, State, eval_f, eval_g, make_rhs

__all__ = [
    "CurveLabel",
    "PlanarCurve",
    "SeparatrixOptions",
    "SeparatrixComparison",
    "Verdict",
    "psi",
    "prey_nullcline",
    "predator_nullcline",
    "trace_unstable_manifold_E1",
    "separatrix_boundary_x2",
    "trace_stable_separatrix_E0",
    "separatrix_relative_position",
]


class CurveLabel(enum.Enum):
    PREY_NULLCLINE = "prey_nullcline"
    PREDATOR_NULLCLINE = "predator_nullcline"
    UNSTABLE_MANIFOLD_E1 = "unstable_manifold_E1"
    STABLE_SEPARATRIX_E0 = "stable_separatrix_E0"


@dataclass(frozen=True)
class PlanarCurve:
    label: CurveLabel
    points: tuple[State, ...]

    def __post_init__(self):
        if len(self.points) < 2:
            raise DomainError(f"a curve needs at least 2 points, got {len(self.points)}")

    def x1s(self) -> list[float]:
        return [s.x1 for s in self.points]

    def x2s(self) -> list[float]:
        return [s.x2 for s in self.points]


class Verdict(enum.Enum):
    WS_ABOVE_WU = "ws_above_wu"
    WU_ABOVE_WS = "wu_above_ws"
    CROSSING = "crossing"


@dataclass(frozen=True)
class SeparatrixComparison:
    verdict: Verdict
    margin: float          # smallest |vertical gap| on the shared grid
    x1_range: tuple[float, float]
    gap_at: tuple[float, float]  # (x1, gap) where |gap| is smallest


@dataclass(frozen=True)
class SeparatrixOptions:
    probes: int = 12
    probe_span: tuple[float, float] = (0.05, 0.95)  # fractions of a1/b1
    horizon: float = 500.0
    bisect_rel_tol: float = 1e-8
    x2_cap_factor: float = 1e3   # give up above this multiple of K2
    integrator: IntegratorOptions = IntegratorOptions(
        rel_tol=1e-7, abs_tol=1e-9, horizon=500.0)

    def __post_init__(self):
        if self.probes < 1:
            raise DomainError("need at least one probe")
        lo, hi = self.probe_span
        if not (0.0 < lo < hi < 1.0):
            raise DomainError("probe_span fractions must satisfy 0 < lo < hi < 1")
        if self.bisect_rel_tol <= 0.0 or self.x2_cap_factor <= 1.0:
            raise DomainError("bad separatrix tolerances")


def psi(x1: float, p: ModelParams) -> float:
    """Prey nullcline ordinate for m2 = 1:  psi(x1) = x1*f(x1) / (w0*g(r*x1)).

    For general m2 the nullcline is psi(x1)**(1/m2); see prey_nullcline.
    Defined on (0, a1/b1]; the limit at 0+ is 0 for m1 < 1 and a1*d/(w0*r)
    at m1 = 1, but the endpoint itself divides by g = 0.
    """
    if not (0.0 < x1 <= p.carrying_capacity):
        raise DomainError(f"psi needs x1 in (0, a1/b1], got {x1!r}")
    return x1 * eval_f(x1, p) / (p.w0 * eval_g(p.r * x1, p))


def prey_nullcline(
    p: ModelParams,
    n: int = 256,
    x1_range: tuple[float, float] | None = None,
    *,
    allow_general_m2: bool = False,
) -> PlanarCurve:
    """Sample the interior prey nullcline x2 = psi(x1)**(1/m2).

    By default requires m2 = 1 (the regime where the closed form is the one
    used everywhere else); pass allow_general_m2=True to take the 1/m2 power.
    """
    if p.m2 != 1.0 and not allow_general_m2:
        raise DomainError("prey nullcline closed form assumes m2 = 1 "
                          "(pass allow_general_m2=True to take the 1/m2 power)")
    cap = p.carrying_capacity
    if x1_range is None:
        x1_range = (1e-6 * cap, cap)
    lo, hi = x1_range
    if not (0.0 < lo < hi <= cap):
        raise DomainError(f"x1_range must lie inside (0, a1/b1], got {x1_range!r}")
    if n < 2:
        raise DomainError("need n >= 2 sample points")
    pts = []
    for i in range(n):
        x1 = lo + (hi - lo) * i / (n - 1)
        v = psi(x1, p)
        pts.append(State(x1, v if p.m2 == 1.0 else v ** (1.0 / p.m2)))
    return PlanarCurve(CurveLabel.PREY_NULLCLINE, tuple(pts))


def predator_nullcline(p: ModelParams, x2_max: float, n: int = 2) -> PlanarCurve:
    """The vertical interior predator nullcline (m2 = 1 closed form)."""
    from .equilibria import predator_nullcline_x1

    x1 = predator_nullcline_x1(p)
    if x2_max <= 0.0 or n < 2:
        raise DomainError("need x2_max > 0 and n >= 2")
    pts = tuple(State(x1, x2_max * i / (n - 1)) for i in range(n))
    return PlanarCurve(CurveLabel.PREDATOR_NULLCLINE, pts)


def trace_unstable_manifold_E1(
    p: ModelParams,
    opts: IntegratorOptions | None = None,
    *,
    seed_scale: float = 1e-6,
) -> PlanarCurve:
    """Integrate the unstable manifold of E1 = (a1/b1, 0) into the interior.

    Requires m2 = 1 (E1 linearizable) and E1 a saddle.  The seed steps off
    E1 along the unstable eigenvector, oriented into the open quadrant.
    """
    e1 = predator_free_equilibrium(p)
    if e1.classification.name == "NON_LINEARIZABLE":
        raise DomainError("E1 is not linearizable (m2 < 1); no manifold to trace")
    if e1.det is None or e1.det >= 0.0:
        raise DomainError("E1 is not a saddle for these parameters")
    # J(E1) is upper triangular: [[-a1, j12], [0, j22]] with j22 > 0 the
    # unstable eigenvalue.  Eigenvector: (j12 / (j22 - j11), 1).
    from .equilibria import jacobian

    (j11, j12), (_, j22) = jacobian(e1.point, p)
    v1 = j12 / (j22 - j11)
    v2 = 1.0
    nrm = math.hypot(v1, v2)
    v1, v2 = v1 / nrm, v2 / nrm
    if v2 < 0.0:
        v1, v2 = -v1, -v2
    cap = p.carrying_capacity
    seed = State(e1.point.x1 + seed_scale * cap * v1,
                 e1.point.x2 + seed_scale * cap * v2)
    if opts is None:
        opts = IntegratorOptions(horizon=500.0)
    guard_cap = 1e6 * max(1.0, cap)
    traj = integrate(p, seed, opts,
                     stop_when=lambda t, s: s.x1 + s.x2 > guard_cap)
    if traj.termination is not None and traj.termination.kind is TerminationKind.STEP_FAILURE:
        raise DomainError(f"manifold trace failed: {traj.termination.reason}")
    return PlanarCurve(CurveLabel.UNSTABLE_MANIFOLD_E1, tuple(traj.states))


# --------------------------------------------------------------------------
# Stable set of the origin.

_ABOVE = "above"
_BELOW = "below"


def _classify_launch(p: ModelParams, x1_0: float, x2_0: float,
                     opts: SeparatrixOptions) -> str:
    """ABOVE: prey decays monotonically into the extinction event.
    BELOW: a turnaround (dx1/dt > 0 at an accepted state) or survival to the
    horizon."""
    f = make_rhs(p)
    iopts = replace(opts.integrator, horizon=opts.horizon)
    traj = integrate(p, State(x1_0, x2_0), iopts,
                     stop_when=lambda t, s: f(s.x1, s.x2)[0] > 0.0)
    kind = traj.termination.kind
    if kind is TerminationKind.PREY_EXTINCT:
        return _ABOVE
    if kind in (TerminationKind.STOPPED, TerminationKind.HORIZON_REACHED,
                TerminationKind.PREDATOR_EXTINCT):
        return _BELOW
    raise DomainError(f"launch classification failed: {traj.termination!r}")


def separatrix_boundary_x2(p: ModelParams, probe_x1: float,
                           opts: SeparatrixOptions | None = None) -> float:
    """Bisect the launch ordinate at abscissa probe_x1 for the boundary of
    monotone-decay extinction.  Returns the bracket midpoint."""
    if opts is None:
        opts = SeparatrixOptions()
    cap = p.carrying_capacity
    if not (0.0 < probe_x1 < cap):
        raise DomainError(f"probe must sit in (0, a1/b1), got {probe_x1!r}")
    base = psi(probe_x1, p) if p.m2 == 1.0 else psi(probe_x1, p) ** (1.0 / p.m2)
    k2 = dissipative_bound_K2(p).K2
    ceiling = opts.x2_cap_factor * max(k2, 1.0)

    lo = 0.5 * base
    if _classify_launch(p, probe_x1, lo, opts) != _BELOW:
        lo = 0.0  # extremely flat nullcline; fall back to the axis

    hi = max(2.0 * base, 1.0)
    while _classify_launch(p, probe_x1, hi, opts) == _BELOW:
        hi *= 2.0
        if hi > ceiling:
            raise DomainError(
                f"no monotone-extinction launch found below x2 = {ceiling!r} "
                f"at probe x1 = {probe_x1!r}; stable set of the origin absent "
                "or outside the searched window")
    while hi - lo > opts.bisect_rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if _classify_launch(p, probe_x1, mid, opts) == _ABOVE:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _probe_stations(p: ModelParams, opts: SeparatrixOptions) -> list[float]:
    lo_f, hi_f = opts.probe_span
    cap = p.carrying_capacity
    if opts.probes == 1:
        return [math.sqrt(lo_f * hi_f) * cap]
    # geometric spacing: resolves the steep left end where the curve plunges
    ratio = (hi_f / lo_f) ** (1.0 / (opts.probes - 1))
    return [cap * lo_f * ratio ** i for i in range(opts.probes)]


def trace_stable_separatrix_E0(
    p: ModelParams,
    probe_x1: float | list[float] | None = None,
    opts: SeparatrixOptions | None = None,
) -> PlanarCurve:
    """Assemble the stable set of the origin from per-probe bisections.

    probe_x1 may be a single abscissa, an explicit list, or None for the
    default geometric fan.  Worker threads are capped by the environment
    variable TOOL_THREADS (results are ordered by probe, so the output is
    identical either way).
    """
    if opts is None:
        opts = SeparatrixOptions()
    if p.m1 >= 1.0:
        raise DomainError("the origin attracts no open set for m1 = 1; "
                          "no extinction separatrix to trace")
    if probe_x1 is None:
        stations = _probe_stations(p, opts)
    elif isinstance(probe_x1, (int, float)):
        stations = [float(probe_x1)]
    else:
        stations = sorted(float(v) for v in probe_x1)
        if not stations:
            raise DomainError("empty probe list")

    try:
        workers = max(1, int(os.environ.get("TOOL_THREADS", "1") or "1"))
    except ValueError:
        workers = 1
    if workers > 1 and len(stations) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            ys = list(pool.map(lambda x: separatrix_boundary_x2(p, x, opts), stations))
    else:
        ys = [separatrix_boundary_x2(p, x, opts) for x in stations]
    pts = tuple(State(x, y) for x, y in zip(stations, ys))
    if len(pts) == 1:
        # a curve needs two points; duplicate with a hair of width
        pts = (pts[0], State(pts[0].x1 * (1.0 + 1e-9), pts[0].x2))
    return PlanarCurve(CurveLabel.STABLE_SEPARATRIX_E0, pts)


def _descending_prefix(points: tuple[State, ...]) -> list[State]:
    """Longest prefix along which x1 strictly decreases (the first leg of a
    manifold trace, before any spiral turns it back)."""
    out = [points[0]]
    for s in points[1:]:
        if s.x1 < out[-1].x1:
            out.append(s)
        else:
            break
    return out


def _interp(xs: list[float], ys: list[float], x: float) -> float:
    """Piecewise-linear interpolation on ascending xs (no extrapolation)."""
    if not xs[0] <= x <= xs[-1]:
        raise DomainError(f"interpolation point {x!r} outside [{xs[0]!r}, {xs[-1]!r}]")
    lo, hi = 0, len(xs) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if xs[mid] <= x:
            lo = mid
        else:
            hi = mid
    t = (x - xs[lo]) / (xs[hi] - xs[lo]) if xs[hi] > xs[lo] else 0.0
    return ys[lo] + t * (ys[hi] - ys[lo])


def separatrix_relative_position(
    ws: PlanarCurve, wu: PlanarCurve, grid_points: int = 200
) -> SeparatrixComparison:
    """Compare W^s(E0) and (the first descending leg of) W^u(E1) as graphs
    over their shared x1 range.  Verdict is CROSSING iff the vertical gap
    ws - wu changes sign on the grid."""
    if ws.label is not CurveLabel.STABLE_SEPARATRIX_E0:
        raise DomainError("first curve must be the stable separatrix of E0")
    if wu.label is not CurveLabel.UNSTABLE_MANIFOLD_E1:
        raise DomainError("second curve must be the unstable manifold of E1")

    leg = _descending_prefix(wu.points)
    if len(leg) < 2:
        raise DomainError("unstable manifold has no descending leg to compare")
    leg.reverse()  # ascending x1
    wu_x, wu_y = [s.x1 for s in leg], [s.x2 for s in leg]

    ws_pts = sorted(ws.points, key=lambda s: s.x1)
    ws_x, ws_y = [s.x1 for s in ws_pts], [s.x2 for s in ws_pts]

    lo = max(ws_x[0], wu_x[0])
    hi = min(ws_x[-1], wu_x[-1])
    if not lo < hi:
        raise DomainError(
            f"curves share no x1 range: ws on [{ws_x[0]!r}, {ws_x[-1]!r}], "
            f"wu leg on [{wu_x[0]!r}, {wu_x[-1]!r}]")

    best: tuple[float, float] | None = None
    saw_pos = saw_neg = False
    for i in range(grid_points):
        x = lo + (hi - lo) * i / (grid_points - 1)
        gap = _interp(ws_x, ws_y, x) - _interp(wu_x, wu_y, x)
        if gap > 0.0:
            saw_pos = True
        elif gap < 0.0:
            saw_neg = True
        if best is None or abs(gap) < abs(best[1]):
            best = (x, gap)
    if saw_pos and saw_neg:
        verdict = Verdict.CROSSING
    elif saw_pos:
        verdict = Verdict.WS_ABOVE_WU
    elif saw_neg:
        verdict = Verdict.WU_ABOVE_WS
    else:
        verdict = Verdict.CROSSING  # identically zero gap: treat as touching
    return SeparatrixComparison(verdict, abs(best[1]), (lo, hi), best)
