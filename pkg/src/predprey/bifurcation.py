"""Bifurcation sweeps and detectors: saddle-node, Hopf, transcritical.

A sweep samples one parameter on a uniform grid, solves the interior
equilibria at every sample, and threads them into chains by nearest-neighbor
matching (a chain dies when its equilibrium vanishes or jumps farther than
the matching cap).  Detectors then read the chains:

  * saddle-node -- two chains with opposite-sign determinants end (or begin)
    together; the fold is bracketed by bisection on "does the pair still
    exist", then polished by a damped 2D Newton iteration on
    (F(x1, v), det(x1, v)) = (0, 0), where F is the interior scan function;
  * Hopf -- the trace changes sign along a chain while the determinant stays
    positive; the crossing is bisected, then polished by a secant iteration
    on tr(v) = 0, and the first Lyapunov coefficient fixes sub/supercritical;
  * transcritical -- on refuge sweeps the interior equilibrium collides with
    the predator-free state when x1*(r) = a1/b1, at

        r1* = (b1*d/a1) * a2**(1/m1) / (w1**(1/m1) - a2**(1/m1)).

    A variant of this formula circulates with a1**(1/m1) in the numerator
    (0.08046 on the base set, vs 0.152351 for the form above, which matches
    the quoted 0.15239); both are computed, the a2 form is operative, and
    the discrepancy is flagged in the result.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .equilibria import (
    Equilibrium,
    _g_prime,
    interior_equilibria,
    interior_scan_function,
    jacobian,
    x2_of_x1,
)
from .model import DomainError, ModelParams, ParameterError, State, eval_g, make_rhs

__all__ = [
    "SWEEPABLE",
    "Branch",
    "BifurcationKind",
    "BifurcationEvent",
    "TranscriticalResult",
    "branch_sweep",
    "detect_saddle_node",
    "detect_hopf",
    "detect_transcritical",
    "hopf_critical_a1",
    "hopf_a1_fixed_point",
    "transcritical_r",
    "first_lyapunov_coefficient",
]

SWEEPABLE = ("a1", "a2", "b1", "w0", "w1", "r")


class BifurcationKind(enum.Enum):
    SADDLE_NODE = "saddle_node"
    HOPF = "hopf"
    TRANSCRITICAL = "transcritical"


@dataclass(frozen=True)
class BifurcationEvent:
    kind: BifurcationKind
    param_name: str
    critical_value: float
    point: State
    diagnostics: dict[str, float]


@dataclass(frozen=True)
class Branch:
    param_name: str
    base_params: ModelParams
    samples: tuple[float, ...]
    equilibria: tuple[tuple[Equilibrium, ...], ...]   # per sample
    chains: tuple[tuple[tuple[int, int], ...], ...]   # chain -> (sample, eq index)

    def params_at(self, value: float) -> ModelParams:
        return replace(self.base_params, **{self.param_name: value})


def branch_sweep(
    p: ModelParams,
    param_name: str,
    lo: float,
    hi: float,
    n: int = 200,
    scan_points: int = 2000,
) -> Branch:
    """Sample interior equilibria along one parameter and thread chains.

    n >= 50 recommended (coarser grids can alias folds); matching uses a cap
    of 10% of the carrying capacity, so chains end rather than jump.
    """
    if param_name not in SWEEPABLE:
        raise DomainError(f"cannot sweep {param_name!r}; choose one of {SWEEPABLE}")
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise DomainError(f"need finite lo < hi, got {lo!r}, {hi!r}")
    if n < 2:
        raise DomainError("need at least 2 samples")
    samples = tuple(lo + (hi - lo) * i / (n - 1) for i in range(n))

    per_sample: list[tuple[Equilibrium, ...]] = []
    for v in samples:
        try:
            pv = replace(p, **{param_name: v})
        except ParameterError as exc:
            raise DomainError(
                f"sweep leaves the valid parameter domain at {param_name}={v!r}: {exc}"
            ) from exc
        per_sample.append(tuple(interior_equilibria(pv, scan_points)))

    chains: list[list[tuple[int, int]]] = [[(0, j)] for j in range(len(per_sample[0]))]
    open_chains = list(range(len(chains)))
    for i in range(1, n):
        cap = max(replace(p, **{param_name: samples[i]}).carrying_capacity,
                  replace(p, **{param_name: samples[i - 1]}).carrying_capacity)
        match_cap = 0.1 * cap
        tips = {c: per_sample[chains[c][-1][0]][chains[c][-1][1]].point
                for c in open_chains if chains[c][-1][0] == i - 1}
        candidates = []
        for c, tip in tips.items():
            for j, eq in enumerate(per_sample[i]):
                dist = math.hypot(eq.point.x1 - tip.x1, eq.point.x2 - tip.x2)
                if dist <= match_cap:
                    candidates.append((dist, c, j))
        candidates.sort(key=lambda t: t[0])
        used_c: set[int] = set()
        used_j: set[int] = set()
        for dist, c, j in candidates:
            if c in used_c or j in used_j:
                continue
            chains[c].append((i, j))
            used_c.add(c)
            used_j.add(j)
        open_chains = [c for c in open_chains if chains[c][-1][0] == i]
        for j in range(len(per_sample[i])):
            if j not in used_j:
                chains.append([(i, j)])
                open_chains.append(len(chains) - 1)

    return Branch(param_name, p, samples, tuple(per_sample),
                  tuple(tuple(ch) for ch in chains))


# --------------------------------------------------------------------------
# Saddle-node detection.

def _fold_presence(pv: ModelParams, window: tuple[float, float],
                   edge_sign: float, pts: int = 200) -> tuple[bool, float]:
    """Is the colliding pair still present inside the x1-window?

    Present iff the scan function dips past zero against the edge sign (this
    survives the pair being closer together than the grid resolution right
    until the extremum itself lifts off zero).  Returns (present, x1 of the
    extremum) -- the extremum is the Newton seed at the fold.
    """
    cap = pv.carrying_capacity
    lo = max(window[0], 1e-9 * cap)
    hi = min(window[1], (1.0 - 1e-9) * cap)
    if not lo < hi:
        return False, 0.5 * (window[0] + window[1])
    F = interior_scan_function(pv)
    best_x, best_v = lo, math.inf
    for i in range(pts):
        x = lo + (hi - lo) * i / (pts - 1)
        v = edge_sign * F(x)
        if v < best_v:
            best_v, best_x = v, x
    return best_v < 0.0, best_x


def _newton_fold(p: ModelParams, param_name: str, x1: float, v: float,
                 max_iter: int = 60) -> tuple[float, float] | None:
    """Damped Newton for (F(x1; v), det(x1; v)) = (0, 0)."""

    def resid(x1_: float, v_: float) -> tuple[float, float] | None:
        try:
            pv = replace(p, **{param_name: v_})
        except ParameterError:
            return None
        cap = pv.carrying_capacity
        if not (1e-9 * cap < x1_ < (1.0 - 1e-9) * cap):
            return None
        f_val = interior_scan_function(pv)(x1_)
        x2 = x2_of_x1(x1_, pv)
        if x2 <= 0.0:
            return None
        (j11, j12), (j21, j22) = jacobian(State(x1_, x2), pv)
        return f_val, j11 * j22 - j12 * j21

    r = resid(x1, v)
    if r is None:
        return None
    for _ in range(max_iter):
        f0, d0 = r
        if abs(f0) < 1e-12 and abs(d0) < 1e-12:
            break
        hx = 1e-6 * max(1.0, abs(x1))
        hv = 1e-6 * max(1e-3, abs(v))
        rxp, rxm = resid(x1 + hx, v), resid(x1 - hx, v)
        rvp, rvm = resid(x1, v + hv), resid(x1, v - hv)
        if None in (rxp, rxm, rvp, rvm):
            return None
        a = (rxp[0] - rxm[0]) / (2.0 * hx)
        b = (rvp[0] - rvm[0]) / (2.0 * hv)
        c = (rxp[1] - rxm[1]) / (2.0 * hx)
        dd = (rvp[1] - rvm[1]) / (2.0 * hv)
        det = a * dd - b * c
        if det == 0.0 or not math.isfinite(det):
            return None
        dx = -(dd * f0 - b * d0) / det
        dv = -(-c * f0 + a * d0) / det
        step = 1.0
        norm0 = abs(f0) + abs(d0)
        for _ in range(12):
            cand = resid(x1 + step * dx, v + step * dv)
            if cand is not None and abs(cand[0]) + abs(cand[1]) < norm0:
                x1, v, r = x1 + step * dx, v + step * dv, cand
                break
            step *= 0.5
        else:
            return None
    f0, d0 = r
    if abs(f0) <= 1e-10 and abs(d0) <= 1e-10:
        return x1, v
    return None


def detect_saddle_node(branch: Branch, local_scan: int = 200) -> list[BifurcationEvent]:
    """Folds along the sweep: paired chain death (or birth) refined to the
    point where the scan function and the Jacobian determinant vanish
    together.  Only tr < 0 folds are reported (the colliding pair is a
    stable node and a saddle)."""
    p = branch.base_params
    name = branch.param_name
    samples = branch.samples
    n = len(samples)

    # candidate boundaries: (index of last sample with the pair, direction)
    candidates: list[tuple[int, int, State, State]] = []
    ends: dict[int, list[State]] = {}
    starts: dict[int, list[State]] = {}
    for ch in branch.chains:
        i_first, j_first = ch[0]
        i_last, j_last = ch[-1]
        if i_last < n - 1:
            ends.setdefault(i_last, []).append(branch.equilibria[i_last][j_last].point)
        if i_first > 0:
            starts.setdefault(i_first, []).append(branch.equilibria[i_first][j_first].point)
    pair_cap = 0.3 * p.carrying_capacity
    for i, pts in ends.items():
        for a, b in _mutual_pairs(pts, pair_cap):
            candidates.append((i, +1, a, b))
    for i, pts in starts.items():
        for a, b in _mutual_pairs(pts, pair_cap):
            candidates.append((i, -1, a, b))

    events: list[BifurcationEvent] = []
    for i, direction, pa, pb in candidates:
        v_have = samples[i]
        v_gone = samples[i + 1] if direction > 0 else samples[i - 1]
        gap = abs(pb.x1 - pa.x1)
        w = max(0.25 * gap, 1e-3 * p.carrying_capacity)
        window = (min(pa.x1, pb.x1) - w, max(pa.x1, pb.x1) + w)
        pv_have = branch.params_at(v_have)
        Fh = interior_scan_function(pv_have)
        edge_sign = math.copysign(1.0, Fh(window[0]) + Fh(window[1]))

        lo, hi = v_have, v_gone  # lo side has the pair
        for _ in range(80):
            if abs(hi - lo) <= 1e-6 * max(abs(lo), abs(hi)):
                break
            mid = 0.5 * (lo + hi)
            present, _ = _fold_presence(branch.params_at(mid), window, edge_sign, local_scan)
            if present:
                lo = mid
            else:
                hi = mid
        present, x_seed = _fold_presence(branch.params_at(lo), window, edge_sign, local_scan)
        if not present:
            x_seed = 0.5 * (pa.x1 + pb.x1)
        polished = _newton_fold(p, name, x_seed, 0.5 * (lo + hi))
        if polished is None:
            continue
        x1s, vs = polished
        pv = branch.params_at(vs)
        x2s = x2_of_x1(x1s, pv)
        (j11, j12), (j21, j22) = jacobian(State(x1s, x2s), pv)
        tr = j11 + j22
        det = j11 * j22 - j12 * j21
        if tr >= 0.0:
            continue
        hv = 1e-6 * max(1e-3, abs(vs))
        f_v = (interior_scan_function(branch.params_at(vs + hv))(x1s)
               - interior_scan_function(branch.params_at(vs - hv))(x1s)) / (2.0 * hv)
        events.append(BifurcationEvent(
            BifurcationKind.SADDLE_NODE, name, vs, State(x1s, x2s),
            {"tr": tr, "det": det, "dF_dparam": f_v}))

    return _dedupe(events)


def _mutual_pairs(pts: list[State], cap: float) -> list[tuple[State, State]]:
    """Greedy nearest pairing of simultaneous chain ends; a fold's two halves
    sit close together at the last sample where they exist.  Points with no
    partner within `cap` are dropped (a lone chain end is a window edge or a
    transcritical collision, not a fold)."""
    pool = list(pts)
    pairs = []
    while len(pool) >= 2:
        best = None
        for a in range(len(pool)):
            for b in range(a + 1, len(pool)):
                d = math.hypot(pool[a].x1 - pool[b].x1, pool[a].x2 - pool[b].x2)
                if best is None or d < best[0]:
                    best = (d, a, b)
        d, a, b = best
        if d > cap:
            break
        pairs.append((pool[a], pool[b]))
        pool = [q for k, q in enumerate(pool) if k not in (a, b)]
    return pairs


def _dedupe(events: list[BifurcationEvent]) -> list[BifurcationEvent]:
    events = sorted(events, key=lambda e: e.critical_value)
    out: list[BifurcationEvent] = []
    for e in events:
        if out and abs(e.critical_value - out[-1].critical_value) <= 1e-6 * max(
                1e-12, abs(out[-1].critical_value)) and e.kind is out[-1].kind:
            continue
        out.append(e)
    return out


# --------------------------------------------------------------------------
# Hopf detection.

def _interior_nearest(pv: ModelParams, x1_guess: float,
                      scan_points: int = 2000) -> Equilibrium:
    eqs = interior_equilibria(pv, scan_points)
    if not eqs:
        raise DomainError(f"no interior equilibrium near x1 = {x1_guess!r}")
    return min(eqs, key=lambda e: abs(e.point.x1 - x1_guess))


def detect_hopf(branch: Branch, scan_points: int = 2000) -> list[BifurcationEvent]:
    """Trace-zero crossings with det > 0 along each chain, secant-polished,
    with finite-difference transversality and the first Lyapunov sign."""
    events: list[BifurcationEvent] = []
    for ch in branch.chains:
        for (ia, ja), (ib, jb) in zip(ch, ch[1:]):
            ea = branch.equilibria[ia][ja]
            eb = branch.equilibria[ib][jb]
            if ea.trace is None or eb.trace is None:
                continue
            if not (ea.det > 0.0 and eb.det > 0.0):
                continue
            if ea.trace * eb.trace > 0.0:  # no sign change (zeros fall through)
                continue
            if ea.trace == 0.0 and eb.trace == 0.0:
                continue
            ev = _refine_hopf(branch, branch.samples[ia], branch.samples[ib],
                              ea.point.x1, eb.point.x1, scan_points)
            if ev is not None:
                events.append(ev)
    return _dedupe(events)


def _refine_hopf(branch: Branch, va: float, vb: float, xa: float, xb: float,
                 scan_points: int) -> BifurcationEvent | None:
    name = branch.param_name

    def tr_at(v: float, x_guess: float) -> tuple[float, Equilibrium]:
        eq = _interior_nearest(branch.params_at(v), x_guess, scan_points)
        return eq.trace, eq

    ta, _ = tr_at(va, xa)
    tb, _ = tr_at(vb, xb)
    if ta * tb > 0.0:
        return None
    lo, hi, t_lo = va, vb, ta
    x_guess = 0.5 * (xa + xb)
    for _ in range(80):
        if abs(hi - lo) <= 1e-9 * max(abs(lo), abs(hi), 1e-9):
            break
        mid = 0.5 * (lo + hi)
        tm, eq = tr_at(mid, x_guess)
        x_guess = eq.point.x1
        if tm == 0.0:
            lo = hi = mid
            break
        if (tm < 0.0) == (t_lo < 0.0):
            lo, t_lo = mid, tm
        else:
            hi = mid

    v0, v1 = lo, hi if hi != lo else lo * (1.0 + 1e-9)
    t0, _ = tr_at(v0, x_guess)
    t1, eq = tr_at(v1, x_guess)
    for _ in range(40):
        if abs(t1) < 1e-11:
            break
        if t1 == t0:
            break
        v2 = v1 - t1 * (v1 - v0) / (t1 - t0)
        if not math.isfinite(v2):
            break
        v0, t0 = v1, t1
        v1 = v2
        t1, eq = tr_at(v1, eq.point.x1)
    v_star, eq_star = v1, eq
    if not (eq_star.det is not None and eq_star.det > 0.0 and abs(eq_star.trace) < 1e-8):
        return None

    h = max(1e-5 * abs(v_star), 1e-8)
    est = _tr_slope(branch, v_star, eq_star.point.x1, h, scan_points)
    est_half = _tr_slope(branch, v_star, eq_star.point.x1, 0.5 * h, scan_points)
    if est is None or est_half is None or abs(est) < 1e-8:
        return None
    p_star = branch.params_at(v_star)
    lyap = first_lyapunov_coefficient(
        branch.base_params,
        BifurcationEvent(BifurcationKind.HOPF, name, v_star, eq_star.point, {}))
    return BifurcationEvent(
        BifurcationKind.HOPF, name, v_star, eq_star.point,
        {
            "tr": eq_star.trace,
            "det": eq_star.det,
            "d_re_eig_dparam": 0.5 * est,
            "d_re_eig_dparam_half_h": 0.5 * est_half,
            "lyapunov": lyap,
            "lyapunov_sign": math.copysign(1.0, lyap),
        })


def _tr_slope(branch: Branch, v: float, x_guess: float, h: float,
              scan_points: int) -> float | None:
    try:
        ep = _interior_nearest(branch.params_at(v + h), x_guess, scan_points)
        em = _interior_nearest(branch.params_at(v - h), x_guess, scan_points)
    except (DomainError, ParameterError):
        return None
    return (ep.trace - em.trace) / (2.0 * h)


def hopf_critical_a1(p: ModelParams, eq_point: State) -> float:
    """Trace-zero value of a1 with the equilibrium location held fixed:

        a1* = a2 + 2*b1*x1 + w0*G'*x2**m2 - m2*w1*G*x2**(m2-1)

    Only self-consistent once x1, x2 are re-solved at a1*; see
    hopf_a1_fixed_point for the closed loop.
    """
    x1, x2 = eq_point.x1, eq_point.x2
    if not (x1 > 0.0 and x2 > 0.0):
        raise DomainError(f"need an interior point, got {eq_point!r}")
    G = eval_g(p.r * x1, p)
    Gp = _g_prime(x1, p)
    return (p.a2 + 2.0 * p.b1 * x1 + p.w0 * Gp * x2 ** p.m2
            - p.m2 * p.w1 * G * x2 ** (p.m2 - 1.0))


def hopf_a1_fixed_point(
    p: ModelParams, *, tol: float = 1e-12, max_iter: int = 200
) -> tuple[float, Equilibrium]:
    """Solve a1 = hopf_critical_a1(params(a1), equilibrium(a1)) by direct
    iteration (re-solving the interior equilibrium each round)."""
    a1 = p.a1
    eq = _interior_nearest(p, p.carrying_capacity * 0.5)
    for _ in range(max_iter):
        pv = replace(p, a1=a1)
        eq = _interior_nearest(pv, eq.point.x1)
        a1_next = hopf_critical_a1(pv, eq.point)
        if abs(a1_next - a1) <= tol * max(1.0, abs(a1_next)):
            pv = replace(p, a1=a1_next)
            eq = _interior_nearest(pv, eq.point.x1)
            return a1_next, eq
        a1 = a1_next
    raise DomainError(f"hopf_a1_fixed_point did not converge; last a1 = {a1!r}")


# --------------------------------------------------------------------------
# Transcritical (refuge sweeps).

@dataclass(frozen=True)
class TranscriticalResult:
    as_derived: float    # a2**(1/m1) numerator -- operative
    as_printed: float    # a1**(1/m1) numerator -- circulated variant
    note: str

    @property
    def r1_star(self) -> float:
        return self.as_derived


def transcritical_r(p: ModelParams) -> TranscriticalResult:
    """Refuge fraction where the interior equilibrium collides with E1.

    x1*(r) = (d/r)*a2**(1/m1)/(w1**(1/m1) - a2**(1/m1)) meets a1/b1 at

        r1* = (b1*d/a1) * a2**(1/m1) / (w1**(1/m1) - a2**(1/m1)).

    Requires m2 = 1 and w1 > a2.  Below r1* the predator cannot invade.
    """
    if p.m2 != 1.0:
        raise DomainError("transcritical closed form requires m2 = 1")
    if p.w1 <= p.a2:
        raise DomainError("needs w1 > a2 for an interior branch to exist at all")
    em = 1.0 / p.m1
    denom = p.w1 ** em - p.a2 ** em
    scale = p.b1 * p.d / p.a1
    derived = scale * p.a2 ** em / denom
    printed = scale * p.a1 ** em / denom
    return TranscriticalResult(
        derived, printed,
        "operative value uses a2**(1/m1) in the numerator; the circulated "
        "a1**(1/m1) variant does not solve x1*(r) = a1/b1 and looks like a typo",
    )


def detect_transcritical(branch: Branch) -> list[BifurcationEvent]:
    """On a refuge sweep, report the interior/E1 collision if it falls inside
    the swept range.  Closed form, m2 = 1 only; sweeps with m2 < 1 return
    nothing here (no closed form, and the scan itself shows the count drop)."""
    if branch.param_name != "r":
        return []
    p = branch.base_params
    if p.m2 != 1.0 or p.w1 <= p.a2:
        return []
    tc = transcritical_r(p)
    lo, hi = branch.samples[0], branch.samples[-1]
    if not (lo <= tc.as_derived <= hi):
        return []
    return [BifurcationEvent(
        BifurcationKind.TRANSCRITICAL, "r", tc.as_derived,
        State(p.carrying_capacity, 0.0),
        {"as_derived": tc.as_derived, "as_printed": tc.as_printed},
    )]


# --------------------------------------------------------------------------
# First Lyapunov coefficient at a Hopf point.

def first_lyapunov_coefficient(p: ModelParams, hopf_event: BifurcationEvent) -> float:
    """Sign-reliable first Lyapunov coefficient at a Hopf point.

    The Jacobian (with trace removed) is brought to rotation normal form by
    T = [[B, 0], [-A, -omega]] / ||.||, where J - (tr/2)I = [[A, B], [C, -A]]
    and omega = sqrt(-A**2 - B*C); the classical cubic/quadratic expression
    is then evaluated by central differences of the transformed field.  The
    magnitude depends on the normalization of T (only the sign is
    coordinate-free); negative means supercritical (stable cycle).
    """
    if hopf_event.kind is not BifurcationKind.HOPF:
        raise DomainError("first_lyapunov_coefficient expects a Hopf event")
    pv = replace(p, **{hopf_event.param_name: hopf_event.critical_value})
    eq = _interior_nearest(pv, hopf_event.point.x1)
    return _lyapunov_at(pv, eq)


def _lyapunov_at(pv: ModelParams, eq: Equilibrium) -> float:
    (j11, j12), (j21, j22) = jacobian(eq.point, pv)
    return _lyapunov_of_field(make_rhs(pv), eq.point.x1, eq.point.x2,
                              j11, j12, j21, j22)


def _lyapunov_of_field(f, x0: float, y0: float,
                       j11: float, j12: float, j21: float, j22: float) -> float:
    """Guckenheimer-Holmes 16a expression for a planar field f with Jacobian
    J at the equilibrium (x0, y0); J must have ~zero trace and complex
    eigenvalues.  Magnitude depends on the (normalized) eigenbasis, sign
    does not."""
    tr = j11 + j22
    det = j11 * j22 - j12 * j21
    scale = max(abs(j11), abs(j12), abs(j21), abs(j22), 1e-30)
    if abs(tr) > 1e-5 * scale:
        raise DomainError(f"not a Hopf point: trace {tr!r} is not ~0")
    w2 = det - 0.25 * tr * tr
    if w2 <= 0.0:
        raise DomainError("not a Hopf point: eigenvalues are not complex")
    omega = math.sqrt(w2)

    A = j11 - 0.5 * tr
    B = j12
    # T columns: Re/-Im of the eigenvector (B, i*omega - A)
    t11, t12, t21, t22 = B, 0.0, -A, -omega
    nrm = math.sqrt(t11 * t11 + t12 * t12 + t21 * t21 + t22 * t22)
    t11, t12, t21, t22 = t11 / nrm, t12 / nrm, t21 / nrm, t22 / nrm
    dt = t11 * t22 - t12 * t21
    if abs(dt) < 1e-12:
        raise DomainError("degenerate eigenbasis at the Hopf point")
    i11, i12, i21, i22 = t22 / dt, -t12 / dt, -t21 / dt, t11 / dt

    def phi(xi: float, eta: float) -> tuple[float, float]:
        u = x0 + t11 * xi + t12 * eta
        v = y0 + t21 * xi + t22 * eta
        d1, d2 = f(u, v)
        return i11 * d1 + i12 * d2, i21 * d1 + i22 * d2

    h = 1e-4 * (1.0 + max(abs(x0), abs(y0)))
    pp = phi(h, 0.0)
    pm = phi(-h, 0.0)
    qp = phi(0.0, h)
    qm = phi(0.0, -h)
    cpp = phi(h, h)
    cpm = phi(h, -h)
    cmp_ = phi(-h, h)
    cmm = phi(-h, -h)
    p2 = phi(2.0 * h, 0.0)
    m2_ = phi(-2.0 * h, 0.0)
    q2 = phi(0.0, 2.0 * h)
    n2 = phi(0.0, -2.0 * h)
    z = phi(0.0, 0.0)

    h2, h3 = h * h, h * h * h
    out = []
    for k in (0, 1):
        fxx = (pp[k] - 2.0 * z[k] + pm[k]) / h2
        fyy = (qp[k] - 2.0 * z[k] + qm[k]) / h2
        fxy = (cpp[k] - cpm[k] - cmp_[k] + cmm[k]) / (4.0 * h2)
        fxxx = (p2[k] - 2.0 * pp[k] + 2.0 * pm[k] - m2_[k]) / (2.0 * h3)
        fyyy = (q2[k] - 2.0 * qp[k] + 2.0 * qm[k] - n2[k]) / (2.0 * h3)
        fxyy = (cpp[k] + cpm[k] - 2.0 * pp[k] - cmp_[k] - cmm[k] + 2.0 * pm[k]) / (2.0 * h3)
        fxxy = (cpp[k] + cmp_[k] - 2.0 * qp[k] - cpm[k] - cmm[k] + 2.0 * qm[k]) / (2.0 * h3)
        out.append((fxx, fyy, fxy, fxxx, fyyy, fxyy, fxxy))
    (f1xx, f1yy, f1xy, f1xxx, _f1yyy, f1xyy, _f1xxy) = out[0]
    (f2xx, f2yy, f2xy, _f2xxx, f2yyy, _f2xyy, f2xxy) = out[1]

    a16 = (f1xxx + f1xyy + f2xxy + f2yyy
           + (f1xy * (f1xx + f1yy) - f2xy * (f2xx + f2yy)
              - f1xx * f2xx + f1yy * f2yy) / omega)
    return a16 / 16.0
