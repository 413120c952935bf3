"""Equilibria of the refuge model: location, Jacobian, linear classification.

The trivial state E0 = (0, 0) and the predator-free state E1 = (a1/b1, 0)
always exist.  Interior equilibria solve

    x2 = (w1 / (w0 * a2)) * x1 * (a1 - b1 * x1)          (prey balance)
    w0 * g(r*x1) * x2**m2 = x1 * (a1 - b1 * x1)          (predator balance)

which collapse to one scalar equation on (0, a1/b1).  With m2 = 1 the
predator balance alone pins x1 through g(r*x1) = a2/w1, giving the closed
form used as a cross-check and for nullcline geometry.

Linearization is exact:  with G = g(r*x1) and G' its x1-derivative,

    J11 = a1 - 2*b1*x1 - w0*G'*x2**m2        J12 = -m2*w0*G*x2**(m2-1)
    J21 = w1*G'*x2**m2                        J22 = -a2 + m2*w1*G*x2**(m2-1)

These expressions lose meaning on the axes whenever the relevant exponent is
fractional (x**(m1-1) or x**(m2-1) with a zero base); such points are
reported as NON_LINEARIZABLE rather than classified.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .model import DomainError, ModelParams, State, eval_f, eval_g, make_rhs

__all__ = [
    "Classification",
    "EquilibriumKind",
    "Equilibrium",
    "x2_of_x1",
    "predator_nullcline_x1",
    "jacobian",
    "classify",
    "trivial_equilibrium",
    "predator_free_equilibrium",
    "interior_equilibria",
    "interior_scan_function",
]


class EquilibriumKind(enum.Enum):
    TRIVIAL = "trivial"
    PREDATOR_FREE = "predator_free"
    INTERIOR = "interior"


class Classification(enum.Enum):
    STABLE_NODE = "stable_node"
    STABLE_FOCUS = "stable_focus"
    UNSTABLE_NODE = "unstable_node"
    UNSTABLE_FOCUS = "unstable_focus"
    SADDLE = "saddle"
    CENTER_DEGENERATE = "center_degenerate"
    NON_LINEARIZABLE = "non_linearizable"


@dataclass(frozen=True)
class Equilibrium:
    kind: EquilibriumKind
    point: State
    classification: Classification
    trace: float | None = None
    det: float | None = None
    eigenvalues: tuple[complex, complex] | None = None


def x2_of_x1(x1: float, p: ModelParams) -> float:
    """Predator level balancing the prey equation: (w1/(w0*a2)) * x1 * f(x1).

    Defined for 0 <= x1 <= a1/b1 (elsewhere the value would be negative).
    """
    cap = p.carrying_capacity
    if not (0.0 <= x1 <= cap * (1.0 + 1e-12)):
        raise DomainError(f"x2_of_x1 needs x1 in [0, a1/b1] = [0, {cap!r}], got {x1!r}")
    return (p.w1 / (p.w0 * p.a2)) * x1 * eval_f(x1, p)


def predator_nullcline_x1(p: ModelParams) -> float:
    """Closed-form interior x1 from g(r*x1) = a2/w1, valid only for m2 = 1:

        x1* = (d / r) * a2**(1/m1) / (w1**(1/m1) - a2**(1/m1))

    Requires w1 > a2 (otherwise the response never pays for predator upkeep).
    """
    if p.m2 != 1.0:
        raise DomainError("closed-form predator nullcline requires m2 = 1")
    if p.w1 <= p.a2:
        raise DomainError(
            f"predator nullcline empty: needs w1 > a2, got w1={p.w1!r}, a2={p.a2!r}")
    em = 1.0 / p.m1
    return (p.d / p.r) * p.a2 ** em / (p.w1 ** em - p.a2 ** em)


def _g_prime(x1: float, p: ModelParams) -> float:
    """d/dx1 of g(r*x1) = m1 * d * r**m1 * x1**(m1-1) / (r*x1 + d)**(m1+1)."""
    return (p.m1 * p.d * p.r ** p.m1 * x1 ** (p.m1 - 1.0)
            / (p.r * x1 + p.d) ** (p.m1 + 1.0))


def jacobian(point: State, p: ModelParams) -> tuple[tuple[float, float], tuple[float, float]]:
    """Exact Jacobian of the field at a point.

    Evaluable at interior points always; on an axis only when the touching
    exponent equals 1 (the limits are then finite).  Otherwise DomainError.
    """
    x1, x2 = point.x1, point.x2
    if x1 < 0.0 or x2 < 0.0:
        raise DomainError(f"Jacobian needs a point in the closed quadrant, got {point!r}")
    if x1 == 0.0 and p.m1 < 1.0:
        raise DomainError("Jacobian singular on the prey axis for m1 < 1")
    if x2 == 0.0 and p.m2 < 1.0:
        raise DomainError("Jacobian singular on the predator axis for m2 < 1")

    G = eval_g(p.r * x1, p)
    if x1 == 0.0:
        # m1 = 1 here: g(r*x1)' at 0 is r/d
        Gp = p.r / p.d
    else:
        Gp = _g_prime(x1, p)

    if p.m2 == 1.0:
        pw, pwm = x2, 1.0
    elif x2 == 0.0:  # unreachable: guarded above
        pw, pwm = 0.0, 0.0
    else:
        pw = x2 ** p.m2
        pwm = x2 ** (p.m2 - 1.0)

    j11 = p.a1 - 2.0 * p.b1 * x1 - p.w0 * Gp * pw
    j12 = -p.m2 * p.w0 * G * pwm
    j21 = p.w1 * Gp * pw
    j22 = -p.a2 + p.m2 * p.w1 * G * pwm
    return ((j11, j12), (j21, j22))


def _eig2(tr: float, det: float) -> tuple[complex, complex]:
    disc = tr * tr - 4.0 * det
    if disc >= 0.0:
        s = math.sqrt(disc)
        return complex(0.5 * (tr + s), 0.0), complex(0.5 * (tr - s), 0.0)
    s = math.sqrt(-disc)
    return complex(0.5 * tr, 0.5 * s), complex(0.5 * tr, -0.5 * s)


# absolute slack for "is the trace/determinant exactly zero" questions; the
# classifier is linear bookkeeping, bifurcation detection does its own work.
_ZERO_TOL = 1e-11


def _classify_linear(tr: float, det: float) -> Classification:
    if abs(det) <= _ZERO_TOL or abs(tr) <= _ZERO_TOL and det > 0.0:
        return Classification.CENTER_DEGENERATE
    if det < 0.0:
        return Classification.SADDLE
    disc = tr * tr - 4.0 * det
    if tr < 0.0:
        return Classification.STABLE_NODE if disc >= 0.0 else Classification.STABLE_FOCUS
    return Classification.UNSTABLE_NODE if disc >= 0.0 else Classification.UNSTABLE_FOCUS


def classify(point: State, p: ModelParams, kind: EquilibriumKind | None = None) -> Equilibrium:
    """Wrap a point as a classified Equilibrium (NON_LINEARIZABLE if the
    Jacobian does not exist there)."""
    if kind is None:
        kind = _kind_of(point, p)
    try:
        (j11, j12), (j21, j22) = jacobian(point, p)
    except DomainError:
        return Equilibrium(kind, point, Classification.NON_LINEARIZABLE)
    tr = j11 + j22
    det = j11 * j22 - j12 * j21
    return Equilibrium(kind, point, _classify_linear(tr, det), tr, det, _eig2(tr, det))


def _kind_of(point: State, p: ModelParams) -> EquilibriumKind:
    scale = max(1.0, p.carrying_capacity)
    if abs(point.x1) <= 1e-12 * scale and abs(point.x2) <= 1e-12 * scale:
        return EquilibriumKind.TRIVIAL
    if abs(point.x2) <= 1e-12 * scale:
        return EquilibriumKind.PREDATOR_FREE
    return EquilibriumKind.INTERIOR


def trivial_equilibrium(p: ModelParams) -> Equilibrium:
    return classify(State(0.0, 0.0), p, EquilibriumKind.TRIVIAL)


def predator_free_equilibrium(p: ModelParams) -> Equilibrium:
    return classify(State(p.carrying_capacity, 0.0), p, EquilibriumKind.PREDATOR_FREE)


def interior_scan_function(p: ModelParams):
    """F(x1) whose roots in (0, a1/b1) are the interior equilibria:

        F(x1) = w0 * g(r*x1) * x2_of_x1(x1)**m2 - x1 * f(x1)

    (equals (w0/w1) times the predator-balance residual along the prey
    nullcline, so its zeros are exactly the simultaneous solutions).
    """
    a1, b1, w0, m2 = p.a1, p.b1, p.w0, p.m2

    def F(x1: float) -> float:
        x2 = x2_of_x1(x1, p)
        pw = 0.0 if x2 == 0.0 else x2 ** m2
        return w0 * eval_g(p.r * x1, p) * pw - x1 * (a1 - b1 * x1)

    return F


def interior_equilibria(p: ModelParams, scan_points: int = 2000) -> list[Equilibrium]:
    """All interior equilibria, by sign-scan + bisection of F on (0, a1/b1).

    The endpoints are trivial zeros of F, so the scan stays strictly inside.
    Roots are refined to ~1e-12 relative; for m2 = 1 the result is replaced
    by the closed form when the two agree (and an ArithmeticError is raised
    if they do not -- that would mean the scan picked up a spurious root).
    """
    if scan_points < 16:
        raise DomainError("scan_points must be at least 16")
    cap = p.carrying_capacity
    F = interior_scan_function(p)
    lo_frac, hi_frac = 1e-9, 1.0 - 1e-9
    xs = [cap * (lo_frac + (hi_frac - lo_frac) * i / (scan_points - 1))
          for i in range(scan_points)]
    vals = [F(x) for x in xs]

    roots: list[float] = []
    for i in range(len(xs) - 1):
        va, vb = vals[i], vals[i + 1]
        if va == 0.0:
            roots.append(xs[i])
        elif va * vb < 0.0:
            roots.append(_bisect(F, xs[i], xs[i + 1]))
    if vals[-1] == 0.0:
        roots.append(xs[-1])

    closed: float | None = None
    if p.m2 == 1.0 and p.w1 > p.a2:
        c = predator_nullcline_x1(p)
        if lo_frac * cap < c < hi_frac * cap:
            closed = c

    out: list[Equilibrium] = []
    rhs_fn = make_rhs(p)
    for x1 in roots:
        if closed is not None and abs(x1 - closed) <= 1e-8 * closed:
            x1 = closed
        x2 = x2_of_x1(x1, p)
        d1, d2 = rhs_fn(x1, x2)
        scale = max(1.0, abs(x1) + abs(x2))
        if max(abs(d1), abs(d2)) > 1e-8 * scale:
            raise ArithmeticError(
                f"equilibrium residual too large at x1={x1!r}: rhs=({d1!r}, {d2!r})")
        out.append(classify(State(x1, x2), p, EquilibriumKind.INTERIOR))
    if closed is not None and all(abs(e.point.x1 - closed) > 1e-8 * closed for e in out):
        raise ArithmeticError(
            "closed-form interior equilibrium missed by the scan; "
            f"expected a root near x1={closed!r}")
    return out


def _bisect(F, a: float, b: float, rel_tol: float = 1e-12) -> float:
    fa = F(a)
    if fa == 0.0:
        return a
    for _ in range(200):
        m = 0.5 * (a + b)
        if b - a <= rel_tol * max(abs(a), abs(b)):
            return m
        fm = F(m)
        if fm == 0.0:
            return m
        if (fa < 0.0) == (fm < 0.0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)
