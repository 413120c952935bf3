"""Predator-prey vector field with a generalized response and a prey refuge.

The system on the closed positive quadrant is

    dx1/dt = a1*x1 - b1*x1**2 - w0 * g(r*x1) * x2**m2
    dx2/dt = -a2*x2 + w1 * g(r*x1) * x2**m2

with prey growth f(x1) = a1 - b1*x1 and response kernel

    g(s) = (s / (s + d))**m1,      0 < m1 <= 1.

The refuge fraction r in (0, 1] shrinks the prey population visible to the
predator; r = 1 recovers the unprotected model.  For m1 < 1 the kernel has
infinite slope at s = 0, so the field is non-Lipschitz on the prey axis and
orbits can hit x1 = 0 in finite time; m2 < 1 does the same on the predator
axis.  Everything downstream (event handling, equilibrium classification,
the extinction criterion) leans on those two facts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Callable, Iterable, Mapping

__all__ = [
    "DomainError",
    "ParameterError",
    "ModelParams",
    "State",
    "validate_params",
    "eval_f",
    "eval_g",
    "rhs",
    "make_rhs",
    "make_u_rhs",
    "AssumptionCheck",
    "verify_assumptions",
    "with_params",
]

# Accepted sign slack for state components: values in (-_NEG_SLACK, 0) are
# treated as zero, anything more negative is a caller error.
_NEG_SLACK = 1e-12


class DomainError(ValueError):
    """A quantity left the domain where the requested operation makes sense."""


class ParameterError(ValueError):
    """Raised by validate_params; carries the full list of violations."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


@dataclass(frozen=True)
class State:
    """A point (x1, x2) of the phase plane (prey, predator)."""

    x1: float
    x2: float

    def __iter__(self):
        yield self.x1
        yield self.x2


@dataclass(frozen=True)
class ModelParams:
    a1: float   # prey intrinsic growth rate
    a2: float   # predator death rate
    b1: float   # prey self-limitation
    w0: float   # consumption rate
    w1: float   # conversion rate
    d: float    # half-saturation-like constant in g
    m1: float   # response exponent, (0, 1]
    m2: float   # predator interference exponent, (0, 1]
    r: float = 1.0  # refuge fraction (fraction of prey exposed), (0, 1]

    def __post_init__(self):
        errors = _violations(self)
        if errors:
            raise ParameterError(errors)

    @property
    def carrying_capacity(self) -> float:
        """Prey-only equilibrium a1/b1."""
        return self.a1 / self.b1


def _range_error(name: str, v: float) -> str | None:
    if not (isinstance(v, (int, float)) and math.isfinite(v)):
        return f"{name} must be a finite number, got {v!r}"
    if name in ("m1", "m2", "r"):
        if not (0.0 < v <= 1.0):
            return f"{name} must lie in (0, 1], got {v!r}"
    elif v <= 0.0:
        return f"{name} must be positive, got {v!r}"
    return None


def _violations(p: ModelParams) -> list[str]:
    errors = []
    for f in fields(ModelParams):
        msg = _range_error(f.name, getattr(p, f.name))
        if msg:
            errors.append(msg)
    return errors


def validate_params(raw: Mapping[str, float]) -> ModelParams:
    """Build ModelParams from a raw mapping, reporting *all* problems at once.

    Raises ParameterError whose .errors lists every unknown key, missing key,
    and range violation rather than stopping at the first.
    """
    known = {f.name for f in fields(ModelParams)}
    errors = [f"unknown parameter {k!r}" for k in raw if k not in known]
    required = known - {"r"}
    errors += [f"missing parameter {k!r}" for k in sorted(required - set(raw))]
    if errors:
        # Construction is off the table; still audit the values we do have.
        for k in raw:
            if k in known:
                try:
                    msg = _range_error(k, float(raw[k]))
                except (TypeError, ValueError):
                    msg = f"{k} must be a number, got {raw[k]!r}"
                if msg:
                    errors.append(msg)
        raise ParameterError(errors)
    try:
        return ModelParams(**{k: float(v) for k, v in raw.items()})
    except ParameterError:
        raise
    except (TypeError, ValueError) as exc:
        raise ParameterError([str(exc)]) from exc


def eval_f(x1: float, p: ModelParams) -> float:
    """Prey per-capita growth f(x1) = a1 - b1*x1."""
    return p.a1 - p.b1 * x1


def eval_g(s: float, p: ModelParams) -> float:
    """Response kernel g(s) = (s/(s+d))**m1 for s >= 0.  g(0) = 0."""
    if s < 0.0:
        raise DomainError(f"g is defined for nonnegative arguments, got {s!r}")
    if s == 0.0:
        return 0.0
    return (s / (s + p.d)) ** p.m1


def _clamped(value: float, name: str) -> float:
    if value >= 0.0:
        return value
    if value > -_NEG_SLACK:
        return 0.0
    raise DomainError(f"{name} = {value!r} is negative beyond roundoff slack")


def rhs(s: State, p: ModelParams) -> tuple[float, float]:
    """Vector field at a state.  Tiny negative components (roundoff from an
    integrator) are clamped to zero; genuinely negative ones raise."""
    x1 = _clamped(s.x1, "x1")
    x2 = _clamped(s.x2, "x2")
    return make_rhs(p)(x1, x2)


def make_rhs(p: ModelParams) -> Callable[[float, float], tuple[float, float]]:
    """Compile the field to a float closure (the integrator's hot path).

    The closure treats negative inputs as zero without complaint -- embedded
    Runge-Kutta trial stages may peek slightly across the axes, and a Python
    float power with negative base and fractional exponent would come back
    complex.
    """
    a1, a2, b1, w0, w1, d = p.a1, p.a2, p.b1, p.w0, p.w1, p.d
    m1, m2, r = p.m1, p.m2, p.r

    if m1 == 1.0 and m2 == 1.0:
        def field(x1: float, x2: float) -> tuple[float, float]:
            if x1 < 0.0:
                x1 = 0.0
            if x2 < 0.0:
                x2 = 0.0
            s = r * x1
            g = s / (s + d)
            gx2 = g * x2
            return (x1 * (a1 - b1 * x1) - w0 * gx2, x2 * (-a2) + w1 * gx2)
        return field

    def field(x1: float, x2: float) -> tuple[float, float]:
        if x1 < 0.0:
            x1 = 0.0
        if x2 < 0.0:
            x2 = 0.0
        s = r * x1
        g = 0.0 if s == 0.0 else (s / (s + d)) ** m1
        pw = 0.0 if x2 == 0.0 else x2 ** m2
        inter = g * pw
        return (
            x1 * (a1 - b1 * x1) - w0 * inter,
            -a2 * x2 + w1 * inter,
        )

    return field


def make_u_rhs(p: ModelParams) -> Callable[[float, float], tuple[float, float]]:
    """Field of the inverted-prey chart u = 1/x1:

        du/dt  = -a1*u + b1 + w0 * r**m1 * u**2 / (r + d*u)**m1 * x2**m2
        dx2/dt = -a2*x2 + w1 * r**m1 / (r + d*u)**m1 * x2**m2

    Prey extinction (x1 -> 0 in finite time) becomes finite-time blowup of u,
    which a step controller can chase without resolving a non-Lipschitz
    touchdown.  Valid for u > 0.
    """
    a1, a2, b1, w0, w1, d = p.a1, p.a2, p.b1, p.w0, p.w1, p.d
    m1, m2, r = p.m1, p.m2, p.r
    rm1 = r ** m1

    def field(u: float, x2: float) -> tuple[float, float]:
        if x2 < 0.0:
            x2 = 0.0
        if u <= 0.0:
            raise DomainError(f"u-chart requires u > 0, got {u!r}")
        denom = (r + d * u) ** m1
        pw = 0.0 if x2 == 0.0 else x2 ** m2
        kernel = rm1 * pw / denom
        return (
            -a1 * u + b1 + w0 * u * u * kernel,
            -a2 * x2 + w1 * kernel,
        )

    return field


# --------------------------------------------------------------------------
# Standing-assumption checker.

_PASS = "pass"
_FAIL = "fail"
_NOT_APPLICABLE = "not applicable"


@dataclass(frozen=True)
class AssumptionCheck:
    name: str
    status: str  # "pass" | "fail" | "not applicable"
    detail: str = ""


def _default_grid(p: ModelParams) -> list[float]:
    top = 2.0 * p.carrying_capacity
    n = 400
    # log-spaced near zero plus uniform coverage; the axis end is where the
    # interesting behaviour lives.
    pts = [top * 10.0 ** (-(12.0 * (1.0 - i / 60.0))) for i in range(61)]
    pts += [top * (i + 1) / n for i in range(n)]
    return sorted(set(pts))


def verify_assumptions(
    p: ModelParams, grid: Iterable[float] | None = None
) -> list[AssumptionCheck]:
    """Numerically audit the standing assumptions on f and g.

    (
      i) g continuous on x1 >= 0 with g(0) = 0;
     ii) g smooth and strictly increasing for x1 > 0;
    iii) f smooth on x1 >= 0;
     iv) logistic sign structure: (x1 - a1/b1) * f(x1) < 0 away from a1/b1;
      v) for m1 < 1, g(x1)/x1 -> +infinity as x1 -> 0+;
     vi) for m1 < 1, g not differentiable at 0 (same divergence);
    vii) the integral of 1/g over (0, beta] converges (finite-time reach).

    Checks are evidence on a grid, not proofs; grid defaults to a mix of
    log-spaced points near the axis and uniform points up to 2*a1/b1.
    """
    xs = sorted(x for x in (grid if grid is not None else _default_grid(p)) if x > 0.0)
    if len(xs) < 8:
        raise DomainError("assumption grid needs at least 8 positive points")
    checks: list[AssumptionCheck] = []

    g0 = eval_g(0.0, p)
    near0 = eval_g(xs[0], p)
    ok = g0 == 0.0 and near0 < 0.05
    checks.append(AssumptionCheck(
        "I: g continuous, g(0)=0",
        _PASS if ok else _FAIL,
        f"g(0)={g0!r}, g({xs[0]:.3e})={near0:.3e}",
    ))

    gs = [eval_g(x, p) for x in xs]
    increasing = all(b > a for a, b in zip(gs, gs[1:]))
    checks.append(AssumptionCheck(
        "II: g smooth and increasing on x1>0",
        _PASS if increasing else _FAIL,
        "strictly increasing on grid" if increasing else "monotonicity violated on grid",
    ))

    checks.append(AssumptionCheck(
        "III: f smooth on x1>=0",
        _PASS,
        "f is affine",
    ))

    cap = p.carrying_capacity
    bad = [x for x in xs if abs(x - cap) > 1e-9 * cap and (x - cap) * eval_f(x, p) >= 0.0]
    checks.append(AssumptionCheck(
        "IV: (x1-a1/b1)*f(x1)<0 off the carrying capacity",
        _PASS if not bad else _FAIL,
        f"carrying capacity a1/b1 = {cap:.6g}",
    ))

    if p.m1 < 1.0:
        # g(x)/x ~ x**(m1-1): measure the exponent over six decades.
        xa, xb = 1e-6, 1e-12
        qa = eval_g(xa, p) / xa
        qb = eval_g(xb, p) / xb
        slope = math.log(qb / qa) / math.log(xb / xa)
        diverges = qb > qa and slope < -1e-5
        detail = (f"g(x)/x ~ x**({slope:.4f}) toward 0+ "
                  f"(theory exponent m1-1 = {p.m1 - 1.0:.4f})")
        checks.append(AssumptionCheck(
            "V: g(x1)/x1 -> inf at 0+", _PASS if diverges else _FAIL, detail))
        checks.append(AssumptionCheck(
            "VI: g not differentiable at 0", _PASS if diverges else _FAIL,
            "difference quotient divergent" if diverges else "quotient bounded",
        ))
    else:
        detail = "m1 = 1: g is differentiable at 0 with slope 1/d"
        checks.append(AssumptionCheck("V: g(x1)/x1 -> inf at 0+", _NOT_APPLICABLE, detail))
        checks.append(AssumptionCheck("VI: g not differentiable at 0", _NOT_APPLICABLE, detail))

    checks.append(_integral_check(p))
    return checks


def _integral_check(p: ModelParams) -> AssumptionCheck:
    """VII: does int_0^beta dx/g(x) converge?

    Near zero 1/g ~ (d/x)**m1, so the integral behaves like x**(1-m1): finite
    exactly when m1 < 1.  The numeric audit integrates over shrinking inner
    cutoffs and checks the tail contributions form a geometric-looking,
    summable sequence.
    """
    beta = min(1.0, p.carrying_capacity)
    if p.m1 >= 1.0:
        return AssumptionCheck(
            "VII: integral of 1/g near 0 converges",
            _FAIL,
            "log-divergent at m1=1; finite-time prey extinction unavailable",
        )
    # Exact antiderivative comparison is overkill; midpoint rule on dyadic
    # shells [beta/2^(k+1), beta/2^k] is plenty to exhibit summability.
    shells = []
    for k in range(60):
        hi = beta / 2.0 ** k
        lo = hi / 2.0
        n = 32
        h = (hi - lo) / n
        s = sum(1.0 / eval_g(lo + (i + 0.5) * h, p) for i in range(n)) * h
        shells.append(s)
    total = sum(shells)
    # Summable iff shell contributions decay geometrically: s_{k+1}/s_k -> 2**(m1-1) < 1.
    tail_ratio = shells[-1] / shells[-2]
    converges = math.isfinite(total) and tail_ratio < 0.999
    return AssumptionCheck(
        "VII: integral of 1/g near 0 converges",
        _PASS if converges else _FAIL,
        f"int_(0,{beta:.3g}] 1/g ~ {total:.6g}, shell ratio {tail_ratio:.4f} "
        f"(theory 2**(m1-1) = {2.0 ** (p.m1 - 1.0):.4f})",
    )


def with_params(p: ModelParams, **changes: float) -> ModelParams:
    """replace() wrapper so sweep code doesn't import dataclasses everywhere."""
    return replace(p, **changes)
