from __future__ import annotations

import pytest

from predprey import (
    CurveLabel,
    DomainError,
    IntegratorOptions,
    PlanarCurve,
    SeparatrixOptions,
    State,
    TerminationKind,
    Verdict,
    integrate,
    predator_nullcline,
    prey_nullcline,
    psi,
    separatrix_boundary_x2,
    separatrix_relative_position,
    trace_stable_separatrix_E0,
    trace_unstable_manifold_E1,
    with_params,
)


def test_psi_domain_and_values(osc_params):
    cap = osc_params.carrying_capacity
    assert psi(cap, osc_params) == pytest.approx(0.0, abs=1e-12)
    assert psi(1.0, osc_params) > 0.0
    for bad in (0.0, -1.0, cap * 1.001):
        with pytest.raises(DomainError):
            psi(bad, osc_params)


def test_prey_nullcline_samples_psi(osc_params):
    curve = prey_nullcline(osc_params, n=64)
    assert curve.label is CurveLabel.PREY_NULLCLINE
    xs = [s.x1 for s in curve.points]
    assert all(b > a for a, b in zip(xs, xs[1:]))
    mid = curve.points[32]
    assert mid.x2 == pytest.approx(psi(mid.x1, osc_params))


def test_prey_nullcline_m2_gate(bistable_params):
    with pytest.raises(DomainError):
        prey_nullcline(bistable_params)
    curve = prey_nullcline(bistable_params, n=16, allow_general_m2=True)
    s = curve.points[8]
    assert s.x2 == pytest.approx(psi(s.x1, bistable_params) ** 2.0)


def test_predator_nullcline_is_vertical(osc_params):
    curve = predator_nullcline(osc_params, x2_max=5.0, n=4)
    assert curve.label is CurveLabel.PREDATOR_NULLCLINE
    assert len({s.x1 for s in curve.points}) == 1
    assert curve.points[-1].x2 == 5.0


def test_unstable_manifold_descends_from_e1(osc_params):
    wu = trace_unstable_manifold_E1(osc_params)
    assert wu.label is CurveLabel.UNSTABLE_MANIFOLD_E1
    cap = osc_params.carrying_capacity
    first = wu.points[0]
    assert first.x1 == pytest.approx(cap, rel=1e-4)
    assert 0.0 < first.x2 < 1e-3


def test_unstable_manifold_needs_a_saddle(osc_params, bistable_params):
    with pytest.raises(DomainError):
        trace_unstable_manifold_E1(bistable_params)  # m2 < 1: not linearizable
    below = with_params(osc_params, r=0.1)  # below the invasion threshold
    with pytest.raises(DomainError):
        trace_unstable_manifold_E1(below)


def test_boundary_bisection_separates_fates(osc_params):
    sopts = SeparatrixOptions(bisect_rel_tol=1e-6,
                              integrator=IntegratorOptions(horizon=500.0))
    b = separatrix_boundary_x2(osc_params, 5.0, sopts)
    assert b > psi(5.0, osc_params)  # boundary sits above the nullcline

    up = integrate(osc_params, State(5.0, b * 1.01),
                   IntegratorOptions(horizon=500.0))
    assert up.termination.kind is TerminationKind.PREY_EXTINCT

    down = integrate(osc_params, State(5.0, b * 0.99),
                     IntegratorOptions(horizon=500.0),
                     stop_when=lambda t, s: s.x1 > 5.0)
    assert down.termination.kind is not TerminationKind.PREY_EXTINCT


def test_separatrix_requires_fractional_m1(osc_params):
    with pytest.raises(DomainError):
        trace_stable_separatrix_E0(with_params(osc_params, m1=1.0, m2=1.0))


def test_separatrix_explicit_probe_list(osc_params):
    sopts = SeparatrixOptions(bisect_rel_tol=1e-6,
                              integrator=IntegratorOptions(horizon=500.0))
    ws = trace_stable_separatrix_E0(osc_params, probe_x1=[5.0, 4.0], opts=sopts)
    assert ws.label is CurveLabel.STABLE_SEPARATRIX_E0
    assert [s.x1 for s in ws.points] == [4.0, 5.0]  # sorted by abscissa
    assert ws.points[1].x2 == pytest.approx(
        separatrix_boundary_x2(osc_params, 5.0, sopts), rel=1e-6)


def test_relative_position_verdicts():
    ws = PlanarCurve(CurveLabel.STABLE_SEPARATRIX_E0,
                     (State(1.0, 5.0), State(4.0, 5.0), State(8.0, 5.0)))
    wu = PlanarCurve(CurveLabel.UNSTABLE_MANIFOLD_E1,
                     (State(9.0, 2.0), State(5.0, 2.0), State(1.0, 2.0)))
    cmp_ = separatrix_relative_position(ws, wu)
    assert cmp_.verdict is Verdict.WS_ABOVE_WU
    assert cmp_.margin == pytest.approx(3.0)

    wu_hi = PlanarCurve(CurveLabel.UNSTABLE_MANIFOLD_E1,
                        (State(9.0, 9.0), State(5.0, 9.0), State(1.0, 9.0)))
    assert separatrix_relative_position(ws, wu_hi).verdict is Verdict.WU_ABOVE_WS

    wu_x = PlanarCurve(CurveLabel.UNSTABLE_MANIFOLD_E1,
                       (State(9.0, 0.0), State(5.0, 5.0), State(1.0, 10.0)))
    assert separatrix_relative_position(ws, wu_x).verdict is Verdict.CROSSING


def test_relative_position_checks_labels_and_overlap():
    a = PlanarCurve(CurveLabel.STABLE_SEPARATRIX_E0,
                    (State(1.0, 5.0), State(2.0, 5.0)))
    b = PlanarCurve(CurveLabel.UNSTABLE_MANIFOLD_E1,
                    (State(9.0, 2.0), State(8.0, 2.0)))
    with pytest.raises(DomainError):
        separatrix_relative_position(b, a)  # swapped roles
    with pytest.raises(DomainError):
        separatrix_relative_position(a, b)  # no shared x1 range
