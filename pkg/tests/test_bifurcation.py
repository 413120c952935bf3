from __future__ import annotations

import pytest

from predprey import (
    BifurcationEvent,
    BifurcationKind,
    DomainError,
    State,
    branch_sweep,
    detect_hopf,
    detect_saddle_node,
    detect_transcritical,
    first_lyapunov_coefficient,
    hopf_a1_fixed_point,
    hopf_critical_a1,
    transcritical_r,
    with_params,
)
from predprey.bifurcation import _lyapunov_of_field


def test_branch_sweep_validates_inputs(osc_params):
    with pytest.raises(DomainError):
        branch_sweep(osc_params, "m1", 0.5, 0.9)  # exponents are not sweepable
    with pytest.raises(DomainError):
        branch_sweep(osc_params, "a1", 0.5, 0.5)
    with pytest.raises(DomainError):
        branch_sweep(osc_params, "r", 0.5, 1.5)  # leaves (0, 1]


def test_branch_records_samples_and_params(osc_params):
    br = branch_sweep(osc_params, "a1", 0.4, 0.8, n=9, scan_points=400)
    assert len(br.samples) == 9
    assert br.samples[0] == 0.4 and br.samples[-1] == 0.8
    assert br.params_at(0.5).a1 == 0.5
    assert br.params_at(0.5).b1 == osc_params.b1


def test_branch_chains_are_continuous(bistable_params):
    br = branch_sweep(bistable_params, "w1", 3.8, 5.2, n=41, scan_points=600)
    cap = bistable_params.carrying_capacity
    assert br.chains
    for chain in br.chains:
        xs = [br.equilibria[i][j].point.x1 for i, j in chain]
        for a, b in zip(xs, xs[1:]):
            assert abs(b - a) < 0.1 * cap


def test_detect_hopf_agrees_with_fixed_point(osc_params):
    a1_star, eq_star = hopf_a1_fixed_point(osc_params)
    br = branch_sweep(osc_params, "a1", 0.22, 0.32, n=21, scan_points=600)
    events = detect_hopf(br, scan_points=600)
    assert len(events) == 1
    ev = events[0]
    assert ev.kind is BifurcationKind.HOPF
    assert ev.critical_value == pytest.approx(a1_star, rel=1e-6)
    assert ev.point.x1 == pytest.approx(eq_star.point.x1, rel=1e-6)
    # Eigenvalue crossing speed should be resolution-independent.
    d1 = ev.diagnostics["d_re_eig_dparam"]
    d2 = ev.diagnostics["d_re_eig_dparam_half_h"]
    assert d1 != 0.0
    assert d2 == pytest.approx(d1, rel=0.2)
    assert ev.diagnostics["lyapunov_sign"] == -1.0


def test_detect_hopf_needs_a_crossing(osc_params):
    br = branch_sweep(osc_params, "a1", 0.35, 0.55, n=11, scan_points=400)
    assert detect_hopf(br, scan_points=400) == []


def test_detect_saddle_node_on_w1(bistable_params):
    br = branch_sweep(bistable_params, "w1", 3.8, 5.2, n=57, scan_points=600)
    events = detect_saddle_node(br)
    assert len(events) == 1
    ev = events[0]
    assert ev.kind is BifurcationKind.SADDLE_NODE
    assert ev.critical_value == pytest.approx(4.55175, rel=1e-3)
    assert abs(ev.diagnostics["det"]) < 1e-10
    assert ev.diagnostics["tr"] < 0.0


def test_saddle_node_silent_when_pair_survives(bistable_params):
    br = branch_sweep(bistable_params, "w1", 4.8, 5.4, n=13, scan_points=600)
    assert detect_saddle_node(br) == []


def test_hopf_critical_a1_formula(osc_params):
    a1_star, eq_star = hopf_a1_fixed_point(osc_params)
    pv = with_params(osc_params, a1=a1_star)
    assert hopf_critical_a1(pv, eq_star.point) == pytest.approx(a1_star, rel=1e-10)


def test_transcritical_closed_form(osc_params):
    tc = transcritical_r(osc_params)
    assert tc.as_derived == pytest.approx(0.15234897857893626, rel=1e-12)
    assert tc.as_printed == pytest.approx(0.08045047448148425, rel=1e-12)
    assert tc.r1_star == tc.as_derived
    assert "typo" in tc.note


def test_transcritical_needs_m2_one(bistable_params):
    with pytest.raises(DomainError):
        transcritical_r(bistable_params)


def test_detect_transcritical_on_refuge_sweep(osc_params):
    br = branch_sweep(osc_params, "r", 0.12, 0.2, n=9, scan_points=400)
    events = detect_transcritical(br)
    assert len(events) == 1
    ev = events[0]
    assert ev.kind is BifurcationKind.TRANSCRITICAL
    assert ev.critical_value == pytest.approx(0.15234897857893626, rel=1e-12)
    assert ev.point.x1 == pytest.approx(osc_params.carrying_capacity)
    assert ev.point.x2 == 0.0


def test_detect_transcritical_outside_range_or_wrong_param(osc_params):
    br = branch_sweep(osc_params, "r", 0.3, 0.6, n=5, scan_points=400)
    assert detect_transcritical(br) == []
    br2 = branch_sweep(osc_params, "a1", 0.4, 0.8, n=5, scan_points=400)
    assert detect_transcritical(br2) == []


def test_lyapunov_normal_form_scaling():
    # xdot = -w*y + s*x*(x^2+y^2), ydot = w*x + s*y*(x^2+y^2) has first
    # Lyapunov coefficient proportional to s; with the Frobenius-normalized
    # eigenbasis used here T = -I/sqrt(2), so the computed value is s/2.
    for w, s in [(1.3, 0.7), (0.8, -0.4)]:
        def f(x, y, w=w, s=s):
            q = x * x + y * y
            return -w * y + s * x * q, w * x + s * y * q
        a = _lyapunov_of_field(f, 0.0, 0.0, 0.0, -w, w, 0.0)
        assert a == pytest.approx(s / 2.0, rel=1e-6)


def test_lyapunov_rejects_non_hopf_jacobian():
    def f(x, y):
        return x, -y
    with pytest.raises(DomainError):
        _lyapunov_of_field(f, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0)


def test_first_lyapunov_requires_hopf_event(osc_params):
    fake = BifurcationEvent(BifurcationKind.SADDLE_NODE, "a1", 0.5,
                            State(1.0, 1.0), {})
    with pytest.raises(DomainError):
        first_lyapunov_coefficient(osc_params, fake)
