from __future__ import annotations

import random

import pytest

from predprey import (
    Classification,
    DomainError,
    EquilibriumKind,
    State,
    classify,
    interior_equilibria,
    jacobian,
    make_rhs,
    predator_free_equilibrium,
    predator_nullcline_x1,
    trivial_equilibrium,
    with_params,
    x2_of_x1,
)
from predprey.equilibria import interior_scan_function


def test_trivial_and_predator_free_points(osc_params):
    e0 = trivial_equilibrium(osc_params)
    assert e0.kind is EquilibriumKind.TRIVIAL
    assert e0.point == State(0.0, 0.0)
    e1 = predator_free_equilibrium(osc_params)
    assert e1.kind is EquilibriumKind.PREDATOR_FREE
    assert e1.point.x1 == pytest.approx(osc_params.carrying_capacity)
    assert e1.point.x2 == 0.0


def test_origin_not_linearizable_for_fractional_m1(osc_params):
    e0 = trivial_equilibrium(osc_params)
    assert e0.classification is Classification.NON_LINEARIZABLE
    assert e0.eigenvalues is None


def test_origin_saddle_in_classical_limit(osc_params):
    p = with_params(osc_params, m1=1.0)
    e0 = trivial_equilibrium(p)
    assert e0.classification is Classification.SADDLE


def test_predator_free_saddle_when_invasion_pays(osc_params):
    # w1 * g(r*K) > a2 here, so E1 repels along the predator direction.
    e1 = predator_free_equilibrium(osc_params)
    assert e1.classification is Classification.SADDLE
    assert e1.det is not None and e1.det < 0.0


def test_predator_free_not_linearizable_for_fractional_m2(bistable_params):
    e1 = predator_free_equilibrium(bistable_params)
    assert e1.classification is Classification.NON_LINEARIZABLE


def test_interior_unique_for_oscillatory_set(osc_params):
    eqs = interior_equilibria(osc_params)
    assert len(eqs) == 1
    assert eqs[0].kind is EquilibriumKind.INTERIOR
    assert eqs[0].classification is Classification.UNSTABLE_FOCUS


def test_interior_pair_for_bistable_set(bistable_params):
    eqs = interior_equilibria(bistable_params)
    assert [e.classification for e in eqs] == [
        Classification.SADDLE, Classification.STABLE_NODE]


def test_interior_snaps_to_closed_form_when_m2_is_one(osc_params):
    eqs = interior_equilibria(osc_params)
    assert eqs[0].point.x1 == predator_nullcline_x1(osc_params)
    assert eqs[0].point.x2 == x2_of_x1(eqs[0].point.x1, osc_params)


@pytest.mark.parametrize("table", ["osc", "bistable"])
def test_interior_residual_tiny(table, osc_params, bistable_params):
    p = osc_params if table == "osc" else bistable_params
    f = make_rhs(p)
    for eq in interior_equilibria(p):
        d1, d2 = f(eq.point.x1, eq.point.x2)
        assert abs(d1) < 1e-8 and abs(d2) < 1e-8


def test_scan_function_signs_bracket_roots(bistable_params):
    F = interior_scan_function(bistable_params)
    eqs = interior_equilibria(bistable_params)
    for eq in eqs:
        x = eq.point.x1
        assert F(x * (1 - 1e-4)) * F(x * (1 + 1e-4)) < 0.0


def test_jacobian_matches_central_differences(osc_params, bistable_params):
    rng = random.Random(11)
    for p in (osc_params, bistable_params):
        f = make_rhs(p)
        for _ in range(10):
            x1 = rng.uniform(0.1, 0.9) * p.carrying_capacity
            x2 = rng.uniform(0.05, 20.0)
            (j11, j12), (j21, j22) = jacobian(State(x1, x2), p)
            h1 = 1e-6 * max(1.0, x1)
            h2 = 1e-6 * max(1.0, x2)
            fp1 = f(x1 + h1, x2)
            fm1 = f(x1 - h1, x2)
            fp2 = f(x1, x2 + h2)
            fm2 = f(x1, x2 - h2)
            assert j11 == pytest.approx((fp1[0] - fm1[0]) / (2 * h1), rel=1e-6, abs=1e-9)
            assert j21 == pytest.approx((fp1[1] - fm1[1]) / (2 * h1), rel=1e-6, abs=1e-9)
            assert j12 == pytest.approx((fp2[0] - fm2[0]) / (2 * h2), rel=1e-6, abs=1e-9)
            assert j22 == pytest.approx((fp2[1] - fm2[1]) / (2 * h2), rel=1e-6, abs=1e-9)


def test_jacobian_refuses_axis_with_fractional_exponent(osc_params, bistable_params):
    with pytest.raises(DomainError):
        jacobian(State(0.0, 1.0), osc_params)  # m1 < 1 touches x1 = 0
    with pytest.raises(DomainError):
        jacobian(State(1.0, 0.0), bistable_params)  # m2 < 1 touches x2 = 0


def test_classify_maps_axis_trouble_to_non_linearizable(osc_params):
    eq = classify(State(0.0, 2.0), osc_params)
    assert eq.classification is Classification.NON_LINEARIZABLE


def test_x2_of_x1_domain(osc_params):
    cap = osc_params.carrying_capacity
    assert x2_of_x1(cap, osc_params) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DomainError):
        x2_of_x1(-0.5, osc_params)
    with pytest.raises(DomainError):
        x2_of_x1(cap * 1.01, osc_params)


def test_predator_nullcline_x1_preconditions(bistable_params, osc_params):
    with pytest.raises(DomainError):
        predator_nullcline_x1(bistable_params)  # m2 != 1
    with pytest.raises(DomainError):
        predator_nullcline_x1(with_params(osc_params, w1=0.9))  # w1 <= a2


def test_eigenvalues_consistent_with_trace_det(osc_params):
    eq = interior_equilibria(osc_params)[0]
    lam1, lam2 = eq.eigenvalues
    assert lam1.real + lam2.real == pytest.approx(eq.trace, rel=1e-9)
    prod = lam1 * lam2
    assert prod.real == pytest.approx(eq.det, rel=1e-9)
    assert abs(prod.imag) < 1e-12
