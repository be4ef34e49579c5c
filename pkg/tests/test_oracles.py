import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frictionlab.oracles import (SteadyState, brick_incline_analytic, classify_sphere_incline,
                                 classify_trajectory)

S, PR, RWS, PS = SteadyState.S, SteadyState.PR, SteadyState.RWS, SteadyState.PS
MOBILITY = {S: 0, PR: 1, RWS: 2, PS: 2}


@pytest.mark.parametrize("alpha_deg, expected", [(5, S), (20, PR), (35, RWS)])
def test_sphere_examples(alpha_deg, expected):
    assert classify_sphere_incline(math.radians(alpha_deg), 0.25, 0.2, 0.3) is expected


def test_ties_go_to_less_mobile_state():
    assert classify_sphere_incline(math.atan(2 * 0.3 * 0.25), 0.25, 0.2, 0.3) is S
    boundary = math.atan(3.5 * 0.25 - 5 * 0.3 * 0.2)
    assert classify_sphere_incline(boundary, 0.25, 0.2, 0.3) is PR
    assert classify_sphere_incline(boundary + 1e-9, 0.25, 0.2, 0.3) is RWS


def test_half_eta_slides_like_a_brick():
    # above tan(alpha) = 2 eta_r mu_s the sphere cannot stay put
    for deg in (15, 20, 40, 80):
        assert classify_sphere_incline(math.radians(deg), 0.25, 0.2, 0.5) is PS


@given(st.floats(0.01, 1.5), st.floats(0.01, 1.5), st.floats(0.0, 0.49),
       st.floats(0.05, 1.0), st.floats(0.1, 1.0))
def test_classifier_monotone_in_alpha(a1, a2, eta, mu_s, ratio):
    lo, hi = sorted((a1, a2))
    c_lo = classify_sphere_incline(lo, mu_s, ratio * mu_s, eta)
    c_hi = classify_sphere_incline(hi, mu_s, ratio * mu_s, eta)
    assert MOBILITY[c_hi] >= MOBILITY[c_lo]


def test_classifier_validation():
    with pytest.raises(ValueError):
        classify_sphere_incline(0.0, 0.25, 0.2, 0.3)
    with pytest.raises(ValueError):
        classify_sphere_incline(0.3, 0.2, 0.25, 0.3)


def test_brick_examples():
    out = brick_incline_analytic(0.25, 0.25, 0.2, 1.0)
    assert not out.sticks
    assert math.isclose(out.acceleration, 0.525, rel_tol=1e-2)
    assert math.isclose(out.friction_force, 0.2 * 9.8 * math.cos(0.25))
    stick = brick_incline_analytic(math.atan(0.2), 0.25, 0.2, 1.0)
    assert stick.sticks and stick.acceleration == 0.0
    flat = brick_incline_analytic(0.0, 0.25, 0.2, 1.0)
    assert flat.sticks and flat.friction_force == 0.0
    settled = brick_incline_analytic(0.18, 0.25, 0.2, 1.0)
    assert math.isclose(settled.friction_force, 1.754, rel_tol=1e-3)


def test_trajectory_classifier():
    zeros = np.zeros(10)
    assert classify_trajectory(zeros, zeros, 0.2) is S
    v = np.full(10, 1.0)
    assert classify_trajectory(v, zeros, 0.2) is PS
    assert classify_trajectory(v, v / 0.2, 0.2) is PR
    assert classify_trajectory(v, v / 0.2, 0.2, slide_static=np.zeros(10, bool)) is RWS
    assert classify_trajectory(v, 0.5 * v / 0.2, 0.2) is RWS
