import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cleanflex import (
    Arc,
    FourierFunction,
    FunctionInSpace,
    SpaceDescriptor,
    axiom_audit,
    catalog,
    classify_flex,
    contact_profile,
    flex_scan,
    minimal_function,
    osculating_polynomial,
    random_fourier,
)
from cleanflex.funcmodel import circular_distance
from cleanflex.osculation import INF

SIN2 = FourierFunction([0, 0, 0, 0, 1.0])


def test_osculating_polynomial_of_sin2t_at_quarter_pi():
    # value 1, slope 0, second derivative -4 at pi/4
    phi = osculating_polynomial(SIN2, math.pi / 4, 1)
    d = phi.derivatives(np.array([math.pi / 4]), 2)[:, 0]
    np.testing.assert_allclose(d, [1.0, 0.0, -4.0], atol=1e-12)


def test_osculating_polynomial_reproduces_space_members():
    u = FourierFunction([0.3, 1.0, -2.0, 0.5, 0.25])
    phi = osculating_polynomial(u, 1.1, 2)
    np.testing.assert_allclose(phi.coeffs, u.coeffs, atol=1e-10)


def test_flex_scan_sin2t():
    arcs = flex_scan(SIN2, SpaceDescriptor.trig(1))
    locs = [a.midpoint for a in arcs]
    np.testing.assert_allclose(locs, [math.pi / 4 + j * math.pi / 2 for j in range(4)], atol=1e-10)
    assert all(a.is_point for a in arcs)


def test_flex_scan_rejects_space_member():
    with pytest.raises(FunctionInSpace):
        flex_scan(FourierFunction([1.0, 1.0, 0.0]), SpaceDescriptor.trig(1))


def test_flex_scan_antiperiodic():
    u = catalog("sharp_half", 1)
    arcs = flex_scan(u, SpaceDescriptor(2))
    np.testing.assert_allclose([a.midpoint for a in arcs], [0, 2 * math.pi / 3, 4 * math.pi / 3],
                               atol=1e-10)


@pytest.mark.parametrize("s,kind", [(math.pi / 4, "clean-min"), (3 * math.pi / 4, "clean-max"),
                                    (5 * math.pi / 4, "clean-min"), (7 * math.pi / 4, "clean-max")])
def test_classify_sin2t(s, kind):
    # phi - u = -+2 (sin(t +- pi/4) -+ 1)^2 vanishes only at s
    rec = classify_flex(SIN2, s, 1)
    assert rec.kind == kind
    # agreement through order 2n is reported as infinite
    assert rec.contact.multiplicity_at(s, 1e-4) == INF
    assert rec.contact.connected


def test_classify_non_flex_is_plain():
    assert classify_flex(SIN2, 0.3, 1).kind == "plain"


def test_minimal_function_worked_instance():
    res = minimal_function(SIN2, [(0.0, 1)], 1)
    np.testing.assert_allclose(res.phi.coeffs, [2.0, -2.0, 2.0], atol=1e-9)
    prof = res.contact
    assert prof.multiplicity_at(0.0) == 2
    assert prof.multiplicity_at(3 * math.pi / 2) == 2
    assert prof.total == 4


def test_minimal_function_accepts_repeated_points():
    a = minimal_function(SIN2, [0.5], 1)
    b = minimal_function(SIN2, [(0.5, 1)], 1)
    np.testing.assert_allclose(a.phi.coeffs, b.phi.coeffs)
    with pytest.raises(ValueError):
        minimal_function(SIN2, [(0.5, 1), (1.0, 1)], 1)


def test_contact_profile_of_space_member_is_infinite():
    u = FourierFunction([1.0, -1.0, 0.5])
    phi = osculating_polynomial(u, 0.0, 1)
    prof = contact_profile(u, phi, 1)
    assert prof.total == INF and prof.connected


def test_contact_profile_plateau_interval():
    # a support anchored on the plateau top rests on the whole flat piece
    from cleanflex.funcmodel import PlateauBump

    b = PlateauBump(math.pi / 5, 2 * math.pi / 5, 3 * math.pi / 5, 4 * math.pi / 5)
    res = minimal_function(b, [(math.pi / 2, 1)], 1)
    assert res.contact.multiplicity_at(math.pi / 2) == INF


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 2))
def test_minimal_function_supports_and_touches(seed, n):
    rng = np.random.default_rng(seed)
    u = random_fourier(rng, n)
    pts = sorted(rng.uniform(0, 2 * math.pi, n))
    if n == 2 and circular_distance(*pts) < 0.1:
        pts[1] = pts[0] + math.pi
    res = minimal_function(u, pts, n)
    t = np.linspace(0, 2 * math.pi, 10_000, endpoint=False)
    scale = np.max(np.abs(u(t)))
    assert np.min(res.phi(t) - u(t)) >= -1e-8 * scale
    for p in pts:
        assert res.contact.multiplicity_at(p) >= 2
    assert res.contact.total >= 2 * n + 2


def test_axiom_audit_small():
    u = random_fourier(np.random.default_rng(3), 1)
    rep = axiom_audit(u, 1, [(0.4,), (2.0,), (5.1,)])
    assert rep.passed, rep.lines()
    assert any("analytically assumed" in line for line in rep.lines())


def test_contact_arc_representative_lookup():
    res = minimal_function(SIN2, [(0.0, 1)], 1)
    assert res.contact.multiplicity_at(1.0) == 0
    assert isinstance(res.contact.arcs[0], Arc)
