import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cleanflex import (
    CircleDegenerate,
    Conic,
    ConicDegenerate,
    FourierFunction,
    NotConvex,
    SupportCurve,
    TangentLinesParallel,
    catalog,
    curvature_radius,
    curve_from_support,
    doubly_tangent_conic,
    osculating_conic,
    sextactic_scan,
    vertex_scan,
)
from cleanflex.curves import conic_contact, conic_residual_slope, monomial_derivatives

CIRCLE = SupportCurve(FourierFunction([1.0, 0.0, 0.0]))
OVAL = SupportCurve(catalog("oval", eps=0.1))
TREFOIL = SupportCurve(catalog("trefoil", eps=0.05))


def ellipse(a=2.0, b=1.0):
    return SupportCurve(catalog("ellipse", a=a, b=b))


def test_points_closed_form():
    t = np.linspace(0, 2 * math.pi, 9)
    h = 1 + 0.1 * np.cos(2 * t)
    dh = -0.2 * np.sin(2 * t)
    want = np.stack([h * np.cos(t) - dh * np.sin(t), h * np.sin(t) + dh * np.cos(t)], axis=1)
    np.testing.assert_allclose(OVAL.points(t), want, atol=1e-14)


def test_origin_shift():
    c = SupportCurve(FourierFunction([1.0, 0.0, 0.0]), origin=(2.0, -1.0))
    np.testing.assert_allclose(c.points([0.0])[0], [3.0, -1.0], atol=1e-14)


def test_ellipse_points_lie_on_ellipse():
    p = ellipse().points(np.linspace(0, 6, 25))
    np.testing.assert_allclose(p[:, 0] ** 2 / 4 + p[:, 1] ** 2, 1.0, atol=1e-12)


def test_curve_derivatives_against_finite_differences():
    t0, d = 0.7, 1e-4
    g = curve_from_support(TREFOIL, t0, 3)
    for k in range(1, 4):
        lo = curve_from_support(TREFOIL, t0 - d, k - 1)[k - 1]
        hi = curve_from_support(TREFOIL, t0 + d, k - 1)[k - 1]
        np.testing.assert_allclose(g[k], (hi - lo) / (2 * d), atol=1e-6)


def test_tangent_is_perpendicular_to_normal():
    t = np.linspace(0, 6, 11)
    g = curve_from_support(TREFOIL, t, 1)
    normals = np.stack([np.cos(t), np.sin(t)])
    np.testing.assert_allclose(np.sum(g[1] * normals, axis=0), 0.0, atol=1e-13)


def test_not_convex():
    with pytest.raises(NotConvex):
        SupportCurve(FourierFunction([1.0, 0, 0, 0.5, 0]))


def test_curvature_radius_oval():
    # h + h'' = 1 - 0.3 cos 2t
    assert curvature_radius(OVAL, 0.0) == pytest.approx(0.7, abs=1e-14)
    assert curvature_radius(OVAL, math.pi / 2) == pytest.approx(1.3, abs=1e-14)


def test_vertices_of_oval():
    recs = vertex_scan(OVAL)
    np.testing.assert_allclose([r.location.midpoint for r in recs],
                               [0, math.pi / 2, math.pi, 3 * math.pi / 2], atol=1e-10)
    # the small osculating circle at the end of the long axis fits inside
    kinds = {round(r.location.midpoint, 6): r.kind for r in recs}
    assert kinds[0.0] == "clean-max" and kinds[round(math.pi / 2, 6)] == "clean-min"
    for r in recs:
        assert r.inscribed == (r.kind == "clean-max")


def test_inscribed_circle_stays_inside():
    rec = next(r for r in vertex_scan(OVAL) if r.kind == "clean-max")
    p = OVAL.points(np.linspace(0, 2 * math.pi, 2000))
    dist = np.hypot(p[:, 0] - rec.center[0], p[:, 1] - rec.center[1])
    assert dist.min() >= rec.radius - 1e-9


def test_circle_has_no_isolated_vertices():
    with pytest.raises(CircleDegenerate):
        vertex_scan(CIRCLE)


def test_conic_basics():
    q = Conic([1.0, 0.0, 4.0, 0.0, 0.0, -4.0])
    assert q.classification == "ellipse"
    assert np.linalg.norm(q.vector) == pytest.approx(1.0)
    assert q([2.0, 0.0]) == pytest.approx(0.0)
    assert Conic([1, 0, -1, 0, 0, -1]).classification == "hyperbola"
    assert Conic([1, 0, 0, 0, -1, 0]).classification == "parabola"
    assert Conic([1, 0, -1, 0, 0, 0]).classification == "degenerate"
    np.testing.assert_allclose(Conic([1, 0, 1, -2, 0, 0]).center(), [1, 0])


def test_monomial_derivatives_zero_order():
    t = np.array([0.3])
    x, y = TREFOIL.points(t)[0]
    np.testing.assert_allclose(monomial_derivatives(TREFOIL, t, 0)[0, :, 0],
                               [x * x, x * y, y * y, x, y, 1.0])


@settings(max_examples=10, deadline=None)
@given(t=st.floats(0.0, 2 * math.pi), a=st.floats(1.2, 3.0))
def test_osculating_conic_of_ellipse_is_the_ellipse(t, a):
    c = ellipse(a, 1.0)
    q = osculating_conic(c, t).vector
    want = np.array([1 / a**2, 0, 1, 0, 0, -1])
    want /= np.linalg.norm(want)
    assert min(np.linalg.norm(q - want), np.linalg.norm(q + want)) < 1e-6


def test_osculating_conic_sign_is_outward():
    t = 0.4
    q = osculating_conic(TREFOIL, t)
    p = TREFOIL.points([t])[0]
    e = np.array([math.cos(t), math.sin(t)])
    assert q(p + 1e-3 * e) > 0 > q(p - 1e-3 * e)


def test_sextactic_trefoil():
    recs = sextactic_scan(TREFOIL)
    assert len(recs) >= 6
    assert sum(r.kind == "clean-max" for r in recs) >= 3
    assert sum(r.kind == "clean-min" for r in recs) >= 3


def test_sextactic_rejects_conics():
    with pytest.raises(ConicDegenerate):
        sextactic_scan(ellipse())
    with pytest.raises(ConicDegenerate):
        sextactic_scan(CIRCLE)


def test_residual_slope():
    # generic point: contact five, so the residual grows like d^5
    assert conic_residual_slope(TREFOIL, 0.3) >= 4.5


def test_doubly_tangent_conic_of_circle_is_the_circle():
    q = doubly_tangent_conic(CIRCLE, 0.0, 2.0).vector
    want = np.array([1, 0, 1, 0, 0, -1]) / math.sqrt(3)
    assert np.linalg.norm(q - want) < 1e-6


def test_doubly_tangent_conic_trefoil():
    p, q = 0.0, 2 * math.pi / 3
    for side in ("inscribed", "circumscribed"):
        conic = doubly_tangent_conic(TREFOIL, p, q, side)
        v = conic(TREFOIL.points(np.linspace(0, 2 * math.pi, 3000)))
        if side == "inscribed":
            assert v.min() >= -1e-8 * np.abs(v).max()
        else:
            assert v.max() <= 1e-8 * np.abs(v).max()
        prof = conic_contact(TREFOIL, conic, points=(p, q))
        assert prof.multiplicity_at(p, 1e-4) >= 2 and prof.multiplicity_at(q, 1e-4) >= 2
        assert prof.total >= 6


def test_doubly_tangent_conic_errors():
    with pytest.raises(TangentLinesParallel):
        doubly_tangent_conic(TREFOIL, 1.0, 1.0)
    with pytest.raises(ValueError):
        doubly_tangent_conic(TREFOIL, 0.0, 1.0, side="sideways")
