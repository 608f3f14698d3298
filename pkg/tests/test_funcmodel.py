import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from cleanflex import (
    Arc,
    DenominatorVanishesElsewhere,
    FourierFunction,
    GridProfile,
    NotOneSided,
    catalog,
    find_zeros,
    near_zero_components,
    section2_example,
    sup_of_ratio,
)
from cleanflex.funcmodel import (
    CallableFunction,
    PlateauBump,
    SymbolicFunction,
    bracketed_root,
    circular_distance,
)

TWO_PI = 2 * math.pi


def test_grid_profile_defaults_and_validation():
    g = GridProfile()
    assert g.base_samples == 4096 and g.step == pytest.approx(TWO_PI / 4096)
    assert g.zero_tol < g.support_tol < g.contact_tol
    with pytest.raises(ValueError):
        GridProfile(base_samples=10)
    with pytest.raises(ValueError):
        GridProfile(zero_tol=0.0)


def test_fourier_layout_and_parity():
    u = FourierFunction([0, 0, 0, 0, 1.0])
    t = np.linspace(0, 1, 7)
    np.testing.assert_allclose(u(t), np.sin(2 * t), atol=1e-14)
    np.testing.assert_allclose(u(t, 1), 2 * np.cos(2 * t), atol=1e-13)
    assert u.check_parity()
    a = FourierFunction([0, 0, 0, 1.0], "antiperiodic")
    np.testing.assert_allclose(a(t), np.sin(1.5 * t), atol=1e-14)
    assert a.sign == -1 and a.check_parity()
    with pytest.raises(ValueError):
        FourierFunction([1.0], "weird")


def test_symbolic_function_matches_closed_form():
    u = SymbolicFunction(sp.exp(sp.cos(sp.Symbol("t"))), name="expcos")
    t = np.array([0.3, 2.0])
    d = u.derivatives(t, 2)
    np.testing.assert_allclose(d[0], np.exp(np.cos(t)))
    np.testing.assert_allclose(d[1], -np.sin(t) * np.exp(np.cos(t)))


def test_plateau_bump_is_flat_and_smooth():
    b = PlateauBump(math.pi / 5, 2 * math.pi / 5, 3 * math.pi / 5, 4 * math.pi / 5)
    top = np.linspace(2 * math.pi / 5 + 1e-3, 3 * math.pi / 5 - 1e-3, 20)
    np.testing.assert_allclose(b(top), 1.0)
    np.testing.assert_allclose(b(top, 3), 0.0, atol=1e-12)
    off = np.linspace(4 * math.pi / 5 + 1e-3, TWO_PI + math.pi / 5 - 1e-3, 20)
    np.testing.assert_allclose(b(off), 0.0, atol=1e-300)
    v = section2_example(0.5)
    np.testing.assert_allclose(v(top + math.pi), 0.5)


def test_catalog_entries():
    np.testing.assert_allclose(catalog("sharp", 2)(0.3), math.sin(0.9))
    np.testing.assert_allclose(catalog("sharp_half", 1)(0.3), math.sin(0.45))
    np.testing.assert_allclose(catalog("oval", eps=0.1)(0.0), 1.1)
    with pytest.raises(KeyError):
        catalog("nope")


def test_arc_basics():
    a = Arc(6.0, 6.5)
    assert a.start == pytest.approx(6.0)
    assert a.contains(0.1) and not a.contains(1.0)
    assert a.midpoint == pytest.approx(6.25)
    assert Arc.point(TWO_PI).start == 0.0
    assert circular_distance(0.1, TWO_PI - 0.1) == pytest.approx(0.2)
    with pytest.raises(ValueError):
        Arc(1.0, 0.5)


def test_bracketed_root():
    assert bracketed_root(math.cos, 0.0, 3.0) == pytest.approx(math.pi / 2, abs=1e-14)
    assert bracketed_root(math.cos, 0.0, 1.0) is None
    assert bracketed_root(math.sin, 0.0, 1.0) == 0.0


def test_find_zeros_sin3t():
    u = catalog("sharp", 2)
    np.testing.assert_allclose(find_zeros(u), np.arange(6) * math.pi / 3, atol=1e-12)


def test_find_zeros_tangential():
    # 1 - cos t has a double zero at 0; no sign change
    u = FourierFunction([1.0, -1.0, 0.0])
    zs = find_zeros(u)
    assert len(zs) == 1 and circular_distance(zs[0], 0.0) < 1e-4


def test_find_zeros_antiperiodic_seam():
    a = FourierFunction([0, 0, 0, 1.0], "antiperiodic")  # sin(3t/2)
    np.testing.assert_allclose(find_zeros(a, parity=-1), [0, 2 * math.pi / 3, 4 * math.pi / 3],
                               atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(k=st.integers(1, 6), phase=st.floats(0.0, 1.0))
def test_zero_count_of_pure_harmonic(k, phase):
    u = CallableFunction(lambda t: np.sin(k * (t - phase)))
    assert len(find_zeros(u)) == 2 * k


def test_near_zero_components():
    u = FourierFunction([1.0, -1.0, 0.0])  # touches zero once at 0
    arcs = near_zero_components(u, 1e-7)
    assert len(arcs) == 1 and arcs[0].distance(0.0) == 0.0
    with pytest.raises(NotOneSided):
        near_zero_components(catalog("sharp"), 1e-7)


def test_sup_of_ratio_with_contact():
    # (1 - cos t)(2 + sin t) / (1 - cos t): ratio 2 + sin t, sup 3 at pi/2
    num = CallableFunction(lambda t: (1 - np.cos(t)) * (2 + np.sin(t)))
    den = FourierFunction([1.0, -1.0, 0.0])
    val, where = sup_of_ratio(num, den, [(0.0, 2)])
    assert val == pytest.approx(3.0, abs=1e-9)
    assert where == pytest.approx(math.pi / 2, abs=1e-4)


def test_sup_of_ratio_taylor_limit_wins():
    # (1 - cos t)(4 + cos t) / (1 - cos t) peaks at the contact point itself
    num = FourierFunction([3.5, -3.0, 0.0, -0.5, 0.0])
    den = FourierFunction([1.0, -1.0, 0.0])
    val, where = sup_of_ratio(num, den, [(0.0, 2)])
    assert val == pytest.approx(5.0, abs=1e-12)
    assert circular_distance(where, 0.0) < 1e-6


def test_sup_of_ratio_unlisted_zero():
    den = FourierFunction([1.0, -1.0, 0.0])
    with pytest.raises(DenominatorVanishesElsewhere):
        sup_of_ratio(FourierFunction([1.0]), den, [])
