import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cleanflex import (
    CensusReport,
    EmptyCensus,
    FourierFunction,
    FunctionInSpace,
    InfiniteCount,
    SpaceDescriptor,
    bose_tally,
    catalog,
    clean_flex_census,
    corpus,
    operator_sign_change_check,
    random_antiperiodic,
    random_fourier,
    sign_change_count,
)
from cleanflex.census import count_sign_changes, in_space_ratio
from cleanflex.funcmodel import Arc

SIN2 = FourierFunction([0, 0, 0, 0, 1.0])


def test_census_sin2t():
    rep = clean_flex_census(SIN2, 1)
    np.testing.assert_allclose(sorted(a.midpoint for a in rep.clean_max),
                               [3 * math.pi / 4, 7 * math.pi / 4], atol=1e-10)
    np.testing.assert_allclose(sorted(a.midpoint for a in rep.clean_min),
                               [math.pi / 4, 5 * math.pi / 4], atol=1e-10)
    assert not rep.plain and not rep.global_only
    assert rep.theorem_checks["thm1.1"].passed
    assert sign_change_count(rep) == 4


@pytest.mark.parametrize("n", [1, 2, 3])
def test_census_sharp(n):
    rep = clean_flex_census(catalog("sharp", n), n)
    assert len(rep.records) == 2 * n + 2
    assert len(rep.clean_max) == len(rep.clean_min) == n + 1
    assert rep.sign_changes == 2 * n + 2
    assert rep.passed


def test_census_rejects_space_member_and_bad_n():
    with pytest.raises(FunctionInSpace):
        clean_flex_census(FourierFunction([1.0, 1.0, 0.0]), 1)
    with pytest.raises(ValueError):
        clean_flex_census(SIN2, 0)


def test_sign_change_count_needs_both_kinds():
    rep = CensusReport(1, clean_max=[Arc.point(1.0)])
    with pytest.raises(EmptyCensus):
        sign_change_count(rep)


def test_sign_change_count_ignores_repeats():
    rep = CensusReport(1, clean_max=[Arc.point(0.1), Arc.point(0.2), Arc.point(3.0)],
                       clean_min=[Arc.point(1.0), Arc.point(4.0)])
    # max max min max min around the circle: 4 alternations
    assert sign_change_count(rep) == 4


def test_count_sign_changes_parity():
    t = np.arange(64) * (2 * math.pi / 64)
    assert count_sign_changes(np.sin(1.5 * t + 0.1), parity=-1) == 3
    assert count_sign_changes(np.sin(2 * t + 0.1)) == 4


def test_operator_sign_change_examples():
    # L2 sin(3t/2) = (-9/4 + 1/4) sin(3t/2)
    count, ok = operator_sign_change_check(catalog("sharp_half", 1), SpaceDescriptor(2))
    assert (count, ok) == (3, True)
    count, ok = operator_sign_change_check(FourierFunction([0, 0, 0, 0.3, 1.0]), SpaceDescriptor(3))
    assert count >= 4 and ok
    with pytest.raises(ValueError):
        operator_sign_change_check(SIN2, SpaceDescriptor(2))


def test_random_draws_are_off_the_space():
    rng = np.random.default_rng(5)
    for n in (1, 2):
        u = random_fourier(rng, n)
        assert in_space_ratio(u, SpaceDescriptor.trig(n)) >= 1e-6
    a = random_antiperiodic(rng, 2)
    assert a.parity == "antiperiodic"


def test_corpus_is_reproducible():
    a = corpus(9, 3, 1)
    b = corpus(9, 3, 1)
    assert all(x == y for x, y in zip(a, b))


@settings(max_examples=12, deadline=None)
@given(seed=st.integers(0, 100_000), n=st.integers(1, 2))
def test_census_property(seed, n):
    u = random_fourier(np.random.default_rng(seed), n)
    rep = clean_flex_census(u, n)
    assert len(rep.clean_max) >= n + 1 and len(rep.clean_min) >= n + 1
    assert rep.sign_changes >= 4
    # every sign change of L u brackets a flex
    count, _ = operator_sign_change_check(u, SpaceDescriptor.trig(n))
    assert len(rep.records) >= count


def test_bose_sin2t():
    assert bose_tally(SIN2).as_tuple() == (2, 0, 2)


def test_bose_perturbed():
    u = FourierFunction([0, 0, 0, 0, 1.0, 0, 0.1])
    assert bose_tally(u).difference == 2


def test_bose_space_member_is_infinite():
    with pytest.raises(InfiniteCount):
        bose_tally(FourierFunction([1.0, 0.5, 0.0]))
