import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import mp_threshold
from rainbowlab.threshold import (
    contradiction_value,
    expectation_tail_bound,
    min_passing_s,
    passes,
    sweep,
    threshold_report,
    x_of,
    z_of,
)
from rainbowlab.tuple_space import ParameterError

# Values frozen from the mpmath oracle (50 digits) in tests/oracles.py.
PINNED = {
    466: dict(x=197, z=18.17775665073942, cv=0.9269961226961244, tail=3.596916723865937,
              e=196.96262740178497, limit=197.98251948172071),
    470: dict(x=198, z=18.510788350429387, cv=0.6769286255428101, tail=3.501985639154265,
              e=197.77054664923912, limit=198.9686607924339),
    471: dict(x=199, z=18.474283390739263, cv=0.7106972530210732, tail=3.5845324143755013,
              e=198.07824657723398, limit=199.214616536129),
}


def test_x_examples():
    assert x_of(470) == 198
    assert x_of(2) == 4
    with pytest.raises(ParameterError):
        x_of(1)


def test_x_nondecreasing_sweep():
    xs = np.array([x_of(s) for s in range(2, 20001)])
    assert np.all(np.diff(xs) >= 0)
    grid = np.unique(np.geomspace(2, 10**6, 3000).astype(int))
    xs = [x_of(int(s)) for s in grid]
    assert all(a <= b for a, b in zip(xs, xs[1:]))


@pytest.mark.parametrize("s", sorted(PINNED))
def test_report_matches_pinned_oracle(s):
    ref = PINNED[s]
    rep = threshold_report(s)
    assert rep.x == ref["x"]
    assert rep.z == pytest.approx(ref["z"], rel=1e-12)
    assert rep.contradiction_value == pytest.approx(ref["cv"], rel=1e-10)
    assert rep.tail_sum == pytest.approx(ref["tail"], rel=1e-12)
    assert rep.e_bound == pytest.approx(ref["e"], rel=1e-12)
    assert rep.e_limit == pytest.approx(ref["limit"], rel=1e-12)
    assert rep.passes and rep.double_agrees and rep.hypothesis_ok


@pytest.mark.parametrize("s", [17, 50, 250, 399, 400, 465, 600, 1000, 4321])
def test_report_matches_live_oracle(s):
    ref = mp_threshold(s)
    rep = threshold_report(s)
    assert rep.x == ref["x"]
    if ref["z"] is None:
        assert rep.z is None and rep.contradiction_value is None
    else:
        assert rep.z == pytest.approx(ref["z"], rel=1e-12)
        assert rep.contradiction_value == pytest.approx(ref["contradiction_value"], rel=1e-10)
    assert rep.tail_sum == pytest.approx(ref["tail_sum"], rel=1e-12)
    assert rep.e_bound == pytest.approx(ref["e_bound"], rel=1e-12)


def test_470_headline():
    rep = threshold_report(470)
    assert rep.contradiction_value < 1
    assert rep.tail_sum <= 4
    assert rep.e_bound <= 3.7 * math.sqrt(470 * math.log(470))
    assert passes(470) and passes(471)


def test_z_asymptotics():
    assert z_of(470) == pytest.approx(18.5108, abs=1e-4)
    ratio = z_of(10**6) / (10**6 / 6)
    assert abs(ratio - 1) < 0.25


def test_z_inapplicable_region():
    assert z_of(100) is None  # s - x - 4 sqrt(s) = 100 - 79 - 40 < 0
    assert contradiction_value(100) is None
    rep = threshold_report(100)
    assert rep.z is None and rep.contradiction_value is None and not rep.passes


def test_condition_fails_below_threshold():
    assert contradiction_value(400) == pytest.approx(153.78256227623174, rel=1e-10)
    assert contradiction_value(400) >= 1


def test_contradiction_value_monotone_between_steps_of_x():
    # It decreases in s while x is constant and jumps up exactly when x steps up.
    values = {s: contradiction_value(s) for s in range(400, 601)}
    steps = [s for s in range(401, 601) if x_of(s) != x_of(s - 1)]
    ups = [s for s in range(401, 601) if values[s] > values[s - 1]]
    assert ups == steps
    assert len(steps) == 48 and steps[:3] == [404, 408, 411] and 467 in steps and 471 in steps
    for s in range(401, 601):
        if s not in steps:
            assert values[s] < values[s - 1], s


def test_truncation_soundness():
    for s in (17, 470, 10**4, 10**6):
        a, ea = expectation_tail_bound(s)
        b, eb = expectation_tail_bound(s, cutoff=2e-30)
        c, _ = expectation_tail_bound(s, cutoff=1e-60)
        assert abs(a - b) < 1e-20 and abs(a - c) < 1e-20


@given(st.integers(2, 10**5))
def test_tail_sum_positive_and_consistent(s):
    tail, e = expectation_tail_bound(s)
    root = math.sqrt(s * math.log(s))
    assert tail > 0
    assert e == pytest.approx(2 * root + 4 * math.sqrt(s) + tail, rel=1e-12)


def test_min_passing_s():
    rep = min_passing_s(2, 1000)
    assert rep is not None and rep.s == 466 and rep.s <= 470
    assert rep.contradiction_value == pytest.approx(0.9269961226961244, rel=1e-10)
    assert min_passing_s(2, 10) is None
    with pytest.raises(ParameterError):
        min_passing_s(1, 10)
    with pytest.raises(ParameterError):
        min_passing_s(2, 10**7 + 1)


@pytest.mark.slow
def test_passes_monotone_after_minimum():
    flags = [r.passes for r in sweep(466, 10**4)]
    assert all(flags)
    assert not any(r.passes for r in sweep(2, 465))


def test_e_bound_within_limit_on_log_grid():
    grid = sorted(set(np.geomspace(470, 10**6, 400).astype(int).tolist()))
    for s in grid:
        rep = threshold_report(s)
        assert rep.e_bound <= rep.e_limit, s


@pytest.mark.slow
def test_contradiction_below_one_dense_sweep():
    for s in range(470, 10**4 + 1):
        assert contradiction_value(s) < 1, s


def test_log_base_variants():
    assert not passes(470, "2")
    assert not passes(470, "10")
    assert x_of(470, "2") > x_of(470)
    with pytest.raises(ParameterError):
        x_of(470, "3")


def test_flags():
    rep = threshold_report(470)
    assert not rep.eq2_plus_one_ok
    assert not threshold_report(16).hypothesis_ok and threshold_report(17).hypothesis_ok
    d = rep.to_dict()
    assert set(d) >= {"s", "x", "z", "tail_sum", "e_bound", "contradiction_value", "hypothesis_ok", "passes"}
