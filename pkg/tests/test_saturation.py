"""Memoryless tail scheduler and the point where banking takes over."""
from fractions import Fraction as F
import math

from cmdp import bounds, preprocess, saturation, reach

from fixtures import gamble, diamond, sure

ZERO = F(0)
ONE = F(1)


def test_betting_chain_exchange_rate():
    for r in (0, 1, 4):
        canon = preprocess.normal_form(gamble(r))
        ub = bounds.upper_bound(canon)
        sat = saturation.saturation_point(canon, ub)
        assert not sat.trivial
        # trading the bet's probability for its reward always rates -1 here
        assert sat.d == F(-1)
        assert sat.point == max(int(math.ceil(ub - sat.d)), 0)
        assert sat.point >= r + 2
        # the tail maximises goal probability: bank at s2
        m = canon.mdp
        s2 = m.states.index("s2")
        assert m.actions[s2][sat.scheduler[s2]].label == "a"
        assert sat.y == reach.max_reach_prob(m, frozenset((canon.goal,))).values


def test_diamond_point():
    canon = preprocess.normal_form(diamond())
    ub = bounds.upper_bound(canon)
    assert ub == F(9, 2)
    sat = saturation.saturation_point(canon, ub)
    assert sat.d == ZERO  # both coins pay nothing, only odds differ
    assert sat.point == 5
    m = canon.mdp
    s = m.states.index("s")
    assert m.actions[s][sat.scheduler[s]].label == "a"
    assert sat.theta[m.init] == F(3, 4)
    assert sat.y[m.init] == F(1, 2)


def test_sure_model_is_trivial():
    canon = preprocess.normal_form(sure())
    sat = saturation.saturation_point(canon, bounds.upper_bound(canon))
    assert sat.trivial
    assert sat.point is None and sat.d is None
    # with no probability at stake the tail just maximises reward
    m = canon.mdp
    a = m.states.index("a")
    assert sat.y[a] == 1
    assert sat.theta[a] == F(3)
