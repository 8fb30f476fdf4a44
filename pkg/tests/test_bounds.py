"""Upper bound on the conditional expectation."""
from fractions import Fraction as F

from cmdp import bounds, optimize, preprocess, finiteness

from fixtures import gamble, diamond, sure, corpus


def test_betting_chain_bound():
    # from s2 the bound must pay for restarts through fail
    canon = preprocess.normal_form(gamble(0))
    assert bounds.upper_bound(canon) == F(3, 2)


def test_diamond_bound_skips_the_product():
    # every scheduler reaches the goal with positive probability from
    # every state, so resets can be attached to the plain model
    canon = preprocess.normal_form(diamond())
    assert bounds.upper_bound(canon) == F(9, 2)


def test_fail_free_bound_is_the_plain_expectation():
    canon = preprocess.normal_form(sure())
    assert canon.fail is None
    assert bounds.upper_bound(canon) == F(3)


def test_bound_dominates_the_value():
    for r in range(0, 6):
        res = optimize.solve_model(gamble(r))
        assert res.upper_bound >= res.value
    for seed, m, verdict, ub, sat, best in corpus(12):
        assert ub >= best
