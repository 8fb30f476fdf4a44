"""The full solver: improvement loop, naive loop, bookkeeping."""
from fractions import Fraction as F

from cmdp import optimize

from fixtures import gamble, gamble_value, bet_profile, diamond, sure, corpus


def test_betting_chain_family():
    for r in range(0, 4):
        res = optimize.solve_model(gamble(r))
        assert res.verdict.finite
        assert res.value == gamble_value(r)
        assert bet_profile(res.scheduler, res.canonical, r + 3) == "b" * (r + 2) + "a"


def test_known_acceptance_walks():
    res = optimize.solve_model(gamble(0))
    assert res.accepted == [F(1, 3), F(2, 5)]
    assert res.threshold_calls == 4
    res = optimize.solve_model(gamble(0), naive=True)
    assert res.accepted == [F(1, 3), F(2, 5)]
    assert res.threshold_calls == 3
    res = optimize.solve_model(gamble(2), naive=True)
    assert res.accepted == [F(2), F(19, 9), F(36, 17)]
    assert res.threshold_calls == 4


def test_both_loops_agree():
    for r in range(0, 5):
        a = optimize.solve_model(gamble(r))
        b = optimize.solve_model(gamble(r), naive=True)
        assert a.value == b.value == gamble_value(r)
    a = optimize.solve_model(diamond())
    b = optimize.solve_model(diamond(), naive=True)
    assert a.value == b.value == F(8, 5)
    for seed, m, verdict, ub, sat, best in corpus(10):
        a = optimize.solve_model(m)
        b = optimize.solve_model(m, naive=True)
        assert a.value == b.value, "seed %d" % seed
        assert a.value * verdict.scale.factor == best


def test_accepted_values_climb():
    for r in range(0, 6):
        for naive in (False, True):
            res = optimize.solve_model(gamble(r), naive=naive)
            walk = res.accepted
            assert all(x < y for x, y in zip(walk, walk[1:]))
            assert walk[-1] == res.value


def test_short_circuit_without_probability_tradeoffs():
    res = optimize.solve_model(sure())
    assert res.value == F(3)
    assert res.threshold_calls == 0
    assert res.upper_bound == F(3)
    assert res.accepted == [F(3)]


def test_infinite_models_solve_to_nothing():
    res = optimize.solve_model(gamble(0, init=2))
    assert not res.verdict.finite
    assert res.value is None and res.scheduler is None
    assert res.threshold_calls == 0
