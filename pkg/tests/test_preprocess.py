"""Normal form construction, preconditions, end-component quotient."""
from fractions import Fraction as F

import pytest

from cmdp.model import Action, Mdp
from cmdp import preprocess, optimize
from cmdp.errors import PreconditionViolated, PositiveEcPresent

from fixtures import gamble, diamond

ZERO = F(0)
ONE = F(1)
HALF = F(1, 2)


def mk(states, actions, init, fs, gs):
    return Mdp(states=states, actions=actions, init=init,
               f_set=frozenset(fs), g_set=frozenset(gs))


def test_betting_chain_normal_form_shape():
    canon = preprocess.normal_form(gamble(1))
    m = canon.mdp
    assert set(m.states) == {"s0", "s1", "s2", "goal", "fail"}
    assert canon.provenance[canon.goal] == ("", "goal")
    assert canon.provenance[canon.fail] == ("", "fail")
    assert m.is_trap(canon.goal) and m.is_trap(canon.fail)
    # s2 could postpone banking forever, so it gets an escape hatch
    s2 = m.states.index("s2")
    labels = [a.label for a in m.actions[s2]]
    assert labels == ["a", "b", "iota"]
    iota = m.actions[s2][2]
    assert iota.reward == 0 and iota.dist == ((canon.fail, ONE),)
    # nobody else needs one
    for name in ("s0", "s1"):
        s = m.states.index(name)
        assert "iota" not in [a.label for a in m.actions[s]]
    assert m.states[m.init] == "s0"


def test_diamond_normal_form_is_plain():
    canon = preprocess.normal_form(diamond())
    m = canon.mdp
    # acyclic: no escape hatches, one goal, one fail
    for s in range(m.n):
        assert "iota" not in [a.label for a in m.actions[s]]
    assert set(m.states) == {"init", "s1", "s2", "s", "goal", "fail"}


def test_pay_until_first_accumulation_target():
    # paying stops at the first F state even when G comes later
    m = mk(("s0", "s1", "s2"),
           ((Action("x", F(2), ((1, ONE),)),),
            (Action("y", F(5), ((2, ONE),)),), ()),
           0, (1,), (2,))
    canon = preprocess.normal_form(m)
    s1 = canon.mdp.states.index("s1")
    act = canon.mdp.actions[s1][0]
    assert act.reward == 0  # the 5 after F is not collected
    assert optimize.solve_model(m).value == F(2)

    # and keeps going past G when F comes later
    m = mk(("s0", "t", "u"),
           ((Action("x", F(2), ((1, ONE),)),),
            (Action("z", F(3), ((2, ONE),)),), ()),
           0, (2,), (1,))
    canon = preprocess.normal_form(m)
    t = canon.mdp.states.index("t")
    act = canon.mdp.actions[t][0]
    assert act.reward == F(3)
    assert act.dist == ((canon.goal, ONE),)
    assert optimize.solve_model(m).value == F(5)


def test_conditioning_ignores_paths_that_die_after_f():
    m = mk(("s0", "s1", "g", "d"),
           ((Action("x", F(2), ((1, ONE),)),),
            (Action("y", ZERO, ((2, HALF), (3, HALF))),), (), ()),
           0, (1,), (2,))
    assert optimize.solve_model(m).value == F(2)
    m = mk(("s0", "f", "d"),
           ((Action("x", ONE, ((1, HALF), (2, HALF))),), (), ()),
           0, (1,), (1,))
    assert optimize.solve_model(m).value == F(1)


def test_precondition_rejections():
    # the start state may not already be in F or G
    assert not preprocess.check_precondition(mk(("a", "g"), ((), ()), 0, (0,), (1,)))
    # G must be reachable at all
    dead = mk(("a", "d", "g"),
              ((Action("x", ZERO, ((1, ONE),)),), (), ()),
              0, (2,), (2,))
    assert not preprocess.check_precondition(dead)
    with pytest.raises(PreconditionViolated):
        preprocess.normal_form(dead)
    assert preprocess.check_precondition(gamble(0))


def test_quotient_merges_zero_loops():
    m = mk(("a", "b", "goal"),
           ((Action("l", ZERO, ((1, ONE),)),),
            (Action("l", ZERO, ((0, ONE),)), Action("e", ONE, ((2, ONE),))),
            ()),
           0, (2,), (2,))
    q, cls = preprocess.mec_quotient_map(m)
    assert q.states == ("a+b", "goal")
    assert cls == [0, 0, 1]
    assert q.init == 0
    # the merged state keeps only the exit, renamed after its origin
    assert [(a.label, a.reward) for a in q.actions[0]] == [("b.e", ONE)]


def test_quotient_rejects_paying_loops():
    m = mk(("a", "goal"),
           ((Action("c", ONE, ((0, ONE),)), Action("d", ZERO, ((1, ONE),))), ()),
           0, (1,), (1,))
    with pytest.raises(PositiveEcPresent):
        preprocess.mec_quotient_map(m)
