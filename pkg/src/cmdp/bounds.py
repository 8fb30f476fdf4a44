"""Sound upper bound for the maximal conditional expectation.

The conditional expectation of any admissible scheduler is bounded by the
optimal unconditional expected reward in a reset model: runs that miss
the goal are restarted from the initial state free of charge.  To keep
total rewards finite the model is first annotated with a bounded reward
counter; once the accumulated reward provably exceeds the weight of any
cycle-free history, behaviour no longer depends on the exact count.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import preprocess, reach
from .model import Action, Mdp

ZERO = Fraction(0)
ONE = Fraction(1)
RESET = "reset"


@dataclass(frozen=True)
class CounterProduct:
    mdp: Mdp
    bound: int  # accumulated rewards are tracked up to this value
    fail_states: tuple  # product states standing for a missed goal


def reward_counter_product(canon):
    """Annotate a canonical model with an accumulated-reward counter.

    First-mode states are (state, accumulated reward <= bound) pairs with
    reward zero; once a step pushes the count past the bound, the run
    pays the whole count and continues memorylessly in a second mode.
    Reaching goal in the first mode pays the accumulated count.
    """
    m = canon.mdp
    bound = 0
    for s in range(m.n):
        if m.actions[s]:
            bound += max(int(a.reward) for a in m.actions[s])

    keys = []
    index = {}

    def idx(key):
        if key not in index:
            index[key] = len(keys)
            keys.append(key)
        return index[key]

    def build(key):
        mode, s, r = key
        if mode == "m":
            if s == m.goal or s == m.fail:
                return ()
            return tuple(
                Action(a.label, a.reward,
                       tuple((idx(("m", t, None)), p) for t, p in a.dist))
                for a in m.actions[s])
        # counting mode
        if s == m.goal:
            return (Action("tau", Fraction(r), ((idx(("m", m.goal, None)), ONE),)),)
        if s == m.fail:
            return ()
        acts = []
        for a in m.actions[s]:
            nr = r + int(a.reward)
            if nr <= bound:
                acts.append(Action(a.label, ZERO,
                                   tuple((idx(("p", t, nr)), p) for t, p in a.dist)))
            else:
                acts.append(Action(a.label, Fraction(nr),
                                   tuple((idx(("m", t, None)), p) for t, p in a.dist)))
        return tuple(acts)

    idx(("p", m.init, 0))
    actions = []
    while len(actions) < len(keys):
        actions.append(build(keys[len(actions)]))

    names = []
    for mode, s, r in keys:
        if mode == "m":
            names.append(m.states[s] + "!")
        else:
            names.append("%s#%d" % (m.states[s], r))
    fail_states = tuple(i for i, (mode, s, r) in enumerate(keys) if s == m.fail)
    goal_i = index[("m", m.goal, None)]
    product = Mdp(states=tuple(names), actions=tuple(actions),
                  init=index[("p", m.init, 0)],
                  f_set=frozenset((goal_i,)), g_set=frozenset((goal_i,)),
                  goal=goal_i, fail=None)
    return CounterProduct(product, bound, fail_states)


def _with_resets(m, fail_states, target):
    actions = list(m.actions)
    for s in fail_states:
        if actions[s]:
            raise AssertionError("reset attached to a non-trap state")
        actions[s] = (Action(RESET, ZERO, ((target, ONE),)),)
    return Mdp(states=m.states, actions=tuple(actions), init=m.init,
               f_set=m.f_set, g_set=m.g_set, goal=m.goal, fail=None)


def upper_bound(canon):
    """A rational bound >= the maximal conditional expectation."""
    m = canon.mdp
    if m.fail is None:
        # the goal is reached almost surely under every scheduler
        return reach.max_total_exp(m, {m.goal}).values[m.init]
    pmin = reach.min_reach_prob(m, {m.goal}).values
    if all(pmin[s] > 0 for s in range(m.n) if s != m.fail):
        # cheap variant: every miss of the goal is a finite detour, so the
        # counter annotation is not needed
        reset = _with_resets(m, (m.fail,), m.init)
    else:
        product = reward_counter_product(canon)
        reset = _with_resets(product.mdp, product.fail_states, product.mdp.init)
    collapsed = preprocess.mec_quotient(reset)
    return reach.max_total_exp(collapsed, {collapsed.goal}).values[collapsed.init]
