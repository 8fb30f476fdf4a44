"""Linear algebra and reachability against independent references."""
from fractions import Fraction as F
from itertools import product
import random

import pytest
from hypothesis import given, settings, strategies as st

from cmdp.model import Action, Mdp
from cmdp import reach, preprocess
from cmdp.errors import Singular, PreconditionViolated

from fixtures import gamble, sure, random_model

ZERO = F(0)
ONE = F(1)
HALF = F(1, 2)


def test_solve_linear_by_hand():
    a = [[F(2), F(1)], [F(1), F(-1)]]
    b = [F(7), F(-1)]
    assert reach.solve_linear(a, b) == [F(2), F(3)]
    with pytest.raises(Singular):
        reach.solve_linear([[F(1), F(2)], [F(2), F(4)]], [F(1), F(1)])


small = st.integers(min_value=-6, max_value=6)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=4), st.data())
def test_solve_linear_solutions_check_out(n, data):
    a = [[F(data.draw(small)) for _ in range(n)] for _ in range(n)]
    b = [F(data.draw(small)) for _ in range(n)]
    try:
        x = reach.solve_linear([row[:] for row in a], list(b))
    except Singular:
        return
    for i in range(n):
        assert sum(a[i][j] * x[j] for j in range(n)) == b[i]


def test_optimal_totals_pick_the_better_route():
    # state 0 may pay 1 and move on, or take 3 directly; moving on earns 2 more
    choices = [[(F(1), ((1, ONE),)), (F(3), ((2, ONE),))],
               [(F(2), ((2, ONE),))],
               []]
    values, policy = reach.optimal_total_values(choices, {2: ZERO})
    assert values == [F(3), F(2), F(0)]
    values, policy = reach.optimal_total_values(choices, {2: ZERO}, maximize=False)
    assert values == [F(3), F(2), F(0)]  # both routes happen to pay 3
    choices[0][1] = (F(4), ((2, ONE),))
    values, policy = reach.optimal_total_values(choices, {2: ZERO})
    assert values[0] == F(4) and policy[0] == 1


def policy_reach(m, pick, target):
    """Exact absorption probability under one memoryless policy."""
    hits = set(target)
    changed = True
    while changed:
        changed = False
        for s in range(m.n):
            if s in hits or m.is_trap(s):
                continue
            act = m.actions[s][pick[s]]
            if any(t in hits for t, _ in act.dist):
                hits.add(s)
                changed = True
    order = sorted(hits - set(target))
    pos = {s: i for i, s in enumerate(order)}
    k = len(order)
    mat = [[ONE if i == j else ZERO for j in range(k)] for i in range(k)]
    rhs = [ZERO] * k
    for s in order:
        i = pos[s]
        act = m.actions[s][pick[s]]
        for t, p in act.dist:
            if t in target:
                rhs[i] += p
            elif t in pos:
                mat[i][pos[t]] -= p
    sol = reach.solve_linear(mat, rhs)
    out = [ZERO] * m.n
    for t in target:
        out[t] = ONE
    for s in order:
        out[s] = sol[pos[s]]
    return out


def test_reach_probabilities_match_policy_enumeration():
    checked = 0
    for seed in range(200):
        m = random_model(random.Random(seed))
        free = [s for s in range(m.n) if not m.is_trap(s)]
        space = 1
        for s in free:
            space *= len(m.actions[s])
        if space > 200:
            continue
        target = frozenset(m.g_set)
        best = [ZERO] * m.n
        worst = [ONE if s in target else None for s in range(m.n)]
        for combo in product(*[range(len(m.actions[s])) for s in free]):
            pick = dict(zip(free, combo))
            vals = policy_reach(m, pick, target)
            for s in range(m.n):
                if vals[s] > best[s]:
                    best[s] = vals[s]
                if s not in target:
                    if worst[s] is None or vals[s] < worst[s]:
                        worst[s] = vals[s]
        mx = reach.max_reach_prob(m, target)
        mn = reach.min_reach_prob(m, target)
        assert mx.values == best
        assert mn.values == [w if w is not None else ONE for w in worst]
        checked += 1
        if checked >= 40:
            break
    assert checked >= 40


def test_reach_probabilities_by_hand():
    m = gamble(0)
    target = frozenset((3,))
    assert reach.max_reach_prob(m, target).values == [ONE, ONE, ONE, ONE, ZERO]
    # betting forever never banks: the worst case at s2 is zero
    assert reach.min_reach_prob(m, target).values == [HALF, ONE, ZERO, ONE, ZERO]


def test_max_total_exp_guards_and_values():
    m = sure()
    top = reach.max_total_exp(m, frozenset((2,)))
    assert top.values == [F(3), F(2), F(0)]
    low = reach.max_total_exp(m, frozenset((2,)), maximize=False)
    assert low.values == [F(3), F(2), F(0)]  # both routes happen to pay 3
    # a trap outside the target set has no defined total
    with pytest.raises(PreconditionViolated):
        reach.max_total_exp(gamble(0), frozenset((3,)))
