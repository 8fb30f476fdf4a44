"""Hand-built models with known exact answers, shared across the suite.

The two workhorses:

* ``gamble(r)`` -- a five-state chain where state s2 can either bank a
  sure goal (action a, reward 0) or bet (action b, reward 1) with a half
  chance of losing everything.  Betting n times before banking yields
  the conditional expectation ``bet_value(r, n)``; the optimum is to bet
  exactly r+2 times, worth ``gamble_value(r)``.

* ``diamond()`` -- an acyclic split into a branch paying 2 and a branch
  paying 1, both funnelling into a state with a safe coin (a) and a
  riskier coin (b).  Maximal conditional expectation 8/5, minimal 7/5,
  best memoryless scheduler 3/2.
"""
from fractions import Fraction as F
import random

from cmdp.model import Action, Mdp, RewardBasedScheduler
from cmdp import bounds, errors, finiteness, oracle, preprocess, saturation
from cmdp import transform

ZERO = F(0)
ONE = F(1)
HALF = F(1, 2)


def gamble(r=0, init=0):
    return Mdp(states=("s0", "s1", "s2", "goal", "fail"),
               actions=((Action("g0", ZERO, ((1, HALF), (2, HALF))),),
                        (Action("g", F(r), ((3, ONE),)),),
                        (Action("a", ZERO, ((3, ONE),)),
                         Action("b", ONE, ((2, HALF), (4, HALF)))),
                        (), ()),
               init=init, f_set=frozenset((3,)), g_set=frozenset((3,)))


def gamble_value(r):
    # bet r+2 times, then bank
    return F(r) + F(2, 2 ** (r + 2) + 1)


def bet_value(r, n):
    # conditional expectation of betting n times before banking
    return F(r * 2 ** n + n, 2 ** n + 1)


def bet_scheduler(canon, n):
    """Bet at s2 below level n, bank from level n on."""
    m = canon.mdp
    s0 = m.states.index("s0")
    s1 = m.states.index("s1")
    s2 = m.states.index("s2")
    table = {}
    if n > 0:
        table[(s0, 0)] = 0
        table[(s1, 0)] = 0
        for lvl in range(n):
            table[(s2, lvl)] = 1
    tail = {s0: 0, s1: 0, s2: 0}
    return RewardBasedScheduler(saturation=n, table=table, tail=tail)


def bet_profile(sched, canon, upto):
    """Action labels chosen at s2 for levels 0..upto-1, as one string."""
    m = canon.mdp
    s2 = m.states.index("s2")
    acts = m.actions[s2]
    return "".join(acts[sched.action_at(s2, lvl)].label for lvl in range(upto))


def scaled_gamble(r, k):
    """The betting chain with every reward divided by k."""
    m = gamble(r)
    actions = tuple(tuple(Action(a.label, a.reward / k, a.dist) for a in acts)
                    for acts in m.actions)
    return Mdp(states=m.states, actions=actions, init=m.init,
               f_set=m.f_set, g_set=m.g_set)


def diamond():
    return Mdp(states=("init", "s1", "s2", "s", "goal", "fail"),
               actions=((Action("g", ZERO, ((1, HALF), (2, HALF))),),
                        (Action("g1", F(2), ((3, ONE),)),),
                        (Action("g2", ONE, ((3, ONE),)),),
                        (Action("a", ZERO, ((4, HALF), (5, HALF))),
                         Action("b", ZERO, ((4, F(1, 3)), (5, F(2, 3))))),
                        (), ()),
               init=0, f_set=frozenset((4,)), g_set=frozenset((4,)))


def diamond_neg():
    return transform.negate_rewards(diamond())


def spinner():
    """One state that can spin forever collecting reward: not finite."""
    return Mdp(states=("s0", "goal"),
               actions=((Action("c", ONE, ((0, ONE),)),
                         Action("d", ZERO, ((1, ONE),))), ()),
               init=0, f_set=frozenset((1,)), g_set=frozenset((1,)))


def sure():
    """Every action reaches the goal with probability one."""
    return Mdp(states=("a", "b", "goal"),
               actions=((Action("x", ONE, ((1, ONE),)),
                         Action("y", F(3), ((2, ONE),))),
                        (Action("z", F(2), ((2, ONE),)),), ()),
               init=0, f_set=frozenset((2,)), g_set=frozenset((2,)))


SAMPLE = """\
# betting chain: bank a sure goal or bet one unit on a fair coin
cmdp 1
states: s0 s1 s2 goal fail
init: s0
F: goal
G: goal

action s0 g0 reward 0
  -> s1 : 1/2
  -> s2 : 1/2
action s1 g reward 1
  -> goal : 1
action s2 a reward 0
  -> goal : 1
action s2 b reward 1
  -> s2 : 1/2
  -> fail : 1/2
"""


def random_model(rng):
    """Small rough model: <=6 states, <=3 actions, integer rewards <=3,
    probability denominators <=4, random traps and F/G sets."""
    n = rng.randint(3, 6)
    names = tuple("q%d" % i for i in range(n))
    others = list(range(1, n))
    f = frozenset(rng.sample(others, rng.randint(1, max(1, len(others) // 2))))
    g = frozenset(rng.sample(others, rng.randint(1, max(1, len(others) // 2))))
    actions = []
    for s in range(n):
        if s != 0 and rng.random() < 0.35:
            actions.append(())  # trap
            continue
        acts = []
        for i in range(rng.randint(1, 3)):
            den = rng.choice((2, 3, 4))
            k = rng.randint(1, min(3, den))
            targets = rng.sample(range(n), k)
            cuts = sorted(rng.sample(range(1, den), k - 1)) if k > 1 else []
            parts = []
            prev = 0
            for c in cuts + [den]:
                parts.append(c - prev)
                prev = c
            dist = tuple((t, F(p, den)) for t, p in zip(targets, parts))
            acts.append(Action("a%d" % i, F(rng.randint(0, 3)), dist))
        actions.append(tuple(acts))
    return Mdp(states=names, actions=tuple(actions), init=0, f_set=f, g_set=g)


def corpus(count, cap=10 ** 5, seed0=1):
    """Yield (seed, mdp, verdict, ub, sat, best) for random finite
    instances whose brute-force space fits under ``cap``."""
    seed = seed0
    made = 0
    while made < count:
        rng = random.Random(seed)
        m = random_model(rng)
        seed += 1
        try:
            verdict = finiteness.check_finiteness(m)
        except errors.PreconditionViolated:
            continue
        if not verdict.finite:
            continue
        ub = bounds.upper_bound(verdict.canonical)
        sat = saturation.saturation_point(verdict.canonical, ub)
        try:
            best, _sched = oracle.brute_force_max(verdict.canonical, sat, cap=cap)
        except errors.SpaceTooLarge:
            continue
        made += 1
        yield seed - 1, m, verdict, ub, sat, best


def infinite_corpus(count, seed0=1):
    """Yield (seed, mdp, verdict) for random instances that are not finite."""
    seed = seed0
    made = 0
    while made < count:
        rng = random.Random(seed)
        m = random_model(rng)
        seed += 1
        try:
            verdict = finiteness.check_finiteness(m)
        except errors.PreconditionViolated:
            continue
        if verdict.finite:
            continue
        made += 1
        yield seed - 1, m, verdict


def random_acyclic(rng):
    """Forward-edge DAG with integer rewards in [-3, 3]; the last two
    states are a goal trap and a dead end."""
    n = rng.randint(4, 7)
    names = tuple("q%d" % i for i in range(n - 2)) + ("good", "dead")
    actions = []
    for s in range(n - 2):
        acts = []
        for i in range(rng.randint(1, 3)):
            den = rng.choice((2, 3, 4))
            room = list(range(s + 1, n))
            k = min(rng.randint(1, 3), len(room), den)
            targets = rng.sample(room, k)
            cuts = sorted(rng.sample(range(1, den), k - 1)) if k > 1 else []
            parts = []
            prev = 0
            for c in cuts + [den]:
                parts.append(c - prev)
                prev = c
            dist = tuple((t, F(p, den)) for t, p in zip(targets, parts))
            acts.append(Action("a%d" % i, F(rng.randint(-3, 3)), dist))
        actions.append(tuple(acts))
    actions.append(())
    actions.append(())
    return Mdp(states=names, actions=tuple(actions), init=0,
               f_set=frozenset((n - 2,)), g_set=frozenset((n - 2,)))


def acyclic_corpus(count, seed0=1):
    """Yield (seed, mdp, canonical) for random acyclic instances."""
    seed = seed0
    made = 0
    while made < count:
        rng = random.Random(seed)
        m = random_acyclic(rng)
        seed += 1
        try:
            canon = preprocess.normal_form(m)
        except errors.PreconditionViolated:
            continue
        made += 1
        yield seed - 1, m, canon
