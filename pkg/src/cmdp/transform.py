"""Reward transformations: integer scaling, layering, minimization.

Scaling multiplies every reward by the least common multiple of the
denominators so the level construction can work with integers.
Layering pads an acyclic model until every run from the initial state
has the same length and then shifts all rewards into the non-negative
range; the conditional value moves by a known offset.  Minimization
negates the rewards and maximizes.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from . import graphs, preprocess, threshold
from .errors import NegativeAfterShift, NotAcyclic
from .model import Action, Mdp

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class ScaleInfo:
    factor: int  # values of the scaled model are ``factor`` times too big


def scale_rationals(m):
    """Multiply rewards by the least common denominator multiple."""
    dens = [a.reward.denominator for acts in m.actions for a in acts]
    factor = math.lcm(*dens) if dens else 1
    if factor == 1:
        return m, ScaleInfo(1)
    actions = tuple(
        tuple(Action(a.label, Fraction(a.reward * factor), a.dist) for a in acts)
        for acts in m.actions)
    scaled = Mdp(states=m.states, actions=actions, init=m.init,
                 f_set=m.f_set, g_set=m.g_set, goal=m.goal, fail=m.fail)
    return scaled, ScaleInfo(factor)


def scale_canonical(canon):
    scaled, info = scale_rationals(canon.mdp)
    if info.factor == 1:
        return canon, info
    return preprocess.CanonicalMdp(scaled, canon.provenance), info


def negate_rewards(m):
    actions = tuple(
        tuple(Action(a.label, -a.reward, a.dist) for a in acts)
        for acts in m.actions)
    return Mdp(states=m.states, actions=actions, init=m.init,
               f_set=m.f_set, g_set=m.g_set, goal=m.goal, fail=m.fail)


@dataclass(frozen=True)
class LayerInfo:
    depth: int  # uniform run length after padding
    shift: Fraction  # added to every action reward
    offset: Fraction  # depth * shift; how far values move


def layer_acyclic(m):
    """Make an acyclic model layered and its rewards non-negative.

    Every run from the initial state is padded with zero-reward chain
    states until all runs reach their trap after exactly ``depth`` steps,
    then the smallest sufficient shift is added to every reward.  When
    the states in F and G are traps, the conditional value of the result
    is the original value plus ``offset``.
    """
    post = _topo_postorder(m)
    reach_set = graphs.reachable(m)
    depth = {s: None for s in range(m.n)}
    depth[m.init] = 0
    for s in reversed(post):
        if depth[s] is None or s not in reach_set:
            continue
        for a in m.actions[s]:
            for t, _ in a.dist:
                if depth[t] is None or depth[t] < depth[s] + 1:
                    depth[t] = depth[s] + 1
    levels = [depth[s] for s in reach_set if depth[s] is not None]
    n_deep = max(levels) if levels else 0

    names = [m.states[s] for s in range(m.n)]
    taken = set(names)
    actions = [list(acts) for acts in m.actions]

    def chain(source_name, label, branch, target, k):
        """k fresh pass-through states in front of ``target``."""
        nxt = target
        for step in range(k, 0, -1):
            base = "%s.%s.%d.%d" % (source_name, label, branch, step)
            name = base
            while name in taken:
                name += "'"
            taken.add(name)
            names.append(name)
            actions.append([Action("tau", ZERO, ((nxt, ONE),))])
            nxt = len(names) - 1
        return nxt

    for s in sorted(reach_set):
        if depth[s] is None:
            continue
        for i, a in enumerate(m.actions[s]):
            dist = []
            changed = False
            for b, (t, p) in enumerate(a.dist):
                want = n_deep if m.is_trap(t) else depth[t]
                slack = want - depth[s] - 1
                if slack > 0:
                    dist.append((chain(m.states[s], a.label, b, t, slack), p))
                    changed = True
                else:
                    dist.append((t, p))
            if changed:
                actions[s][i] = Action(a.label, a.reward, tuple(dist))

    low = ZERO
    for acts in actions:
        for a in acts:
            if a.reward < low:
                low = a.reward
    shift = -low
    if shift > 0:
        for s in range(len(actions)):
            actions[s] = [Action(a.label, a.reward + shift, a.dist)
                          for a in actions[s]]
    for acts in actions:
        for a in acts:
            if a.reward < 0:
                raise NegativeAfterShift("reward %s survived the shift" % (a.reward,))

    layered = Mdp(states=tuple(names),
                  actions=tuple(tuple(acts) for acts in actions),
                  init=m.init, f_set=m.f_set, g_set=m.g_set,
                  goal=m.goal, fail=m.fail)
    return layered, LayerInfo(n_deep, shift, n_deep * shift)


def _topo_postorder(m):
    """Postorder of all states; raises NotAcyclic on a cycle."""
    color = [0] * m.n
    post = []
    for root in range(m.n):
        if color[root]:
            continue
        path = [root]
        pos = {root: 0}
        work = [(root, 0)]
        color[root] = 1
        while work:
            v, pi = work[-1]
            succ = [t for a in m.actions[v] for t, _ in a.dist]
            descended = False
            for i in range(pi, len(succ)):
                w = succ[i]
                if color[w] == 1:
                    cyc = path[pos[w]:]
                    raise NotAcyclic("cycle through %s"
                                     % " -> ".join(m.states[s] for s in cyc))
                if color[w] == 0:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    color[w] = 1
                    pos[w] = len(path)
                    path.append(w)
                    descended = True
                    break
            if descended:
                continue
            work.pop()
            color[v] = 2
            post.append(v)
            path.pop()
            del pos[v]
    return post


@dataclass(frozen=True)
class MinAcyclicResult:
    value: Fraction
    scheduler: object  # optimal scheduler of the negated canonical model
    canonical: object


def min_conditional_acyclic(m):
    """Minimal conditional expectation of an acyclic model.

    Negating the rewards turns the minimum into a maximum, and the
    canonical form of an acyclic model stays acyclic, so the exact
    recursion applies directly.
    """
    canon = preprocess.normal_form(negate_rewards(m))
    ans = threshold.solve_acyclic(canon)
    return MinAcyclicResult(-ans.value, ans.scheduler, canon)
