"""Brute-force reference: enumerate every reward-based scheduler.

Decisions matter only for (state, level) pairs below the saturation
point; from there on the memoryless tail is optimal.  The search space
is the product of the action counts over all reachable free pairs.
"""

from itertools import product

from .errors import SpaceTooLarge
from .model import RewardBasedScheduler, evaluate_scheduler


def brute_force_max(canon, sat, cap=10 ** 6):
    """(value, scheduler) with the best conditional expectation.

    Raises SpaceTooLarge when more than ``cap`` schedulers would have
    to be evaluated.
    """
    m = canon.mdp
    point = 0 if sat.point is None else sat.point

    seen = {(m.init, 0)}
    stack = [(m.init, 0)]
    while stack:
        s, r = stack.pop()
        for a in m.actions[s]:
            nr = min(point, r + int(a.reward))
            for t, _ in a.dist:
                if (t, nr) not in seen:
                    seen.add((t, nr))
                    stack.append((t, nr))

    base = {}
    free = []
    for s, r in sorted(seen):
        if m.is_trap(s) or r >= point:
            continue
        if len(m.actions[s]) == 1:
            base[(s, r)] = 0
        else:
            free.append((s, r))
    space = 1
    for s, _ in free:
        space *= len(m.actions[s])
        if space > cap:
            raise SpaceTooLarge(space)

    tail = dict(sat.scheduler)
    best = None
    for combo in product(*[range(len(m.actions[s])) for s, _ in free]):
        table = dict(base)
        for pair, i in zip(free, combo):
            table[pair] = i
        sched = RewardBasedScheduler(saturation=point, table=table, tail=tail)
        val = evaluate_scheduler(m, sched)
        if val.prob_goal > 0 and (best is None or val.cexp > best[0]):
            best = (val.cexp, sched)
    if best is None:
        raise AssertionError("no scheduler reaches the goal")
    return best
