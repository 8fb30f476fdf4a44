"""Memoryless tail behaviour of optimal schedulers.

From some accumulated-reward level onward an optimal scheduler can act
memorylessly: maximize the probability of reaching goal and, among the
probability-optimal actions, the expected reward that still counts.
This module computes that scheduler and the level from which it is safe.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from . import reach

ZERO = Fraction(0)


@dataclass(frozen=True)
class Saturation:
    scheduler: dict  # state -> action index, memoryless
    y: list  # per state: maximal probability of reaching goal
    theta: list  # per state: partial expectation under the scheduler
    d: Fraction  # None when no action can fall behind on probability
    point: int  # None when trivial
    trivial: bool


def max_prob_scheduler(canon):
    """Scheduler maximizing goal probability, breaking ties in favour of
    the largest partial expectation.  Returns (scheduler, y, theta)."""
    m = canon.mdp
    y = reach.max_reach_prob(m, {m.goal}).values
    fixed = {}
    choices = []
    backing = []
    for s in range(m.n):
        if m.is_trap(s):
            fixed[s] = ZERO
            choices.append(())
            backing.append(())
            continue
        opts = []
        idxs = []
        for i, a in enumerate(m.actions[s]):
            q = ZERO
            for t, p in a.dist:
                q += p * y[t]
            if q == y[s]:
                # on probability-optimal actions the goal probability mass
                # passing through equals y(s), so the reward weight is fixed
                opts.append((a.reward * y[s], a.dist))
                idxs.append(i)
        choices.append(opts)
        backing.append(idxs)
    theta, pol = reach.optimal_total_values(choices, fixed, maximize=True)
    scheduler = {s: backing[s][pol[s]] for s in pol}
    return scheduler, y, theta


def saturation_point(canon, ce_ub):
    """Bundle the memoryless tail scheduler with its saturation level.

    The level is derived from the worst exchange rate between lost goal
    probability and gained partial expectation over all actions; when no
    action loses probability the tail scheduler is optimal everywhere
    and the bundle is marked trivial.
    """
    m = canon.mdp
    scheduler, y, theta = max_prob_scheduler(canon)
    d = None
    for s in range(m.n):
        if m.is_trap(s):
            continue
        for a in m.actions[s]:
            ya = ZERO
            ta = ZERO
            for t, p in a.dist:
                ya += p * y[t]
                ta += p * theta[t]
            ta += a.reward * ya
            if ya > y[s]:
                raise AssertionError("action beats the maximal goal probability")
            if ya == y[s]:
                if ta > theta[s]:
                    raise AssertionError(
                        "probability-optimal action beats the tail scheduler")
                continue
            c = (theta[s] - ta) / (y[s] - ya)
            if d is None or c < d:
                d = c
    if d is None:
        return Saturation(scheduler, y, theta, None, None, True)
    point = max(ceil(ce_ub - d), 0)
    return Saturation(scheduler, y, theta, d, point, False)
