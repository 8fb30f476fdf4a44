"""Computes the maximal conditional expectation exactly.

The optimum is found through a sequence of threshold queries.  The
naive loop re-solves from scratch with the last value as the new
threshold until it stops moving.  The refined loop keeps one candidate
scheduler and walks the levels top-down; at each level it derives from
the scheduler's own value tables which thresholds could still change a
decision, tries the largest plausible one, and either shrinks the
search interval or swaps in a strictly better scheduler.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import bounds, finiteness, saturation, threshold
from .model import RewardBasedScheduler


@dataclass
class SolveResult:
    verdict: object  # finiteness verdict; value is None when infinite
    value: Fraction  # in input units (reward scaling undone)
    scheduler: RewardBasedScheduler  # levels count scaled canonical rewards
    canonical: object
    upper_bound: Fraction  # in input units
    saturation: object
    threshold_calls: int
    accepted: list  # strictly increasing scheduler values, input units


def _tail_only_result(verdict, ub, sat):
    canon = verdict.canonical
    init = canon.mdp.init
    factor = verdict.scale.factor
    value = sat.theta[init] / sat.y[init]
    sched = RewardBasedScheduler(saturation=0, table={}, tail=dict(sat.scheduler))
    return SolveResult(verdict, value / factor, sched, canon, ub / factor,
                       sat, 0, [value / factor])


def naive_loop(canon, sat):
    """Raise the threshold to the last value until it is a fixpoint."""
    m = canon.mdp
    thr = sat.theta[m.init] / sat.y[m.init]
    calls = 0
    accepted = []
    while True:
        ans = threshold.threshold_solve(canon, thr, sat)
        calls += 1
        if not ans.yes or ans.value is None or ans.value < thr:
            raise AssertionError("threshold query rejected an achievable value")
        if ans.value == thr:
            # the last call only confirms the fixpoint, nothing new accepted
            return ans, calls, accepted
        accepted.append(ans.value)
        thr = ans.value


def scheduler_improvement(canon, sat, ub):
    """Level-walking improvement loop around the threshold solver.

    Keeps the invariant that the current scheduler's value A has been
    certified and that the optimum lies in [A, B).  At each level the
    exchange rates between lost goal probability and gained expectation
    bound the thresholds at which any decision of the current tables
    could still flip; thresholds outside [A, B) cannot matter.
    """
    m = canon.mdp
    init = m.init
    point = 0 if sat.point is None else sat.point
    calls = 0
    accepted = []

    thr0 = sat.theta[init] / sat.y[init]
    best = threshold.threshold_solve(canon, thr0, sat)
    calls += 1
    if not best.yes or best.value is None:
        raise AssertionError("tail scheduler value was rejected")
    a_val = best.value
    accepted.append(a_val)
    if a_val == thr0:
        return best, calls, accepted
    b_val = ub + 1

    r = point - 1
    while r >= 0:
        tables = best.tables
        yrow = tables.y[r]
        throw = tables.theta[r]
        rates = set()
        for (s, i), (y_c, th_c) in tables.cands[r].items():
            if yrow[s] > y_c:
                rates.add(r + (throw[s] - th_c) / (yrow[s] - y_c))
        pool = {d for d in rates if d >= a_val}
        if not any(d < b_val for d in pool):
            r -= 1
            continue
        pool.add(a_val)
        improved = False
        while True:
            cand = [d for d in pool if a_val <= d < b_val]
            if not cand:
                raise AssertionError("candidate thresholds ran dry")
            probe = max(cand)
            ans = threshold.threshold_solve(canon, probe, sat,
                                            reuse=tables, from_level=r)
            calls += 1
            if ans.yes:
                if ans.value > a_val:
                    a_val = ans.value
                    accepted.append(a_val)
                if ans.value == probe:
                    return ans, calls, accepted  # nothing above is reachable
                best = ans
                improved = True
                break
            if ans.value is not None and ans.value > a_val:
                # certifies a better value, but keep improving the current
                # tables; the next probe at a_val re-certifies it with them
                a_val = ans.value
                accepted.append(a_val)
                pool.add(a_val)
            b_val = probe
        if improved:
            continue  # re-derive the rates at the same level
    return best, calls, accepted


def solve_model(m, naive=False):
    """Full pipeline: preprocess, bound, saturate, optimize."""
    verdict = finiteness.check_finiteness(m)
    if not verdict.finite:
        return SolveResult(verdict, None, None, verdict.canonical,
                           None, None, 0, [])
    canon = verdict.canonical
    factor = verdict.scale.factor
    ub = bounds.upper_bound(canon)
    sat = saturation.saturation_point(canon, ub)
    if sat.trivial:
        return _tail_only_result(verdict, ub, sat)
    if naive:
        ans, calls, accepted = naive_loop(canon, sat)
    else:
        ans, calls, accepted = scheduler_improvement(canon, sat, ub)
    return SolveResult(verdict, ans.value / factor, ans.scheduler, canon,
                       ub / factor, sat, calls, [v / factor for v in accepted])
