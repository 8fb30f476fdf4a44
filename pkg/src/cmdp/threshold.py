"""Threshold decision: is the maximal conditional expectation >= theta?

The solver fills value tables indexed by state and accumulated reward
level.  The top level is the memoryless tail scheduler; every level
below is made optimal for the difference criterion

    delta(s, r) = partial_exp(s, r) - (theta - r) * prob_goal(s, r)

either through a total-expectation computation on an auxiliary model
(general route) or, when the zero-reward sub-graph is acyclic, through
a direct topological sweep.  Both routes produce the same tables; only
the identity of equally good actions may differ.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import graphs, reach
from .errors import EmptyActStar, NotAcyclic
from .model import Action, Mdp, RewardBasedScheduler

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class ValueTables:
    point: int  # tables cover levels 0..point; row ``point`` is the tail
    y: list  # y[r][s]: probability of reaching goal from (s, r)
    theta: list  # theta[r][s]: partial expectation from (s, r)
    action: list  # action[r][s]: chosen action index, None at traps
    cands: list  # cands[r]: (s, i) -> (y, theta) for every action


@dataclass
class ThresholdAnswer:
    yes: bool
    value: Fraction  # conditional expectation of the scheduler, None if
    # it cannot reach the goal
    threshold: Fraction
    scheduler: RewardBasedScheduler
    tables: ValueTables


def _blank_rows(m):
    y_row = [ZERO] * m.n
    y_row[m.goal] = ONE
    return y_row, [ZERO] * m.n, [None] * m.n


def _positive_candidates(m, point, r, y, theta):
    """Value candidates of positive-reward actions at level ``r``."""
    out = {}
    for s in range(m.n):
        for i, a in enumerate(m.actions[s]):
            rew = int(a.reward)
            if rew <= 0:
                continue
            level = min(point, r + rew)
            y_c = ZERO
            th_c = ZERO
            for t, p in a.dist:
                y_c += p * y[level][t]
                th_c += p * theta[level][t]
            out[(s, i)] = (y_c, rew * y_c + th_c)
    return out


def _row_sweep(m, r, thr, pos, order, y, theta, action):
    """Fill level ``r`` directly along a zero-reward topological order."""
    y_row, th_row, act_row = _blank_rows(m)
    y[r], theta[r], action[r] = y_row, th_row, act_row
    shift = thr - r
    for s in order:
        if m.is_trap(s):
            continue
        best = None
        for i, a in enumerate(m.actions[s]):
            if (s, i) in pos:
                y_c, th_c = pos[(s, i)]
            else:
                y_c = ZERO
                th_c = ZERO
                for t, p in a.dist:
                    y_c += p * y_row[t]
                    th_c += p * th_row[t]
            key = (th_c - shift * y_c, y_c)
            if best is None or key > best:
                best = key
                act_row[s] = i
                y_row[s] = y_c
                th_row[s] = th_c


def _row_lp(m, r, thr, pos, y, theta, action):
    """Fill level ``r`` through an auxiliary total-expectation model."""
    n = m.n
    final = n
    shift = thr - Fraction(r)
    aux_actions = []
    for s in range(n):
        if s == m.goal:
            aux_actions.append((Action("tau", -shift, ((final, ONE),)),))
        elif s == m.fail:
            aux_actions.append((Action("tau", ZERO, ((final, ONE),)),))
        else:
            acts = []
            for i, a in enumerate(m.actions[s]):
                if (s, i) in pos:
                    y_c, th_c = pos[(s, i)]
                    acts.append(Action(a.label, th_c - shift * y_c, ((final, ONE),)))
                else:
                    acts.append(Action(a.label, ZERO, a.dist))
            aux_actions.append(tuple(acts))
    aux_actions.append(())
    aux = Mdp(states=m.states + ("final",), actions=tuple(aux_actions),
              init=m.init, f_set=frozenset((final,)), g_set=frozenset((final,)),
              goal=final, fail=None)
    x = reach.max_total_exp(aux, {final}).values

    # actions attaining the optimum
    astar = []
    for s in range(n):
        if m.is_trap(s):
            astar.append(())
            continue
        good = []
        for i, a in enumerate(m.actions[s]):
            if (s, i) in pos:
                y_c, th_c = pos[(s, i)]
                val = th_c - shift * y_c
            else:
                val = ZERO
                for t, p in a.dist:
                    val += p * x[t]
            if val == x[s]:
                good.append(i)
        if not good:
            raise EmptyActStar("no optimal action at state %s" % m.states[s])
        astar.append(tuple(good))

    # among the optimal actions, maximize the probability of reaching goal;
    # positive-reward actions act like a coin flip between goal and fail
    star_actions = []
    for s in range(n):
        acts = []
        for i in astar[s]:
            a = m.actions[s][i]
            if (s, i) in pos:
                y_c, _ = pos[(s, i)]
                dist = []
                if y_c > 0:
                    dist.append((m.goal, y_c))
                if y_c < 1:
                    if m.fail is None:
                        raise AssertionError("probability lost without a fail state")
                    dist.append((m.fail, ONE - y_c))
                acts.append(Action(a.label, ZERO, tuple(dist)))
            else:
                acts.append(Action(a.label, ZERO, a.dist))
        star_actions.append(tuple(acts))
    mstar = Mdp(states=m.states, actions=tuple(star_actions), init=m.init,
                f_set=m.f_set, g_set=m.g_set, goal=m.goal, fail=m.fail)
    pstar = reach.max_reach_prob(mstar, {m.goal}).values

    # pull back a choice that actually attains pstar: close backwards from
    # goal along consistent actions that make progress
    chosen = [None] * n
    closed = {m.goal}
    progress = True
    while progress:
        progress = False
        for s in range(n):
            if s in closed or m.is_trap(s) or pstar[s] == 0:
                continue
            for k, i in enumerate(astar[s]):
                a = star_actions[s][k]
                q = ZERO
                hit = False
                for t, p in a.dist:
                    q += p * pstar[t]
                    if t in closed:
                        hit = True
                if q == pstar[s] and hit:
                    chosen[s] = i
                    closed.add(s)
                    progress = True
                    break
    for s in range(n):
        if m.is_trap(s):
            continue
        if chosen[s] is None:
            if pstar[s] != 0:
                raise AssertionError("no progressing action at %s" % m.states[s])
            chosen[s] = astar[s][0]

    # evaluate the chosen scheduler at this level: positive-reward states
    # take their candidate values, the zero-reward remainder is linear
    y_row, th_row, act_row = _blank_rows(m)
    unknowns = []
    for s in range(n):
        if m.is_trap(s):
            continue
        act_row[s] = chosen[s]
        if (s, chosen[s]) in pos:
            y_row[s], th_row[s] = pos[(s, chosen[s])]
        else:
            unknowns.append(s)
    if unknowns:
        index = {s: i for i, s in enumerate(unknowns)}
        k = len(unknowns)
        mat = [[ONE if i == j else ZERO for j in range(k)] for i in range(k)]
        rhs_y = [ZERO] * k
        rhs_t = [ZERO] * k
        for s in unknowns:
            i = index[s]
            for t, p in m.actions[s][chosen[s]].dist:
                j = index.get(t)
                if j is None:
                    rhs_y[i] += p * y_row[t]
                    rhs_t[i] += p * th_row[t]
                else:
                    mat[i][j] -= p
        sol_y = reach.solve_linear(mat, rhs_y)
        sol_t = reach.solve_linear(mat, rhs_t)
        for s in unknowns:
            y_row[s] = sol_y[index[s]]
            th_row[s] = sol_t[index[s]]
    for s in range(n):
        if th_row[s] - shift * y_row[s] != x[s]:
            raise AssertionError("table row disagrees with the auxiliary "
                                 "optimum at %s" % m.states[s])
    y[r], theta[r], action[r] = y_row, th_row, act_row


def threshold_solve(canon, thr, sat, reuse=None, from_level=None, force_lp=False):
    """Decide whether the maximal conditional expectation reaches ``thr``.

    ``sat`` is the saturation bundle of the canonical model.  ``reuse``
    takes the tables of a previous answer and keeps every level above
    ``from_level`` frozen; only the given level and everything below is
    recomputed against the new threshold.
    """
    m = canon.mdp
    if m.goal is None:
        raise AssertionError("threshold solver needs a designated goal")
    for acts in m.actions:
        for a in acts:
            if a.reward != int(a.reward) or a.reward < 0:
                raise AssertionError("rewards must be scaled to non-negative "
                                     "integers first")
    point = 0 if sat.point is None else sat.point
    rows = point + 1
    y = [None] * rows
    theta = [None] * rows
    action = [None] * rows
    cands = [None] * rows
    y[point] = list(sat.y)
    theta[point] = list(sat.theta)
    action[point] = [sat.scheduler.get(s) for s in range(m.n)]

    if reuse is not None:
        if from_level is None:
            raise AssertionError("reuse requires an explicit starting level")
        for k in range(from_level + 1, point):
            y[k] = list(reuse.y[k])
            theta[k] = list(reuse.theta[k])
            action[k] = list(reuse.action[k])
            cands[k] = reuse.cands[k]
    start = point - 1 if from_level is None else min(from_level, point - 1)

    order, cyc = graphs.zero_reward_topo_order(m)
    sweep = cyc is None and not force_lp

    for r in range(start, -1, -1):
        pos = _positive_candidates(m, point, r, y, theta)
        if sweep:
            _row_sweep(m, r, thr, pos, order, y, theta, action)
        else:
            _row_lp(m, r, thr, pos, y, theta, action)
        crow = dict(pos)
        for s in range(m.n):
            for i, a in enumerate(m.actions[s]):
                if (s, i) in crow:
                    continue
                y_c = ZERO
                th_c = ZERO
                for t, p in a.dist:
                    y_c += p * y[r][t]
                    th_c += p * theta[r][t]
                crow[(s, i)] = (y_c, th_c)
        cands[r] = crow
        shift = thr - r
        for (s, i), (y_c, th_c) in crow.items():
            if th_c - shift * y_c > theta[r][s] - shift * y[r][s]:
                raise AssertionError(
                    "difference property violated at state %s action %d "
                    "level %d" % (m.states[s], i, r))

    tables = ValueTables(point, y, theta, action, cands)
    y0 = y[0][m.init]
    value = theta[0][m.init] / y0 if y0 > 0 else None
    yes = y0 > 0 and value >= thr
    sched = _assemble(m, point, action)
    return ThresholdAnswer(yes, value, thr, sched, tables)


def _assemble(m, point, action):
    """Scheduler over the (state, level) pairs its own choices reach."""
    table = {}
    tail = {s: action[point][s] for s in range(m.n) if not m.is_trap(s)}
    seen = {(m.init, 0)}
    stack = [(m.init, 0)]
    while stack:
        s, r = stack.pop()
        if m.is_trap(s):
            continue
        i = action[r][s]
        if r < point:
            table[(s, r)] = i
        a = m.actions[s][i]
        nr = min(point, r + int(a.reward))
        for t, _ in a.dist:
            if (t, nr) not in seen:
                seen.add((t, nr))
                stack.append((t, nr))
    return RewardBasedScheduler(saturation=point, table=table, tail=tail)


def decide(canon, thr, rel, sat):
    """Compare the maximal conditional expectation against ``thr``.

    ``rel`` is one of GE, GT, LE, LT.  Returns (verdict, answer)."""
    ans = threshold_solve(canon, thr, sat)
    if rel == "GE":
        ok = ans.yes
    elif rel == "GT":
        ok = ans.yes and ans.value > thr
    elif rel == "LT":
        ok = not ans.yes
    elif rel == "LE":
        ok = (not ans.yes) or ans.value == thr
    else:
        raise ValueError("unknown relation %r" % (rel,))
    return ok, ans


def _assert_acyclic(m):
    color = [0] * m.n  # 0 white, 1 gray, 2 black
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
            path.pop()
            del pos[v]


def threshold_acyclic(canon, thr):
    """Threshold decision on an acyclic model by direct recursion.

    Levels are exact accumulated rewards, so arbitrary rational and
    negative rewards are fine here.  No saturation is involved: the
    scheduler's table covers exactly the pairs it can reach.
    """
    m = canon.mdp
    if m.goal is None:
        raise AssertionError("threshold solver needs a designated goal")
    _assert_acyclic(m)
    memo = {}
    choice = {}
    start = (m.init, ZERO)
    stack = [start]
    while stack:
        s, r = stack[-1]
        if (s, r) in memo:
            stack.pop()
            continue
        if m.is_trap(s):
            memo[(s, r)] = (ONE if s == m.goal else ZERO, ZERO)
            stack.pop()
            continue
        missing = []
        for a in m.actions[s]:
            nr = r + a.reward
            for t, _ in a.dist:
                if (t, nr) not in memo:
                    missing.append((t, nr))
        if missing:
            stack.extend(missing)
            continue
        best = None
        pick = None
        for i, a in enumerate(m.actions[s]):
            nr = r + a.reward
            y_c = ZERO
            th_c = ZERO
            for t, p in a.dist:
                y_c += p * memo[(t, nr)][0]
                th_c += p * memo[(t, nr)][1]
            th_c += a.reward * y_c
            key = (th_c - (thr - r) * y_c, y_c)
            if best is None or key > best:
                best = key
                pick = (i, y_c, th_c)
        choice[(s, r)] = pick[0]
        memo[(s, r)] = (pick[1], pick[2])
        stack.pop()

    table = {}
    seen = {start}
    bfs = [start]
    while bfs:
        s, r = bfs.pop()
        if m.is_trap(s):
            continue
        i = choice[(s, r)]
        table[(s, r)] = i
        a = m.actions[s][i]
        for t, _ in a.dist:
            pair = (t, r + a.reward)
            if pair not in seen:
                seen.add(pair)
                bfs.append(pair)
    sched = RewardBasedScheduler(saturation=None, table=table)

    y0, th0 = memo[start]
    value = th0 / y0 if y0 > 0 else None
    yes = y0 > 0 and value >= thr
    return ThresholdAnswer(yes, value, thr, sched, None)


def solve_acyclic(canon):
    """Maximal conditional expectation of an acyclic model.

    Repeatedly raises the threshold to the value of the last answer;
    the first fixpoint is the optimum.  The starting threshold lies
    below the value of every scheduler, which keeps the goal
    probability of the chosen scheduler positive throughout.
    """
    m = canon.mdp
    total = ZERO
    for s in range(m.n):
        if m.actions[s]:
            total += max(abs(a.reward) for a in m.actions[s])
    thr = -total - 1
    while True:
        ans = threshold_acyclic(canon, thr)
        if not ans.yes or ans.value is None or ans.value < thr:
            raise AssertionError("threshold recursion lost the goal")
        if ans.value == thr:
            return ans
        thr = ans.value
