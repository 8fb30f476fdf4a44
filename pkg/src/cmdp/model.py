"""Core MDP data model and exact scheduler evaluation.

States are indices into a name table.  Every action carries a label, a
rational reward and a sparse probability distribution over successor
states.  A state with an empty action tuple is a trap.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NotAcyclic, PreconditionViolated, SchedulerIncomplete
from .reach import solve_linear

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Action:
    label: str
    reward: Fraction
    dist: tuple  # ((target_index, probability), ...)


@dataclass(frozen=True)
class Mdp:
    states: tuple  # state names
    actions: tuple  # per state: tuple of Action
    init: int
    f_set: frozenset
    g_set: frozenset
    goal: int = None  # designated goal trap, if any
    fail: int = None  # designated fail trap, if any

    @property
    def n(self):
        return len(self.states)

    def is_trap(self, s):
        return not self.actions[s]

    def state_index(self, name):
        return self.states.index(name)

    def action_labels(self, s):
        return [a.label for a in self.actions[s]]


def validate_mdp(m, allow_negative_rewards=False):
    """Return a list of human-readable problems (empty when the model is sound)."""
    problems = []
    n = m.n
    if not (0 <= m.init < n):
        problems.append("initial state index %r out of range" % (m.init,))
    for label, sset in (("F", m.f_set), ("G", m.g_set)):
        for s in sset:
            if not (0 <= s < n):
                problems.append("%s contains unknown state index %r" % (label, s))
    for special in (m.goal, m.fail):
        if special is not None:
            if not (0 <= special < n):
                problems.append("designated trap index %r out of range" % (special,))
            elif m.actions[special]:
                problems.append("state %s is designated as a trap but has actions"
                                % m.states[special])
    for s in range(n):
        seen = set()
        for a in m.actions[s]:
            if a.label in seen:
                problems.append("state %s has two actions labelled %s"
                                % (m.states[s], a.label))
            seen.add(a.label)
            if a.reward < 0 and not allow_negative_rewards:
                problems.append("action %s at state %s has negative reward %s"
                                % (a.label, m.states[s], a.reward))
            if not a.dist:
                problems.append("action %s at state %s has an empty distribution"
                                % (a.label, m.states[s]))
                continue
            total = ZERO
            targets = set()
            for t, p in a.dist:
                if not (0 <= t < n):
                    problems.append("action %s at state %s targets unknown state %r"
                                    % (a.label, m.states[s], t))
                    continue
                if t in targets:
                    problems.append("action %s at state %s lists state %s twice"
                                    % (a.label, m.states[s], m.states[t]))
                targets.add(t)
                if not (ZERO < p <= ONE):
                    problems.append("action %s at state %s has probability %s outside (0,1]"
                                    % (a.label, m.states[s], p))
                total += p
            if total != ONE:
                problems.append("action %s at state %s has probabilities summing to %s"
                                % (a.label, m.states[s], total))
    return problems


@dataclass(frozen=True)
class RewardBasedScheduler:
    """Deterministic scheduler whose choice depends on the accumulated reward.

    ``table`` maps (state, level) pairs with level < saturation to action
    indices; from ``saturation`` onwards the memoryless ``tail`` applies.
    A ``saturation`` of None means the table covers every queried level
    exactly (used for acyclic models where levels are plain accumulated
    rewards and may be fractional).
    """

    saturation: int
    table: dict
    tail: dict = field(default_factory=dict)

    def action_at(self, state, level):
        if self.saturation is not None and level >= self.saturation:
            try:
                return self.tail[state]
            except KeyError:
                raise SchedulerIncomplete("no tail decision for state %r" % (state,))
        try:
            return self.table[(state, level)]
        except KeyError:
            raise SchedulerIncomplete("no decision for state %r at level %s"
                                      % (state, level))


@dataclass(frozen=True)
class SchedulerValue:
    prob_goal: Fraction
    partial_exp: Fraction
    cexp: Fraction  # None when prob_goal is zero

    @staticmethod
    def of(prob_goal, partial_exp):
        cexp = partial_exp / prob_goal if prob_goal > 0 else None
        return SchedulerValue(prob_goal, partial_exp, cexp)


_PAIR_CAP = 1_000_000


def _scheduler_pairs(m, sched):
    """Forward-reachable (state, level) pairs under the scheduler's decisions."""
    sat = sched.saturation
    start = (m.init, 0 if sat is not None else ZERO)
    pairs = {start}
    chosen = {}
    stack = [start]
    while stack:
        s, r = stack.pop()
        if m.is_trap(s):
            continue
        a = m.actions[s][sched.action_at(s, r)]
        chosen[(s, r)] = a
        nr = r + a.reward
        if sat is not None:
            nr = min(nr, sat)
        for t, _ in a.dist:
            pair = (t, nr)
            if pair not in pairs:
                pairs.add(pair)
                if len(pairs) > _PAIR_CAP:
                    raise NotAcyclic("accumulated reward levels do not stabilize")
                stack.append(pair)
    return pairs, chosen


def evaluate_scheduler(m, sched):
    """Exact probability of reaching goal and partial expectation under ``sched``.

    The model must carry a designated goal trap.  Pairs are grouped by
    level and solved highest level first; levels never decrease when all
    rewards are non-negative, otherwise everything is solved in one system.
    """
    if m.goal is None:
        raise PreconditionViolated("model has no designated goal state")
    pairs, chosen = _scheduler_pairs(m, sched)

    monotone = all(a.reward >= 0 for acts in m.actions for a in acts)
    if monotone:
        blocks = {}
        for pair in pairs:
            blocks.setdefault(pair[1], []).append(pair)
        order = [blocks[lvl] for lvl in sorted(blocks, reverse=True)]
    else:
        order = [list(pairs)]

    prob = {}
    exp = {}
    for block in order:
        unknowns = [pr for pr in block if not m.is_trap(pr[0])]
        for s, r in block:
            if m.is_trap(s):
                prob[(s, r)] = ONE if s == m.goal else ZERO
                exp[(s, r)] = ZERO
        if not unknowns:
            continue
        index = {pr: i for i, pr in enumerate(unknowns)}
        k = len(unknowns)
        mat = [[ONE if i == j else ZERO for j in range(k)] for i in range(k)]
        rhs_p = [ZERO] * k
        sat = sched.saturation
        for pr in unknowns:
            i = index[pr]
            s, r = pr
            a = chosen[pr]
            nr = r + a.reward
            if sat is not None:
                nr = min(nr, sat)
            for t, p in a.dist:
                succ = (t, nr)
                j = index.get(succ)
                if j is None:
                    rhs_p[i] += p * prob[succ]
                else:
                    mat[i][j] -= p
        sol_p = solve_linear(mat, rhs_p)
        for pr in unknowns:
            prob[pr] = sol_p[index[pr]]
        rhs_e = [ZERO] * k
        for pr in unknowns:
            i = index[pr]
            s, r = pr
            a = chosen[pr]
            nr = r + a.reward
            if sat is not None:
                nr = min(nr, sat)
            rhs_e[i] = a.reward * prob[pr]
            for t, p in a.dist:
                succ = (t, nr)
                if succ not in index:
                    rhs_e[i] += p * exp[succ]
        sol_e = solve_linear(mat, rhs_e)
        for pr in unknowns:
            exp[pr] = sol_e[index[pr]]

    start = (m.init, 0 if sched.saturation is not None else ZERO)
    return SchedulerValue.of(prob[start], exp[start])
