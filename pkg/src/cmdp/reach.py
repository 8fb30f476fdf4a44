"""Exact optimal reachability probabilities and expected total rewards.

All optimization problems are solved by policy iteration over exact
rational arithmetic; the induced linear systems go through Gaussian
elimination with a final back-substitution check.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import graphs
from .errors import PreconditionViolated, Singular

ZERO = Fraction(0)
ONE = Fraction(1)


def solve_linear(a, b):
    """Solve the square system a x = b exactly; raises Singular otherwise."""
    n = len(a)
    m = [list(row) for row in a]
    v = list(b)
    for col in range(n):
        piv = None
        for r in range(col, n):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            raise Singular("no pivot in column %d" % col)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            v[col], v[piv] = v[piv], v[col]
        head = m[col][col]
        for r in range(col + 1, n):
            f = m[r][col]
            if f == 0:
                continue
            f = f / head
            row = m[r]
            base = m[col]
            for c in range(col, n):
                row[c] -= f * base[c]
            v[r] -= f * v[col]
    x = [ZERO] * n
    for i in range(n - 1, -1, -1):
        acc = v[i]
        row = m[i]
        for j in range(i + 1, n):
            acc -= row[j] * x[j]
        x[i] = acc / row[i]
    for i in range(n):
        acc = ZERO
        for j in range(n):
            acc += a[i][j] * x[j]
        if acc != b[i]:
            raise Singular("back-substitution check failed in row %d" % i)
    return x


@dataclass
class ValueVector:
    values: list  # per state
    policy: dict  # state -> chosen action index (only where a choice exists)


def _induced_values(n, choices, fixed, policy):
    unknown = [s for s in range(n) if s not in fixed]
    index = {s: i for i, s in enumerate(unknown)}
    k = len(unknown)
    mat = [[ONE if i == j else ZERO for j in range(k)] for i in range(k)]
    rhs = [ZERO] * k
    for s in unknown:
        i = index[s]
        reward, dist = choices[s][policy[s]]
        rhs[i] = reward
        for t, p in dist:
            if t in fixed:
                rhs[i] += p * fixed[t]
            else:
                mat[i][index[t]] -= p
    sol = solve_linear(mat, rhs)
    values = [ZERO] * n
    for s, val in fixed.items():
        values[s] = val
    for s in unknown:
        values[s] = sol[index[s]]
    return values


def optimal_total_values(choices, fixed, maximize=True):
    """Optimal expected total reward until absorption in ``fixed``.

    ``choices`` lists (reward, dist) pairs per state; states in ``fixed``
    keep the given value.  Callers must guarantee that every policy
    reaches ``fixed`` almost surely.  Returns (values, policy).
    """
    n = len(choices)
    unknown = [s for s in range(n) if s not in fixed]
    for s in unknown:
        if not choices[s]:
            raise PreconditionViolated("state %d has no choice and no fixed value" % s)
    policy = {s: 0 for s in unknown}
    values = None
    while True:
        new_values = _induced_values(n, choices, fixed, policy)
        if values is not None:
            for s in range(n):
                drifted = new_values[s] < values[s] if maximize else new_values[s] > values[s]
                if drifted:
                    raise PreconditionViolated(
                        "policy iteration is not monotone; "
                        "an end component slipped through")
        values = new_values
        switched = False
        for s in unknown:
            best_i = None
            best_q = None
            for i, (reward, dist) in enumerate(choices[s]):
                q = reward
                for t, p in dist:
                    q += p * values[t]
                if best_q is None or (q > best_q if maximize else q < best_q):
                    best_q = q
                    best_i = i
            improves = best_q > values[s] if maximize else best_q < values[s]
            if improves:
                policy[s] = best_i
                switched = True
        if not switched:
            return values, policy


def _lump(dist, class_of):
    merged = {}
    for t, p in dist:
        c = class_of[t]
        merged[c] = merged.get(c, ZERO) + p
    return tuple(sorted(merged.items()))


def max_reach_prob(m, target):
    """Maximal probability of reaching ``target`` plus an attaining policy.

    Works on the quotient under maximal end components (computed with the
    target states made absorbing), then pulls an attaining memoryless
    policy back by closing backwards from the target along value-consistent
    actions that make progress.
    """
    n = m.n
    target = set(target)
    mecs = graphs.max_end_components(m, states=set(range(n)) - target)
    class_of = list(range(n))
    next_class = n
    for ec in mecs:
        if len(ec.states) == 1:
            continue
        for s in ec.states:
            class_of[s] = next_class
        next_class += 1
    classes = sorted(set(class_of))
    cpos = {c: i for i, c in enumerate(classes)}
    members = {c: [] for c in classes}
    for s in range(n):
        members[class_of[s]].append(s)
    in_mec = {}
    for ec in mecs:
        for s, i in ec.pairs():
            in_mec.setdefault(s, set()).add(i)

    k = len(classes)
    choices = [[] for _ in range(k)]
    fixed = {}
    for c in classes:
        i = cpos[c]
        if any(s in target for s in members[c]):
            fixed[i] = ONE
            continue
        for s in members[c]:
            for ai, act in enumerate(m.actions[s]):
                if ai in in_mec.get(s, ()):  # stays inside the component
                    continue
                dist = tuple((cpos[c2], p) for c2, p in _lump(act.dist, class_of))
                choices[i].append((ZERO, dist))
        if not choices[i]:
            fixed[i] = ZERO
    cvals, _ = optimal_total_values(choices, fixed, maximize=True)

    values = [cvals[cpos[class_of[s]]] for s in range(n)]
    policy = {}
    closed = set(target)
    grew = True
    while grew:
        grew = False
        for s in range(n):
            if s in closed or s in target or m.is_trap(s):
                continue
            for i, act in enumerate(m.actions[s]):
                q = ZERO
                progress = False
                for t, p in act.dist:
                    q += p * values[t]
                    if t in closed:
                        progress = True
                if q == values[s] and progress:
                    policy[s] = i
                    closed.add(s)
                    grew = True
                    break
    for s in range(n):
        if s in target or m.is_trap(s) or s in policy:
            continue
        if values[s] != ZERO:
            raise PreconditionViolated("no attaining action found at state %d" % s)
        policy[s] = 0
    return ValueVector(values, policy)


def min_reach_prob(m, target):
    """Minimal probability of reaching ``target`` plus an attaining policy."""
    n = m.n
    target = set(target)
    avoid = set(range(n)) - target
    while True:
        shrunk = False
        for s in sorted(avoid):
            if m.is_trap(s):
                continue
            if not any(all(t in avoid for t, _ in a.dist) for a in m.actions[s]):
                avoid.discard(s)
                shrunk = True
        if not shrunk:
            break

    fixed = {}
    for s in target:
        fixed[s] = ONE
    for s in avoid:
        fixed[s] = ZERO
    choices = [[] for _ in range(n)]
    for s in range(n):
        if s in fixed:
            continue
        if m.is_trap(s):
            # a trap outside both sets cannot exist: it avoids the target
            raise PreconditionViolated("trap state %d escaped the avoid set" % s)
        for act in m.actions[s]:
            choices[s].append((ZERO, tuple(act.dist)))
    values, policy = optimal_total_values(choices, fixed, maximize=False)

    for s in avoid:
        if m.is_trap(s):
            continue
        for i, act in enumerate(m.actions[s]):
            if all(t in avoid for t, _ in act.dist):
                policy[s] = i
                break
    return ValueVector(values, policy)


def max_total_exp(m, target, boundary=None, maximize=True):
    """Optimal expected total reward accumulated until reaching ``target``.

    Requires that the target is reached almost surely under every policy:
    no end components outside the target and no stray traps.  ``boundary``
    assigns terminal values to target states (default all zero).
    """
    n = m.n
    target = set(target)
    boundary = boundary or {}
    for s in range(n):
        if s not in target and m.is_trap(s):
            raise PreconditionViolated("trap state %d outside the target set" % s)
    if graphs.max_end_components(m, states=set(range(n)) - target):
        raise PreconditionViolated("end components outside the target set")
    fixed = {s: boundary.get(s, ZERO) for s in target}
    choices = [[] for _ in range(n)]
    for s in range(n):
        if s in fixed:
            continue
        for act in m.actions[s]:
            choices[s].append((act.reward, tuple(act.dist)))
    values, policy = optimal_total_values(choices, fixed, maximize=maximize)
    return ValueVector(values, policy)
