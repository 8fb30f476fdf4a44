"""Reduction of conditional expectation instances to a canonical form.

Input: a model with a reward target set F and a condition set G, asking
for the maximal expected reward accumulated until the first F-visit,
conditioned on reaching G.  Output: an equivalent model with a single
``goal`` trap (and at most one ``fail`` trap) where the question becomes
the expected reward until ``goal`` conditioned on reaching ``goal``.

The construction tracks which of F/G have been seen via three copies of
the state space (normal, afterG, afterF), collapses forced wins into the
goal trap, removes choices that would let the conditioning event fail
after G was already reached, funnels condition-violating regions into
``fail`` and equips states that can dodge the condition entirely with an
explicit give-up action.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import graphs, reach
from .errors import PositiveEcPresent, PreconditionViolated
from .model import Action, Mdp

ZERO = Fraction(0)
ONE = Fraction(1)

TAU = "tau"
IOTA = "iota"
STAY = "stay"

NORMAL = "normal"
AFTER_G = "afterG"
AFTER_F = "afterF"


@dataclass(frozen=True)
class CanonicalMdp:
    """A canonicalized model plus the origin of every state."""

    mdp: Mdp
    provenance: tuple  # per state: (original state name or "", mode)

    @property
    def goal(self):
        return self.mdp.goal

    @property
    def fail(self):
        return self.mdp.fail


def _prune(m):
    keep = sorted(graphs.reachable(m))
    remap = {s: i for i, s in enumerate(keep)}
    actions = []
    for s in keep:
        acts = []
        for a in m.actions[s]:
            acts.append(Action(a.label, a.reward,
                               tuple((remap[t], p) for t, p in a.dist)))
        actions.append(tuple(acts))
    return Mdp(states=tuple(m.states[s] for s in keep),
               actions=tuple(actions),
               init=remap[m.init],
               f_set=frozenset(remap[s] for s in m.f_set if s in remap),
               g_set=frozenset(remap[s] for s in m.g_set if s in remap),
               goal=remap.get(m.goal) if m.goal is not None else None,
               fail=remap.get(m.fail) if m.fail is not None else None)


def _effective(m, s):
    """Actions of s, with an explicit self-loop standing in for trap states."""
    if m.actions[s]:
        return m.actions[s]
    return (Action(STAY, ZERO, ((s, ONE),)),)


def _unique_name(base, taken):
    name = base
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def normal_form(m):
    """Canonicalize a model; raises PreconditionViolated when no scheduler
    reaches G with positive probability while making F almost sure given G."""
    m = _prune(m)
    fset, gset = m.f_set, m.g_set
    if m.init in fset or m.init in gset:
        raise PreconditionViolated(
            "the initial state may not lie in F or G")

    pmin_f = reach.min_reach_prob(m, fset).values
    pmin_g = reach.min_reach_prob(m, gset).values

    # expected reward until F on the region where F is reached surely,
    # needed to shortcut afterG states that can no longer miss F
    sure = sorted(s for s in range(m.n) if pmin_f[s] == ONE)
    emax_f = {}
    if sure:
        pos = {s: i for i, s in enumerate(sure)}
        sub_actions = []
        for s in sure:
            if s in fset:
                sub_actions.append(())
            else:
                sub_actions.append(tuple(
                    Action(a.label, a.reward,
                           tuple((pos[t], p) for t, p in a.dist))
                    for a in m.actions[s]))
        sub = Mdp(states=tuple(m.states[s] for s in sure),
                  actions=tuple(sub_actions),
                  init=pos[sure[0]], f_set=frozenset(), g_set=frozenset())
        vals = reach.max_total_exp(
            sub, {pos[s] for s in sure if s in fset}).values
        for s in sure:
            emax_f[s] = vals[pos[s]]

    # three-copy unfolding, built lazily from the initial state
    GOAL = ("goal",)
    keys = []
    index = {}

    def idx(key):
        if key not in index:
            index[key] = len(keys)
            keys.append(key)
        return index[key]

    def build(key):
        if key == GOAL:
            return ()
        kind, s = key
        in_f, in_g = s in fset, s in gset
        to_goal = (Action(TAU, ZERO, ((idx(GOAL), ONE),)),)
        if kind == NORMAL:
            if in_f and in_g:
                return to_goal
            if in_g:
                succ = AFTER_G
                keep_reward = True
            elif in_f:
                succ = AFTER_F
                keep_reward = False
            else:
                succ = NORMAL
                keep_reward = True
        elif kind == AFTER_G:
            if in_f:
                return to_goal
            if pmin_f[s] == ONE:
                return (Action(TAU, emax_f[s], ((idx(GOAL), ONE),)),)
            succ = AFTER_G
            keep_reward = True
        else:  # AFTER_F
            if in_g:
                return to_goal
            if pmin_g[s] == ONE:
                return to_goal
            succ = AFTER_F
            keep_reward = False
        acts = []
        for a in _effective(m, s):
            reward = a.reward if keep_reward else ZERO
            acts.append(Action(a.label, reward,
                               tuple((idx((succ, t)), p) for t, p in a.dist)))
        return tuple(acts)

    idx((NORMAL, m.init))
    actions = []
    while len(actions) < len(keys):
        actions.append(build(keys[len(actions)]))

    goal_i = idx(GOAL)

    # fold states whose only move is a free jump to goal into goal itself
    fold = set()
    for i, acts in enumerate(actions):
        if (i != goal_i and len(acts) == 1 and acts[0].label == TAU
                and acts[0].reward == ZERO and acts[0].dist == ((goal_i, ONE),)):
            fold.add(i)
    keep = [i for i in range(len(keys)) if i not in fold]
    remap = {i: k for k, i in enumerate(keep)}
    goal_i = remap[goal_i]

    def fold_dist(dist):
        merged = {}
        for t, p in dist:
            tt = goal_i if t in fold else remap[t]
            merged[tt] = merged.get(tt, ZERO) + p
        return tuple(sorted(merged.items()))

    keys = [keys[i] for i in keep]
    actions = [tuple(Action(a.label, a.reward, fold_dist(a.dist))
                     for a in actions[i]) for i in keep]
    init_i = remap[index[(NORMAL, m.init)]]
    n = len(keys)

    def mode_of(key):
        if key == GOAL:
            return "goal"
        return key[0]

    # forbidden region: once G is reached, F must stay almost-sure-reachable;
    # states and decisions that break this are removed
    tilde = Mdp(states=tuple(str(i) for i in range(n)), actions=tuple(actions),
                init=init_i, f_set=frozenset(), g_set=frozenset())
    pmax = reach.max_reach_prob(tilde, {goal_i}).values

    preds = {}
    for s in range(n):
        for ai, a in enumerate(actions[s]):
            for t, _ in a.dist:
                preds.setdefault(t, set()).add((s, ai))

    v_states = set()
    v_pairs = set()
    work = []
    for i in range(n):
        if mode_of(keys[i]) == AFTER_G and pmax[i] < ONE:
            v_states.add(i)
            work.append(i)
    while work:
        v = work.pop()
        for (s, ai) in preds.get(v, ()):
            if (s, ai) in v_pairs:
                continue
            v_pairs.add((s, ai))
            if s in v_states or not actions[s]:
                continue
            if all((s, k) in v_pairs for k in range(len(actions[s]))):
                v_states.add(s)
                work.append(s)
    if init_i in v_states:
        raise PreconditionViolated(
            "no scheduler keeps F almost sure once G is reached")

    pruned_actions = []
    for s in range(n):
        if s in v_states:
            pruned_actions.append(())
        else:
            pruned_actions.append(tuple(
                a for ai, a in enumerate(actions[s]) if (s, ai) not in v_pairs))
            if actions[s] and not pruned_actions[s]:
                raise AssertionError("state kept without any admissible action")
    m0 = Mdp(states=tilde.states, actions=tuple(pruned_actions),
             init=init_i, f_set=frozenset(), g_set=frozenset())
    pmax0 = reach.max_reach_prob(m0, {goal_i}).values

    t_states = {s for s in range(n)
                if s not in v_states and pmax0[s] == ZERO}
    if init_i in t_states:
        raise PreconditionViolated(
            "the conditioning event has probability zero under every scheduler")

    pmin = reach.min_reach_prob(tilde, {goal_i}).values
    iota_states = {s for s in range(n)
                   if s not in v_states and s not in t_states and s != goal_i
                   and mode_of(keys[s]) != AFTER_G and pmin[s] == ZERO}

    kept = [s for s in range(n) if s not in v_states and s not in t_states]
    final_map = {s: i for i, s in enumerate(kept)}
    fail_i = len(kept)

    taken = set()
    names = []
    provenance = []
    for s in kept:
        key = keys[s]
        if key == GOAL:
            names.append(_unique_name("goal", taken))
            provenance.append(("", "goal"))
        else:
            kind, orig = key
            base = m.states[orig]
            if kind != NORMAL:
                base += "@" + kind
            names.append(_unique_name(base, taken))
            provenance.append((m.states[orig], kind))

    fail_used = False
    final_actions = []
    for s in kept:
        acts = []
        for a in pruned_actions[s]:
            merged = {}
            for t, p in a.dist:
                if t in t_states:
                    merged[fail_i] = merged.get(fail_i, ZERO) + p
                else:
                    tt = final_map[t]
                    merged[tt] = merged.get(tt, ZERO) + p
            if fail_i in merged:
                fail_used = True
            acts.append(Action(a.label, a.reward, tuple(sorted(merged.items()))))
        if s in iota_states:
            acts.append(Action(IOTA, ZERO, ((fail_i, ONE),)))
            fail_used = True
        final_actions.append(tuple(acts))

    if fail_used:
        names.append(_unique_name("fail", taken))
        provenance.append(("", "fail"))
        final_actions.append(())

    goal_f = final_map[goal_i]
    result = Mdp(states=tuple(names), actions=tuple(final_actions),
                 init=final_map[init_i],
                 f_set=frozenset((goal_f,)), g_set=frozenset((goal_f,)),
                 goal=goal_f, fail=fail_i if fail_used else None)
    result = _prune(result)
    surviving = set(result.states)
    provenance = tuple(prov for name, prov in zip(names, provenance)
                       if name in surviving)
    return CanonicalMdp(result, provenance)


def check_precondition(m):
    """True when the instance admits at least one admissible scheduler."""
    try:
        normal_form(m)
    except PreconditionViolated:
        return False
    return True


def mec_quotient_map(m):
    """Collapse maximal end components into single states.

    All end components must be reward-free (PositiveEcPresent otherwise).
    Inside a component only the exiting action choices survive; they are
    relabelled ``<state>.<label>``.  Returns (quotient, class_of).
    """
    mecs = graphs.max_end_components(m)
    for ec in mecs:
        for s, i in ec.pairs():
            if m.actions[s][i].reward != 0:
                raise PositiveEcPresent(
                    "end component around state %s collects reward via %s"
                    % (m.states[s], m.actions[s][i].label))

    n = m.n
    class_of = list(range(n))
    groups = {s: [s] for s in range(n)}
    internal = {}
    for ec in mecs:
        rep = min(ec.states)
        for s in ec.states:
            class_of[s] = rep
        groups[rep] = sorted(ec.states)
        for s, i in ec.pairs():
            internal.setdefault(s, set()).add(i)
    reps = sorted(set(class_of))
    cpos = {rep: i for i, rep in enumerate(reps)}

    names = []
    actions = []
    for rep in reps:
        members = groups[rep]
        names.append("+".join(m.states[s] for s in members))
        acts = []
        for s in members:
            for ai, a in enumerate(m.actions[s]):
                if ai in internal.get(s, ()):
                    continue
                merged = {}
                for t, p in a.dist:
                    c = cpos[class_of[t]]
                    merged[c] = merged.get(c, ZERO) + p
                label = a.label if len(members) == 1 \
                    else "%s.%s" % (m.states[s], a.label)
                acts.append(Action(label, a.reward, tuple(sorted(merged.items()))))
        actions.append(tuple(acts))

    def lift(s):
        return cpos[class_of[s]] if s is not None else None

    quotient = Mdp(states=tuple(names), actions=tuple(actions),
                   init=lift(m.init),
                   f_set=frozenset(lift(s) for s in m.f_set),
                   g_set=frozenset(lift(s) for s in m.g_set),
                   goal=lift(m.goal), fail=lift(m.fail))
    return quotient, [cpos[class_of[s]] for s in range(n)]


def mec_quotient(m):
    quotient, _ = mec_quotient_map(m)
    return quotient
