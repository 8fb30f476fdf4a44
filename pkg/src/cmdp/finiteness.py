"""Decides whether the maximal conditional expectation is finite.

Two effects make the value infinite: an end component that collects
reward without leaving (its runs can pump the expectation before
eventually heading for the goal), and a positive cycle that can be
reached and then never leaves the goal-avoiding part of the model
(pumping reward on runs that are conditioned away drags the weighted
average up without bound).
"""

from dataclasses import dataclass

from . import graphs, preprocess, transform


@dataclass(frozen=True)
class Verdict:
    finite: bool
    canonical: object  # preprocessed model (scaled; collapsed when finite)
    scale: object  # ScaleInfo relating canonical rewards to the input
    kind: str = None  # "positive-ec" or "critical-cycle" when infinite
    witness: tuple = None  # offending (state name, action label) pairs


def positive_ec_exists(m):
    """Reward-collecting end component avoiding goal and fail, or None."""
    keep = [s for s in range(m.n)
            if s != m.goal and s != m.fail and m.actions[s]]
    for ec in graphs.max_end_components(m, states=keep):
        bad = tuple(sorted((m.states[s], m.actions[s][i].label)
                           for s, i in ec.pairs()
                           if m.actions[s][i].reward > 0))
        if bad:
            return bad
    return None


def critical_scheduler_exists(m):
    """Positive cycle reachable from the initial state while the goal
    stays avoidable, or None.

    The goal state is removed together with every action that could hit
    it; states left without actions disappear the same way, except for
    traps of the original model, which remain as sinks.
    """
    alive = set(range(m.n)) - {m.goal}
    acts = {s: set(range(len(m.actions[s]))) for s in alive}
    sinks = {s for s in alive if not m.actions[s]}
    changed = True
    while changed:
        changed = False
        for s in sorted(alive):
            if s in sinks:
                continue
            keep = {i for i in acts[s]
                    if all(t in alive for t, _ in m.actions[s][i].dist)}
            if keep != acts[s]:
                acts[s] = keep
                changed = True
            if not keep:
                alive.discard(s)
                del acts[s]
    if m.init not in alive:
        return None
    return graphs.has_positive_cycle(m, states=alive, acts=acts, start=m.init)


def _quotient_canonical(canon):
    quotient, class_of = preprocess.mec_quotient_map(canon.mdp)
    prov = [None] * quotient.n
    for s in range(canon.mdp.n - 1, -1, -1):
        prov[class_of[s]] = canon.provenance[s]
    return preprocess.CanonicalMdp(quotient, tuple(prov))


def check_finiteness(m):
    """Preprocess a model and decide finiteness of its maximal value.

    On the finite verdict the returned canonical model has integer
    rewards and no end components, ready for the threshold machinery.
    """
    canon = preprocess.normal_form(m)
    canon, scale = transform.scale_canonical(canon)
    bad = positive_ec_exists(canon.mdp)
    if bad is not None:
        return Verdict(False, canon, scale, kind="positive-ec", witness=bad)
    canon = _quotient_canonical(canon)
    cyc = critical_scheduler_exists(canon.mdp)
    if cyc is not None:
        witness = tuple((canon.mdp.states[s], canon.mdp.actions[s][i].label)
                        for s, i in cyc)
        return Verdict(False, canon, scale, kind="critical-cycle", witness=witness)
    return Verdict(True, canon, scale)
