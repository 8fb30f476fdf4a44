"""Graph analyses on MDPs: reachability, end components, cycle searches."""

from dataclasses import dataclass


def reachable(m, start=None):
    """Set of states reachable from ``start`` (default: the initial state)."""
    if start is None:
        start = m.init
    seen = {start}
    stack = [start]
    while stack:
        s = stack.pop()
        for a in m.actions[s]:
            for t, _ in a.dist:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
    return seen


def strongly_connected(n, succ):
    """Tarjan with an explicit stack.

    Returns (comp_of, comps); components are numbered in reverse
    topological order (every edge goes into an equal or lower number).
    """
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    comp_of = [None] * n
    comps = []
    counter = 0
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            descended = False
            for i in range(pi, len(succ[v])):
                w = succ[v][i]
                if index[w] is None:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    descended = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if descended:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp_of[w] = len(comps)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comp_of, comps


@dataclass(frozen=True)
class EndComponent:
    states: frozenset
    actions: dict  # state -> tuple of action indices staying inside

    def pairs(self):
        for s in sorted(self.actions):
            for i in self.actions[s]:
                yield s, i


def max_end_components(m, states=None):
    """Maximal end components of ``m``, optionally restricted to a state set.

    Iteratively drops actions whose support leaves the current strongly
    connected component, then states left without actions, until stable.
    """
    alive = set(range(m.n)) if states is None else set(states)
    acts = {s: set(range(len(m.actions[s]))) for s in alive}
    while True:
        changed = False
        for s in sorted(alive):
            for i in sorted(acts[s]):
                if any(t not in alive for t, _ in m.actions[s][i].dist):
                    acts[s].discard(i)
                    changed = True
        dead = [s for s in alive if not acts[s]]
        if dead:
            for s in dead:
                alive.discard(s)
                del acts[s]
            continue
        if not alive:
            return []
        nodes = sorted(alive)
        pos = {s: k for k, s in enumerate(nodes)}
        succ = [[] for _ in nodes]
        for s in nodes:
            out = set()
            for i in acts[s]:
                for t, _ in m.actions[s][i].dist:
                    out.add(t)
            succ[pos[s]] = sorted(pos[t] for t in out)
        comp_of, comps = strongly_connected(len(nodes), succ)
        for s in nodes:
            for i in sorted(acts[s]):
                if any(comp_of[pos[t]] != comp_of[pos[s]]
                       for t, _ in m.actions[s][i].dist):
                    acts[s].discard(i)
                    changed = True
        if not changed:
            result = []
            for comp in comps:
                members = [nodes[k] for k in comp]
                result.append(EndComponent(
                    frozenset(members),
                    {s: tuple(sorted(acts[s])) for s in members}))
            result.sort(key=lambda ec: min(ec.states))
            return result


def has_positive_cycle(m, states=None, acts=None, start=None):
    """Witness cycle with at least one positive-reward step, or None.

    Only cycles reachable from ``start`` inside the given state/action
    restriction count.  The witness is a list of (state, action index)
    pairs whose edges close back on the first state.  Nested depth-first
    search: an outer pass enumerates reachable positive-reward edges, an
    inner search tries to close the loop.
    """
    if states is None:
        states = set(range(m.n))
    if acts is None:
        acts = {s: range(len(m.actions[s])) for s in states}
    if start is None:
        start = m.init
    if start not in states:
        return None

    seen = {start}
    stack = [start]
    while stack:
        s = stack.pop()
        for i in acts[s]:
            for t, _ in m.actions[s][i].dist:
                if t in states and t not in seen:
                    seen.add(t)
                    stack.append(t)

    for s in sorted(seen):
        for i in acts[s]:
            a = m.actions[s][i]
            if a.reward <= 0:
                continue
            for t, _ in a.dist:
                if t not in states:
                    continue
                if t == s:
                    return [(s, i)]
                parent = {t: None}
                dfs = [t]
                found = False
                while dfs and not found:
                    v = dfs.pop()
                    for j in acts[v]:
                        for w, _ in m.actions[v][j].dist:
                            if w not in states:
                                continue
                            if w == s:
                                parent[s] = (v, j)
                                found = True
                                break
                            if w not in parent:
                                parent[w] = (v, j)
                                dfs.append(w)
                        if found:
                            break
                if not found:
                    continue
                edges = []
                cur = s
                while parent[cur] is not None:
                    v, j = parent[cur]
                    edges.append((v, j))
                    cur = v
                edges.reverse()
                return [(s, i)] + edges
    return None


def zero_reward_topo_order(m, states=None):
    """Order states so every zero-reward edge points to an earlier entry.

    Returns (order, None) on success or (None, cycle) when the
    zero-reward subgraph has a cycle (cycle given as a state list).
    """
    if states is None:
        states = range(m.n)
    states = sorted(states)
    in_scope = set(states)
    color = {s: 0 for s in states}  # 0 white, 1 gray, 2 black
    order = []
    for root in states:
        if color[root] != 0:
            continue
        path = [root]
        pos = {root: 0}
        work = [(root, 0)]
        color[root] = 1
        while work:
            v, pi = work[-1]
            succ = []
            for a in m.actions[v]:
                if a.reward == 0:
                    succ.extend(t for t, _ in a.dist)
            descended = False
            for i in range(pi, len(succ)):
                w = succ[i]
                if w not in in_scope:
                    continue
                if color[w] == 1:
                    return None, path[pos[w]:]
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
            order.append(v)
            path.pop()
            del pos[v]
    return order, None
