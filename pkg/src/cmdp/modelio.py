"""Text format for models plus JSON export of solver results.

A model file looks like::

    cmdp 1
    states: s0 s1 goal fail
    init: s0
    F: goal
    G: goal

    action s0 step reward 1
      -> s1 : 1/2
      -> fail : 1/2

Probabilities and rewards are exact integer or fraction literals; decimal
notation is rejected.  ``#`` starts a comment.
"""

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError, SemanticError
from .model import Action, Mdp, validate_mdp

_LITERAL = re.compile(r"^[+-]?\d+(/\d+)?$")
RESERVED_LABELS = ("tau", "iota", "stay")


@dataclass(frozen=True)
class ModelDocument:
    mdp: Mdp
    index: dict  # state name -> index


def _fraction(token, lineno, line):
    if not _LITERAL.match(token):
        col = line.find(token) + 1
        raise ParseError(lineno, max(col, 1),
                         "expected an integer or fraction literal, got %r" % token)
    if "/" in token:
        num, den = token.split("/")
        if int(den) == 0:
            col = line.find(token) + 1
            raise ParseError(lineno, max(col, 1), "zero denominator in %r" % token)
        return Fraction(int(num), int(den))
    return Fraction(int(token))


def parse_model(text):
    """Parse a model file into a ModelDocument."""
    lines = []
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if body.strip():
            lines.append((no, raw, body))
    if not lines:
        raise ParseError(1, 1, "empty input")

    pos = 0

    def take(expect_key=None):
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else 1
            raise ParseError(last, 1, "unexpected end of input"
                             + (" (wanted %r)" % expect_key if expect_key else ""))
        item = lines[pos]
        pos += 1
        return item

    no, raw, body = take("cmdp header")
    if body.split() != ["cmdp", "1"]:
        raise ParseError(no, 1, "expected header 'cmdp 1'")

    def key_line(key):
        no, raw, body = take(key)
        stripped = body.strip()
        if not stripped.startswith(key + ":"):
            raise ParseError(no, 1, "expected a '%s:' line" % key)
        return no, raw, stripped[len(key) + 1:].split()

    no, raw, names = key_line("states")
    if not names:
        raise ParseError(no, 1, "no states listed")
    index = {}
    for name in names:
        if name in index:
            raise SemanticError("state %s listed twice" % name)
        index[name] = len(index)

    def lookup(name, lineno, line):
        if name not in index:
            raise SemanticError("unknown state %s (line %d)" % (name, lineno))
        return index[name]

    no, raw, init_names = key_line("init")
    if len(init_names) != 1:
        raise ParseError(no, 1, "init wants exactly one state")
    init = lookup(init_names[0], no, raw)

    no, raw, f_names = key_line("F")
    if not f_names:
        raise SemanticError("F must not be empty")
    f_set = frozenset(lookup(x, no, raw) for x in f_names)

    no, raw, g_names = key_line("G")
    if not g_names:
        raise SemanticError("G must not be empty")
    g_set = frozenset(lookup(x, no, raw) for x in g_names)

    actions = [[] for _ in index]
    while pos < len(lines):
        no, raw, body = take()
        parts = body.split()
        if parts[0] != "action" or len(parts) != 5 or parts[3] != "reward":
            raise ParseError(no, 1,
                             "expected 'action <state> <label> reward <literal>'")
        s = lookup(parts[1], no, raw)
        label = parts[2]
        if label in RESERVED_LABELS:
            raise SemanticError("action label %s is reserved (line %d)" % (label, no))
        reward = _fraction(parts[4], no, raw)
        dist = []
        while pos < len(lines) and lines[pos][2].strip().startswith("->"):
            dno, draw, dbody = take()
            dparts = dbody.strip()[2:].split(":")
            if len(dparts) != 2 or not dparts[0].split() or not dparts[1].split():
                raise ParseError(dno, 1, "expected '-> <state> : <literal>'")
            tname = dparts[0].split()
            pname = dparts[1].split()
            if len(tname) != 1 or len(pname) != 1:
                raise ParseError(dno, 1, "expected '-> <state> : <literal>'")
            t = lookup(tname[0], dno, draw)
            p = _fraction(pname[0], dno, draw)
            dist.append((t, p))
        if not dist:
            raise ParseError(no, 1, "action %s has no transitions" % label)
        if label in (a.label for a in actions[s]):
            raise SemanticError("state %s has two actions labelled %s (line %d)"
                                % (parts[1], label, no))
        actions[s].append(Action(label, reward, tuple(dist)))

    m = Mdp(states=tuple(index),
            actions=tuple(tuple(acts) for acts in actions),
            init=init, f_set=f_set, g_set=g_set)
    problems = validate_mdp(m, allow_negative_rewards=True)
    if problems:
        raise SemanticError("; ".join(problems))
    return ModelDocument(m, index)


def emit_model(m):
    """Serialize a model back to the text format (deterministic output)."""
    out = ["cmdp 1"]
    out.append("states: " + " ".join(m.states))
    out.append("init: " + m.states[m.init])
    out.append("F: " + " ".join(m.states[s] for s in sorted(m.f_set)))
    out.append("G: " + " ".join(m.states[s] for s in sorted(m.g_set)))
    for s in range(m.n):
        for a in m.actions[s]:
            out.append("")
            out.append("action %s %s reward %s" % (m.states[s], a.label, a.reward))
            for t, p in a.dist:
                out.append("  -> %s : %s" % (m.states[t], p))
    return "\n".join(out) + "\n"


def _rational_json(x):
    return {"num": str(x.numerator), "den": str(x.denominator)}


def export_result(answer, scheduler):
    """JSON text for a solved instance (value, scheduler, run statistics)."""
    names = answer.canonical.mdp.states
    acts = answer.canonical.mdp.actions
    decisions = []
    for (s, level), i in sorted(scheduler.table.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        decisions.append({"state": names[s], "level": int(level),
                          "action": acts[s][i].label})
    tail = {}
    for s in sorted(scheduler.tail):
        tail[names[s]] = acts[s][scheduler.tail[s]].label
    doc = {
        "value": _rational_json(answer.value),
        "saturation_point": scheduler.saturation,
        "decisions": decisions,
        "tail": tail,
        "upper_bound": _rational_json(answer.upper_bound),
        "threshold_calls": answer.threshold_calls,
    }
    return json.dumps(doc, indent=2) + "\n"
