"""Small-step interpreter for sessions and the stuck-state search.

States are kept in a congruence-canonical form: recursion at the head of a
process is unfolded, external choices are flattened and their summands sorted
by printed form, terminated participants are dropped, and a lone sentinel
entry stands in when everyone has terminated.  Two congruent sessions map to
the same canonical state, which is what lets the search deduplicate.

Reduction follows the synchronous rules literally: a communication fires only
when the sender's entire process is an output and the receiver's is an input
choice toward that sender offering the label; expressions evaluate by the
nondeterministic value relation, so one redex can yield several successors
(one per value), and a conditional forks on every boolean value of its guard.
An expression with no value contributes no successor at all, which is one of
the ways a session gets stuck.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from . import syntax as S
from .errors import FuelMisuse
from .exprs import BoolVal, eval_all, value_to_expr


@dataclass(frozen=True)
class Step:
    """One reduction: the rule applied, the printable trace line, and the
    structured pieces (source/target participant, label and value for
    communications; conditionals have source == target and no label)."""

    rule: str  # "r-comm" | "t-conditional" | "f-conditional"
    line: str
    source: str = ""
    target: str = ""
    label: str | None = None
    value: object = None

    def __str__(self) -> str:
        return self.line


@dataclass(frozen=True)
class StuckReport:
    verdict: str  # "terminated" | "stuckFound" | "noStuckWithinFuel" | "diverged"
    trace: tuple[Step, ...] = ()
    state: S.Session | None = None
    explored: int = 0


def _canon_proc(p: S.Process) -> S.Process:
    p = S.unfold_spine(p)
    if isinstance(p, S.ExtChoice):
        flat: list[S.Process] = []
        for q in p.branches:
            qn = _canon_proc(q)
            if isinstance(qn, S.ExtChoice):
                flat.extend(qn.branches)
            else:
                flat.append(qn)
        flat.sort(key=str)
        if len(flat) == 1:
            return flat[0]
        return S.ExtChoice(tuple(flat))
    return p


def canonicalize(m: S.Session) -> S.Session:
    """Normal form under structural congruence."""
    entries = []
    for role, proc in m.parts:
        cp = _canon_proc(proc)
        if isinstance(cp, S.Inact):
            continue
        entries.append((role, cp))
    if not entries:
        entries = [("_", S.Inact())]
    return S.Session(tuple(entries))


def is_terminated(m: S.Session) -> bool:
    return all(isinstance(p, S.Inact) for _, p in m.parts)


def _input_offers(p: S.Process):
    """The (label -> Input) table of an input choice, with its partner, or
    None when p is not an input choice."""
    if isinstance(p, S.Input):
        return p.partner, {p.label: p}
    if isinstance(p, S.ExtChoice):
        if not all(isinstance(q, S.Input) for q in p.branches):
            return None
        partners = {q.partner for q in p.branches}
        if len(partners) != 1:
            return None
        return partners.pop(), {q.label: q for q in p.branches}
    return None


def step_all(m: S.Session) -> list[tuple[Step, S.Session]]:
    """Every one-step successor of the canonical form of m."""
    m = canonicalize(m)
    mapping = dict(m.parts)
    out: list[tuple[Step, S.Session]] = []

    def successor(changes: dict) -> S.Session:
        entries = tuple((r, changes.get(r, p)) for r, p in m.parts)
        return canonicalize(S.Session(entries))

    for role, proc in m.parts:
        if isinstance(proc, S.Cond):
            for v in sorted(eval_all(proc.guard), key=str):
                if not isinstance(v, BoolVal):
                    continue
                branch = proc.then if v.value else proc.orelse
                rule = "t-conditional" if v.value else "f-conditional"
                step = Step(rule, f"{role} --if({v})--> {role}",
                            source=role, target=role, value=v)
                out.append((step, successor({role: branch})))
        elif isinstance(proc, S.Output):
            receiver = mapping.get(proc.partner)
            if receiver is None:
                continue
            offers = _input_offers(receiver)
            if offers is None or offers[0] != role:
                continue
            summand = offers[1].get(proc.label)
            if summand is None:
                continue
            for v in sorted(eval_all(proc.payload), key=str):
                body = S.subst_expr_in_proc(summand.body, summand.var,
                                            value_to_expr(v))
                step = Step("r-comm",
                            f"{role} --{proc.label}({v})--> {proc.partner}",
                            source=role, target=proc.partner,
                            label=proc.label, value=v)
                out.append((step, successor({role: proc.body,
                                             proc.partner: body})))
    return out


def stuck_search(m: S.Session, fuel: int) -> StuckReport:
    """Breadth-first search of the reachable state graph for a stuck state.

    Fuel bounds the number of distinct states explored.  Verdicts:
    stuckFound with a shortest trace; terminated when the whole (finite,
    acyclic) graph was explored without one; noStuckWithinFuel when the
    explored graph has a cycle, so runs exist that never terminate but none
    gets stuck; diverged when fuel ran out first.
    """
    if not isinstance(fuel, int) or fuel <= 0:
        raise FuelMisuse(f"fuel must be a positive integer, got {fuel!r}")
    start = canonicalize(m)
    parents: dict[S.Session, tuple[S.Session, Step] | None] = {start: None}
    edges: dict[S.Session, list[S.Session]] = {}
    queue = deque([start])
    explored = 0
    while queue:
        if explored >= fuel:
            return StuckReport("diverged", explored=explored)
        state = queue.popleft()
        explored += 1
        if is_terminated(state):
            edges[state] = []
            continue
        succs = step_all(state)
        if not succs:
            return StuckReport("stuckFound", _trace_to(parents, state),
                               state, explored)
        edges[state] = []
        for step, nxt in succs:
            edges[state].append(nxt)
            if nxt not in parents:
                parents[nxt] = (state, step)
                queue.append(nxt)
    if _has_cycle(edges):
        return StuckReport("noStuckWithinFuel", explored=explored)
    return StuckReport("terminated", explored=explored)


def _trace_to(parents, state) -> tuple[Step, ...]:
    steps: list[Step] = []
    cur = state
    while parents[cur] is not None:
        prev, step = parents[cur]
        steps.append(step)
        cur = prev
    steps.reverse()
    return tuple(steps)


def _has_cycle(edges: dict) -> bool:
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {s: WHITE for s in edges}
    for root in edges:
        if color[root] != WHITE:
            continue
        stack = [(root, iter(edges[root]))]
        color[root] = GRAY
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                c = color.get(nxt, BLACK)
                if c == GRAY:
                    return True
                if c == WHITE:
                    color[nxt] = GRAY
                    stack.append((nxt, iter(edges[nxt])))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
    return False


def run(m: S.Session, fuel: int) -> StuckReport:
    """Walk one maximal reduction path, taking the first successor in trace
    order at each state.  Reports terminated, stuckFound (of this path),
    or diverged when fuel steps were taken without finishing."""
    if not isinstance(fuel, int) or fuel <= 0:
        raise FuelMisuse(f"fuel must be a positive integer, got {fuel!r}")
    state = canonicalize(m)
    steps: list[Step] = []
    for _ in range(fuel):
        if is_terminated(state):
            return StuckReport("terminated", tuple(steps), state, len(steps))
        succs = step_all(state)
        if not succs:
            return StuckReport("stuckFound", tuple(steps), state, len(steps))
        step, state = min(succs, key=lambda sn: sn[0].line)
        steps.append(step)
    if is_terminated(state):
        return StuckReport("terminated", tuple(steps), state, len(steps))
    return StuckReport("diverged", tuple(steps), state, len(steps))
