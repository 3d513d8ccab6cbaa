"""Core syntax of a synchronous multiparty session calculus.

Five term categories live here: expressions, processes, multiparty sessions,
session types and global types.  Every node is a frozen dataclass with
structural equality and hashing, so terms can be memoised and used as dict
keys freely.  Constructors enforce the well-formedness conditions the rest of
the package relies on:

  * branch lists are non-empty, label-distinct and kept sorted by label;
  * recursion is guarded (the bound variable cannot be reached from the
    binder without crossing a communication prefix);
  * nobody communicates with themselves (global types and session entries).

Recursion is equi-recursive: a binder is identified with its unfolding.  The
helpers at the bottom (substitution, unfolding, regular-tree equality) give
that identification operational teeth.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Union

from .errors import DuplicateLabel, SelfCommunication, UnguardedRecursion

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _require_ident(name: str, what: str) -> None:
    if not _IDENT.match(name):
        raise ValueError(f"bad {what}: {name!r}")


class Sort(enum.Enum):
    NAT = "nat"
    INT = "int"
    BOOL = "bool"

    def __str__(self) -> str:
        return self.value


class _Shown:
    """Mixin routing str() through the canonical pretty printer."""

    def __str__(self) -> str:
        from . import printer

        return printer.show(self)


# --------------------------------------------------------------------------
# Expressions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Var(_Shown):
    name: str

    def __post_init__(self) -> None:
        _require_ident(self.name, "variable")


@dataclass(frozen=True)
class NatLit(_Shown):
    value: int

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError("natural literal must be non-negative")


@dataclass(frozen=True)
class IntLit(_Shown):
    value: int


@dataclass(frozen=True)
class BoolLit(_Shown):
    value: bool


@dataclass(frozen=True)
class Succ(_Shown):
    arg: "Expr"


@dataclass(frozen=True)
class Neg(_Shown):
    arg: "Expr"


@dataclass(frozen=True)
class Not(_Shown):
    arg: "Expr"


@dataclass(frozen=True)
class Choice(_Shown):
    """Nondeterministic choice between two expressions."""

    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Gt(_Shown):
    left: "Expr"
    right: "Expr"


Expr = Union[Var, NatLit, IntLit, BoolLit, Succ, Neg, Not, Choice, Gt]


def int_literal(value: int) -> Expr:
    """Literal with the minimal numeric tag: non-negatives are naturals."""
    return NatLit(value) if value >= 0 else IntLit(value)


# --------------------------------------------------------------------------
# Processes
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Input(_Shown):
    partner: str
    label: str
    var: str
    body: "Process"

    def __post_init__(self) -> None:
        _require_ident(self.partner, "participant")
        _require_ident(self.label, "label")
        _require_ident(self.var, "variable")


@dataclass(frozen=True)
class Output(_Shown):
    partner: str
    label: str
    payload: Expr
    body: "Process"

    def __post_init__(self) -> None:
        _require_ident(self.partner, "participant")
        _require_ident(self.label, "label")


@dataclass(frozen=True)
class ExtChoice(_Shown):
    """External choice.  Kept flat: no branch is itself an ExtChoice."""

    branches: tuple["Process", ...]

    def __post_init__(self) -> None:
        if len(self.branches) < 2:
            raise ValueError("external choice needs at least two branches")
        if any(isinstance(b, ExtChoice) for b in self.branches):
            raise ValueError("external choice must be flattened")


@dataclass(frozen=True)
class Cond(_Shown):
    guard: Expr
    then: "Process"
    orelse: "Process"


@dataclass(frozen=True)
class Rec(_Shown):
    var: str
    body: "Process"

    def __post_init__(self) -> None:
        _require_ident(self.var, "process variable")
        # mu X.X (also via nested binders, mu X.mu Y.X) is not a process.
        binders = {self.var}
        node: Process = self.body
        while isinstance(node, Rec):
            binders.add(node.var)
            node = node.body
        if isinstance(node, ProcVar) and node.name in binders:
            raise UnguardedRecursion(f"mu {self.var} reaches {node.name} unguarded")


@dataclass(frozen=True)
class ProcVar(_Shown):
    name: str

    def __post_init__(self) -> None:
        _require_ident(self.name, "process variable")


@dataclass(frozen=True)
class Inact(_Shown):
    pass


Process = Union[Input, Output, ExtChoice, Cond, Rec, ProcVar, Inact]


def ext_choice(branches: Iterable["Process"]) -> "Process":
    """Flatten nested choices; a single branch is the branch itself."""
    flat: list[Process] = []
    for b in branches:
        if isinstance(b, ExtChoice):
            flat.extend(b.branches)
        else:
            flat.append(b)
    if not flat:
        raise ValueError("empty external choice")
    if len(flat) == 1:
        return flat[0]
    return ExtChoice(tuple(flat))


# --------------------------------------------------------------------------
# Multiparty sessions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Session(_Shown):
    """A parallel composition of located processes, keyed by participant."""

    parts: tuple[tuple[str, "Process"], ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError("a session needs at least one participant")
        names = [p for p, _ in self.parts]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate participant in session: {names}")
        object.__setattr__(self, "parts", tuple(sorted(self.parts)))
        for p, proc in self.parts:
            _require_ident(p, "participant")
            if p in participants_of(proc):
                raise SelfCommunication(f"participant {p} communicates with itself")

    def mapping(self) -> dict[str, "Process"]:
        return dict(self.parts)


def session(entries: dict[str, "Process"]) -> Session:
    return Session(tuple(sorted(entries.items())))


# --------------------------------------------------------------------------
# Session types
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TBranch:
    label: str
    sort: Sort
    cont: "SessionType"

    def __post_init__(self) -> None:
        _require_ident(self.label, "label")


def _sorted_branches(branches: tuple, what: str) -> tuple:
    if not branches:
        raise ValueError(f"{what} needs at least one branch")
    labels = [b.label for b in branches]
    if len(set(labels)) != len(labels):
        raise DuplicateLabel(f"{what} repeats a label: {sorted(labels)}")
    return tuple(sorted(branches, key=lambda b: b.label))


@dataclass(frozen=True)
class TIn(_Shown):
    """Intersection of input prefixes, all from the same sender."""

    sender: str
    branches: tuple[TBranch, ...]

    def __post_init__(self) -> None:
        _require_ident(self.sender, "participant")
        object.__setattr__(self, "branches", _sorted_branches(self.branches, "intersection"))


@dataclass(frozen=True)
class TOut(_Shown):
    """Union of output prefixes, all towards the same receiver."""

    receiver: str
    branches: tuple[TBranch, ...]

    def __post_init__(self) -> None:
        _require_ident(self.receiver, "participant")
        object.__setattr__(self, "branches", _sorted_branches(self.branches, "union"))


@dataclass(frozen=True)
class TRec(_Shown):
    var: str
    body: "SessionType"

    def __post_init__(self) -> None:
        _require_ident(self.var, "type variable")
        binders = {self.var}
        node: SessionType = self.body
        while isinstance(node, TRec):
            binders.add(node.var)
            node = node.body
        if isinstance(node, TVar) and node.name in binders:
            raise UnguardedRecursion(f"mu {self.var} reaches {node.name} unguarded")


@dataclass(frozen=True)
class TVar(_Shown):
    name: str

    def __post_init__(self) -> None:
        _require_ident(self.name, "type variable")


@dataclass(frozen=True)
class TEnd(_Shown):
    pass


SessionType = Union[TIn, TOut, TRec, TVar, TEnd]


# --------------------------------------------------------------------------
# Global types
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GBranch:
    label: str
    sort: Sort
    cont: "GlobalType"

    def __post_init__(self) -> None:
        _require_ident(self.label, "label")


@dataclass(frozen=True)
class GComm(_Shown):
    sender: str
    receiver: str
    branches: tuple[GBranch, ...]

    def __post_init__(self) -> None:
        _require_ident(self.sender, "participant")
        _require_ident(self.receiver, "participant")
        if self.sender == self.receiver:
            raise SelfCommunication(f"{self.sender} -> {self.receiver}")
        object.__setattr__(self, "branches", _sorted_branches(self.branches, "communication"))


@dataclass(frozen=True)
class GRec(_Shown):
    var: str
    body: "GlobalType"

    def __post_init__(self) -> None:
        _require_ident(self.var, "type variable")
        binders = {self.var}
        node: GlobalType = self.body
        while isinstance(node, GRec):
            binders.add(node.var)
            node = node.body
        if isinstance(node, GVar) and node.name in binders:
            raise UnguardedRecursion(f"mu {self.var} reaches {node.name} unguarded")


@dataclass(frozen=True)
class GVar(_Shown):
    name: str

    def __post_init__(self) -> None:
        _require_ident(self.name, "type variable")


@dataclass(frozen=True)
class GEnd(_Shown):
    pass


GlobalType = Union[GComm, GRec, GVar, GEnd]


# --------------------------------------------------------------------------
# Free variables and participants
# --------------------------------------------------------------------------


def free_expr_vars(e: Expr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset({e.name})
    if isinstance(e, (NatLit, IntLit, BoolLit)):
        return frozenset()
    if isinstance(e, (Succ, Neg, Not)):
        return free_expr_vars(e.arg)
    if isinstance(e, (Choice, Gt)):
        return free_expr_vars(e.left) | free_expr_vars(e.right)
    raise TypeError(f"not an expression: {e!r}")


def free_expr_vars_proc(p: Process) -> frozenset[str]:
    if isinstance(p, Input):
        return free_expr_vars_proc(p.body) - {p.var}
    if isinstance(p, Output):
        return free_expr_vars(p.payload) | free_expr_vars_proc(p.body)
    if isinstance(p, ExtChoice):
        out: frozenset[str] = frozenset()
        for b in p.branches:
            out |= free_expr_vars_proc(b)
        return out
    if isinstance(p, Cond):
        return free_expr_vars(p.guard) | free_expr_vars_proc(p.then) | free_expr_vars_proc(p.orelse)
    if isinstance(p, Rec):
        return free_expr_vars_proc(p.body)
    if isinstance(p, (ProcVar, Inact)):
        return frozenset()
    raise TypeError(f"not a process: {p!r}")


def free_proc_vars(p: Process) -> frozenset[str]:
    if isinstance(p, (Input, Output)):
        return free_proc_vars(p.body)
    if isinstance(p, ExtChoice):
        out: frozenset[str] = frozenset()
        for b in p.branches:
            out |= free_proc_vars(b)
        return out
    if isinstance(p, Cond):
        return free_proc_vars(p.then) | free_proc_vars(p.orelse)
    if isinstance(p, Rec):
        return free_proc_vars(p.body) - {p.var}
    if isinstance(p, ProcVar):
        return frozenset({p.name})
    if isinstance(p, Inact):
        return frozenset()
    raise TypeError(f"not a process: {p!r}")


def free_type_vars(t: "SessionType | GlobalType") -> frozenset[str]:
    if isinstance(t, (TIn, TOut)):
        out: frozenset[str] = frozenset()
        for b in t.branches:
            out |= free_type_vars(b.cont)
        return out
    if isinstance(t, GComm):
        out = frozenset()
        for b in t.branches:
            out |= free_type_vars(b.cont)
        return out
    if isinstance(t, (TRec, GRec)):
        return free_type_vars(t.body) - {t.var}
    if isinstance(t, (TVar, GVar)):
        return frozenset({t.name})
    if isinstance(t, (TEnd, GEnd)):
        return frozenset()
    raise TypeError(f"not a type: {t!r}")


def participants_of(term) -> frozenset[str]:
    """Participants syntactically named by a process, session type, global
    type or session.  Recursion variables contribute nothing."""
    if isinstance(term, (Input, Output)):
        return frozenset({term.partner}) | participants_of(term.body)
    if isinstance(term, ExtChoice):
        out: frozenset[str] = frozenset()
        for b in term.branches:
            out |= participants_of(b)
        return out
    if isinstance(term, Cond):
        return participants_of(term.then) | participants_of(term.orelse)
    if isinstance(term, (Rec, TRec, GRec)):
        return participants_of(term.body)
    if isinstance(term, (ProcVar, Inact, TVar, TEnd, GVar, GEnd)):
        return frozenset()
    if isinstance(term, TIn):
        out = frozenset({term.sender})
        for b in term.branches:
            out |= participants_of(b.cont)
        return out
    if isinstance(term, TOut):
        out = frozenset({term.receiver})
        for b in term.branches:
            out |= participants_of(b.cont)
        return out
    if isinstance(term, GComm):
        out = frozenset({term.sender, term.receiver})
        for b in term.branches:
            out |= participants_of(b.cont)
        return out
    if isinstance(term, Session):
        out = frozenset()
        for p, proc in term.parts:
            out |= {p} | participants_of(proc)
        return out
    raise TypeError(f"no participants for: {term!r}")


# --------------------------------------------------------------------------
# Substitution
# --------------------------------------------------------------------------


def _fresh(base: str, taken: set[str]) -> str:
    i = 1
    while f"{base}_{i}" in taken:
        i += 1
    name = f"{base}_{i}"
    taken.add(name)
    return name


def subst_expr(e: Expr, name: str, value: Expr) -> Expr:
    if isinstance(e, Var):
        return value if e.name == name else e
    if isinstance(e, (NatLit, IntLit, BoolLit)):
        return e
    if isinstance(e, Succ):
        return Succ(subst_expr(e.arg, name, value))
    if isinstance(e, Neg):
        return Neg(subst_expr(e.arg, name, value))
    if isinstance(e, Not):
        return Not(subst_expr(e.arg, name, value))
    if isinstance(e, Choice):
        return Choice(subst_expr(e.left, name, value), subst_expr(e.right, name, value))
    if isinstance(e, Gt):
        return Gt(subst_expr(e.left, name, value), subst_expr(e.right, name, value))
    raise TypeError(f"not an expression: {e!r}")


def subst_expr_in_proc(p: Process, name: str, value: Expr) -> Process:
    """P[value/name].  `value` must be closed (it always is at runtime, where
    only value literals are substituted), so binders never capture it and
    shadowing just stops the walk."""
    if isinstance(p, Input):
        if p.var == name:
            return p
        return Input(p.partner, p.label, p.var, subst_expr_in_proc(p.body, name, value))
    if isinstance(p, Output):
        return Output(p.partner, p.label, subst_expr(p.payload, name, value),
                      subst_expr_in_proc(p.body, name, value))
    if isinstance(p, ExtChoice):
        return ExtChoice(tuple(subst_expr_in_proc(b, name, value) for b in p.branches))
    if isinstance(p, Cond):
        return Cond(subst_expr(p.guard, name, value),
                    subst_expr_in_proc(p.then, name, value),
                    subst_expr_in_proc(p.orelse, name, value))
    if isinstance(p, Rec):
        return Rec(p.var, subst_expr_in_proc(p.body, name, value))
    if isinstance(p, (ProcVar, Inact)):
        return p
    raise TypeError(f"not a process: {p!r}")


def subst_proc_var(p: Process, name: str, repl: Process) -> Process:
    """P[repl/name] over process variables, renaming binders that would
    capture a variable free in `repl`."""
    free_p = free_proc_vars(repl)
    free_e = free_expr_vars_proc(repl)

    def go(q: Process) -> Process:
        if isinstance(q, Input):
            if q.var in free_e:
                taken = set(free_e) | set(free_expr_vars_proc(q.body)) | {q.var}
                fresh = _fresh(q.var, taken)
                body = subst_expr_in_proc(q.body, q.var, Var(fresh))
                return Input(q.partner, q.label, fresh, go(body))
            return Input(q.partner, q.label, q.var, go(q.body))
        if isinstance(q, Output):
            return Output(q.partner, q.label, q.payload, go(q.body))
        if isinstance(q, ExtChoice):
            return ExtChoice(tuple(go(b) for b in q.branches))
        if isinstance(q, Cond):
            return Cond(q.guard, go(q.then), go(q.orelse))
        if isinstance(q, Rec):
            if q.var == name:
                return q
            if q.var in free_p:
                taken = set(free_p) | set(free_proc_vars(q.body)) | {q.var, name}
                fresh = _fresh(q.var, taken)
                body = subst_proc_var(q.body, q.var, ProcVar(fresh))
                return Rec(fresh, go(body))
            return Rec(q.var, go(q.body))
        if isinstance(q, ProcVar):
            return repl if q.name == name else q
        if isinstance(q, Inact):
            return q
        raise TypeError(f"not a process: {q!r}")

    return go(p)


def subst_type_var(t: SessionType, name: str, repl: SessionType) -> SessionType:
    free = free_type_vars(repl)

    def go(u: SessionType) -> SessionType:
        if isinstance(u, TIn):
            return TIn(u.sender, tuple(TBranch(b.label, b.sort, go(b.cont)) for b in u.branches))
        if isinstance(u, TOut):
            return TOut(u.receiver, tuple(TBranch(b.label, b.sort, go(b.cont)) for b in u.branches))
        if isinstance(u, TRec):
            if u.var == name:
                return u
            if u.var in free:
                taken = set(free) | set(free_type_vars(u.body)) | {u.var, name}
                fresh = _fresh(u.var, taken)
                body = subst_type_var(u.body, u.var, TVar(fresh))
                return TRec(fresh, go(body))
            return TRec(u.var, go(u.body))
        if isinstance(u, TVar):
            return repl if u.name == name else u
        if isinstance(u, TEnd):
            return u
        raise TypeError(f"not a session type: {u!r}")

    return go(t)


def subst_global_var(g: GlobalType, name: str, repl: GlobalType) -> GlobalType:
    free = free_type_vars(repl)

    def go(u: GlobalType) -> GlobalType:
        if isinstance(u, GComm):
            return GComm(u.sender, u.receiver,
                         tuple(GBranch(b.label, b.sort, go(b.cont)) for b in u.branches))
        if isinstance(u, GRec):
            if u.var == name:
                return u
            if u.var in free:
                taken = set(free) | set(free_type_vars(u.body)) | {u.var, name}
                fresh = _fresh(u.var, taken)
                body = subst_global_var(u.body, u.var, GVar(fresh))
                return GRec(fresh, go(body))
            return GRec(u.var, go(u.body))
        if isinstance(u, GVar):
            return repl if u.name == name else u
        if isinstance(u, GEnd):
            return u
        raise TypeError(f"not a global type: {u!r}")

    return go(g)


# --------------------------------------------------------------------------
# Unfolding
# --------------------------------------------------------------------------


def unfold(t):
    """One-step unfolding of a top-level recursion binder; anything else is
    returned unchanged."""
    if isinstance(t, TRec):
        return subst_type_var(t.body, t.var, t)
    if isinstance(t, GRec):
        return subst_global_var(t.body, t.var, t)
    if isinstance(t, Rec):
        return subst_proc_var(t.body, t.var, t)
    return t


def unfold_spine(t):
    """Unfold until the head is not a recursion binder.  Terminates because
    guardedness rules out mu-chains that feed themselves."""
    while isinstance(t, (TRec, GRec, Rec)):
        t = unfold(t)
    return t


# --------------------------------------------------------------------------
# Regular-tree equality
# --------------------------------------------------------------------------


def regular_tree_equal(a, b) -> bool:
    """Equality of the (possibly infinite) trees denoted by two session types
    or two global types.  Classic bisimulation: assume pairs equal on
    revisit.  Free type variables are rigid and equal only to themselves."""
    assumed: set[tuple] = set()

    def go(x, y) -> bool:
        x = unfold_spine(x)
        y = unfold_spine(y)
        if x is y or x == y:
            return True
        key = (x, y)
        if key in assumed:
            return True
        assumed.add(key)
        if isinstance(x, TIn) and isinstance(y, TIn):
            return x.sender == y.sender and _branches_eq(x.branches, y.branches)
        if isinstance(x, TOut) and isinstance(y, TOut):
            return x.receiver == y.receiver and _branches_eq(x.branches, y.branches)
        if isinstance(x, GComm) and isinstance(y, GComm):
            return (x.sender == y.sender and x.receiver == y.receiver
                    and _branches_eq(x.branches, y.branches))
        return False

    def _branches_eq(bs, cs) -> bool:
        if len(bs) != len(cs):
            return False
        for b, c in zip(bs, cs):  # both sides are label-sorted
            if b.label != c.label or b.sort != c.sort or not go(b.cont, c.cont):
                return False
        return True

    return go(a, b)


def subterm_closure(t) -> frozenset:
    """All spine-normalised terms reachable by descending through branches.
    Finite for any term built here; used for memoisation bounds."""
    seen: set = set()
    stack = [t]
    while stack:
        node = unfold_spine(stack.pop())
        if node in seen:
            continue
        seen.add(node)
        if isinstance(node, (TIn, TOut, GComm)):
            stack.extend(b.cont for b in node.branches)
    return frozenset(seen)


# --------------------------------------------------------------------------
# Alpha-renaming support
# --------------------------------------------------------------------------


def alpha_uniquify_global(g: GlobalType) -> GlobalType:
    """Rename recursion binders so no binder shadows another or collides with
    a free variable.  Projection relies on binder names being unique."""
    taken = set(free_type_vars(g))

    def go(u: GlobalType, env: dict[str, str]) -> GlobalType:
        if isinstance(u, GComm):
            return GComm(u.sender, u.receiver,
                         tuple(GBranch(b.label, b.sort, go(b.cont, env)) for b in u.branches))
        if isinstance(u, GRec):
            if u.var in taken:
                fresh = _fresh(u.var, taken)
            else:
                fresh = u.var
                taken.add(fresh)
            return GRec(fresh, go(u.body, {**env, u.var: fresh}))
        if isinstance(u, GVar):
            return GVar(env.get(u.name, u.name))
        if isinstance(u, GEnd):
            return u
        raise TypeError(f"not a global type: {u!r}")

    return go(g, {})
