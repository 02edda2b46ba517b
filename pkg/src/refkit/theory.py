"""Multi-sorted first-order terms, contexts, and substitutions.

Everything downstream (judgments, proof states, rules) is built over this
layer.  Terms are sort-checked at construction time, contexts are ordered
telescopes of distinctly named variables, and substitutions are positional
tuples of terms aligned with their target context.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


class TheoryError(Exception):
    """Base class for kernel-level errors."""


class UnsortedTerm(TheoryError):
    """A term failed a sort or arity check."""


class ContextMismatch(TheoryError):
    """A context, variable, or substitution boundary did not line up."""


@dataclass(frozen=True)
class Sort:
    name: str

    def __repr__(self) -> str:
        return f"Sort({self.name!r})"


@dataclass(frozen=True)
class Operator:
    """An operator symbol with its argument sorts and result sort."""

    name: str
    arg_sorts: tuple[Sort, ...]
    result: Sort


@dataclass(frozen=True)
class Var:
    name: str
    sort: Sort


@dataclass(frozen=True)
class App:
    op: Operator
    args: tuple["Term", ...]

    def __post_init__(self) -> None:
        if len(self.args) != len(self.op.arg_sorts):
            raise UnsortedTerm(
                f"operator {self.op.name} expects {len(self.op.arg_sorts)} "
                f"arguments, got {len(self.args)}"
            )
        for arg, want in zip(self.args, self.op.arg_sorts):
            got = term_sort(arg)
            if got != want:
                raise UnsortedTerm(
                    f"argument of {self.op.name} has sort {got.name}, "
                    f"expected {want.name}"
                )


Term = Union[Var, App]


def term_sort(t: Term) -> Sort:
    match t:
        case Var(_, sort):
            return sort
        case App(op, _):
            return op.result
    raise UnsortedTerm(f"not a term: {t!r}")


def term_vars(t: Term) -> set[str]:
    """Names of the variables occurring in t."""
    match t:
        case Var(name, _):
            return {name}
        case App(_, args):
            out: set[str] = set()
            for a in args:
                out |= term_vars(a)
            return out
    raise UnsortedTerm(f"not a term: {t!r}")


@dataclass(frozen=True)
class Context:
    """An ordered list of distinctly named, sorted variables."""

    entries: tuple[tuple[str, Sort], ...] = ()

    def __post_init__(self) -> None:
        index: dict[str, Sort] = {}
        for name, sort in self.entries:
            if name in index:
                raise ContextMismatch(f"duplicate variable {name!r} in context")
            index[name] = sort
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_names", tuple(index))

    @classmethod
    def _extended(
        cls, base: "Context", extra: tuple[tuple[str, Sort], ...]
    ) -> "Context":
        # same distinctness guarantee as __init__, reusing the base index
        index = dict(base._index)
        for name, sort in extra:
            if name in index:
                raise ContextMismatch(f"duplicate variable {name!r} in context")
            index[name] = sort
        self = object.__new__(cls)
        object.__setattr__(self, "entries", base.entries + extra)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_names", tuple(index))
        return self

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    def lookup(self, name: str) -> Sort | None:
        return self._index.get(name)

    def extend(self, name: str, sort: Sort) -> "Context":
        return Context._extended(self, ((name, sort),))

    def __len__(self) -> int:
        return len(self.entries)


def ctx_concat(left: Context, right: Context) -> Context:
    # rejects any name collision between the halves, like the constructor
    return Context._extended(left, right.entries)


def check_term(ctx: Context, t: Term) -> None:
    """Check that t is well-sorted with all its variables bound in ctx."""
    match t:
        case Var(name, sort):
            found = ctx.lookup(name)
            if found is None:
                raise ContextMismatch(f"unbound variable {name!r}")
            if found != sort:
                raise UnsortedTerm(
                    f"variable {name!r} used at sort {sort.name}, "
                    f"bound at sort {found.name}"
                )
        case App(_, args):
            for a in args:
                check_term(ctx, a)
        case _:
            raise UnsortedTerm(f"not a term: {t!r}")


@dataclass(frozen=True)
class Substitution:
    """A sort-preserving map from target variables to terms over source.

    terms[i] is the replacement for target.entries[i].  Applying the
    substitution to a term over `target` yields a term over `source`.
    """

    source: Context
    target: Context
    terms: tuple[Term, ...]

    def __post_init__(self) -> None:
        if len(self.terms) != len(self.target.entries):
            raise ContextMismatch(
                f"substitution has {len(self.terms)} terms for "
                f"{len(self.target.entries)} target variables"
            )
        for t, (name, sort) in zip(self.terms, self.target.entries):
            got = term_sort(t)
            if got != sort:
                raise UnsortedTerm(
                    f"substituent for {name!r} has sort {got.name}, "
                    f"expected {sort.name}"
                )
            check_term(self.source, t)
        object.__setattr__(self, "_map", dict(zip(self.target.names, self.terms)))

    @classmethod
    def _trusted(
        cls, source: Context, target: Context, terms: tuple[Term, ...]
    ) -> "Substitution":
        # internal builders whose outputs are sorted by construction skip
        # the per-term re-check; everything observable matches __init__
        self = object.__new__(cls)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "_map", dict(zip(target.names, terms)))
        return self

    def lookup(self, name: str) -> Term | None:
        return self._map.get(name)


def subst_identity(ctx: Context) -> Substitution:
    return Substitution._trusted(
        ctx, ctx, tuple(Var(n, s) for n, s in ctx.entries)
    )


def subst_weaken(source: Context, target: Context) -> Substitution:
    """The substitution sending each target variable to itself over source.

    Every target entry must occur in source with the same sort; this covers
    both weakening (dropping a suffix) and projection (dropping a prefix).
    """
    terms = []
    for name, sort in target.entries:
        found = source.lookup(name)
        if found is None:
            raise ContextMismatch(f"variable {name!r} missing from source")
        if found != sort:
            raise UnsortedTerm(f"variable {name!r} changes sort under weakening")
        terms.append(Var(name, sort))
    return Substitution._trusted(source, target, tuple(terms))


def subst_apply(t: Term, s: Substitution) -> Term:
    """Carry a term over s.target to a term over s.source."""
    match t:
        case Var(name, _):
            replacement = s.lookup(name)
            if replacement is None:
                raise ContextMismatch(
                    f"variable {name!r} not covered by substitution"
                )
            return replacement
        case App(op, args):
            return App(op, tuple(subst_apply(a, s) for a in args))
    raise UnsortedTerm(f"not a term: {t!r}")


def subst_compose(s1: Substitution, s2: Substitution) -> Substitution:
    """Compose s1 : A -> B with s2 : B -> C into A -> C.

    Application order: applying the composite to a term over C first
    substitutes via s2 (landing over B), then via s1 (landing over A).
    """
    if s1.target != s2.source:
        raise ContextMismatch("substitution boundaries do not meet")
    return Substitution._trusted(
        s1.source, s2.target, tuple(subst_apply(t, s1) for t in s2.terms)
    )


def subst_extend_binder(
    s: Substitution,
    binder: tuple[tuple[str, Sort], ...],
    fresh_names: tuple[str, ...],
) -> Substitution:
    """Push a substitution under a binder, renaming the bound variables.

    Given s : A -> B and binder entries x1..xn over B, produce
    A, x1'..xn' -> B, x1..xn mapping each xi to its renamed copy xi'.
    """
    if len(binder) != len(fresh_names):
        raise ContextMismatch("binder and fresh name list differ in length")
    new_source = Context._extended(
        s.source,
        tuple((f, srt) for f, (_, srt) in zip(fresh_names, binder)),
    )
    new_target = Context._extended(s.target, tuple(binder))
    extra = tuple(Var(f, srt) for f, (_, srt) in zip(fresh_names, binder))
    return Substitution._trusted(new_source, new_target, s.terms + extra)


@dataclass(frozen=True)
class BoundTerm:
    """A context of bound variables packaged with a body they scope over.

    The body may be a single term or a whole substitution; either way the
    binder names are not significant, see alpha_eq.
    """

    binder: Context
    body: Union[Term, Substitution]


def fresh_name(base: str, avoid: set[str]) -> str:
    """A name not in avoid, derived from base by priming.

    Deterministic: the result depends only on base and avoid.  The prime
    character keeps generated names disjoint from user identifiers.
    """
    stem = base.split("'", 1)[0] or "x"
    if stem not in avoid:
        return stem
    i = 1
    while f"{stem}'{i}" in avoid:
        i += 1
    return f"{stem}'{i}"


def freshen_context(
    entries: tuple[tuple[str, Sort], ...], avoid: set[str]
) -> tuple[tuple[tuple[str, Sort], ...], dict[str, str]]:
    """Rename entries away from avoid, also keeping them mutually distinct.

    Returns the renamed entries and the old-name to new-name map.
    """
    taken = set(avoid)
    out = []
    rename: dict[str, str] = {}
    for name, sort in entries:
        new = fresh_name(name, taken)
        taken.add(new)
        out.append((new, sort))
        rename[name] = new
    return tuple(out), rename


def _canonical_binder(bt: BoundTerm) -> BoundTerm:
    canon = Context(
        tuple((f"@{i}", sort) for i, (_, sort) in enumerate(bt.binder.entries))
    )
    rename = Substitution(
        canon,
        bt.binder,
        tuple(Var(f"@{i}", sort) for i, (_, sort) in enumerate(bt.binder.entries)),
    )
    match bt.body:
        case Var(_, _) | App(_, _):
            return BoundTerm(canon, subst_apply(bt.body, rename))
        case Substitution(_, target, terms):
            new_terms = tuple(subst_apply(t, rename) for t in terms)
            return BoundTerm(canon, Substitution(canon, target, new_terms))
    raise TheoryError(f"unsupported bound body: {bt.body!r}")


def alpha_eq(a: object, b: object) -> bool:
    """Equality up to bound-variable renaming.

    Free variables are compared by name; the only binding construct at this
    level is BoundTerm, whose binders are renamed to a canonical spine.
    """
    if isinstance(a, BoundTerm) and isinstance(b, BoundTerm):
        if len(a.binder) != len(b.binder):
            return False
        return _canonical_binder(a) == _canonical_binder(b)
    return a == b


def render_term(t: Term) -> str:
    match t:
        case Var(name, _):
            return name
        case App(op, ()):
            return op.name
        case App(op, args):
            return f"{op.name}({', '.join(render_term(a) for a in args)})"
    raise UnsortedTerm(f"not a term: {t!r}")
