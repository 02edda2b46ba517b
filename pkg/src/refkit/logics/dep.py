"""Dependent logic: truth goals whose evidence feeds later goals.

Propositions include a dependent pair former sig(x. B, A) whose body B
may mention the evidence x of A.  Internally the bound occurrence is a
reserved slot variable that user identifiers cannot collide with; the
pack/unpack helpers move between that encoding and BoundTerm.

One known encoding limit: the body of a sig nested inside another sig
cannot mention the outer binder, since the inner slot shadows it.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..judgment import JudgmentStructure, require_boundary
from ..rule import Rule, clause_rule
from ..state import Bot, Subgoals, TeleCons, TeleNil
from ..tactic import (
    Tactic,
    all_mt,
    from_rule,
    id_tactic,
    orelse,
    repeat_multitactic,
    seq,
)
from ..theory import (
    App,
    BoundTerm,
    Context,
    Operator,
    Sort,
    Substitution,
    Term,
    TheoryError,
    UnsortedTerm,
    Var,
    check_term,
    ctx_concat,
    fresh_name,
    subst_apply,
    term_sort,
    term_vars,
)

PROP = Sort("prop")
EXP = Sort("exp")

TOP_OP = Operator("top", (), PROP)
OR_OP = Operator("or", (PROP, PROP), PROP)
EQ_OP = Operator("eq", (EXP, EXP), PROP)
SIG_OP = Operator("sig", (PROP, PROP), PROP)

TT_OP = Operator("tt", (), EXP)
REFL_OP = Operator("refl", (), EXP)
INL_OP = Operator("inl", (EXP,), EXP)
PAIR_OP = Operator("pair", (EXP, EXP), EXP)

# the bound occurrence inside a sig body; '$' is outside the identifier
# alphabet, so user terms can never capture or mention it
SLOT = Var("$x", EXP)


def top() -> Term:
    return App(TOP_OP, ())


def or_(a: Term, b: Term) -> Term:
    return App(OR_OP, (a, b))


def eq(a: Term, b: Term) -> Term:
    return App(EQ_OP, (a, b))


def tt() -> Term:
    return App(TT_OP, ())


def refl() -> Term:
    return App(REFL_OP, ())


def inl(e: Term) -> Term:
    return App(INL_OP, (e,))


def pair(a: Term, b: Term) -> Term:
    return App(PAIR_OP, (a, b))


def _replace_var(t: Term, name: str, replacement: Term) -> Term:
    match t:
        case Var(n, _):
            return replacement if n == name else t
        case App(op, args) if op == SIG_OP:
            a, b = args
            new_a = _replace_var(a, name, replacement)
            # the inner slot shadows: never rewrite "$x" under another sig
            new_b = b if name == SLOT.name else _replace_var(b, name, replacement)
            return App(op, (new_a, new_b))
        case App(op, args):
            return App(op, tuple(_replace_var(a, name, replacement) for a in args))
    raise TheoryError(f"not a term: {t!r}")


def pack_sig(bound: BoundTerm, a: Term) -> Term:
    """Build a sig proposition from a one-variable body and its base."""
    if len(bound.binder) != 1 or not isinstance(bound.body, (Var, App)):
        raise UnsortedTerm("sig body must bind exactly one variable")
    (name, sort), = bound.binder.entries
    if sort != EXP:
        raise UnsortedTerm("the sig binder ranges over evidence")
    return App(SIG_OP, (a, _replace_var(bound.body, name, SLOT)))


def unpack_sig(t: Term, avoid: set[str]) -> tuple[BoundTerm, Term]:
    """Expose a sig body as a BoundTerm with a printable binder name."""
    if not (isinstance(t, App) and t.op == SIG_OP):
        raise UnsortedTerm("not a sig proposition")
    a, b = t.args
    name = fresh_name("x", avoid | term_vars(b))
    body = _replace_var(b, SLOT.name, Var(name, EXP))
    return BoundTerm(Context(((name, EXP),)), body), a


def slot_extend(ctx: Context) -> Context:
    entries = tuple(e for e in ctx.entries if e[0] != SLOT.name)
    return Context(entries + ((SLOT.name, EXP),))


def _slot_subst(s: Substitution) -> Substitution:
    """Push a substitution under a sig binder, fixing the slot."""
    kept = tuple(
        (t, e)
        for t, e in zip(s.terms, s.target.entries)
        if e[0] != SLOT.name
    )
    return Substitution(
        slot_extend(s.source),
        Context(tuple(e for _, e in kept) + ((SLOT.name, EXP),)),
        tuple(t for t, _ in kept) + (SLOT,),
    )


def check_prop(ctx: Context, t: Term) -> None:
    match t:
        case Var(_, _):
            check_term(ctx, t)
        case App(op, (a, b)) if op == SIG_OP:
            check_prop(ctx, a)
            check_prop(slot_extend(ctx), b)
        case App(op, args):
            for arg, sort in zip(args, op.arg_sorts):
                if sort == PROP:
                    check_prop(ctx, arg)
                else:
                    check_term(ctx, arg)
        case _:
            raise TheoryError(f"not a term: {t!r}")


def subst_prop(t: Term, s: Substitution) -> Term:
    match t:
        case Var(_, _):
            return subst_apply(t, s)
        case App(op, (a, b)) if op == SIG_OP:
            return App(op, (subst_prop(a, s), subst_prop(b, _slot_subst(s))))
        case App(op, args):
            return App(
                op,
                tuple(
                    subst_prop(a, s) if srt == PROP else subst_apply(a, s)
                    for a, srt in zip(args, op.arg_sorts)
                ),
            )
    raise TheoryError(f"not a term: {t!r}")


@dataclass(frozen=True)
class TruthGoal:
    context: Context
    prop: Term


TRUTH_OUTPUT = Context((("e", EXP),))


class DepStructure(JudgmentStructure):
    def check(self, judgment) -> None:
        match judgment:
            case TruthGoal(ctx, prop):
                check_prop(ctx, prop)
                if term_sort(prop) != PROP:
                    raise UnsortedTerm("truth goals are about propositions")
            case _:
                raise TheoryError(f"unknown judgment: {judgment!r}")

    def subst(self, judgment, s: Substitution):
        require_boundary(judgment, s)
        match judgment:
            case TruthGoal(_, prop):
                return TruthGoal(s.source, subst_prop(prop, s))
        raise TheoryError(f"unknown judgment: {judgment!r}")

    def output(self, judgment) -> Context:
        return TRUTH_OUTPUT

    def render(self, judgment) -> str:
        return f"true {render_prop(judgment.prop)}"


def render_prop(t: Term) -> str:
    match t:
        case Var(name, _):
            return name
        case App(op, ()) :
            return op.name
        case App(op, _) if op == SIG_OP:
            bound, a = unpack_sig(t, set())
            (name, _), = bound.binder.entries
            return f"sig({name}. {render_prop(bound.body)}, {render_prop(a)})"
        case App(op, args):
            parts = ", ".join(
                render_prop(a) if srt == PROP else render_exp(a)
                for a, srt in zip(args, op.arg_sorts)
            )
            return f"{op.name}({parts})"
    raise TheoryError(f"not a proposition: {t!r}")


def render_exp(t: Term) -> str:
    match t:
        case Var(name, _):
            return name
        case App(op, ()):
            return op.name
        case App(op, args):
            return f"{op.name}({', '.join(render_exp(a) for a in args)})"
    raise TheoryError(f"not an expression: {t!r}")


STRUCTURE = DepStructure()


def _complete(ctx: Context, term: Term) -> Subgoals:
    return Subgoals(
        TeleNil(ctx), Substitution(ctx, TRUTH_OUTPUT, (term,))
    )


def _prop_is(op: Operator):
    return lambda ctx, g: (
        isinstance(g, TruthGoal)
        and isinstance(g.prop, App)
        and g.prop.op == op
    )


def _prop_var(ctx: Context, g) -> bool:
    return isinstance(g, TruthGoal) and isinstance(g.prop, Var)


def _bot(ctx: Context, g) -> Bot:
    return Bot(ctx, TRUTH_OUTPUT)


def _top_i_build(ctx: Context, g: TruthGoal) -> Subgoals:
    return _complete(ctx, tt())


def _or_i1_build(ctx: Context, g: TruthGoal) -> Subgoals:
    left, _ = g.prop.args
    name = fresh_name("x", set(ctx.names))
    flat = ctx_concat(ctx, Context(((name, EXP),)))
    tele = TeleCons((name,), TruthGoal(ctx, left), TeleNil(flat))
    validation = Substitution(flat, TRUTH_OUTPUT, (inl(Var(name, EXP)),))
    return Subgoals(tele, validation)


def _eq_refl_sides_equal(ctx: Context, g) -> bool:
    if not _prop_is(EQ_OP)(ctx, g):
        return False
    a, b = g.prop.args
    return a == b


def _eq_refl_open(ctx: Context, g) -> bool:
    if not _prop_is(EQ_OP)(ctx, g):
        return False
    a, b = g.prop.args
    return bool(term_vars(a) | term_vars(b))


def _sig_i_build(ctx: Context, g: TruthGoal) -> Subgoals:
    a, b = g.prop.args
    m = fresh_name("m", set(ctx.names))
    ctx_m = ctx_concat(ctx, Context(((m, EXP),)))
    n = fresh_name("n", set(ctx_m.names))
    flat = ctx_concat(ctx_m, Context(((n, EXP),)))
    open_slot = Substitution(
        ctx_m,
        slot_extend(ctx),
        tuple(Var(nm, srt) for nm, srt in ctx.entries) + (Var(m, EXP),),
    )
    body = subst_prop(b, open_slot)
    tele = TeleCons(
        (m,),
        TruthGoal(ctx, a),
        TeleCons((n,), TruthGoal(ctx_m, body), TeleNil(flat)),
    )
    validation = Substitution(
        flat, TRUTH_OUTPUT, (pair(Var(m, EXP), Var(n, EXP)),)
    )
    return Subgoals(tele, validation)


TOP_I = clause_rule(
    STRUCTURE,
    "top_i",
    (
        (_prop_is(TOP_OP), _top_i_build),
        (_prop_var, _bot),
    ),
)

OR_I1 = clause_rule(
    STRUCTURE,
    "or_i1",
    (
        (_prop_is(OR_OP), _or_i1_build),
        (_prop_var, _bot),
    ),
)

EQ_REFL = clause_rule(
    STRUCTURE,
    "eq_refl",
    (
        (_eq_refl_sides_equal, lambda ctx, g: _complete(ctx, refl())),
        (_eq_refl_open, _bot),
        (_prop_var, _bot),
    ),
)

SIG_I = clause_rule(
    STRUCTURE,
    "sig_i",
    (
        (_prop_is(SIG_OP), _sig_i_build),
        (_prop_var, _bot),
    ),
)

RULES: dict[str, Rule] = {
    "top_i": TOP_I,
    "or_i1": OR_I1,
    "eq_refl": EQ_REFL,
    "sig_i": SIG_I,
}

AUTO_SCRIPT = "id; all(top_i | or_i1 | eq_refl | sig_i)*"


def aux_tactic() -> Tactic:
    tac = from_rule(TOP_I)
    for rule in (OR_I1, EQ_REFL, SIG_I):
        tac = orelse(tac, from_rule(rule))
    return tac


def auto() -> Tactic:
    return seq(
        STRUCTURE,
        id_tactic(STRUCTURE),
        repeat_multitactic(STRUCTURE, all_mt(STRUCTURE, aux_tactic())),
    )


def prove_oracle(t: Term) -> Term | None:
    """Evidence the packaged rules can find for a closed proposition.

    Mirrors the rule set, including its one-sidedness: a disjunction is
    only ever proved on the left.
    """
    match t:
        case App(op, ()) if op == TOP_OP:
            return tt()
        case App(op, (a, _)) if op == OR_OP:
            ev = prove_oracle(a)
            return inl(ev) if ev is not None else None
        case App(op, (a, b)) if op == EQ_OP:
            return refl() if a == b else None
        case App(op, (a, b)) if op == SIG_OP:
            ev_a = prove_oracle(a)
            if ev_a is None:
                return None
            ev_b = prove_oracle(_replace_var(b, SLOT.name, ev_a))
            return pair(ev_a, ev_b) if ev_b is not None else None
    return None


def parse_goal(text: str):
    """Parse `true <prop>` over the empty context."""
    tokens = _tokenize(text)
    if not tokens or tokens[0] != "true":
        raise ValueError("expected: true <proposition>")
    prop, rest = _parse_prop(tokens[1:], {})
    if rest:
        raise ValueError(f"trailing input after proposition: {rest[0]!r}")
    return TruthGoal(Context(), prop)


def _tokenize(text: str) -> list[str]:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "(),.":
            out.append(ch)
            i += 1
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(text[i:j])
            i = j
        else:
            raise ValueError(f"bad character {ch!r} in goal")
    return out


def _parse_prop(tokens: list[str], scope: dict[str, Sort]):
    if not tokens:
        raise ValueError("expected a proposition")
    head, rest = tokens[0], tokens[1:]
    if head == "top":
        return top(), rest
    if head == "or":
        (a, b), rest = _parse_args(rest, scope, (_parse_prop, _parse_prop))
        return or_(a, b), rest
    if head == "eq":
        (a, b), rest = _parse_args(rest, scope, (_parse_exp, _parse_exp))
        return eq(a, b), rest
    if head == "sig":
        if not rest or rest[0] != "(":
            raise ValueError("sig needs parenthesized arguments")
        rest = rest[1:]
        if len(rest) < 2 or not rest[0].isidentifier() or rest[1] != ".":
            raise ValueError("sig needs a binder: sig(x. body, base)")
        binder = rest[0]
        inner = dict(scope)
        inner[binder] = EXP
        body, rest = _parse_prop(rest[2:], inner)
        if not rest or rest[0] != ",":
            raise ValueError("sig needs two arguments")
        base, rest = _parse_prop(rest[1:], scope)
        if not rest or rest[0] != ")":
            raise ValueError("unclosed sig")
        return (
            pack_sig(BoundTerm(Context(((binder, EXP),)), body), base),
            rest[1:],
        )
    raise ValueError(f"unknown proposition form {head!r}")


def _parse_exp(tokens: list[str], scope: dict[str, Sort]):
    if not tokens:
        raise ValueError("expected an expression")
    head, rest = tokens[0], tokens[1:]
    if head == "tt":
        return tt(), rest
    if head == "refl":
        return refl(), rest
    if head == "inl":
        (a,), rest = _parse_args(rest, scope, (_parse_exp,))
        return inl(a), rest
    if head == "pair":
        (a, b), rest = _parse_args(rest, scope, (_parse_exp, _parse_exp))
        return pair(a, b), rest
    if head in scope:
        return Var(head, scope[head]), rest
    raise ValueError(f"unknown or unbound name {head!r}")


def _parse_args(tokens, scope, parsers):
    if not tokens or tokens[0] != "(":
        raise ValueError("expected parenthesized arguments")
    rest = tokens[1:]
    values = []
    for k, parse in enumerate(parsers):
        value, rest = parse(rest, scope)
        values.append(value)
        want = "," if k + 1 < len(parsers) else ")"
        if not rest or rest[0] != want:
            raise ValueError(f"expected {want!r} in argument list")
        rest = rest[1:]
    return tuple(values), rest
