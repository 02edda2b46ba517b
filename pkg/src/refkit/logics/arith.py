"""Arithmetic logic: cost-counting evaluation of + expressions.

Two judgment forms: `eval e` asks for a cost and a value, `add m n` asks
for a sum.  Evaluation of a + node costs one unit plus the costs of the
operands, so the cost output counts + nodes.
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
    repeat,
    repeat_multitactic,
    seq,
)
from ..theory import (
    App,
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
)

NUM = Sort("num")
EXP = Sort("exp")

NUM_OP = Operator("num", (NUM,), EXP)
PLUS_OP = Operator("+", (EXP, EXP), EXP)


def nat(n: int) -> Term:
    if n < 0:
        raise UnsortedTerm("numerals are naturals")
    return App(Operator(str(n), (), NUM), ())


def num(n: int) -> Term:
    return App(NUM_OP, (nat(n),))


def plus(a: Term, b: Term) -> Term:
    return App(PLUS_OP, (a, b))


def is_numeral(t: Term) -> bool:
    return (
        isinstance(t, App)
        and not t.args
        and t.op.result == NUM
        and t.op.name.isdigit()
    )


def numeral_value(t: Term) -> int:
    return int(t.op.name)


@dataclass(frozen=True)
class EvalGoal:
    context: Context
    expr: Term


@dataclass(frozen=True)
class AddGoal:
    context: Context
    lhs: Term
    rhs: Term


EVAL_OUTPUT = Context((("c", NUM), ("v", NUM)))
ADD_OUTPUT = Context((("n", NUM),))


class ArithStructure(JudgmentStructure):
    def check(self, judgment) -> None:
        match judgment:
            case EvalGoal(ctx, expr):
                check_term(ctx, expr)
                if term_sort(expr) != EXP:
                    raise UnsortedTerm("eval expects an expression")
            case AddGoal(ctx, lhs, rhs):
                check_term(ctx, lhs)
                check_term(ctx, rhs)
                if term_sort(lhs) != NUM or term_sort(rhs) != NUM:
                    raise UnsortedTerm("add expects numbers")
            case _:
                raise TheoryError(f"unknown judgment: {judgment!r}")

    def subst(self, judgment, s: Substitution):
        require_boundary(judgment, s)
        match judgment:
            case EvalGoal(_, expr):
                return EvalGoal(s.source, subst_apply(expr, s))
            case AddGoal(_, lhs, rhs):
                return AddGoal(s.source, subst_apply(lhs, s), subst_apply(rhs, s))
        raise TheoryError(f"unknown judgment: {judgment!r}")

    def output(self, judgment) -> Context:
        match judgment:
            case EvalGoal(_, _):
                return EVAL_OUTPUT
            case AddGoal(_, _, _):
                return ADD_OUTPUT
        raise TheoryError(f"unknown judgment: {judgment!r}")

    def render(self, judgment) -> str:
        match judgment:
            case EvalGoal(_, expr):
                return f"eval {render_expr(expr)}"
            case AddGoal(_, lhs, rhs):
                return f"add {render_num(lhs)} {render_num(rhs)}"
        raise TheoryError(f"unknown judgment: {judgment!r}")


def render_expr(t: Term) -> str:
    match t:
        case Var(name, _):
            return name
        case App(op, (arg,)) if op == NUM_OP:
            return f"num {render_num(arg)}"
        case App(op, (a, b)) if op == PLUS_OP:
            left = render_expr(a)
            right = render_expr(b)
            if isinstance(b, App) and b.op == PLUS_OP:
                right = f"({right})"
            return f"{left} + {right}"
    raise TheoryError(f"not an arith expression: {t!r}")


def render_num(t: Term) -> str:
    match t:
        case Var(name, _):
            return name
        case App(op, ()) :
            return op.name
    raise TheoryError(f"not a number term: {t!r}")


STRUCTURE = ArithStructure()


def _complete(ctx: Context, target: Context, terms: tuple[Term, ...]) -> Subgoals:
    return Subgoals(TeleNil(ctx), Substitution(ctx, target, terms))


def _num_eval_build(ctx: Context, goal: EvalGoal) -> Subgoals:
    literal = goal.expr.args[0]
    return _complete(ctx, EVAL_OUTPUT, (nat(0), literal))


def _plus_eval_build(ctx: Context, goal: EvalGoal) -> Subgoals:
    e1, e2 = goal.expr.args
    taken = set(ctx.names)
    picked = []
    for base in ("xc", "xv", "yc", "yv", "zc", "zc1", "zv"):
        name = fresh_name(base, taken)
        taken.add(name)
        picked.append(name)
    xc, xv, yc, yv, zc, zc1, zv = picked
    g0 = ctx
    g1 = ctx_concat(g0, Context(((xc, NUM), (xv, NUM))))
    g2 = ctx_concat(g1, Context(((yc, NUM), (yv, NUM))))
    g3 = ctx_concat(g2, Context(((zc, NUM),)))
    g4 = ctx_concat(g3, Context(((zc1, NUM),)))
    g5 = ctx_concat(g4, Context(((zv, NUM),)))
    tele = TeleCons(
        (xc, xv),
        EvalGoal(g0, e1),
        TeleCons(
            (yc, yv),
            EvalGoal(g1, e2),
            TeleCons(
                (zc,),
                AddGoal(g2, Var(xc, NUM), Var(yc, NUM)),
                TeleCons(
                    (zc1,),
                    AddGoal(g3, nat(1), Var(zc, NUM)),
                    TeleCons(
                        (zv,),
                        AddGoal(g4, Var(xv, NUM), Var(yv, NUM)),
                        TeleNil(g5),
                    ),
                ),
            ),
        ),
    )
    validation = Substitution(
        g5, EVAL_OUTPUT, (Var(zc1, NUM), Var(zv, NUM))
    )
    return Subgoals(tele, validation)


def _eval_goal_var(ctx: Context, goal) -> bool:
    return isinstance(goal, EvalGoal) and isinstance(goal.expr, Var)


NUM_EVAL = clause_rule(
    STRUCTURE,
    "num_eval",
    (
        (
            lambda ctx, g: isinstance(g, EvalGoal)
            and isinstance(g.expr, App)
            and g.expr.op == NUM_OP
            and is_numeral(g.expr.args[0]),
            _num_eval_build,
        ),
        (_eval_goal_var, lambda ctx, g: Bot(ctx, EVAL_OUTPUT)),
    ),
)

PLUS_EVAL = clause_rule(
    STRUCTURE,
    "plus_eval",
    (
        (
            lambda ctx, g: isinstance(g, EvalGoal)
            and isinstance(g.expr, App)
            and g.expr.op == PLUS_OP,
            _plus_eval_build,
        ),
        (_eval_goal_var, lambda ctx, g: Bot(ctx, EVAL_OUTPUT)),
    ),
)

ADD = clause_rule(
    STRUCTURE,
    "add",
    (
        (
            lambda ctx, g: isinstance(g, AddGoal)
            and is_numeral(g.lhs)
            and is_numeral(g.rhs),
            lambda ctx, g: _complete(
                ctx, ADD_OUTPUT, (nat(numeral_value(g.lhs) + numeral_value(g.rhs)),)
            ),
        ),
        (
            lambda ctx, g: isinstance(g, AddGoal),
            lambda ctx, g: Bot(ctx, ADD_OUTPUT),
        ),
    ),
)

RULES: dict[str, Rule] = {
    "num_eval": NUM_EVAL,
    "plus_eval": PLUS_EVAL,
    "add": ADD,
}


AUTO_SCRIPT = "id; all(num_eval | plus_eval | add)*"
AUTO_NAIVE_SCRIPT = "(num_eval | plus_eval | add)*"


def aux_tactic() -> Tactic:
    """First rule that forms subgoals wins: numerals, then +, then sums."""
    return orelse(
        orelse(from_rule(NUM_EVAL), from_rule(PLUS_EVAL)), from_rule(ADD)
    )


def auto_naive() -> Tactic:
    """Depth-first automation; freezes on goals blocked by open outputs."""
    return repeat(STRUCTURE, aux_tactic())


def auto() -> Tactic:
    """Round-based automation: retries every goal after each flattening."""
    return seq(
        STRUCTURE,
        id_tactic(STRUCTURE),
        repeat_multitactic(STRUCTURE, all_mt(STRUCTURE, aux_tactic())),
    )


def eval_oracle(t: Term) -> tuple[int, int]:
    """Cost and value the eval judgment should compute for a closed expr."""
    match t:
        case App(op, (lit,)) if op == NUM_OP:
            return 0, numeral_value(lit)
        case App(op, (a, b)) if op == PLUS_OP:
            c1, v1 = eval_oracle(a)
            c2, v2 = eval_oracle(b)
            return 1 + c1 + c2, v1 + v2
    raise TheoryError(f"open or ill-formed expression: {t!r}")


def parse_goal(text: str):
    """Parse `eval <expr>` or `add <nat> <nat>` over the empty context."""
    tokens = _tokenize(text)
    if not tokens:
        raise ValueError("empty goal")
    head = tokens[0]
    if head == "eval":
        expr, rest = _parse_expr(tokens[1:])
        if rest:
            raise ValueError(f"trailing input after expression: {rest[0]!r}")
        return EvalGoal(Context(), expr)
    if head == "add":
        if len(tokens) != 3 or not tokens[1].isdigit() or not tokens[2].isdigit():
            raise ValueError("expected: add <nat> <nat>")
        return AddGoal(Context(), nat(int(tokens[1])), nat(int(tokens[2])))
    raise ValueError(f"unknown goal form {head!r}")


def _tokenize(text: str) -> list[str]:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()+":
            out.append(ch)
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            out.append(text[i:j])
            i = j
        elif ch.isalpha():
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(text[i:j])
            i = j
        else:
            raise ValueError(f"bad character {ch!r} in goal")
    return out


def _parse_expr(tokens: list[str]) -> tuple[Term, list[str]]:
    term, rest = _parse_atom(tokens)
    while rest and rest[0] == "+":
        right, rest = _parse_atom(rest[1:])
        term = plus(term, right)
    return term, rest


def _parse_atom(tokens: list[str]) -> tuple[Term, list[str]]:
    if not tokens:
        raise ValueError("expected an expression")
    if tokens[0] == "num":
        if len(tokens) < 2 or not tokens[1].isdigit():
            raise ValueError("num needs a numeral")
        return num(int(tokens[1])), tokens[2:]
    if tokens[0] == "(":
        expr, rest = _parse_expr(tokens[1:])
        if not rest or rest[0] != ")":
            raise ValueError("unclosed parenthesis")
        return expr, rest[1:]
    raise ValueError(f"unexpected token {tokens[0]!r}")
