"""Acceptance gate: one test per shipped guarantee, one verdict line each.

Every test here pins an externally visible contract of the library at its
stated sample size or enumeration bound.  Exhaustive parts run over small
documented universes spelled out in the test docstrings; randomized parts
use fixed seeds so a failure is reproducible by rerunning the test.
"""

from __future__ import annotations

import json
import random
import subprocess
import sys

import strategies as strat

from refkit.cli import RunConfig, execute
from refkit.logics import arith, dep
from refkit.refiner import Branch, Leaf, Refiner, interp_tree
from refkit.rule import check_lax_naturality, clause_rule, rule_seq
from refkit.script import (
    AllM,
    IdTac,
    MStar,
    OrElse,
    RuleName,
    SeqTac,
    Star,
    parse_script,
    print_script,
)
from refkit.state import (
    Bot,
    Fail,
    StateStructure,
    Subgoals,
    TeleCons,
    TeleNil,
    state_alpha_eq,
    state_map,
    state_mul,
    state_subst,
    state_unit,
    tele_goals,
    wk_state,
)
from refkit.tactic import (
    NEVER,
    OutOfFuel,
    Resolved,
    each_mt,
    fix,
    from_rule,
    never_tactic,
    orelse,
    run_delayed,
    then_tactic,
    try_tactic,
)
from refkit.theory import (
    App,
    Context,
    Substitution,
    Var,
    ctx_concat,
    freshen_context,
    subst_compose,
    subst_weaken,
)

J = arith.STRUCTURE
K = StateStructure(J)
K2 = StateStructure(K)
JD = dep.STRUCTURE
EMPTY = Context(())

# canonical single-slot answer boundary used by the exhaustive state universe
Z = Context((("z", arith.NUM),))


def _is_complete(state) -> bool:
    return isinstance(state, Subgoals) and isinstance(state.telescope, TeleNil)


# ---------------------------------------------------------------------------
# exhaustive state universe for the monad laws


def _val_cands(walk: Context) -> list:
    """Validation choices over walk: the literal 1 and the newest variable."""
    out = [arith.nat(1)]
    numvars = [n for n, s in walk.entries if s == arith.NUM]
    if numvars:
        out.append(Var(numvars[-1], arith.NUM))
    return out


def _base_goal_pool(walk: Context) -> list:
    pool = [
        arith.AddGoal(walk, arith.nat(1), arith.nat(2)),
        arith.EvalGoal(walk, arith.num(1)),
    ]
    numvars = [n for n, s in walk.entries if s == arith.NUM]
    if numvars:
        pool.append(arith.AddGoal(walk, Var(numvars[-1], arith.NUM), arith.nat(1)))
    return pool


def _enum_states(structure, goal_pool, ctx: Context, max_len: int = 2) -> list:
    """Every state over ctx with up to max_len subgoals from goal_pool.

    All states answer into the one-slot boundary Z; validations range over
    _val_cands at the fully extended context.  Fail and Bot are included.
    """
    states = [Fail(ctx, Z), Bot(ctx, Z)]

    def assemble(spine, walk, term):
        tele = TeleNil(walk)
        for names, goal in reversed(spine):
            tele = TeleCons(names, goal, tele)
        return Subgoals(tele, Substitution(walk, Z, (term,)))

    def go(walk, spine):
        for term in _val_cands(walk):
            states.append(assemble(spine, walk, term))
        if len(spine) == max_len:
            return
        for goal in goal_pool(walk):
            entries = structure.output(goal).entries
            fresh, _ = freshen_context(entries, set(walk.names))
            names = tuple(n for n, _ in fresh)
            go(ctx_concat(walk, Context(fresh)), spine + [(names, goal)])

    go(ctx, [])
    return states


_S1_CACHE: dict[Context, list] = {}
_S2_CACHE: dict[Context, list] = {}


def _s1_pool(walk: Context) -> list:
    if walk not in _S1_CACHE:
        _S1_CACHE[walk] = _enum_states(J, _base_goal_pool, walk)
    return _S1_CACHE[walk]


def _s2_pool(walk: Context) -> list:
    # thinned to keep the three-layer product finite but representative
    if walk not in _S2_CACHE:
        full = _enum_states(K, _s1_pool, walk)
        stride = max(1, len(full) // 24)
        _S2_CACHE[walk] = full[::stride]
    return _S2_CACHE[walk]


def _law_unit_outer(structure, state) -> bool:
    wrapped = state_unit(StateStructure(structure), state)
    return state_alpha_eq(structure, state_mul(structure, wrapped), state)


def _law_unit_inner(structure, state) -> bool:
    expanded = state_map(lambda g: state_unit(structure, g), state)
    return state_alpha_eq(structure, state_mul(structure, expanded), state)


def _law_assoc(structure, sss) -> bool:
    inner = StateStructure(structure)
    lhs = state_mul(structure, state_mul(inner, sss))
    rhs = state_mul(
        structure, state_map(lambda s: state_mul(structure, s), sss)
    )
    return state_alpha_eq(structure, lhs, rhs)


def test_criterion_01_monad_laws():
    """Unit and flattening laws, exhaustive small universe plus 5000 random.

    Exhaustive part: every one-layer and two-layer state with telescope
    length at most 2 over the documented goal pool (two literal goals plus
    a variable-touching one where the context allows), every validation
    choice, terminals included; the three-layer inputs for associativity
    take their entries from a thinned slice of the two-layer enumeration.
    Random part: 5000 seeded cases with telescopes up to length 4 and
    nesting depth 3.  Alpha-equality throughout, zero tolerance.
    """
    s1 = _s1_pool(EMPTY)
    s2 = _enum_states(K, _s1_pool, EMPTY)
    s3 = _enum_states(K2, _s2_pool, EMPTY)
    assert len(s1) >= 15 and len(s2) >= 400 and len(s3) >= 800

    for state in s1:
        assert _law_unit_outer(J, state)
        assert _law_unit_inner(J, state)
    for state in s2:
        assert _law_unit_outer(K, state)
        assert _law_unit_inner(K, state)
    for state in s3:
        assert _law_assoc(J, state)

    rng = random.Random(411)
    for _ in range(5000):
        ctx = strat.rand_context(rng)
        flat = strat.arith_state(rng, ctx, max_goals=4)
        assert _law_unit_outer(J, flat)
        assert _law_unit_inner(J, flat)
        sss = strat.arith_state_of_states_of_states(rng, ctx, max_goals=4)
        assert _law_assoc(J, sss)


def _rand_tele(rng: random.Random, ctx: Context, max_len: int = 2):
    """A base-goal telescope over ctx together with its flat extension."""
    walk = ctx
    spine = []
    for _ in range(rng.randrange(max_len + 1)):
        goal = strat.rand_goal(rng, walk, 2)
        entries = J.output(goal).entries
        fresh, _ = freshen_context(entries, set(walk.names))
        spine.append((tuple(n for n, _ in fresh), goal))
        walk = ctx_concat(walk, Context(fresh))
    tele: object = TeleNil(walk)
    for names, goal in reversed(spine):
        tele = TeleCons(names, goal, tele)
    return tele, walk


def test_criterion_02_yank_prefix():
    """Weakened-head flattening commutes with prefixing, 1000 instances.

    For a front telescope F over G, a state S over the extension of F, and
    a tail of entry states with a shared validation: flattening with head
    wk(F, S) equals weakening the flattening whose head is S directly.
    The tail and validation on the right are transported along the context
    weakening.  All three S shapes cycle through the sample.
    """
    rng = random.Random(7011)
    for i in range(1000):
        gamma = strat.rand_context(rng)
        front, flat_front = _rand_tele(rng, gamma)
        match i % 3:
            case 0:
                s = Fail(flat_front, strat.rand_target(rng))
            case 1:
                s = Bot(flat_front, strat.rand_target(rng))
            case _:
                s = strat.arith_state(rng, flat_front, terminal_chance=0.0)
        target_s = s.target

        head_entries, _ = freshen_context(
            target_s.entries, set(flat_front.names)
        )
        head_names = tuple(n for n, _ in head_entries)
        walk_small = ctx_concat(gamma, Context(head_entries))
        walk_big = ctx_concat(flat_front, Context(head_entries))

        tail_small = []
        tail_big = []
        for _ in range(rng.randrange(2)):
            entry = strat.arith_state(rng, walk_small)
            weaken = subst_weaken(walk_big, walk_small)
            entry_big = state_subst(J, entry, weaken)
            names_raw, _ = freshen_context(
                entry.target.entries, set(walk_small.names) | set(walk_big.names)
            )
            names = tuple(n for n, _ in names_raw)
            tail_small.append((names, entry))
            tail_big.append((names, entry_big))
            walk_small = ctx_concat(walk_small, Context(names_raw))
            walk_big = ctx_concat(walk_big, Context(names_raw))

        delta = strat.rand_target(rng)
        validation = Substitution(
            walk_small,
            delta,
            tuple(strat.rand_num_term(rng, walk_small) for _ in delta.entries),
        )
        validation_big = subst_compose(
            subst_weaken(walk_big, walk_small), validation
        )

        tele_lhs: object = TeleNil(walk_small)
        tele_rhs: object = TeleNil(walk_big)
        for (names, entry), (_, entry_big) in zip(
            reversed(tail_small), reversed(tail_big)
        ):
            tele_lhs = TeleCons(names, entry, tele_lhs)
            tele_rhs = TeleCons(names, entry_big, tele_rhs)
        tele_lhs = TeleCons(head_names, wk_state(J, front, s), tele_lhs)
        tele_rhs = TeleCons(head_names, s, tele_rhs)

        lhs = state_mul(J, Subgoals(tele_lhs, validation))
        rhs = wk_state(
            J, front, state_mul(J, Subgoals(tele_rhs, validation_big))
        )
        assert state_alpha_eq(J, lhs, rhs)


# ---------------------------------------------------------------------------
# lax naturality universes


def _arith_samples() -> list:
    ctx = Context((("x", arith.EXP), ("u", arith.NUM)))
    exprs = [arith.num(1), Var("x", arith.EXP)]
    for _ in range(2):
        grown = list(exprs)
        seen = set(exprs)
        for a in exprs:
            for b in exprs:
                t = arith.plus(a, b)
                if t not in seen:
                    seen.add(t)
                    grown.append(t)
        exprs = grown
    operands = (arith.nat(0), arith.nat(2), Var("u", arith.NUM))
    goals = [arith.EvalGoal(ctx, e) for e in exprs]
    goals += [arith.AddGoal(ctx, m, n) for m in operands for n in operands]

    source = Context((("y", arith.EXP), ("w", arith.NUM)))
    y = Var("y", arith.EXP)
    x_images = (arith.num(0), y, arith.plus(arith.num(1), y), arith.plus(y, y))
    u_images = (arith.nat(3), Var("w", arith.NUM))
    subs = [
        Substitution(source, ctx, (tx, tu))
        for tx in x_images
        for tu in u_images
    ]
    return [(g, s) for g in goals for s in subs]


def _dep_samples() -> list:
    ctx = Context((("x", dep.EXP), ("p", dep.PROP)))
    atoms = [
        dep.top(),
        dep.eq(dep.tt(), dep.tt()),
        dep.eq(Var("x", dep.EXP), dep.tt()),
        Var("p", dep.PROP),
    ]
    body_atoms = atoms + [dep.eq(dep.SLOT, dep.tt())]

    def grow(props, bodies):
        out = list(props)
        seen = set(props)
        for a in props:
            for b in props:
                t = dep.or_(a, b)
                if t not in seen:
                    seen.add(t)
                    out.append(t)
        for body in bodies:
            for a in props:
                t = App(dep.SIG_OP, (a, body))
                if t not in seen:
                    seen.add(t)
                    out.append(t)
        return out

    level2 = grow(atoms, body_atoms)
    body_level2 = grow(body_atoms, body_atoms)
    level3 = grow(level2, body_level2)

    source = Context((("y", dep.EXP), ("q", dep.PROP)))
    y = Var("y", dep.EXP)
    x_images = (dep.tt(), y, dep.inl(y))
    p_images = (dep.or_(dep.top(), dep.top()), Var("q", dep.PROP))
    subs = [
        Substitution(source, ctx, (tx, tp))
        for tx in x_images
        for tp in p_images
    ]
    return [(dep.TruthGoal(ctx, prop), s) for prop in level3 for s in subs]


def test_criterion_03_lax_naturality():
    """All seven shipped rules commute laxly with substitution, exhaustively.

    Arithmetic payloads: every expression of depth at most 3 over the leaf
    pool {literal, variable} plus all additions over {0, 2, variable}, with
    8 substitutions of depth at most 2.  Dependent payloads: every
    proposition of depth at most 3 over four atoms (plus a slot-equation
    atom under binders) closed under disjunction and dependent pairing,
    with 6 substitutions.  A strict variant of the left disjunction rule
    that fails on variable goals instead of conceding must produce at
    least one counterexample.
    """
    arith_samples = _arith_samples()
    dep_samples = _dep_samples()
    assert len(arith_samples) >= 300
    assert len(dep_samples) >= 15000

    for rule in arith.RULES.values():
        assert check_lax_naturality(J, rule, arith_samples) == []
    for rule in dep.RULES.values():
        assert check_lax_naturality(JD, rule, dep_samples) == []

    strict_or = clause_rule(
        JD,
        "or_i1_strict",
        ((dep._prop_is(dep.OR_OP), dep._or_i1_build),),
    )
    assert len(check_lax_naturality(JD, strict_or, dep_samples)) >= 1


def test_criterion_04_auto_matches_oracle():
    """Breadth-first auto agrees with the size/value oracle, 500 cases."""
    rng = random.Random(1009)
    for _ in range(500):
        expr = strat.rand_closed_expr(rng, 6)
        plus_count, total = arith.eval_oracle(expr)
        outcome = execute(
            RunConfig(
                logic="arith",
                goal=f"eval {arith.render_expr(expr)}",
                script=arith.AUTO_SCRIPT,
            )
        )
        assert outcome.exit_code == 0 and outcome.status == "complete"
        cost, value = outcome.state.validation.terms
        assert arith.numeral_value(cost) == plus_count
        assert arith.numeral_value(value) == total


def _expr_depth(e) -> int:
    if isinstance(e, App) and e.op == arith.PLUS_OP:
        return 1 + max(_expr_depth(a) for a in e.args)
    return 1


def test_criterion_05_depth_first_stalls():
    """Depth-first auto stalls where breadth-first completes, then recovers.

    On every sampled expression containing an addition, the one-pass
    script leaves residual subgoals (exit 1) while the breadth-first
    script finishes (exit 0).  One rerun means one ordered sweep of the
    same tactic over the residual subgoals, threading each solution into
    the later goals before they run, followed by flattening; the residual
    closes within depth(expression) reruns.
    """
    rng = random.Random(2027)
    tac = arith.auto_naive()
    for _ in range(80):
        expr = arith.plus(
            strat.rand_closed_expr(rng, rng.randrange(1, 4)),
            strat.rand_closed_expr(rng, rng.randrange(1, 4)),
        )
        goal_text = f"eval {arith.render_expr(expr)}"
        deep = execute(
            RunConfig(logic="arith", goal=goal_text, script=arith.AUTO_NAIVE_SCRIPT)
        )
        wide = execute(
            RunConfig(logic="arith", goal=goal_text, script=arith.AUTO_SCRIPT)
        )
        assert wide.exit_code == 0
        assert deep.exit_code == 1 and isinstance(deep.state, Subgoals)

        state = deep.state
        reruns = 0
        bound = _expr_depth(expr)
        while not _is_complete(state):
            reruns += 1
            assert reruns <= bound
            sweep = each_mt(J, (tac,) * len(tele_goals(state.telescope)))
            stepped = run_delayed(sweep(state.context, state), 10**6)
            assert isinstance(stepped, Resolved)
            state = state_mul(J, stepped.value)
        assert _is_complete(state)


def test_criterion_06_dependent_refinement():
    """The dependent pair demo: extract, propagation, and early rejection."""
    goal = dep.parse_goal("true sig(x. eq(x, tt), top)")
    outcome = execute(
        RunConfig(
            logic="dep",
            goal="true sig(x. eq(x, tt), top)",
            script="sig_i; [top_i, eq_refl]",
        )
    )
    assert outcome.exit_code == 0
    assert outcome.state.validation.terms == (dep.pair(dep.tt(), dep.refl()),)

    opened = dep.RULES["sig_i"].run(EMPTY, goal)
    assert isinstance(opened, Subgoals)
    goals_before = tele_goals(opened.telescope)
    assert len(goals_before) == 2

    # discharging the first subgoal rewrites the second to a closed equation
    first_only = each_mt(JD, (from_rule(dep.RULES["top_i"]),))
    stepped = run_delayed(first_only(EMPTY, opened), 100)
    assert isinstance(stepped, Resolved)
    advanced = state_mul(JD, stepped.value)
    assert isinstance(advanced, Subgoals)
    remaining = tele_goals(advanced.telescope)
    assert len(remaining) == 1
    expected = dep.TruthGoal(EMPTY, dep.eq(dep.tt(), dep.tt()))
    assert JD.alpha_eq(remaining[0][1], expected)

    # before that substitution the equation still has a variable side
    _, second = goals_before[1]
    early = dep.RULES["eq_refl"].run(second.context, second)
    assert early == Bot(second.context, dep.TRUTH_OUTPUT)


def test_criterion_07_fixed_points():
    """fix agrees with iterated approximants; divergence exhausts all fuel.

    200 pairs of a transformer and a goal: the raced fixed point and the
    first stable approximant resolve to alpha-equal states within fuel
    10^4.  The never-answering fixtures come back OutOfFuel at every
    budget on a ladder up to 10^4.
    """
    aux = arith.aux_tactic()
    numeral_step = from_rule(arith.RULES["num_eval"])
    split_step = from_rule(arith.RULES["plus_eval"])
    transformers = (
        lambda psi: try_tactic(J, then_tactic(J, aux, psi)),
        lambda psi: orelse(
            numeral_step, try_tactic(J, then_tactic(J, split_step, psi))
        ),
        lambda psi: aux,
    )
    fuel = 10**4
    rng = random.Random(3301)
    for i in range(200):
        transform = transformers[i % len(transformers)]
        ctx = strat.rand_context(rng)
        goal = strat.rand_goal(rng, ctx, rng.randrange(1, 4))

        raced = run_delayed(fix(transform)(ctx, goal), fuel)
        assert isinstance(raced, Resolved)

        approx = never_tactic
        previous = None
        stable = None
        for _ in range(40):
            approx = transform(approx)
            current = run_delayed(approx(ctx, goal), fuel)
            if (
                isinstance(current, Resolved)
                and isinstance(previous, Resolved)
                and state_alpha_eq(J, current.value, previous.value)
            ):
                stable = current
                break
            previous = current
        assert isinstance(stable, Resolved)
        assert state_alpha_eq(J, raced.value, stable.value)

    probe = arith.EvalGoal(EMPTY, arith.num(1))
    stuck = fix(lambda psi: psi)
    for budget in (1, 10, 100, 1000, 10**4):
        assert isinstance(run_delayed(NEVER, budget), OutOfFuel)
        assert isinstance(run_delayed(never_tactic(EMPTY, probe), budget), OutOfFuel)
        assert isinstance(run_delayed(stuck(EMPTY, probe), budget), OutOfFuel)


def _rand_dep_goal(rng: random.Random):
    entries = []
    if rng.random() < 0.6:
        entries.append(("x", dep.EXP))
    if rng.random() < 0.3:
        entries.append(("p", dep.PROP))
    ctx = Context(tuple(entries))
    return dep.TruthGoal(ctx, strat.rand_dep_prop(rng, ctx, rng.randrange(1, 4)))


def test_criterion_08_derivability_closure():
    """Interpreting a leaf recovers the table rule; trees match rule_seq."""
    rng = random.Random(5417)
    suites = (
        (arith, J, lambda: strat.rand_goal(rng, strat.rand_context(rng), 2)),
        (dep, JD, lambda: _rand_dep_goal(rng)),
    )
    for module, structure, sample in suites:
        refiner = Refiner(structure, dict(module.RULES))
        for name in refiner.names():
            derived = interp_tree(refiner, Leaf(name))
            table = refiner.lookup(name)
            assert derived is table
            for _ in range(100):
                goal = sample()
                assert derived.run(goal.context, goal) == table.run(
                    goal.context, goal
                )

    refiner = Refiner(J, dict(arith.RULES))
    tree = Branch(
        Leaf("plus_eval"),
        (Leaf("num_eval"), Leaf("num_eval"), Leaf("add"), Leaf("add"), Leaf("add")),
    )
    composed = interp_tree(refiner, tree)
    manual = rule_seq(
        J,
        arith.RULES["plus_eval"],
        (
            arith.RULES["num_eval"],
            arith.RULES["num_eval"],
            arith.RULES["add"],
            arith.RULES["add"],
            arith.RULES["add"],
        ),
    )
    for _ in range(100):
        ctx = strat.rand_context(rng)
        goal = arith.EvalGoal(
            ctx,
            arith.plus(strat.rand_expr(rng, ctx, 2), strat.rand_expr(rng, ctx, 2)),
        )
        assert composed.run(ctx, goal) == manual.run(ctx, goal)


def test_criterion_09_script_round_trip():
    """parse after print is the identity; the auto scripts parse as shaped."""
    rng = random.Random(977)
    for _ in range(1000):
        ast = strat.rand_script_tactic(rng, 4)
        assert parse_script(print_script(ast)) == ast

    step = OrElse(
        OrElse(RuleName("num_eval"), RuleName("plus_eval")), RuleName("add")
    )
    assert parse_script(arith.AUTO_SCRIPT) == SeqTac(IdTac(), MStar(AllM(step)))
    assert parse_script(arith.AUTO_NAIVE_SCRIPT) == Star(step)


def test_criterion_10_cli_contract():
    """The three shipped invocations, byte-exact in pretty and json modes."""
    cases = [
        (
            ("arith", "eval (num 2 + num 3)", "id; all(num_eval | plus_eval | add)*"),
            0,
            "status: complete\nsteps_used: 4\nextract: [1, 5]\n",
            '{"status": "complete", "steps_used": 4,'
            ' "residual_goals": [], "extract": ["1", "5"]}\n',
        ),
        (
            ("dep", "true sig(x. eq(x, tt), top)", "sig_i; [top_i, eq_refl]"),
            0,
            "status: complete\nsteps_used: 0\nextract: pair(tt, refl)\n",
            '{"status": "complete", "steps_used": 0,'
            ' "residual_goals": [], "extract": ["pair(tt, refl)"]}\n',
        ),
        (
            ("arith", "add 2 3", "num_eval"),
            2,
            "status: failed\nsteps_used: 0\nstate: FAIL\n",
            '{"status": "failed", "steps_used": 0,'
            ' "residual_goals": [], "extract": null}\n',
        ),
    ]
    for (logic, goal, scr), code, pretty, as_json in cases:
        base = [
            sys.executable,
            "-m",
            "refkit.cli",
            "--logic",
            logic,
            "--goal",
            goal,
            "--script",
            scr,
        ]
        plain = subprocess.run(base, capture_output=True, text=True)
        assert plain.returncode == code
        assert plain.stdout == pretty
        machine = subprocess.run(
            base + ["--json"], capture_output=True, text=True
        )
        assert machine.returncode == code
        assert machine.stdout == as_json
        json.loads(machine.stdout)
