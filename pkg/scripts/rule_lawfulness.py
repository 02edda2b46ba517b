"""Probe every shipped rule for stability under substitution.

A rule is lax natural when substituting into its answer refines the
answer it gives on the substituted goal: rule(X)[s] approximates
rule(X[s]).  The check runs each rule over a grid of goals crossed with
substitutions and prints the counterexample count.  A deliberately
broken or-introduction, which fails on variable goals instead of
leaving them undetermined, shows what a violation looks like.
"""

from __future__ import annotations

import argparse
import random
import sys

from refkit.logics import arith, dep
from refkit.rule import check_lax_naturality, clause_rule
from refkit.theory import Context, Substitution, Var


def arith_samples(rng: random.Random, count: int):
    ctx = Context((("x", arith.EXP), ("u", arith.NUM)))
    source = Context((("y", arith.EXP), ("w", arith.NUM)))

    def rand_expr(depth: int):
        if depth <= 1 or rng.random() < 0.4:
            return rng.choice([arith.num(rng.randrange(4)), Var("x", arith.EXP)])
        return arith.plus(rand_expr(depth - 1), rand_expr(depth - 1))

    x_images = [
        arith.num(0),
        Var("y", arith.EXP),
        arith.plus(arith.num(1), Var("y", arith.EXP)),
    ]
    u_images = [arith.nat(3), Var("w", arith.NUM)]
    out = []
    for _ in range(count):
        goal = rng.choice(
            [
                arith.EvalGoal(ctx, rand_expr(3)),
                arith.AddGoal(
                    ctx,
                    rng.choice([arith.nat(2), Var("u", arith.NUM)]),
                    rng.choice([arith.nat(0), Var("u", arith.NUM)]),
                ),
            ]
        )
        s = Substitution(
            source, ctx, (rng.choice(x_images), rng.choice(u_images))
        )
        out.append((goal, s))
    return out


def dep_samples(rng: random.Random, count: int):
    ctx = Context((("x", dep.EXP), ("p", dep.PROP)))
    source = Context((("y", dep.EXP), ("q", dep.PROP)))

    def rand_prop(depth: int):
        atoms = [
            dep.top(),
            dep.eq(dep.tt(), dep.tt()),
            dep.eq(Var("x", dep.EXP), dep.tt()),
            Var("p", dep.PROP),
        ]
        if depth <= 1 or rng.random() < 0.4:
            return rng.choice(atoms)
        match rng.randrange(2):
            case 0:
                return dep.or_(rand_prop(depth - 1), rand_prop(depth - 1))
            case _:
                return dep.App(
                    dep.SIG_OP, (rand_prop(depth - 1), rand_prop(depth - 1))
                )

    x_images = [dep.tt(), Var("y", dep.EXP), dep.inl(Var("y", dep.EXP))]
    p_images = [dep.or_(dep.top(), dep.top()), Var("q", dep.PROP)]
    out = []
    for _ in range(count):
        goal = dep.TruthGoal(ctx, rand_prop(3))
        s = Substitution(
            source, ctx, (rng.choice(x_images), rng.choice(p_images))
        )
        out.append((goal, s))
    return out


def report(structure, rules, samples) -> None:
    for name, rule in rules.items():
        failures = check_lax_naturality(structure, rule, samples)
        verdict = "ok" if not failures else f"{len(failures)} counterexamples"
        print(f"  {name:<12} {verdict}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=400)
    parser.add_argument("--seed", type=int, default=17)
    args = parser.parse_args()
    rng = random.Random(args.seed)

    print("arith rules:")
    report(arith.STRUCTURE, arith.RULES, arith_samples(rng, args.samples))
    print("dep rules:")
    samples = dep_samples(rng, args.samples)
    report(dep.STRUCTURE, dep.RULES, samples)

    # the shipped or_i1 answers BOT on a variable proposition; dropping
    # that clause makes a variable goal FAIL, and substitution can then
    # turn the goal into one the rule answers, breaking the refinement
    strict = clause_rule(
        dep.STRUCTURE,
        "or_i1_strict",
        ((dep._prop_is(dep.OR_OP), dep._or_i1_build),),
    )
    print("broken variant:")
    report(dep.STRUCTURE, {"or_i1_strict": strict}, samples)
    failures = check_lax_naturality(dep.STRUCTURE, strict, samples)
    if failures:
        first = failures[0]
        print()
        print(f"first counterexample, goal: {dep.STRUCTURE.render(first.goal)}")
        print("  after substituting the answer: FAIL")
        print(
            "  answering the substituted goal: "
            f"{dep.STRUCTURE.render(dep.STRUCTURE.subst(first.goal, first.subst))}"
            " opens normally"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
