"""Compare the two automation scripts on random arithmetic goals.

The one-pass depth-first script answers every subgoal it can see but
never revisits the goals its own answers unblock, so expressions with
additions stall with residual subgoals.  The breadth-first script wraps
the same step in a quiescence loop and finishes.  The demo also reruns
the depth-first sweep over each residual until it closes, counting how
many sweeps the recovery takes.
"""

from __future__ import annotations

import argparse
import random
import sys

from refkit.cli import RunConfig, execute
from refkit.logics import arith
from refkit.state import Subgoals, TeleNil, state_mul, tele_goals
from refkit.tactic import Resolved, each_mt, run_delayed
from refkit.theory import App


def expr_depth(t):
    match t:
        case App(op, args) if op == arith.PLUS_OP:
            return 1 + max(expr_depth(a) for a in args)
    return 1


def rand_expr(rng: random.Random, depth: int):
    if depth <= 1 or rng.random() < 0.3:
        return arith.num(rng.randrange(0, 10))
    return arith.plus(rand_expr(rng, depth - 1), rand_expr(rng, depth - 1))


def sweep_until_closed(state: Subgoals, limit: int) -> int:
    """Rerun the one-pass tactic over the residual until nothing is left."""
    tac = arith.auto_naive()
    sweeps = 0
    while not isinstance(state.telescope, TeleNil):
        sweeps += 1
        if sweeps > limit:
            raise RuntimeError("residual did not close within the limit")
        pending = len(tele_goals(state.telescope))
        stage = each_mt(arith.STRUCTURE, (tac,) * pending)
        stepped = run_delayed(stage(state.context, state), 10**6)
        assert isinstance(stepped, Resolved)
        state = state_mul(arith.STRUCTURE, stepped.value)
    return sweeps


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cases", type=int, default=12)
    parser.add_argument("--depth", type=int, default=4)
    parser.add_argument("--seed", type=int, default=5)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    print(f"{'expression':<42} {'depth':>5} {'deep':>5} {'wide':>5} {'sweeps':>6}")
    for _ in range(args.cases):
        expr = arith.plus(
            rand_expr(rng, args.depth - 1), rand_expr(rng, args.depth - 1)
        )
        shown = arith.render_expr(expr)
        goal = f"eval ({shown})"
        deep = execute(
            RunConfig(logic="arith", goal=goal, script=arith.AUTO_NAIVE_SCRIPT)
        )
        wide = execute(
            RunConfig(logic="arith", goal=goal, script=arith.AUTO_SCRIPT)
        )
        sweeps = "-"
        if deep.exit_code == 1 and isinstance(deep.state, Subgoals):
            sweeps = str(sweep_until_closed(deep.state, 4 * expr_depth(expr)))
        label = shown if len(shown) <= 42 else shown[:39] + "..."
        print(
            f"{label:<42} {expr_depth(expr):>5} {deep.exit_code:>5} "
            f"{wide.exit_code:>5} {sweeps:>6}"
        )
    print()
    print("deep/wide columns are exit codes: 0 complete, 1 residual goals")
    return 0


if __name__ == "__main__":
    sys.exit(main())
