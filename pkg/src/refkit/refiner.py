"""Refiners: named rule collections closed under tree-shaped composition.

A refiner pairs a judgment structure with an ordered table of rules and
a preorder on their names.  Rule trees denote derived rules, interpreted
by sequencing a root rule with one rule per subgoal; a homomorphism into
another refiner renames the table and must only ever improve answers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence, Union

from .judgment import JudgmentStructure
from .rule import Rule, rule_seq
from .state import ProofState, state_approx
from .theory import Context, TheoryError


class UnknownRuleName(TheoryError):
    pass


def _same_name(a: str, b: str) -> bool:
    return a == b


@dataclass
class Refiner:
    structure: JudgmentStructure
    rules: dict[str, Rule]
    le: Callable[[str, str], bool] = field(default=_same_name)

    def lookup(self, name: str) -> Rule:
        rule = self.rules.get(name)
        if rule is None:
            raise UnknownRuleName(name)
        return rule

    def names(self) -> tuple[str, ...]:
        return tuple(self.rules)


@dataclass(frozen=True)
class Leaf:
    name: str


@dataclass(frozen=True)
class Branch:
    root: "RuleTree"
    children: tuple["RuleTree", ...]


RuleTree = Union[Leaf, Branch]


def interp_tree(refiner: Refiner, tree: RuleTree) -> Rule:
    """The derived rule a tree denotes in the refiner's closure."""
    match tree:
        case Leaf(name):
            return refiner.lookup(name)
        case Branch(root, children):
            return rule_seq(
                refiner.structure,
                interp_tree(refiner, root),
                tuple(interp_tree(refiner, child) for child in children),
            )
    raise TheoryError(f"not a rule tree: {tree!r}")


@dataclass(frozen=True)
class RefinerHom:
    source: Refiner
    target: Refiner
    rename: Callable[[str], str]


@dataclass(frozen=True)
class HomFailure:
    kind: str
    name: str
    other: str | None
    goal: Any
    source_answer: ProofState | None
    target_answer: ProofState | None


def check_hom(
    hom: RefinerHom, samples: Sequence[tuple[Context, Any]]
) -> list[HomFailure]:
    """Probe a refiner homomorphism on sample goals.

    Checks that renaming is monotone for the name preorders, and that on
    every sample the renamed rule's answer improves on the original's in
    the information order.
    """
    failures = []
    names = hom.source.names()
    for a in names:
        for b in names:
            if hom.source.le(a, b) and not hom.target.le(
                hom.rename(a), hom.rename(b)
            ):
                failures.append(HomFailure("order", a, b, None, None, None))
    for name in names:
        src_rule = hom.source.lookup(name)
        tgt_rule = hom.target.lookup(hom.rename(name))
        for ctx, goal in samples:
            src = src_rule.run(ctx, goal)
            tgt = tgt_rule.run(ctx, goal)
            if not state_approx(hom.source.structure, src, tgt):
                failures.append(
                    HomFailure("approx", name, hom.rename(name), goal, src, tgt)
                )
    return failures
