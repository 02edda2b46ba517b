"""The tactic script language: parsing, printing, and elaboration.

Grammar, loosest first:

    tactic  ::= seqpart ('|' seqpart)*            left associative
    seqpart ::= starred (';' mtac)*               left associative
    starred ::= atom '*'*
    atom    ::= 'id' | rule-name | '(' tactic ')'
    mtac    ::= mcore '*'*
    mcore   ::= 'all' '(' tactic ')' | '[' tactic (',' tactic)* ']' | '[' ']'

Rule names are lower-case identifiers.  Star on a tactic is fixed-point
repetition of that tactic down the subgoal tree; star on a multitactic
re-runs it over the flattened state until nothing changes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

from .judgment import JudgmentStructure
from .rule import Rule
from .tactic import (
    Tactic,
    all_mt,
    each_mt,
    from_rule,
    id_tactic,
    orelse,
    repeat,
    repeat_multitactic,
    seq,
)


class ParseError(Exception):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


@dataclass(frozen=True)
class RuleName:
    name: str


@dataclass(frozen=True)
class IdTac:
    pass


@dataclass(frozen=True)
class OrElse:
    left: "TacticAst"
    right: "TacticAst"


@dataclass(frozen=True)
class Star:
    body: "TacticAst"


@dataclass(frozen=True)
class SeqTac:
    first: "TacticAst"
    rest: "MultiAst"


@dataclass(frozen=True)
class AllM:
    body: "TacticAst"


@dataclass(frozen=True)
class EachM:
    bodies: tuple["TacticAst", ...]


@dataclass(frozen=True)
class MStar:
    body: "MultiAst"


TacticAst = Union[RuleName, IdTac, OrElse, Star, SeqTac]
MultiAst = Union[AllM, EachM, MStar]


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    position: int


def _lex(text: str) -> list[_Token]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "|;*()[],":
            tokens.append(_Token(ch, ch, i))
            i += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if not word.islower() and not word.isdigit():
                # identifiers are lower case by convention; reject shouting
                raise ParseError(f"bad identifier {word!r}", i)
            tokens.append(_Token("ident", word, i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text!r}", tok.position)
        self.pos += 1
        return tok

    def tactic(self) -> TacticAst:
        left = self.seqpart()
        while self.peek().kind == "|":
            self.take("|")
            left = OrElse(left, self.seqpart())
        return left

    def seqpart(self) -> TacticAst:
        first = self.starred()
        while self.peek().kind == ";":
            self.take(";")
            first = SeqTac(first, self.mtac())
        return first

    def starred(self) -> TacticAst:
        body = self.atom()
        while self.peek().kind == "*":
            self.take("*")
            body = Star(body)
        return body

    def atom(self) -> TacticAst:
        tok = self.peek()
        if tok.kind == "ident":
            self.take("ident")
            if tok.text == "id":
                return IdTac()
            if tok.text == "all":
                raise ParseError("'all' starts a multitactic", tok.position)
            return RuleName(tok.text)
        if tok.kind == "(":
            self.take("(")
            inner = self.tactic()
            self.take(")")
            return inner
        raise ParseError(f"expected a tactic, found {tok.text!r}", tok.position)

    def mtac(self) -> MultiAst:
        body = self.mcore()
        while self.peek().kind == "*":
            self.take("*")
            body = MStar(body)
        return body

    def mcore(self) -> MultiAst:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "all":
            self.take("ident")
            self.take("(")
            inner = self.tactic()
            self.take(")")
            return AllM(inner)
        if tok.kind == "[":
            self.take("[")
            if self.peek().kind == "]":
                self.take("]")
                return EachM(())
            bodies = [self.tactic()]
            while self.peek().kind == ",":
                self.take(",")
                bodies.append(self.tactic())
            self.take("]")
            return EachM(tuple(bodies))
        raise ParseError(
            f"expected a multitactic, found {tok.text!r}", tok.position
        )


def parse_script(text: str) -> TacticAst:
    parser = _Parser(_lex(text))
    out = parser.tactic()
    tok = parser.peek()
    if tok.kind != "eof":
        raise ParseError(f"trailing input {tok.text!r}", tok.position)
    return out


# precedence levels for printing: 1 alternation, 2 sequencing, 3 star
def _prec(ast: TacticAst) -> int:
    match ast:
        case OrElse(_, _):
            return 1
        case SeqTac(_, _):
            return 2
        case Star(_):
            return 3
        case _:
            return 4


def print_script(ast: TacticAst) -> str:
    return _print_tactic(ast, 1)


def _print_tactic(ast: TacticAst, level: int) -> str:
    match ast:
        case RuleName(name):
            text = name
        case IdTac():
            text = "id"
        case OrElse(left, right):
            text = f"{_print_tactic(left, 1)} | {_print_tactic(right, 2)}"
        case SeqTac(first, rest):
            text = f"{_print_tactic(first, 2)}; {_print_multi(rest)}"
        case Star(body):
            text = f"{_print_tactic(body, 3)}*"
        case _:
            raise TypeError(f"not a tactic: {ast!r}")
    if _prec(ast) < level:
        return f"({text})"
    return text


def _print_multi(ast: MultiAst) -> str:
    match ast:
        case AllM(body):
            return f"all({_print_tactic(body, 1)})"
        case EachM(bodies):
            return f"[{', '.join(_print_tactic(b, 1) for b in bodies)}]"
        case MStar(body):
            return f"{_print_multi(body)}*"
    raise TypeError(f"not a multitactic: {ast!r}")


def compile_script(
    structure: JudgmentStructure,
    lookup: Callable[[str], Rule],
    ast: TacticAst,
) -> Tactic:
    """Elaborate a script into a runnable tactic; names resolve eagerly."""
    match ast:
        case RuleName(name):
            return from_rule(lookup(name))
        case IdTac():
            return id_tactic(structure)
        case OrElse(left, right):
            return orelse(
                compile_script(structure, lookup, left),
                compile_script(structure, lookup, right),
            )
        case Star(body):
            return repeat(structure, compile_script(structure, lookup, body))
        case SeqTac(first, rest):
            return seq(
                structure,
                compile_script(structure, lookup, first),
                _compile_multi(structure, lookup, rest),
            )
    raise TypeError(f"not a tactic: {ast!r}")


def _compile_multi(
    structure: JudgmentStructure,
    lookup: Callable[[str], Rule],
    ast: MultiAst,
):
    match ast:
        case AllM(body):
            return all_mt(structure, compile_script(structure, lookup, body))
        case EachM(bodies):
            return each_mt(
                structure,
                tuple(compile_script(structure, lookup, b) for b in bodies),
            )
        case MStar(body):
            return repeat_multitactic(
                structure, _compile_multi(structure, lookup, body)
            )
    raise TypeError(f"not a multitactic: {ast!r}")
