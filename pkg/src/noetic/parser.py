"""Parsers for the domain-description text format and the formula language.

Hand-rolled tokenizer plus recursive descent. Comments run from `#` to end
of line. Connective binding, loosest first: `<->`, `->`, `|`, `&`, `!`;
`->` associates to the right, the other binary connectives to the left.
Declarations are single-pass: a name must be declared before it is used
(the one exception is `seq`, whose unknown action names are left to the
validator).
"""

from __future__ import annotations

from dataclasses import dataclass

from noetic.dsl import (
    MAX_FLUENTS,
    DomainSpec,
    InitialSituation,
    PhysicalAction,
    SensingAction,
    Valuation,
)
from noetic.formula import TRUE, And, Atom, Bel, Const, Formula, Iff, Implies, Not, Or, Prev

RESERVED = {
    "fluent", "action", "sense", "init", "actual", "seq",
    "guard", "senses", "poss", "pl", "accuracy",
    "true", "false", "Bel", "Prev",
}

_PUNCT2 = (":=", "<->", "->")
_PUNCT1 = ",;{}()=!&|"


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # "name" | "number" | "punct" | "eof"
    value: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        two = text[i : i + 3] if text[i : i + 3] == "<->" else text[i : i + 2]
        if two in _PUNCT2:
            tokens.append(Token("punct", two, line, col))
            i, col = i + len(two), col + len(two)
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("name", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and (text[j].isdigit() or text[j] in ".eE" or (text[j] in "+-" and text[j - 1] in "eE")):
                j += 1
            tokens.append(Token("number", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch in _PUNCT1:
            tokens.append(Token("punct", ch, line, col))
            i, col = i + 1, col + 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], fluents: list[str] | None = None):
        self.tokens = tokens
        self.pos = 0
        # When set, atoms are resolved against this list as they are parsed.
        self.fluents = fluents

    # -- stream helpers -----------------------------------------------------

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.cur
        self.pos += 1
        return tok

    def fail(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.cur
        return ParseError(message, tok.line, tok.column)

    def at_punct(self, value: str) -> bool:
        return self.cur.kind == "punct" and self.cur.value == value

    def eat_punct(self, value: str) -> bool:
        if self.at_punct(value):
            self.pos += 1
            return True
        return False

    def expect_punct(self, value: str) -> Token:
        if not self.at_punct(value):
            raise self.fail(f"expected '{value}', found {self.cur.value!r}")
        return self.advance()

    def expect_name(self, what: str = "name") -> Token:
        if self.cur.kind != "name":
            raise self.fail(f"expected {what}, found {self.cur.value!r}")
        return self.advance()

    def expect_fresh_name(self, what: str) -> Token:
        tok = self.expect_name(what)
        if tok.value in RESERVED:
            raise self.fail(f"{tok.value!r} is a reserved word", tok)
        return tok

    # -- formulas -----------------------------------------------------------

    def formula(self) -> Formula:
        return self._iff()

    def _iff(self) -> Formula:
        left = self._implies()
        while self.eat_punct("<->"):
            left = Iff(left, self._implies())
        return left

    def _implies(self) -> Formula:
        left = self._or()
        if self.eat_punct("->"):
            return Implies(left, self._implies())
        return left

    def _or(self) -> Formula:
        left = self._and()
        while self.eat_punct("|"):
            left = Or(left, self._and())
        return left

    def _and(self) -> Formula:
        left = self._unary()
        while self.eat_punct("&"):
            left = And(left, self._unary())
        return left

    def _unary(self) -> Formula:
        if self.eat_punct("!"):
            return Not(self._unary())
        if self.eat_punct("("):
            inner = self.formula()
            self.expect_punct(")")
            return inner
        if self.cur.kind == "name":
            tok = self.advance()
            if tok.value == "true":
                return Const(True)
            if tok.value == "false":
                return Const(False)
            if tok.value in ("Bel", "Prev"):
                self.expect_punct("(")
                body = self.formula()
                self.expect_punct(")")
                return Bel(body) if tok.value == "Bel" else Prev(body)
            if tok.value in RESERVED:
                raise self.fail(f"{tok.value!r} is a reserved word", tok)
            if self.fluents is not None and tok.value not in self.fluents:
                raise self.fail(f"reference to undeclared fluent '{tok.value}'", tok)
            return Atom(tok.value)
        raise self.fail(f"expected formula, found {self.cur.value!r}")

    # -- numbers ------------------------------------------------------------

    def expect_int(self, what: str) -> int:
        if self.cur.kind != "number":
            raise self.fail(f"expected {what}, found {self.cur.value!r}")
        tok = self.advance()
        try:
            value = int(tok.value)
        except ValueError:
            raise self.fail(f"expected integer {what}", tok) from None
        return value

    def expect_float(self, what: str) -> float:
        if self.cur.kind != "number":
            raise self.fail(f"expected {what}, found {self.cur.value!r}")
        tok = self.advance()
        try:
            return float(tok.value)
        except ValueError:
            raise self.fail(f"malformed number for {what}", tok) from None


def parse_formula(text: str, fluents: list[str] | tuple[str, ...] | None = None) -> Formula:
    """Parse a standalone formula; when `fluents` is given, atoms must be
    declared there."""
    p = _Parser(tokenize(text), list(fluents) if fluents is not None else None)
    result = p.formula()
    if p.cur.kind != "eof":
        raise p.fail(f"unexpected trailing input {p.cur.value!r}")
    return result


class _DomainParser(_Parser):
    def __init__(self, tokens: list[Token]):
        super().__init__(tokens, fluents=[])
        self.declared: dict[str, str] = {}  # name -> kind, one namespace
        self.physical: list[PhysicalAction] = []
        self.sensing: list[SensingAction] = []
        self.initials: list[InitialSituation] = []
        self.actual: Valuation | None = None
        self.seq: tuple[str, ...] | None = None

    def declare(self, tok: Token, kind: str) -> str:
        if tok.value in self.declared:
            raise self.fail(
                f"duplicate name '{tok.value}' (already declared as {self.declared[tok.value]})", tok
            )
        self.declared[tok.value] = kind
        return tok.value

    def run(self) -> DomainSpec:
        if self.cur.kind == "eof":
            raise self.fail("expected declaration")
        while self.cur.kind != "eof":
            if self.cur.kind != "name":
                raise self.fail(f"expected declaration, found {self.cur.value!r}")
            keyword = self.cur.value
            if keyword == "fluent":
                self.fluent_decl()
            elif keyword == "action":
                self.action_decl()
            elif keyword == "sense":
                self.sense_decl()
            elif keyword == "init":
                self.init_decl()
            elif keyword == "actual":
                self.actual_decl()
            elif keyword == "seq":
                self.seq_decl()
            else:
                raise self.fail(f"expected declaration, found {keyword!r}")
        if self.actual is None:
            raise self.fail("missing 'actual' declaration")
        return DomainSpec(
            fluents=tuple(self.fluents),
            physical_actions=tuple(self.physical),
            sensing_actions=tuple(self.sensing),
            initial_situations=tuple(self.initials),
            actual_initial=self.actual,
            seq=self.seq,
        )

    def fluent_decl(self) -> None:
        start = self.advance()
        while True:
            tok = self.expect_fresh_name("fluent name")
            self.declare(tok, "fluent")
            self.fluents.append(tok.value)
            if not self.eat_punct(","):
                break
        self.expect_punct(";")
        if len(self.fluents) > MAX_FLUENTS:
            raise self.fail(f"too many fluents (limit {MAX_FLUENTS})", start)

    def action_decl(self) -> None:
        self.advance()
        name = self.declare(self.expect_fresh_name("action name"), "action")
        self.expect_punct("{")
        effects: list[tuple[str, Formula]] = []
        assigned: set[str] = set()
        precondition: Formula = TRUE
        has_poss = False
        while not self.eat_punct("}"):
            if self.cur.kind == "name" and self.cur.value == "poss":
                tok = self.advance()
                if has_poss:
                    raise self.fail(f"duplicate precondition in action '{name}'", tok)
                has_poss = True
                precondition = self.formula()
                self.expect_punct(";")
                continue
            target = self.expect_name("fluent name")
            if target.value not in self.fluents:
                raise self.fail(f"reference to undeclared fluent '{target.value}'", target)
            if target.value in assigned:
                raise self.fail(f"duplicate effect for fluent '{target.value}' in action '{name}'", target)
            assigned.add(target.value)
            self.expect_punct(":=")
            effects.append((target.value, self.formula()))
            self.expect_punct(";")
        self.physical.append(PhysicalAction(name, tuple(effects), precondition))

    def sense_decl(self) -> None:
        self.advance()
        name = self.declare(self.expect_fresh_name("sensing action name"), "sense")
        accuracy = 1.0
        if self.cur.kind == "name" and self.cur.value == "accuracy":
            tok = self.advance()
            self.expect_punct("=")
            accuracy = self.expect_float("accuracy")
            if not 0.0 <= accuracy <= 1.0:
                raise self.fail("accuracy must be within [0, 1]", tok)
        self.expect_punct("{")
        guards: list[tuple[Formula, Formula]] = []
        while not self.eat_punct("}"):
            tok = self.expect_name("'guard'")
            if tok.value != "guard":
                raise self.fail(f"expected 'guard', found {tok.value!r}", tok)
            condition = self.formula()
            tok = self.expect_name("'senses'")
            if tok.value != "senses":
                raise self.fail(f"expected 'senses', found {tok.value!r}", tok)
            sensed = self.formula()
            self.expect_punct(";")
            guards.append((condition, sensed))
        if not guards:
            raise self.fail(f"sense '{name}' declares no guards")
        self.sensing.append(SensingAction(name, tuple(guards), accuracy))

    def _assignment_block(self, owner: str, allow_pl: bool) -> tuple[Valuation, int | None]:
        self.expect_punct("{")
        valuation: Valuation = {}
        pl: int | None = None
        while not self.eat_punct("}"):
            tok = self.expect_name("fluent name")
            if tok.value == "pl":
                if not allow_pl:
                    raise self.fail("'pl' is not allowed here", tok)
                if pl is not None:
                    raise self.fail(f"duplicate pl in {owner}", tok)
                self.expect_punct("=")
                pl = self.expect_int("plausibility")
                if pl < 0:
                    raise self.fail("negative plausibility", tok)
                self.expect_punct(";")
                continue
            if tok.value not in self.fluents:
                raise self.fail(f"reference to undeclared fluent '{tok.value}'", tok)
            if tok.value in valuation:
                raise self.fail(f"duplicate assignment to '{tok.value}' in {owner}", tok)
            self.expect_punct("=")
            value = self.expect_name("'true' or 'false'")
            if value.value not in ("true", "false"):
                raise self.fail(f"expected 'true' or 'false', found {value.value!r}", value)
            valuation[tok.value] = value.value == "true"
            self.expect_punct(";")
        missing = [f for f in self.fluents if f not in valuation]
        if missing:
            raise self.fail(f"{owner} does not assign fluent '{missing[0]}'")
        return {f: valuation[f] for f in self.fluents}, pl

    def init_decl(self) -> None:
        self.advance()
        label_tok = self.expect_fresh_name("situation label")
        label = self.declare(label_tok, "init")
        valuation, pl = self._assignment_block(f"init '{label}'", allow_pl=True)
        if pl is None:
            raise self.fail(f"init '{label}' declares no pl", label_tok)
        self.initials.append(InitialSituation(label, valuation, pl))

    def actual_decl(self) -> None:
        tok = self.advance()
        if self.actual is not None:
            raise self.fail("duplicate 'actual' declaration", tok)
        self.actual, _ = self._assignment_block("actual", allow_pl=False)

    def seq_decl(self) -> None:
        tok = self.advance()
        if self.seq is not None:
            raise self.fail("duplicate 'seq' declaration", tok)
        names = []
        while True:
            names.append(self.expect_name("action name").value)
            if not self.eat_punct(","):
                break
        self.expect_punct(";")
        self.seq = tuple(names)


def parse_domain(text: str) -> DomainSpec:
    """Parse a domain description; raises ParseError with line/column on
    syntax errors, duplicate names, and undeclared references."""
    return _DomainParser(tokenize(text)).run()
