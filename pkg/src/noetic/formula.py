"""Propositional formula AST extended with Bel(..) and Prev(..) modalities.

Plain connectives (`!`, `&`, `|`, `->`, `<->`) build state formulas over
fluent atoms; `Bel` wraps a formula that must hold in every most-plausible
candidate situation, and `Prev` shifts evaluation one action into the past.
A formula containing neither modality is "domain-dependent" and can be
evaluated directly against a fluent valuation.
"""

from __future__ import annotations

from dataclasses import dataclass


class Formula:
    """Base class for AST nodes. Instances are immutable and comparable."""

    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, slots=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Bel(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class Prev(Formula):
    body: Formula


TRUE = Const(True)
FALSE = Const(False)


def is_domain_dependent(formula: Formula) -> bool:
    """True iff the formula contains no Bel/Prev node."""
    match formula:
        case Const() | Atom():
            return True
        case Not(operand):
            return is_domain_dependent(operand)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return is_domain_dependent(l) and is_domain_dependent(r)
        case Bel() | Prev():
            return False
    raise TypeError(f"not a formula node: {formula!r}")


def atoms(formula: Formula) -> set[str]:
    """All fluent names mentioned anywhere in the formula."""
    match formula:
        case Const():
            return set()
        case Atom(name):
            return {name}
        case Not(operand) | Bel(operand) | Prev(operand):
            return atoms(operand)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return atoms(l) | atoms(r)
    raise TypeError(f"not a formula node: {formula!r}")


# Binding strength, loosest first. `&`/`|`/`<->` associate to the left,
# `->` to the right; the renderer inserts parentheses exactly where the
# parser would otherwise rebuild a different tree.
_IFF, _IMPLIES, _OR, _AND, _UNARY = 1, 2, 3, 4, 5


def _level(formula: Formula) -> int:
    match formula:
        case Iff():
            return _IFF
        case Implies():
            return _IMPLIES
        case Or():
            return _OR
        case And():
            return _AND
        case _:
            return _UNARY


def _render(formula: Formula, floor: int) -> str:
    match formula:
        case Const(value):
            text = "true" if value else "false"
        case Atom(name):
            text = name
        case Not(operand):
            text = "!" + _render(operand, _UNARY)
        case And(l, r):
            text = _render(l, _AND) + " & " + _render(r, _AND + 1)
        case Or(l, r):
            text = _render(l, _OR) + " | " + _render(r, _OR + 1)
        case Implies(l, r):
            text = _render(l, _IMPLIES + 1) + " -> " + _render(r, _IMPLIES)
        case Iff(l, r):
            text = _render(l, _IFF) + " <-> " + _render(r, _IFF + 1)
        case Bel(body):
            text = "Bel(" + _render(body, 0) + ")"
        case Prev(body):
            text = "Prev(" + _render(body, 0) + ")"
        case _:
            raise TypeError(f"not a formula node: {formula!r}")
    if _level(formula) < floor:
        return "(" + text + ")"
    return text


def render(formula: Formula) -> str:
    """Concrete syntax for the formula; parses back to an equal AST."""
    return _render(formula, 0)
