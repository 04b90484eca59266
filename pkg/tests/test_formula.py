import pytest
from hypothesis import given
from hypothesis import strategies as st

from noetic.formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    Bel,
    Iff,
    Implies,
    Not,
    Or,
    Prev,
    atoms,
    is_domain_dependent,
    render,
)
from noetic.parser import ParseError, parse_formula


def test_parse_atoms_and_constants():
    assert parse_formula("InR1") == Atom("InR1")
    assert parse_formula("true") == TRUE
    assert parse_formula("false") == FALSE


def test_parse_conjunction():
    assert parse_formula("InR1 & !Light1") == And(Atom("InR1"), Not(Atom("Light1")))


def test_parse_bel_and_prev():
    assert parse_formula("Bel(!InR1)") == Bel(Not(Atom("InR1")))
    nested = parse_formula("Prev(InR1 & Bel(!InR1))")
    assert nested == Prev(And(Atom("InR1"), Bel(Not(Atom("InR1")))))


def test_precedence():
    # ! binds tighter than &, & than |, | than ->, -> than <->
    f = parse_formula("a <-> !b & c | d -> e")
    assert f == Iff(Atom("a"), Implies(Or(And(Not(Atom("b")), Atom("c")), Atom("d")), Atom("e")))


def test_associativity():
    assert parse_formula("a & b & c") == And(And(Atom("a"), Atom("b")), Atom("c"))
    assert parse_formula("a -> b -> c") == Implies(Atom("a"), Implies(Atom("b"), Atom("c")))
    assert parse_formula("a <-> b <-> c") == Iff(Iff(Atom("a"), Atom("b")), Atom("c"))


def test_parentheses_override():
    assert parse_formula("a & (b | c)") == And(Atom("a"), Or(Atom("b"), Atom("c")))


def test_undeclared_fluent_rejected_with_spec():
    parse_formula("InR1", ["InR1"])
    with pytest.raises(ParseError, match="undeclared fluent"):
        parse_formula("InR2", ["InR1"])


def test_reserved_word_rejected_as_atom():
    with pytest.raises(ParseError, match="reserved"):
        parse_formula("guard & a")


def test_trailing_input_rejected():
    with pytest.raises(ParseError, match="trailing"):
        parse_formula("a b")


def test_syntax_error_positions():
    with pytest.raises(ParseError) as info:
        parse_formula("a &\n& b")
    assert info.value.line == 2
    assert info.value.column == 1


def test_domain_dependent():
    assert is_domain_dependent(parse_formula("a & (b -> !c)"))
    assert not is_domain_dependent(parse_formula("a & Bel(b)"))
    assert not is_domain_dependent(parse_formula("Prev(a)"))


def test_atoms():
    assert atoms(parse_formula("a & Bel(b | !c)")) == {"a", "b", "c"}


names = st.sampled_from(["a", "b", "c", "d"])


def formulas(max_depth: int = 5):
    base = st.one_of(names.map(Atom), st.sampled_from([TRUE, FALSE]))
    return st.recursive(
        base,
        lambda sub: st.one_of(
            sub.map(Not),
            sub.map(Bel),
            sub.map(Prev),
            st.tuples(sub, sub).map(lambda t: And(*t)),
            st.tuples(sub, sub).map(lambda t: Or(*t)),
            st.tuples(sub, sub).map(lambda t: Implies(*t)),
            st.tuples(sub, sub).map(lambda t: Iff(*t)),
        ),
        max_leaves=20,
    )


@given(formulas())
def test_render_parse_round_trip(f):
    assert parse_formula(render(f)) == f


@given(formulas())
def test_str_matches_render(f):
    assert str(f) == render(f)
