"""
Parser for the textual syntax of terms, formulas, protocol operations
and constraints.

Examples::

    satImage([38.0,-9.4,Res,500,_,radar,_],Image)
    toBuy(S) & provides(Ag,S)
    requestedBy(Ag,S) & ~toSell(S) [send(refuse,Ag,requester(S))] true
    Res in [900,1100]
    ST in {radar,optical}

Printing any parsed object with ``str()`` yields text that parses back to
an equal object.
"""

import re
from dataclasses import dataclass
from decimal import Decimal
from typing import List, Optional, Tuple

from voform.core.errors import TermError, TermSyntaxError
from voform.core.formulas import TRUE, And, Atom, Formula, Not
from voform.core.terms import (
    NUMBER_PATTERN,
    Constant,
    ListTerm,
    Term,
    Variable,
    compound,
)


TOKEN_PATTERN = re.compile(
    r'\s*(?:(?P<word>-?[A-Za-z0-9_][A-Za-z0-9_.]*)|(?P<punct>[()\[\]{},&~]))'
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    position = 0
    while position < len(text):
        if text[position:].strip() == '':
            break
        match = TOKEN_PATTERN.match(text, position)
        if not match:
            offset = position + (len(text[position:]) - len(text[position:].lstrip()))
            raise TermSyntaxError(f"Unexpected character {text[offset]!r}", text, offset)
        kind = 'word' if match.group('word') else 'punct'
        value = match.group(kind)
        tokens.append(Token(kind, value, match.start(kind)))
        position = match.end()
    return tokens


class _Parser:
    """Recursive-descent parser over a token list."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    # Token helpers

    def peek(self, offset: int = 0) -> Optional[Token]:
        index = self.index + offset
        return self.tokens[index] if index < len(self.tokens) else None

    def error(self, message: str) -> TermSyntaxError:
        token = self.peek()
        position = token.position if token else len(self.text)
        return TermSyntaxError(message, self.text, position)

    def accept(self, text: str) -> bool:
        token = self.peek()
        if token is not None and token.text == text:
            self.index += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        token = self.peek()
        if token is None or token.text != text:
            found = token.text if token else 'end of input'
            raise self.error(f"Expected {text!r}, found {found!r}")
        self.index += 1
        return token

    def expect_word(self, what: str = 'a word') -> Token:
        token = self.peek()
        if token is None or token.kind != 'word':
            found = token.text if token else 'end of input'
            raise self.error(f"Expected {what}, found {found!r}")
        self.index += 1
        return token

    def expect_end(self) -> None:
        if self.peek() is not None:
            raise self.error(f"Unexpected trailing input {self.peek().text!r}")

    # Terms

    def term(self) -> Term:
        if self.accept('['):
            elements = []
            if not self.accept(']'):
                elements.append(self.term())
                while self.accept(','):
                    elements.append(self.term())
                self.expect(']')
            return ListTerm(tuple(elements))

        token = self.expect_word('a term')
        word = token.text
        if self.accept('('):
            if word[0].isupper() or word[0] == '_' or NUMBER_PATTERN.match(word):
                raise TermSyntaxError(f"Invalid functor {word!r}", self.text, token.position)
            args = self.arguments_after_open()
            return self.wrap(lambda: compound(word, args), token)
        return self.wrap(lambda: word_to_term(word), token)

    def arguments_after_open(self) -> Tuple[Term, ...]:
        args = []
        if not self.accept(')'):
            args.append(self.term())
            while self.accept(','):
                args.append(self.term())
            self.expect(')')
        return tuple(args)

    def wrap(self, build, token: Token):
        try:
            return build()
        except TermSyntaxError:
            raise
        except TermError as exc:
            raise TermSyntaxError(str(exc), self.text, token.position) from exc

    # Formulas

    def formula(self) -> Formula:
        result = self.unary()
        while self.accept('&'):
            result = And(result, self.unary())
        return result

    def unary(self) -> Formula:
        if self.accept('~'):
            return Not(self.unary())
        if self.accept('('):
            inner = self.formula()
            self.expect(')')
            return inner
        return self.atom()

    def atom(self) -> Formula:
        token = self.expect_word('an atom')
        if token.text == 'true':
            return TRUE
        if token.text[0].isupper() or token.text[0] == '_':
            raise TermSyntaxError(f"Predicate expected, found variable {token.text!r}",
                                  self.text, token.position)
        args: Tuple[Term, ...] = ()
        if self.accept('('):
            args = self.arguments_after_open()
        return self.wrap(lambda: Atom(token.text, args), token)

    # Single-argument structures: locutions and role labels

    def name_with_optional_argument(self, what: str) -> Tuple[str, Optional[Term]]:
        token = self.expect_word(what)
        if token.text[0].isupper() or token.text[0] == '_' or NUMBER_PATTERN.match(token.text):
            raise TermSyntaxError(f"Invalid {what} {token.text!r}", self.text, token.position)
        argument = None
        if self.accept('('):
            argument = self.term()
            self.expect(')')
        return token.text, argument

    # Constraints

    def constraint(self):
        from voform.core.constraints import IntervalMembership, SetMembership

        token = self.expect_word('a variable')
        variable = self.wrap(lambda: word_to_term(token.text), token)
        if not isinstance(variable, Variable) or variable.is_anonymous:
            raise TermSyntaxError("Constraint must start with a named variable",
                                  self.text, token.position)
        self.expect('in')
        if self.accept('['):
            lower = self.number()
            self.expect(',')
            upper = self.number()
            self.expect(']')
            return self.wrap(lambda: IntervalMembership(variable, lower, upper), token)
        self.expect('{')
        values = [self.constant()]
        while self.accept(','):
            values.append(self.constant())
        self.expect('}')
        return self.wrap(lambda: SetMembership(variable, frozenset(values)), token)

    def number(self) -> Decimal:
        token = self.expect_word('a number')
        if not NUMBER_PATTERN.match(token.text):
            raise TermSyntaxError(f"Expected a number, found {token.text!r}",
                                  self.text, token.position)
        return Decimal(token.text)

    def constant(self) -> Constant:
        token = self.expect_word('a constant')
        term = self.wrap(lambda: word_to_term(token.text), token)
        if not isinstance(term, Constant):
            raise TermSyntaxError(f"Expected a constant, found {token.text!r}",
                                  self.text, token.position)
        return term


def word_to_term(word: str) -> Term:
    """Classify a bare word as a number, variable or symbol constant."""
    if NUMBER_PATTERN.match(word):
        return Constant(Decimal(word))
    if word[0].isupper() or word[0] == '_':
        return Variable(word)
    return Constant(word)


def parse_term(text: str) -> Term:
    parser = _Parser(text)
    term = parser.term()
    parser.expect_end()
    return term


def parse_service(text: str):
    """Parse a service term ``name(input,output)``."""
    from voform.core.terms import ServiceTerm

    term = parse_term(text)
    if not isinstance(term, ServiceTerm):
        raise TermSyntaxError(f"Expected a service term name(input,output), got {term}", text, 0)
    return term


def parse_formula(text: str) -> Formula:
    parser = _Parser(text)
    formula = parser.formula()
    parser.expect_end()
    return formula


def parse_atom(text: str) -> Atom:
    formula = parse_formula(text)
    if not isinstance(formula, Atom):
        raise TermSyntaxError(f"Expected a single atom, got {formula}", text, 0)
    return formula


def parse_locution(text: str):
    from voform.engines.protocol import Locution

    parser = _Parser(text)
    performative, content = parser.name_with_optional_argument('a performative')
    parser.expect_end()
    return Locution(performative, content)


def parse_role_label(text: str):
    from voform.engines.protocol import RoleLabel

    parser = _Parser(text)
    name, parameter = parser.name_with_optional_argument('a role name')
    parser.expect_end()
    return parser.wrap(lambda: RoleLabel(name, parameter), parser.tokens[0])


def parse_operation(text: str):
    """
    Parse ``PRE [send|receive(locution, partner, partnerRole)] POST``.

    Returns:
        A ``ProtocolOperation``
    """
    from voform.engines.protocol import Direction, Locution, ProtocolOperation, RoleLabel

    parser = _Parser(text)
    precondition = parser.formula()
    parser.expect('[')
    token = parser.expect_word("'send' or 'receive'")
    if token.text not in ('send', 'receive'):
        raise TermSyntaxError(f"Expected 'send' or 'receive', found {token.text!r}",
                              text, token.position)
    parser.expect('(')
    performative, content = parser.name_with_optional_argument('a performative')
    parser.expect(',')
    partner = parser.term()
    parser.expect(',')
    role_token = parser.peek()
    role_name, role_parameter = parser.name_with_optional_argument('a role name')
    parser.expect(')')
    parser.expect(']')
    postcondition = parser.formula()
    parser.expect_end()

    return parser.wrap(
        lambda: ProtocolOperation(
            precondition=precondition,
            direction=Direction(token.text),
            locution=Locution(performative, content),
            partner=partner,
            partner_role=RoleLabel(role_name, role_parameter),
            postcondition=postcondition,
        ),
        role_token,
    )


def parse_constraint(text: str):
    parser = _Parser(text)
    constraint = parser.constraint()
    parser.expect_end()
    return constraint
