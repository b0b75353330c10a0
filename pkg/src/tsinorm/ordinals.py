"""Exact arithmetic for countable ordinals below epsilon_0.

An ordinal is stored in Cantor normal form as a tuple of
(exponent, coefficient) pairs with strictly decreasing exponents and
positive integer coefficients; the empty tuple is 0.  All operations are
pure functions of immutable values, so results may be shared freely.

Text syntax: ``w^{<ordinal>}*<int> + ...`` with the braces optional when
the exponent is an integer or a bare ``w``, e.g. ``w^w*2 + w^3``, ``w``,
``17``, ``0``.  The printer emits the canonical spelling and
``parse_ordinal(format_ordinal(a)) == a`` holds structurally.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError, ParseError

# Parser guard: nesting this deep has no desk-scale use and usually
# signals runaway generated input.
MAX_PARSE_DEPTH = 64


@dataclass(frozen=True)
class Ordinal:
    terms: tuple[tuple["Ordinal", int], ...] = ()

    def __post_init__(self):
        for exp, coeff in self.terms:
            if not isinstance(exp, Ordinal):
                raise ValueError("exponents must be Ordinal values")
            if not isinstance(coeff, int) or isinstance(coeff, bool) or coeff < 1:
                raise ValueError("coefficients must be integers >= 1")
        for (left, _), (right, _) in zip(self.terms, self.terms[1:]):
            if compare(left, right) <= 0:
                raise ValueError("exponents must be strictly decreasing")

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0].is_zero())

    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0].is_zero()

    def is_limit(self) -> bool:
        return bool(self.terms) and not self.terms[-1][0].is_zero()

    def to_int(self) -> int:
        if self.is_zero():
            return 0
        if not self.is_finite():
            raise DomainError(f"{self} is not a finite ordinal")
        return self.terms[0][1]

    def predecessor(self) -> "Ordinal":
        if not self.is_successor():
            raise DomainError(f"{self} is not a successor ordinal")
        exp, coeff = self.terms[-1]
        if coeff > 1:
            return Ordinal(self.terms[:-1] + ((exp, coeff - 1),))
        return Ordinal(self.terms[:-1])

    def fundamental(self, n: int) -> "Ordinal":
        """The n-th member of the fundamental sequence of a limit ordinal.

        Uses the standard assignment (g + w^(b+1))[n] = g + w^b * n and
        (g + w^l)[n] = g + w^(l[n]) for limit l.
        """
        if n < 1:
            raise DomainError("fundamental-sequence index must be >= 1")
        if not self.is_limit():
            raise DomainError(f"{self} is not a limit ordinal")
        exp, coeff = self.terms[-1]
        prefix = self.terms[:-1] if coeff == 1 else self.terms[:-1] + ((exp, coeff - 1),)
        if exp.is_successor():
            return add(Ordinal(prefix), Ordinal(((exp.predecessor(), n),)))
        return add(Ordinal(prefix), omega_power(exp.fundamental(n)))

    # -- operators ---------------------------------------------------------

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __lt__(self, other):
        return compare(self, _coerce(other)) < 0

    def __le__(self, other):
        return compare(self, _coerce(other)) <= 0

    def __gt__(self, other):
        return compare(self, _coerce(other)) > 0

    def __ge__(self, other):
        return compare(self, _coerce(other)) >= 0

    def __str__(self):
        return format_ordinal(self)

    def __repr__(self):
        return f"Ordinal[{format_ordinal(self)}]"


def _coerce(value) -> Ordinal:
    if isinstance(value, Ordinal):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return from_int(value)
    raise TypeError(f"cannot interpret {value!r} as an ordinal")


def from_int(n: int) -> Ordinal:
    if n < 0:
        raise DomainError("ordinals are nonnegative")
    if n == 0:
        return ZERO
    return Ordinal(((ZERO, n),))


ZERO = Ordinal()
ONE = Ordinal(((ZERO, 1),))
TWO = Ordinal(((ZERO, 2),))
OMEGA = Ordinal(((ONE, 1),))


def compare(a: Ordinal, b: Ordinal) -> int:
    """Total order on ordinals: -1, 0 or 1."""
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = compare(ea, eb)
        if c:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    if len(a.terms) == len(b.terms):
        return 0
    return -1 if len(a.terms) < len(b.terms) else 1


def add(a: Ordinal, b: Ordinal) -> Ordinal:
    """Ordinal addition; left terms below the head of b are absorbed."""
    if b.is_zero():
        return a
    if a.is_zero():
        return b
    head = b.terms[0][0]
    kept = []
    for exp, coeff in a.terms:
        if compare(exp, head) > 0:
            kept.append((exp, coeff))
        else:
            if compare(exp, head) == 0:
                merged = (head, coeff + b.terms[0][1])
                return Ordinal(tuple(kept) + (merged,) + b.terms[1:])
            break
    return Ordinal(tuple(kept) + b.terms)


def mul(a: Ordinal, b: Ordinal) -> Ordinal:
    """Ordinal multiplication, distributing over the normal form of b."""
    if a.is_zero() or b.is_zero():
        return ZERO
    lead_exp, lead_coeff = a.terms[0]
    result = ZERO
    for exp, coeff in b.terms:
        if exp.is_zero():
            piece = Ordinal(((lead_exp, lead_coeff * coeff),) + a.terms[1:])
        else:
            piece = Ordinal(((add(lead_exp, exp), coeff),))
        result = add(result, piece)
    return result


def omega_power(a: Ordinal) -> Ordinal:
    """w**a as a one-term normal form; omega_power(0) == 1."""
    return Ordinal(((a, 1),))


def leading(a: Ordinal) -> tuple[Ordinal, int]:
    """The head exponent and its coefficient; rejects 0."""
    if a.is_zero():
        raise DomainError("0 has no leading term")
    return a.terms[0]


# -- text ------------------------------------------------------------------


def format_ordinal(a: Ordinal) -> str:
    if a.is_zero():
        return "0"
    parts = []
    for exp, coeff in a.terms:
        if exp.is_zero():
            parts.append(str(coeff))
            continue
        if compare(exp, ONE) == 0:
            base = "w"
        elif exp.is_finite():
            base = f"w^{exp.to_int()}"
        elif compare(exp, OMEGA) == 0:
            base = "w^w"
        else:
            base = "w^{" + format_ordinal(exp) + "}"
        parts.append(base if coeff == 1 else f"{base}*{coeff}")
    return " + ".join(parts)


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, char: str) -> bool:
        if self.peek() == char:
            self.pos += 1
            return True
        return False

    def expect(self, char: str):
        if not self.take(char):
            raise ParseError(f"expected {char!r}", column=self.pos + 1)

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise ParseError("expected an integer", column=start + 1)
        return int(self.text[start:self.pos])


def parse_ordinal(text: str) -> Ordinal:
    reader = _Reader(text)
    value = _parse_sum(reader, 0)
    reader.skip_ws()
    if reader.pos != len(reader.text):
        raise ParseError("trailing input after ordinal", column=reader.pos + 1)
    return value


def _parse_sum(reader: _Reader, depth: int) -> Ordinal:
    if depth > MAX_PARSE_DEPTH:
        raise ParseError("ordinal expression nested too deeply")
    terms = []
    while True:
        exp, coeff = _parse_term(reader, depth)
        if coeff == 0:
            if terms or reader.peek() == "+":
                raise ParseError("0 cannot appear as a summand", column=reader.pos)
            return ZERO
        if terms and compare(terms[-1][0], exp) <= 0:
            raise ParseError(
                "term exponents must strictly decrease", column=reader.pos
            )
        terms.append((exp, coeff))
        if not reader.take("+"):
            return Ordinal(tuple(terms))


def _parse_term(reader: _Reader, depth: int) -> tuple[Ordinal, int]:
    ch = reader.peek()
    if ch.isdigit():
        return ZERO, reader.integer()
    if ch != "w":
        raise ParseError("expected 'w' or an integer", column=reader.pos + 1)
    reader.pos += 1
    exp = ONE
    if reader.take("^"):
        nxt = reader.peek()
        if nxt == "{":
            reader.pos += 1
            exp = _parse_sum(reader, depth + 1)
            reader.expect("}")
        elif nxt == "w":
            reader.pos += 1
            exp = OMEGA
        else:
            exp = from_int(reader.integer())
    coeff = 1
    if reader.take("*"):
        coeff = reader.integer()
        if coeff < 1:
            raise ParseError("coefficients must be >= 1", column=reader.pos)
    if exp.is_zero():
        return ZERO, coeff
    return exp, coeff
