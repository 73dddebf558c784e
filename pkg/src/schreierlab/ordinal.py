"""Countable ordinals below epsilon_0 in Cantor normal form.

An ordinal is a finite sum  w^{e_1}*c_1 + ... + w^{e_k}*c_k  with strictly
decreasing ordinal exponents and positive integer coefficients; the empty
sum is 0.  The module provides the total order, zero/successor/limit
classification, and the canonical successor sequence (assoc) that drives
the transfinite family hierarchy: assoc(a, n) is the n-th term a_n + 1 of
a strictly increasing sequence of successor ordinals tending to a (for
successor a the sequence is constantly a itself).

Only the arithmetic the hierarchy needs is exposed: natural addition at
the tail, w-power construction, and the operations above.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

DEFAULT_DEPTH_LIMIT = 8  # exponent nesting cap for parsed / constructed values


class OrdinalError(ValueError):
    pass


class Order(Enum):
    LT = "LT"
    EQ = "EQ"
    GT = "GT"


class OrdinalKind(Enum):
    ZERO = "zero"
    SUCCESSOR = "successor"
    LIMIT = "limit"


@dataclass(frozen=True)
class Ordinal:
    """Cantor normal form as a tuple of (exponent, coefficient) terms."""

    terms: Tuple[Tuple["Ordinal", int], ...] = ()

    def __post_init__(self):
        prev = None
        for exp, coeff in self.terms:
            if not isinstance(exp, Ordinal):
                raise OrdinalError("exponent must be an Ordinal")
            if not isinstance(coeff, int) or coeff < 1:
                raise OrdinalError("coefficients must be integers >= 1")
            if prev is not None and compare(exp, prev) != Order.LT:
                raise OrdinalError("exponents must be strictly decreasing")
            prev = exp

    # -- classification ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def kind(self) -> OrdinalKind:
        if not self.terms:
            return OrdinalKind.ZERO
        last_exp, _ = self.terms[-1]
        return OrdinalKind.SUCCESSOR if last_exp.is_zero else OrdinalKind.LIMIT

    def predecessor(self) -> "Ordinal":
        if self.kind() is not OrdinalKind.SUCCESSOR:
            raise OrdinalError(f"{self} is not a successor")
        exp, coeff = self.terms[-1]
        if coeff > 1:
            return Ordinal(self.terms[:-1] + ((exp, coeff - 1),))
        return Ordinal(self.terms[:-1])

    def plus_nat(self, n: int) -> "Ordinal":
        """self + n for a natural n >= 0 (appends to the finite tail)."""
        if n < 0:
            raise OrdinalError("can only add naturals")
        if n == 0:
            return self
        if self.terms and self.terms[-1][0].is_zero:
            exp, coeff = self.terms[-1]
            return Ordinal(self.terms[:-1] + ((exp, coeff + n),))
        return Ordinal(self.terms + ((ZERO, n),))

    def as_int(self) -> int:
        """The value as a natural number; error if infinite."""
        if not self.terms:
            return 0
        if len(self.terms) == 1 and self.terms[0][0].is_zero:
            return self.terms[0][1]
        raise OrdinalError(f"{self} is not finite")

    def depth(self) -> int:
        """Exponent nesting depth: 0 for 0, else 1 + max over exponents."""
        if not self.terms:
            return 0
        return 1 + max(exp.depth() for exp, _ in self.terms)

    # -- ordering -----------------------------------------------------------

    def __lt__(self, other):
        return compare(self, other) is Order.LT

    def __le__(self, other):
        return compare(self, other) is not Order.GT

    def __gt__(self, other):
        return compare(self, other) is Order.GT

    def __ge__(self, other):
        return compare(self, other) is not Order.LT

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"Ordinal({to_text(self)!r})"


ZERO = Ordinal()
ONE = Ordinal(((ZERO, 1),))
OMEGA = Ordinal(((ONE, 1),))


def from_int(n: int) -> Ordinal:
    if n < 0:
        raise OrdinalError("ordinals are non-negative")
    return Ordinal(((ZERO, n),)) if n else ZERO


def omega_power(exp: Ordinal, coeff: int = 1, depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Ordinal:
    out = Ordinal(((exp, coeff),))
    if out.depth() > depth_limit:
        raise OrdinalError(f"exponent nesting depth exceeds {depth_limit}")
    return out


def compare(a: Ordinal, b: Ordinal) -> Order:
    """Total order on CNF: lexicographic on (exponent, coefficient) terms."""
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = compare(ea, eb)
        if c is not Order.EQ:
            return c
        if ca != cb:
            return Order.LT if ca < cb else Order.GT
    if len(a.terms) == len(b.terms):
        return Order.EQ
    return Order.LT if len(a.terms) < len(b.terms) else Order.GT


def classify(a: Ordinal):
    """(kind, predecessor-or-None) per the zero/successor/limit split."""
    k = a.kind()
    return k, (a.predecessor() if k is OrdinalKind.SUCCESSOR else None)


def fundamental(a: Ordinal, n: int) -> Ordinal:
    """Canonical fundamental sequence a[n] for a limit ordinal a.

    (b + w^{d+1})[n] = b + w^d * n ; (b + w^L)[n] = b + w^{L[n]} for limit L.
    Strictly increasing in n and tending to a.
    """
    if a.kind() is not OrdinalKind.LIMIT:
        raise OrdinalError(f"{a} is not a limit ordinal")
    if n < 1:
        raise OrdinalError("fundamental sequence index must be >= 1")
    exp, coeff = a.terms[-1]
    base = a.terms[:-1] if coeff == 1 else a.terms[:-1] + ((exp, coeff - 1),)
    if exp.kind() is OrdinalKind.SUCCESSOR:
        tail = (exp.predecessor(), n)
        if tail[0].is_zero:
            return Ordinal(base).plus_nat(n)
        return Ordinal(base + (tail,))
    return Ordinal(base + ((fundamental(exp, n), 1),))


def assoc(a: Ordinal, n: int) -> Ordinal:
    """The n-th associated successor-sequence term a_n + 1.

    For successor a the associated a_n is a - 1 for every n, so the term is
    a itself; for limit a it is a[n] + 1 along the canonical sequence.
    """
    if n < 1:
        raise OrdinalError("sequence index must be >= 1")
    k = a.kind()
    if k is OrdinalKind.ZERO:
        raise OrdinalError("0 has no associated sequence")
    if k is OrdinalKind.SUCCESSOR:
        return a
    return fundamental(a, n).plus_nat(1)


# -- text syntax ------------------------------------------------------------
#
#   0, 3, w, w+1, w*2, w^2, w^w, w^(w+1)*3+w*2+5
#
# Terms are joined by '+', strictly decreasing; an exponent is written bare
# when it is a natural number or the single atom 'w', parenthesised
# otherwise.  Parser and printer are exact inverses on canonical forms.


def to_text(a: Ordinal) -> str:
    if not a.terms:
        return "0"
    parts = []
    for exp, coeff in a.terms:
        if exp.is_zero:
            parts.append(str(coeff))
            continue
        if exp == ONE:
            body = "w"
        else:
            exp_text = to_text(exp)
            if _is_atom(exp_text):
                body = f"w^{exp_text}"
            else:
                body = f"w^({exp_text})"
        parts.append(body if coeff == 1 else f"{body}*{coeff}")
    return "+".join(parts)


def _is_atom(text: str) -> bool:
    return text == "w" or text.isdigit()


class _Parser:
    def __init__(self, text: str, depth_limit: int):
        self.text = text
        self.pos = 0
        self.depth_limit = depth_limit

    def fail(self, why: str):
        raise OrdinalError(f"cannot parse ordinal {self.text!r} at {self.pos}: {why}")

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str):
        if self.peek() != ch:
            self.fail(f"expected {ch!r}")
        self.pos += 1

    def nat(self) -> int:
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        if start == self.pos:
            self.fail("expected a number")
        return int(self.text[start:self.pos])

    def ordinal(self) -> Ordinal:
        terms = [self.term()]
        while self.peek() == "+":
            self.take("+")
            terms.append(self.term())
        try:
            return Ordinal(tuple(terms))
        except OrdinalError as exc:
            self.fail(str(exc))

    def term(self) -> Tuple[Ordinal, int]:
        if self.peek().isdigit():
            return (ZERO, self.nat())
        if self.peek() != "w":
            self.fail("expected 'w' or a number")
        self.take("w")
        exp = ONE
        if self.peek() == "^":
            self.take("^")
            if self.peek() == "(":
                self.take("(")
                exp = self.ordinal()
                self.take(")")
            elif self.peek().isdigit():
                exp = from_int(self.nat())
            elif self.peek() == "w":
                self.take("w")
                exp = OMEGA
            else:
                self.fail("expected an exponent")
        coeff = 1
        if self.peek() == "*":
            self.take("*")
            coeff = self.nat()
            if coeff < 1:
                self.fail("coefficient must be >= 1")
        return (exp, coeff)


def parse(text: str, depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Ordinal:
    """Parse the text syntax; rejects non-canonical or too-deep input."""
    text = text.strip()
    if not text:
        raise OrdinalError("empty ordinal text")
    if text == "0":
        return ZERO
    parser = _Parser(text, depth_limit)
    out = parser.ordinal()
    if parser.pos != len(text):
        parser.fail("trailing input")
    if out.depth() > depth_limit:
        raise OrdinalError(f"exponent nesting depth exceeds {depth_limit}")
    if to_text(out) != text:
        raise OrdinalError(f"non-canonical ordinal text {text!r} (canonical: {to_text(out)!r})")
    return out
