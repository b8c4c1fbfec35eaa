"""Exact arithmetic in the solvable Baumslag-Solitar group BS(1,q).

BS(1,q) = <a, t | t a t^-1 = a^q> embeds into GL(2,Q) as the group of
matrices ((q^k, u), (0, 1)) with k an integer and u in Z[1/q].  An element
is stored as the pair (k, u); u is kept in the canonical form
numerator / q^exp with q not dividing the numerator whenever exp > 0.
All arithmetic is exact (Python integers), and every value is immutable.
"""

from __future__ import annotations

from dataclasses import dataclass


class WordParseError(ValueError):
    """Raised on a token outside the generator alphabet."""

    def __init__(self, message: str, position: int):
        super().__init__(message)
        self.position = position


@dataclass(frozen=True)
class QFraction:
    """A value numerator / q**exp in Z[1/q]; q is supplied by context."""

    numerator: int
    exp: int

    def is_integer(self) -> bool:
        return self.exp == 0

    def __repr__(self):
        if self.exp == 0:
            return f"QFraction({self.numerator})"
        return f"QFraction({self.numerator}/q^{self.exp})"


@dataclass(frozen=True)
class GroupElement:
    """Matrix ((q^t_exp, coeff), (0, 1)) in canonical form."""

    t_exp: int
    coeff: QFraction

    def __repr__(self):
        return f"GroupElement(k={self.t_exp}, u={self.coeff!r})"


# Words over the generators; inverses are spelled "a^-1" / "t^-1".
WORD_LETTERS = ("a", "a^-1", "t", "t^-1")

_TOKEN_MAP = {
    "a": "a",
    "t": "t",
    "a^-1": "a^-1",
    "t^-1": "t^-1",
    # Capitals abbreviate the inverses.
    "A": "a^-1",
    "T": "t^-1",
}


def qfraction(numerator: int, exp: int, q: int) -> QFraction:
    """Canonical Z[1/q] value: zero has exp 0, otherwise q does not divide
    the numerator while exp > 0."""
    if exp < 0:
        numerator *= q ** (-exp)
        exp = 0
    if numerator == 0:
        return QFraction(0, 0)
    while exp > 0 and numerator % q == 0:
        numerator //= q
        exp -= 1
    return QFraction(numerator, exp)


def qfraction_is_canonical(f: QFraction, q: int) -> bool:
    if f.exp < 0:
        return False
    if f.numerator == 0:
        return f.exp == 0
    return f.exp == 0 or f.numerator % q != 0


def qfrac_add(x: QFraction, y: QFraction, q: int) -> QFraction:
    e = max(x.exp, y.exp)
    num = x.numerator * q ** (e - x.exp) + y.numerator * q ** (e - y.exp)
    return qfraction(num, e, q)


def qfrac_mul(x: QFraction, y: QFraction, q: int) -> QFraction:
    return qfraction(x.numerator * y.numerator, x.exp + y.exp, q)


def qfrac_scale_power(x: QFraction, k: int, q: int) -> QFraction:
    """x * q**k, exactly."""
    return qfraction(x.numerator, x.exp - k, q)


def qfrac_neg(x: QFraction) -> QFraction:
    return QFraction(-x.numerator, x.exp)


IDENTITY_COEFF = QFraction(0, 0)


def identity() -> GroupElement:
    return GroupElement(0, IDENTITY_COEFF)


def element(t_exp: int, numerator: int, denom_exp: int, q: int) -> GroupElement:
    """Canonical element from raw matrix data."""
    return GroupElement(t_exp, qfraction(numerator, denom_exp, q))


def is_canonical(g: GroupElement, q: int) -> bool:
    return qfraction_is_canonical(g.coeff, q)


def multiply(g: GroupElement, h: GroupElement, q: int) -> GroupElement:
    """(k,u)(l,v) = (k+l, u + v*q^k), the matrix product."""
    coeff = qfrac_add(g.coeff, qfrac_scale_power(h.coeff, g.t_exp, q), q)
    return GroupElement(g.t_exp + h.t_exp, coeff)


def inverse(g: GroupElement, q: int) -> GroupElement:
    """(k,u)^-1 = (-k, -u*q^-k)."""
    coeff = qfrac_scale_power(qfrac_neg(g.coeff), -g.t_exp, q)
    return GroupElement(-g.t_exp, coeff)


def power(g: GroupElement, s: int, q: int) -> GroupElement:
    """g**s for s >= 0 via the closed form; equals s-fold multiplication.

    For g = (l, v) with l != 0 the coefficient of g**s is
    v * (q^(l*s) - 1) / (q^l - 1), the geometric sum of v, v*q^l, ...
    For l = 0 it is simply s*v.
    """
    if s < 0:
        raise ValueError("exponent must be a natural number")
    if s == 0:
        return identity()
    l = g.t_exp
    v = g.coeff
    if l == 0:
        return GroupElement(0, qfraction(s * v.numerator, v.exp, q))
    al = abs(l)
    # (q^(l*s) - 1) / (q^l - 1) written over the denominator q^(|l|*(s-1))
    # so that it is exact for negative l as well.
    ratio_num = (q ** (al * s) - 1) // (q ** al - 1)
    if l > 0:
        ratio = QFraction(ratio_num, 0)
    else:
        ratio = qfraction(ratio_num, al * (s - 1), q)
    return GroupElement(l * s, qfrac_mul(v, ratio, q))


def is_integral(g: GroupElement) -> bool:
    """True iff the matrix has integer entries (t_exp >= 0, integer coeff)."""
    return g.t_exp >= 0 and g.coeff.exp == 0


def integral_shift(gs: list[GroupElement], q: int) -> int:
    """Least k >= 0 such that (k, 0) times every prefix product of gs
    (including the empty prefix) has integer entries.

    For a prefix product (k_i, u_i), the shifted matrix is
    (k + k_i, u_i * q^k); it is integral iff k >= -k_i and k >= exp(u_i).
    """
    if not gs:
        raise ValueError("need at least one element")
    k = 0
    prefix = identity()
    for g in gs:
        prefix = multiply(prefix, g, q)
        k = max(k, -prefix.t_exp, prefix.coeff.exp)
    return k


def parse_word(text: str) -> tuple[str, ...]:
    """Tokenize a whitespace-separated generator word.

    Accepted tokens: a, t, a^-1, t^-1, plus A and T for the inverses.
    The empty string is the empty word (identity).
    """
    letters = []
    for i, token in enumerate(text.split(), start=1):
        letter = _TOKEN_MAP.get(token)
        if letter is None:
            raise WordParseError(
                f"unknown token {token!r} at position {i} "
                f"(expected one of a, t, a^-1, t^-1)",
                position=i,
            )
        letters.append(letter)
    return tuple(letters)


_LETTER_IMAGES = {
    "a": (0, 1, 0),
    "a^-1": (0, -1, 0),
    "t": (1, 0, 0),
    "t^-1": (-1, 0, 0),
}


def eval_word(word: tuple[str, ...], q: int) -> GroupElement:
    """Left-to-right product of the letter images; empty word is identity."""
    if q < 2:
        raise ValueError("q must be at least 2")
    result = identity()
    for letter in word:
        k, num, exp = _LETTER_IMAGES[letter]
        result = multiply(result, element(k, num, exp, q), q)
    return result


def format_word(word: tuple[str, ...]) -> str:
    return " ".join(word)


GEN_A = element(0, 1, 0, 2)  # (k=0, u=1) under any q
GEN_T = element(1, 0, 0, 2)  # (k=1, u=0) under any q
