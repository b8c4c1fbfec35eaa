"""First-order formulas over linear integer atoms and the base-q predicates.

The atom set matches the first-order language of (Z, +, >=, 0) extended
with three relation families over base-q structure:

  * ShiftAtom(l, x, y):   x = q**r and y = q**(r + l*s) for some natural s
                          (r natural; for negative l only r + l*s >= 0 pairs
                          denote integers).
  * PowerAtom(l, x):      x is a power of q**l (l >= 1).
  * ValuationAtom(x, y):  y is the largest power of q dividing x (x != 0).

Linear atoms carry Z[1/q] coefficients as Terms; `clear_denominators`
turns a Term comparison into an integer LinearAtom by scaling both sides
with the smallest sufficient power of q.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .group import QFraction, qfraction


# ---------------------------------------------------------------------------
# Terms: linear combinations with Z[1/q] coefficients.


@dataclass(frozen=True)
class Term:
    coeffs: tuple  # tuple[(var name, QFraction), ...] sorted by name
    constant: QFraction

    def variables(self):
        return [v for v, _ in self.coeffs]


def make_term(coeffs=None, constant=0, q: int = 2) -> Term:
    """Build a canonical Term. Coefficient values may be ints or QFractions."""
    items = []
    for var, c in sorted((coeffs or {}).items()):
        f = c if isinstance(c, QFraction) else QFraction(int(c), 0)
        f = qfraction(f.numerator, f.exp, q)
        if f.numerator != 0:
            items.append((var, f))
    k = constant if isinstance(constant, QFraction) else QFraction(int(constant), 0)
    k = qfraction(k.numerator, k.exp, q)
    return Term(tuple(items), k)


def term_value(term: Term, assignment: dict, q: int) -> Fraction:
    total = Fraction(term.constant.numerator, q ** term.constant.exp)
    for var, c in term.coeffs:
        total += Fraction(c.numerator, q ** c.exp) * assignment[var]
    return total


# ---------------------------------------------------------------------------
# Integer linear atoms (denominators already cleared).


@dataclass(frozen=True)
class LinearAtom:
    """sum(coeffs[v] * v) (= or >=) constant, all integers."""

    coeffs: tuple  # tuple[(var, int), ...] sorted, nonzero entries only
    constant: int
    kind: str  # "eq" | "ge"

    def coeff_map(self) -> dict:
        return dict(self.coeffs)


def clear_denominators(lhs: Term, rhs: Term, q: int, kind: str = "eq") -> LinearAtom:
    """Scale lhs (= or >=) rhs by q**E so every coefficient is an integer.

    E is the largest denominator exponent across both sides; q**E > 0, so
    the relation over Z is unchanged.
    """
    if kind not in ("eq", "ge"):
        raise ValueError(f"unknown atom kind {kind!r}")
    diff: dict[str, QFraction] = {}
    for var, c in lhs.coeffs:
        diff[var] = c
    for var, c in rhs.coeffs:
        prev = diff.get(var, QFraction(0, 0))
        num = prev.numerator * q ** max(0, c.exp - prev.exp) \
            - c.numerator * q ** max(0, prev.exp - c.exp)
        diff[var] = qfraction(num, max(prev.exp, c.exp), q)
    exps = [c.exp for c in diff.values()] + [lhs.constant.exp, rhs.constant.exp]
    scale = max(exps) if exps else 0
    coeffs = []
    for var in sorted(diff):
        c = diff[var]
        n = c.numerator * q ** (scale - c.exp)
        if n != 0:
            coeffs.append((var, n))
    constant = (rhs.constant.numerator * q ** (scale - rhs.constant.exp)
                - lhs.constant.numerator * q ** (scale - lhs.constant.exp))
    return LinearAtom(tuple(coeffs), constant, kind)


# ---------------------------------------------------------------------------
# Formula tree.


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class TermEquals(Formula):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class TermGeq(Formula):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class ShiftAtom(Formula):
    shift: int
    x: str
    y: str


@dataclass(frozen=True)
class PowerAtom(Formula):
    power: int
    x: str

    def __post_init__(self):
        if self.power < 1:
            raise ValueError("power index must be at least 1")


@dataclass(frozen=True)
class ValuationAtom(Formula):
    x: str
    y: str

    def __post_init__(self):
        if self.x == self.y:
            raise ValueError("valuation atom needs two distinct variables")


@dataclass(frozen=True)
class And(Formula):
    children: tuple


@dataclass(frozen=True)
class Or(Formula):
    children: tuple


@dataclass(frozen=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


def land(*children) -> Formula:
    kids = tuple(c for c in children if not isinstance(c, TrueF))
    if any(isinstance(c, FalseF) for c in kids):
        return FalseF()
    if not kids:
        return TrueF()
    if len(kids) == 1:
        return kids[0]
    return And(kids)


def lor(*children) -> Formula:
    kids = tuple(c for c in children if not isinstance(c, FalseF))
    if any(isinstance(c, TrueF) for c in kids):
        return TrueF()
    if not kids:
        return FalseF()
    if len(kids) == 1:
        return kids[0]
    return Or(kids)


def var_term(name: str, coeff=1, q: int = 2) -> Term:
    return make_term({name: coeff}, 0, q)


def const_term(value, q: int = 2) -> Term:
    return make_term({}, value, q)


def equals(lhs: Term, rhs: Term) -> Formula:
    return TermEquals(lhs, rhs)


def geq(lhs: Term, rhs: Term) -> Formula:
    return TermGeq(lhs, rhs)


# ---------------------------------------------------------------------------
# Free variables, renaming, normalization.


def free_vars(phi: Formula) -> frozenset:
    match phi:
        case TrueF() | FalseF():
            return frozenset()
        case TermEquals(lhs, rhs) | TermGeq(lhs, rhs):
            return frozenset(lhs.variables()) | frozenset(rhs.variables())
        case ShiftAtom(_, x, y) | ValuationAtom(x, y):
            return frozenset({x, y})
        case PowerAtom(_, x):
            return frozenset({x})
        case And(children) | Or(children):
            out = frozenset()
            for c in children:
                out |= free_vars(c)
            return out
        case Not(child):
            return free_vars(child)
        case Exists(v, body) | Forall(v, body):
            return free_vars(body) - {v}
    raise TypeError(f"not a formula: {phi!r}")


def all_names(phi: Formula) -> set:
    match phi:
        case TrueF() | FalseF():
            return set()
        case TermEquals(lhs, rhs) | TermGeq(lhs, rhs):
            return set(lhs.variables()) | set(rhs.variables())
        case ShiftAtom(_, x, y) | ValuationAtom(x, y):
            return {x, y}
        case PowerAtom(_, x):
            return {x}
        case And(children) | Or(children):
            out = set()
            for c in children:
                out |= all_names(c)
            return out
        case Not(child):
            return all_names(child)
        case Exists(v, body) | Forall(v, body):
            return {v} | all_names(body)
    raise TypeError(f"not a formula: {phi!r}")


def _rename_term(term: Term, ren: dict) -> Term:
    return Term(tuple(sorted((ren.get(v, v), c) for v, c in term.coeffs)),
                term.constant)


def normalize(phi: Formula) -> Formula:
    """Rename bound variables apart, eliminate Forall as not-exists-not, and
    split any shift atom applied twice to the same variable."""
    taken = set(all_names(phi))
    counter = itertools.count()

    def fresh() -> str:
        while True:
            name = f"_q{next(counter)}"
            if name not in taken:
                taken.add(name)
                return name

    def walk(phi: Formula, ren: dict) -> Formula:
        match phi:
            case TrueF() | FalseF():
                return phi
            case TermEquals(lhs, rhs):
                return TermEquals(_rename_term(lhs, ren), _rename_term(rhs, ren))
            case TermGeq(lhs, rhs):
                return TermGeq(_rename_term(lhs, ren), _rename_term(rhs, ren))
            case ShiftAtom(l, x, y):
                x, y = ren.get(x, x), ren.get(y, y)
                if x == y:
                    # x shifted to itself asserts only that x is a power of q
                    # (the step count must be zero); keep the atom binary.
                    z = fresh()
                    return Exists(z, And((
                        TermEquals(var_term(z), var_term(x)),
                        ShiftAtom(l, x, z))))
                return ShiftAtom(l, x, y)
            case PowerAtom(l, x):
                return PowerAtom(l, ren.get(x, x))
            case ValuationAtom(x, y):
                return ValuationAtom(ren.get(x, x), ren.get(y, y))
            case And(children):
                return And(tuple(walk(c, ren) for c in children))
            case Or(children):
                return Or(tuple(walk(c, ren) for c in children))
            case Not(child):
                return Not(walk(child, ren))
            case Exists(v, body):
                nv = fresh()
                return Exists(nv, walk(body, {**ren, v: nv}))
            case Forall(v, body):
                nv = fresh()
                return Not(Exists(nv, Not(walk(body, {**ren, v: nv}))))
        raise TypeError(f"not a formula: {phi!r}")

    return walk(phi, {})


# ---------------------------------------------------------------------------
# Ground evaluation (tests and model checking only).


def eval_formula(phi: Formula, assignment: dict, q: int,
                 search_bound: int = 0) -> bool:
    """Evaluate under a total assignment of the free variables.

    Quantifiers are decided by searching [-search_bound, search_bound];
    this is exact only when witnesses fit in the bound, so it is test
    infrastructure, not part of the decision procedure.
    """
    from .atoms import power_holds, shift_holds, valuation_holds

    def ev(phi: Formula, env: dict) -> bool:
        match phi:
            case TrueF():
                return True
            case FalseF():
                return False
            case TermEquals(lhs, rhs):
                return term_value(lhs, env, q) == term_value(rhs, env, q)
            case TermGeq(lhs, rhs):
                return term_value(lhs, env, q) >= term_value(rhs, env, q)
            case ShiftAtom(l, x, y):
                return shift_holds(l, env[x], env[y], q)
            case PowerAtom(l, x):
                return power_holds(l, env[x], q)
            case ValuationAtom(x, y):
                return valuation_holds(env[x], env[y], q)
            case And(children):
                return all(ev(c, env) for c in children)
            case Or(children):
                return any(ev(c, env) for c in children)
            case Not(child):
                return not ev(child, env)
            case Exists(v, body):
                return any(ev(body, {**env, v: k})
                           for k in range(-search_bound, search_bound + 1))
            case Forall(v, body):
                return all(ev(body, {**env, v: k})
                           for k in range(-search_bound, search_bound + 1))
        raise TypeError(f"not a formula: {phi!r}")

    return ev(phi, dict(assignment))


# ---------------------------------------------------------------------------
# Debug dump.


def to_sexpr(phi: Formula) -> str:
    def term_s(t: Term) -> str:
        parts = []
        for v, c in t.coeffs:
            if c.exp == 0:
                parts.append(f"(* {c.numerator} {v})")
            else:
                parts.append(f"(* {c.numerator}/q^{c.exp} {v})")
        if t.constant.numerator != 0 or not parts:
            if t.constant.exp == 0:
                parts.append(str(t.constant.numerator))
            else:
                parts.append(f"{t.constant.numerator}/q^{t.constant.exp}")
        return parts[0] if len(parts) == 1 else "(+ " + " ".join(parts) + ")"

    match phi:
        case TrueF():
            return "true"
        case FalseF():
            return "false"
        case TermEquals(lhs, rhs):
            return f"(= {term_s(lhs)} {term_s(rhs)})"
        case TermGeq(lhs, rhs):
            return f"(>= {term_s(lhs)} {term_s(rhs)})"
        case ShiftAtom(l, x, y):
            return f"(shift {l} {x} {y})"
        case PowerAtom(l, x):
            return f"(power {l} {x})"
        case ValuationAtom(x, y):
            return f"(valuation {x} {y})"
        case And(children):
            return "(and " + " ".join(to_sexpr(c) for c in children) + ")"
        case Or(children):
            return "(or " + " ".join(to_sexpr(c) for c in children) + ")"
        case Not(child):
            return f"(not {to_sexpr(child)})"
        case Exists(v, body):
            return f"(exists ({v}) {to_sexpr(body)})"
        case Forall(v, body):
            return f"(forall ({v}) {to_sexpr(body)})"
    raise TypeError(f"not a formula: {phi!r}")
