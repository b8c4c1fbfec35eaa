"""Relation automata for the atomic predicates.

Every builder returns a saturated, minimized automaton over the encoding
from `automata`:

  * linear_automaton:    integer linear equations / inequalities, realized
                         as a carry machine read least significant digit
                         first.
  * shift_automaton:     pairs (q^r, q^(r + l*s)) with natural r, s.
  * power_automaton:     powers of q^l.
  * valuation_automaton: pairs (x, largest power of q dividing x), x != 0.

Each predicate also has a direct arithmetic evaluator used by tests and
model checking.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .automata import (
    Alphabet,
    AutomatonBuilder,
    Automaton,
    DEFAULT_STATE_CAP,
    full_label,
    minimize,
    product_intersection,
    reorder_tracks,
    saturate_padding,
)
from .formula import (
    And,
    Exists,
    LinearAtom,
    Or,
    PowerAtom,
    TermEquals,
    TermGeq,
    clear_denominators,
    geq,
    make_term,
    var_term,
)


def zeta(digit: int, q: int) -> int:
    """Value of a digit in final (sign) position."""
    return digit if digit <= q - 2 else -1


def int_power_exp(x: int, q: int):
    """j with x == q**j, or None."""
    if x < 1:
        return None
    j = 0
    while x % q == 0:
        x //= q
        j += 1
    return j if x == 1 else None


# ---------------------------------------------------------------------------
# Linear atoms as lazy carry machines.


class LinearPart:
    """Carry-machine component for sum(c_i * x_i) (= | >=) constant.

    States are the pending right-hand values; reading digit tuple d turns
    gamma into (gamma - sum(c_i d_i)) / q (equations keep only exact
    divisions, inequalities round up).  A word may end at any letter whose
    sign-digit evaluation settles the comparison, which keeps the language
    closed under sign-digit padding.
    """

    __slots__ = ("tracks", "coeffs", "constant", "kind", "q", "arity",
                 "_combos", "_cache")

    def __init__(self, atom: LinearAtom, env, q: int, arity: int):
        layout = {name: i for i, name in enumerate(env)}
        tracks = []
        coeffs = []
        for var, c in atom.coeffs:
            if var not in layout:
                raise KeyError(f"unknown variable {var!r}")
            tracks.append(layout[var])
            coeffs.append(c)
        self.tracks = tuple(tracks)
        self.coeffs = tuple(coeffs)
        self.constant = atom.constant
        self.kind = atom.kind
        self.q = q
        self.arity = arity
        base = [None] * arity
        combos = []
        for digits in itertools.product(range(q), repeat=len(self.tracks)):
            label = list(base)
            for pos, d in zip(self.tracks, digits):
                label[pos] = frozenset((d,))
            dot = sum(c * d for c, d in zip(self.coeffs, digits))
            ending = sum(c * zeta(d, q) for c, d in zip(self.coeffs, digits))
            combos.append((tuple(label), dot, ending))
        self._combos = combos
        self._cache: dict = {}

    def initials(self):
        return [("r", self.constant)]

    def is_final(self, state) -> bool:
        return state == "acc"

    def branchiness(self) -> float:
        return float(self.q ** len(self.tracks))

    def edges(self, state):
        if state == "acc":
            return []
        cached = self._cache.get(state)
        if cached is not None:
            return cached
        _, gamma = state
        q = self.q
        out = []
        if self.kind == "eq":
            for label, dot, ending in self._combos:
                if (gamma - dot) % q == 0:
                    out.append((label, ("r", (gamma - dot) // q)))
                if ending == gamma:
                    out.append((label, "acc"))
        else:
            for label, dot, ending in self._combos:
                out.append((label, ("r", -((dot - gamma) // q))))
                if ending >= gamma:
                    out.append((label, "acc"))
        self._cache[state] = out
        return out


def linear_automaton(atom: LinearAtom, env, q: int,
                     state_cap: int = DEFAULT_STATE_CAP) -> Automaton:
    """Automaton over env's tracks accepting the atom's solution set."""
    env = tuple(env)
    part = LinearPart(atom, env, q, len(env))
    raw = product_intersection([part], Alphabet(q, len(env)), state_cap)
    return minimize(saturate_padding(raw))


def linear_holds(atom: LinearAtom, assignment: dict) -> bool:
    total = sum(c * assignment[v] for v, c in atom.coeffs)
    return total == atom.constant if atom.kind == "eq" else total >= atom.constant


# ---------------------------------------------------------------------------
# Shift relation: x = q^r, y = q^(r + l*s) with r, s natural.


def _single(d: int) -> frozenset:
    return frozenset((d,))


@lru_cache(maxsize=None)
def shift_automaton(shift: int, q: int) -> Automaton:
    """Arity-2 relation automaton for the exponent-jump predicate.

    Track 0 holds x = q^r, track 1 holds y = q^(r + shift*s) for some
    natural s; negative shifts reuse the positive builder with the tracks
    swapped.
    """
    if q < 2:
        raise ValueError("q must be at least 2")
    if shift < 0:
        return reorder_tracks(shift_automaton(-shift, q), (1, 0))
    builder = AutomatonBuilder(Alphabet(q, 2))
    start = builder.add_state()
    done = builder.add_state()
    acc = builder.add_state()
    zz = (_single(0), _single(0))
    oo = (_single(1), _single(1))
    builder.add_edge(start, zz, start)
    builder.add_edge(start, oo, done)
    builder.add_edge(done, zz, done)
    builder.add_edge(done, zz, acc)
    if q >= 3:
        # a track may end right at its 1-digit only when zeta(1) = 1
        builder.add_edge(start, oo, acc)
    if shift > 0:
        waits = [builder.add_state() for _ in range(shift)]
        builder.add_edge(start, (_single(1), _single(0)), waits[1 % shift])
        for d in range(shift):
            builder.add_edge(waits[d], zz, waits[(d + 1) % shift])
        builder.add_edge(waits[0], (_single(0), _single(1)), done)
        if q >= 3:
            builder.add_edge(waits[0], (_single(0), _single(1)), acc)
    builder.initial = {start}
    builder.finals = {acc}
    return minimize(saturate_padding(builder.build()))


def shift_holds(shift: int, x: int, y: int, q: int) -> bool:
    r = int_power_exp(x, q)
    rp = int_power_exp(y, q)
    if r is None or rp is None:
        return False
    gap = rp - r
    if shift == 0:
        return gap == 0
    return gap % shift == 0 and gap // shift >= 0


# ---------------------------------------------------------------------------
# Powers of q^l.


@lru_cache(maxsize=None)
def power_automaton(power: int, q: int) -> Automaton:
    """Arity-1 automaton for { (q**power)**s : s natural }."""
    if power < 1:
        raise ValueError("power index must be at least 1")
    if q < 2:
        raise ValueError("q must be at least 2")
    builder = AutomatonBuilder(Alphabet(q, 1))
    zeros = [builder.add_state() for _ in range(power)]
    done = builder.add_state()
    acc = builder.add_state()
    z = (_single(0),)
    o = (_single(1),)
    for r in range(power):
        builder.add_edge(zeros[r], z, zeros[(r + 1) % power])
    builder.add_edge(zeros[0], o, done)
    builder.add_edge(done, z, done)
    builder.add_edge(done, z, acc)
    if q >= 3:
        builder.add_edge(zeros[0], o, acc)
    builder.initial = {zeros[0]}
    builder.finals = {acc}
    return minimize(saturate_padding(builder.build()))


def power_holds(power: int, x: int, q: int) -> bool:
    j = int_power_exp(x, q)
    return j is not None and j % power == 0


# ---------------------------------------------------------------------------
# Valuation relation: y is the largest power of q dividing x.


@lru_cache(maxsize=None)
def valuation_automaton(q: int) -> Automaton:
    """Arity-2 automaton for pairs (x, y) with x != 0, y = q**e, q**e | x
    and q**(e+1) does not divide x.

    Least significant digits first, the y track shows a single 1 exactly at
    the first position where the x track is nonzero.
    """
    if q < 2:
        raise ValueError("q must be at least 2")
    builder = AutomatonBuilder(Alphabet(q, 2))
    start = builder.add_state()
    done = builder.add_state()
    acc = builder.add_state()
    nonzero = frozenset(range(1, q))
    builder.add_edge(start, (_single(0), _single(0)), start)
    builder.add_edge(start, (nonzero, _single(1)), done)
    builder.add_edge(done, (None, _single(0)), done)
    builder.add_edge(done, (None, _single(0)), acc)
    if q >= 3:
        builder.add_edge(start, (nonzero, _single(1)), acc)
    builder.initial = {start}
    builder.finals = {acc}
    return minimize(saturate_padding(builder.build()))


def valuation_holds(x: int, y: int, q: int) -> bool:
    if x == 0:
        return False
    e = 0
    n = abs(x)
    while n % q == 0:
        n //= q
        e += 1
    return y == q ** e


# ---------------------------------------------------------------------------
# The shift predicate expressed through power predicates (tested equivalent
# to the direct construction).


def _power_of_term(power: int, scale: int, var: str, q: int, fresh) -> object:
    """PowerAtom applied to scale*var, normalized via a fresh variable when
    the argument is not a bare variable."""
    if scale == 1:
        return PowerAtom(power, var)
    z = fresh()
    return Exists(z, And((
        TermEquals(var_term(z, q=q), make_term({var: scale}, 0, q)),
        PowerAtom(power, z),
    )))


def shift_from_power_formula(shift: int, q: int,
                             x: str = "x", y: str = "y"):
    """The shift relation written with power predicates only:

        y >= x  and  OR_i ( P_{q^shift}(q^i x) and P_{q^shift}(q^i y) )

    for i in 0..shift-1.  The comparison may drop the absolute values
    because the power conjuncts force both variables positive.
    """
    if shift < 1:
        raise ValueError("shift must be at least 1")
    counter = itertools.count()

    def fresh() -> str:
        return f"_p{next(counter)}"

    disjuncts = []
    for i in range(shift):
        scale = q ** i
        disjuncts.append(And((
            _power_of_term(shift, scale, x, q, fresh),
            _power_of_term(shift, scale, y, q, fresh),
        )))
    comparison = geq(var_term(y, q=q), var_term(x, q=q))
    return And((comparison, Or(tuple(disjuncts))))
