"""Compilation of formulas into automata over the base-q encoding.

Conjunctions become synchronous products (linear atoms stay symbolic carry
machines inside the product, so only reachable carries materialize),
disjunctions become NFA unions, negation goes through determinization and
complement, and an existential quantifier appends its variable as the last
track, compiles the body, projects the track away and restores the padding
closure.  Every connective result is cleaned up: exactly minimized while
the alphabet is small enough to tabulate, trimmed and structurally reduced
beyond that.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .automata import (
    Alphabet,
    Automaton,
    DEFAULT_STATE_CAP,
    DENSE_LETTER_CAP,
    _AutomatonPart,
    complement,
    decode,
    embed_tracks,
    empty_automaton,
    is_empty,
    minimize,
    product_intersection,
    project,
    reduce_states,
    saturate_padding,
    shortest_accepted,
    trim,
    union,
    universal_automaton,
)
from .atoms import (
    LinearPart,
    power_automaton,
    shift_automaton,
    valuation_automaton,
)
from .errors import TrackLimitError
from .formula import (
    And,
    Exists,
    FalseF,
    Forall,
    Formula,
    Not,
    Or,
    PowerAtom,
    ShiftAtom,
    TermEquals,
    TermGeq,
    TrueF,
    ValuationAtom,
    clear_denominators,
    eval_formula,
    free_vars,
    normalize,
)

DEFAULT_MAX_TRACKS = 24
_MINIMIZE_STATE_GUARD = 4000


@dataclass(frozen=True)
class CompileLimits:
    max_tracks: int = DEFAULT_MAX_TRACKS
    state_cap: int = DEFAULT_STATE_CAP


def environment(phi: Formula) -> tuple:
    """Canonical track layout: free variables sorted by name."""
    return tuple(sorted(free_vars(phi)))


def _finish(a: Automaton) -> Automaton:
    if (a.alphabet.num_letters <= DENSE_LETTER_CAP
            and a.num_states <= _MINIMIZE_STATE_GUARD):
        return minimize(a)
    return reduce_states(trim(a))


def _positions(layout: tuple, *names: str) -> tuple:
    try:
        return tuple(layout.index(n) for n in names)
    except ValueError as exc:
        raise KeyError(f"unbound variable in {names}") from exc


def _compile(phi: Formula, layout: tuple, q: int,
             limits: CompileLimits) -> Automaton:
    alphabet = Alphabet(q, len(layout))
    match phi:
        case TrueF():
            return universal_automaton(alphabet)
        case FalseF():
            return empty_automaton(alphabet)
        case TermEquals(lhs, rhs):
            atom = clear_denominators(lhs, rhs, q, "eq")
            part = LinearPart(atom, layout, q, len(layout))
            raw = product_intersection([part], alphabet, limits.state_cap)
            return _finish(raw)
        case TermGeq(lhs, rhs):
            atom = clear_denominators(lhs, rhs, q, "ge")
            part = LinearPart(atom, layout, q, len(layout))
            raw = product_intersection([part], alphabet, limits.state_cap)
            return _finish(raw)
        case ShiftAtom(shift, x, y):
            return embed_tracks(shift_automaton(shift, q),
                                _positions(layout, x, y), len(layout))
        case PowerAtom(power, x):
            return embed_tracks(power_automaton(power, q),
                                _positions(layout, x), len(layout))
        case ValuationAtom(x, y):
            return embed_tracks(valuation_automaton(q),
                                _positions(layout, x, y), len(layout))
        case And(children):
            if any(isinstance(c, FalseF) for c in children):
                return empty_automaton(alphabet)
            parts = []
            for child in children:
                if isinstance(child, TrueF):
                    continue
                if isinstance(child, (TermEquals, TermGeq)):
                    kind = "eq" if isinstance(child, TermEquals) else "ge"
                    atom = clear_denominators(child.lhs, child.rhs, q, kind)
                    parts.append(LinearPart(atom, layout, q, len(layout)))
                else:
                    parts.append(_AutomatonPart(_compile(child, layout, q,
                                                         limits)))
            if not parts:
                return universal_automaton(alphabet)
            raw = product_intersection(parts, alphabet, limits.state_cap)
            return _finish(raw)
        case Or(children):
            current = None
            for child in children:
                a = _compile(child, layout, q, limits)
                current = a if current is None else union(current, a)
            if current is None:
                return empty_automaton(alphabet)
            return _finish(current)
        case Not(child):
            inner = _compile(child, layout, q, limits)
            return _finish(complement(inner))
        case Exists(v, body):
            if v in layout:
                raise ValueError(f"bound variable {v!r} shadows a track")
            inner_layout = layout + (v,)
            if len(inner_layout) > limits.max_tracks:
                raise TrackLimitError(
                    f"{len(inner_layout)} tracks exceed the cap of "
                    f"{limits.max_tracks}")
            inner = _compile(body, inner_layout, q, limits)
            dropped = project(inner, len(layout))
            return _finish(saturate_padding(dropped))
        case Forall():
            raise ValueError("universal quantifier survived normalization")
    raise TypeError(f"not a formula: {phi!r}")


def compile_formula(phi: Formula, layout=None, q: int = 2, *,
                    limits: CompileLimits | None = None,
                    pre_normalized: bool = False) -> Automaton:
    """Automaton over `layout`'s tracks accepting exactly the encodings of
    satisfying assignments of `phi`."""
    limits = limits or CompileLimits()
    if not pre_normalized:
        phi = normalize(phi)
    layout = environment(phi) if layout is None else tuple(layout)
    missing = free_vars(phi) - set(layout)
    if missing:
        raise KeyError(f"unbound variables: {sorted(missing)}")
    if len(layout) > limits.max_tracks:
        raise TrackLimitError(
            f"{len(layout)} tracks exceed the cap of {limits.max_tracks}")
    return _compile(phi, layout, q, limits)


@lru_cache(maxsize=512)
def compile_cached(phi: Formula, layout: tuple, q: int,
                   limits: CompileLimits) -> Automaton:
    """Memoized compile for immutable inputs (automata are immutable)."""
    return compile_formula(phi, layout, q, limits=limits)


def _quantifier_free(phi: Formula) -> bool:
    match phi:
        case And(children) | Or(children):
            return all(_quantifier_free(c) for c in children)
        case Not(child):
            return _quantifier_free(child)
        case Exists(_, _) | Forall(_, _):
            return False
    return True


def is_satisfiable(phi: Formula, q: int, *,
                   limits: CompileLimits | None = None) -> bool:
    """Decide satisfiability over integer assignments."""
    phi = normalize(phi)
    layout = environment(phi) or ("_sentinel",)
    a = compile_formula(phi, layout, q, limits=limits, pre_normalized=True)
    return not is_empty(a)


def model(phi: Formula, q: int, *,
          limits: CompileLimits | None = None):
    """A satisfying assignment of the free variables, or None.

    Decodes the shortest accepted word (lexicographic tie-break).  When the
    normalized formula is quantifier free the assignment is re-checked by
    direct arithmetic evaluation.
    """
    phi = normalize(phi)
    fv = environment(phi)
    layout = fv or ("_sentinel",)
    a = compile_formula(phi, layout, q, limits=limits, pre_normalized=True)
    word = shortest_accepted(a)
    if word is None:
        return None
    values = decode(word, a.alphabet)
    assignment = {v: values[layout.index(v)] for v in fv}
    if _quantifier_free(phi):
        if not eval_formula(phi, assignment, q):
            raise AssertionError(
                f"decoded model {assignment} fails ground evaluation")
    return assignment
