"""Deciding g1^x1 ... gn^xn = g in BS(1,q) with natural exponents.

The equation is solvable iff there is a chain of integral matrices
h_0, ..., h_n such that each h_i arises from h_(i-1) by right-multiplying
some natural power of g_i, and h_n * g^-1 = h_0.  Each chain condition is
a first-order formula over the matrix entries (corner U_i, diagonal power
M_i) in the language compiled by `compiler`; the chain search is automaton
emptiness, and a shortest accepted word decodes into a verified witness.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .automata import Alphabet, _AutomatonPart, decode, is_empty, \
    product_intersection, shortest_accepted, to_dot
from .atoms import int_power_exp
from .compiler import CompileLimits, compile_cached, environment
from .errors import InternalSolverError
from .formula import (
    And,
    Exists,
    Formula,
    PowerAtom,
    ShiftAtom,
    ValuationAtom,
    const_term,
    equals,
    geq,
    land,
    lor,
    make_term,
    var_term,
)
from .group import GroupElement, identity, is_canonical, multiply, power


@dataclass(frozen=True)
class KnapsackInstance:
    q: int
    generators: tuple
    target: GroupElement

    def __post_init__(self):
        if self.q < 2:
            raise ValueError("q must be at least 2")
        for g in list(self.generators) + [self.target]:
            if not is_canonical(g, self.q):
                raise ValueError(f"element {g!r} is not canonical for q={self.q}")


@dataclass(frozen=True)
class WitnessChain:
    """Decoded chain matrices: corners[i] is the upper-right entry of the
    i-th matrix, diagonals[i] its diagonal power of q."""

    corners: tuple
    diagonals: tuple

    def __len__(self):
        return len(self.corners)


@dataclass(frozen=True)
class KnapsackResult:
    decision: str  # "SAT" | "UNSAT"
    exponents: tuple | None = None
    chain: WitnessChain | None = None
    verified: bool = False
    stats: dict | None = None

    @property
    def is_sat(self) -> bool:
        return self.decision == "SAT"


def _uvar(i: int) -> str:
    return f"u{i}"


def _mvar(i: int) -> str:
    return f"m{i}"


def generator_step_formula(g: GroupElement, from_vars, to_vars, q: int) -> Formula:
    """Relation (U', M') = (U, M) * g**s for some natural s, on integral
    matrices (U, M) and (U', M').

    For g = (l, v), v = a / q**e, the coefficient of (U,M) * g**s is
    U + v * (M' - M) / (q**l - 1) when l != 0 and U + v*s*M when l = 0.
    The l = 0 case needs "w is a natural multiple of M", which the
    valuation and shift predicates express: w = 0, or w >= 1 and the
    largest q-power divisor of w is at least M.
    """
    u1, m1 = from_vars
    u2, m2 = to_vars
    l = g.t_exp
    a = g.coeff.numerator
    e = g.coeff.exp
    qe = q ** e
    if l != 0:
        if l > 0:
            c_x, d_m = q ** l - 1, 1
        else:
            # multiplied through by q**(-l) so all coefficients are integers
            c_x, d_m = 1 - q ** (-l), q ** (-l)
        x = "_s"
        return Exists(x, land(
            ShiftAtom(l, m1, m2),
            equals(make_term({u2: qe}, 0, q), make_term({u1: qe, x: a}, 0, q)),
            equals(make_term({x: c_x}, 0, q),
                   make_term({m2: d_m, m1: -d_m}, 0, q)),
        ))
    if a == 0:
        return land(equals(var_term(u2), var_term(u1)),
                    equals(var_term(m2), var_term(m1)))
    w, pv = "_w", "_v"
    natural_multiple_of_m = lor(
        equals(var_term(w), const_term(0)),
        land(geq(var_term(w), const_term(1)),
             Exists(pv, land(ValuationAtom(w, pv), ShiftAtom(1, m1, pv)))),
    )
    return land(
        Exists(w, land(
            equals(make_term({u2: qe}, 0, q), make_term({u1: qe, w: a}, 0, q)),
            natural_multiple_of_m,
        )),
        equals(var_term(m2), var_term(m1)),
    )


def target_closing_formula(g: GroupElement, start_vars, end_vars,
                           q: int) -> Formula:
    """h_end = h_start * g on the matrix entries: the diagonal picks up
    q**k and the corner picks up u_g * M_start."""
    u0, m0 = start_vars
    un, mn = end_vars
    k = g.t_exp
    a = g.coeff.numerator
    e = g.coeff.exp
    qe = q ** e
    if k >= 0:
        m_eq = equals(var_term(mn), make_term({m0: q ** k}, 0, q))
    else:
        m_eq = equals(make_term({mn: q ** (-k)}, 0, q), var_term(m0))
    u_eq = equals(make_term({un: qe}, 0, q), make_term({u0: qe, m0: a}, 0, q))
    return land(m_eq, u_eq)


def instance_formula(inst: KnapsackInstance) -> Formula:
    """Chain condition with free variables u0, m0, ..., un, mn; outer
    existentials are left open so a model yields the witness chain."""
    n = len(inst.generators)
    conjuncts = [PowerAtom(1, _mvar(i)) for i in range(n + 1)]
    for i, g in enumerate(inst.generators, start=1):
        conjuncts.append(generator_step_formula(
            g, (_uvar(i - 1), _mvar(i - 1)), (_uvar(i), _mvar(i)), inst.q))
    conjuncts.append(target_closing_formula(
        inst.target, (_uvar(0), _mvar(0)), (_uvar(n), _mvar(n)), inst.q))
    return land(*conjuncts)


def _solver_conjuncts(inst: KnapsackInstance):
    """The chain condition split into named conjuncts, in join order.

    Equivalent to instance_formula, but the closing corner equation is
    restated through the quotient M0 / q**e_g (exact because q does not
    divide the numerator of a canonical coefficient): coefficients around
    q**70 arise for product targets and their raw carry machines would be
    astronomically large, while the quotient form only walks the digits of
    the numerator.  Power atoms are bundled into the closing conjuncts so
    each one stays small in isolation as well.
    """
    q = inst.q
    n = len(inst.generators)
    out = []
    for i in range(n + 1):
        out.append((f"integral-{_mvar(i)}", PowerAtom(1, _mvar(i))))
    k = inst.target.t_exp
    a = inst.target.coeff.numerator
    e = inst.target.coeff.exp
    if k >= 0:
        m_eq = equals(var_term(_mvar(n)), make_term({_mvar(0): q ** k}, 0, q))
    else:
        m_eq = equals(make_term({_mvar(n): q ** (-k)}, 0, q),
                      var_term(_mvar(0)))
    out.append(("closing-diagonal",
                land(PowerAtom(1, _mvar(0)), PowerAtom(1, _mvar(n)), m_eq)))
    for i, g in enumerate(inst.generators, start=1):
        out.append((f"step-{i}", generator_step_formula(
            g, (_uvar(i - 1), _mvar(i - 1)), (_uvar(i), _mvar(i)), q)))
    if a == 0:
        u_c: Formula = equals(var_term(_uvar(n)), var_term(_uvar(0)))
    elif e == 0:
        u_c = land(PowerAtom(1, _mvar(0)),
                   equals(var_term(_uvar(n)),
                          make_term({_uvar(0): 1, _mvar(0): a}, 0, q)))
    else:
        y = "_y"
        u_c = land(PowerAtom(1, _mvar(0)), Exists(y, land(
            PowerAtom(1, y),
            equals(make_term({y: q ** e}, 0, q), var_term(_mvar(0))),
            equals(var_term(_uvar(n)),
                   make_term({_uvar(0): 1, y: a}, 0, q)),
        )))
    out.append(("closing-corner", u_c))
    return out


def chain_layout(n: int) -> tuple:
    return tuple(sorted([_uvar(i) for i in range(n + 1)]
                        + [_mvar(i) for i in range(n + 1)]))


def recover_exponents(chain: WitnessChain, inst: KnapsackInstance) -> tuple:
    """Exponents x_i with h_i = h_(i-1) * g_i**x_i, recovered from the chain.

    For a generator with nonzero t-exponent l, x_i is the diagonal exponent
    gap divided by l; for l = 0 and coefficient a / q**e it is
    q**e * (U_i - U_(i-1)) / (a * M_(i-1)); identity generators contribute 0.
    All divisions are exact for chains produced by the solver."""
    q = inst.q
    xs = []
    for i, g in enumerate(inst.generators, start=1):
        l = g.t_exp
        a = g.coeff.numerator
        if l != 0:
            j_prev = int_power_exp(chain.diagonals[i - 1], q)
            j_cur = int_power_exp(chain.diagonals[i], q)
            if j_prev is None or j_cur is None:
                raise InternalSolverError("chain diagonal is not a power of q")
            gap = j_cur - j_prev
            if gap % l != 0 or gap // l < 0:
                raise InternalSolverError(
                    f"diagonal gap {gap} is not a natural multiple of {l}")
            xs.append(gap // l)
        elif a != 0:
            num = (chain.corners[i] - chain.corners[i - 1]) * q ** g.coeff.exp
            den = a * chain.diagonals[i - 1]
            if den == 0 or num % den != 0 or num // den < 0:
                raise InternalSolverError(
                    f"corner gap {num} is not a natural multiple of {den}")
            xs.append(num // den)
        else:
            xs.append(0)
    return tuple(xs)


def verify_witness(inst: KnapsackInstance, exponents) -> bool:
    """Exact group arithmetic check of the power product."""
    if len(exponents) != len(inst.generators):
        raise ValueError("exponent count does not match the generators")
    product = identity()
    for g, x in zip(inst.generators, exponents):
        product = multiply(product, power(g, x, inst.q), inst.q)
    return product == inst.target


def solve(inst: KnapsackInstance, *, collect_stats: bool = False,
          limits: CompileLimits | None = None,
          emit_dot=None) -> KnapsackResult:
    """Decide the instance; on SAT, return verified exponents and the chain.

    Every conjunct of the chain condition is compiled separately (each is
    small on its own tracks), then a single reachable product joins all of
    them at once: partial conjunctions can be exponentially larger than the
    full one, so no pairwise intermediate is ever materialized.
    """
    limits = limits or CompileLimits()
    q = inst.q
    n = len(inst.generators)
    layout = chain_layout(n)
    started = time.perf_counter()
    stages = []
    parts = []
    for idx, (name, phi) in enumerate(_solver_conjuncts(inst)):
        a = compile_cached(phi, layout, q, limits)
        if collect_stats:
            stages.append({"stage": name, "states": a.num_states})
        if emit_dot is not None:
            emit_dot(idx, name, to_dot(a, f"stage_{idx}"))
        parts.append(_AutomatonPart(a))
    current = product_intersection(parts, Alphabet(q, len(layout)),
                                   limits.state_cap)
    if emit_dot is not None:
        emit_dot(99, "final", to_dot(current, "final"))
    stats = None
    if collect_stats:
        stats = {"stages": stages, "final_states": current.num_states,
                 "final_edges": current.num_edges}
    if is_empty(current):
        if stats is not None:
            stats["elapsed_s"] = time.perf_counter() - started
        return KnapsackResult("UNSAT", stats=stats)
    word = shortest_accepted(current)
    values = decode(word, Alphabet(q, len(layout)))
    assignment = dict(zip(layout, values))
    corners = tuple(assignment[_uvar(i)] for i in range(n + 1))
    diagonals = tuple(assignment[_mvar(i)] for i in range(n + 1))
    for m in diagonals:
        if int_power_exp(m, q) is None:
            raise InternalSolverError(f"decoded diagonal {m} is not a power of q")
    chain = WitnessChain(corners, diagonals)
    exponents = recover_exponents(chain, inst)
    if not verify_witness(inst, exponents):
        raise InternalSolverError(
            f"witness {exponents} failed group-arithmetic verification")
    if stats is not None:
        stats["elapsed_s"] = time.perf_counter() - started
    return KnapsackResult("SAT", exponents, chain, True, stats)
