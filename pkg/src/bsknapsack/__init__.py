"""Exact knapsack solver for the solvable Baumslag-Solitar groups BS(1,q).

Given group elements g1, ..., gn and g of BS(1,q) (q >= 2), decides whether
g1^x1 ... gn^xn = g has a solution with natural exponents, and produces a
verified witness when it does.  The decision procedure compiles a chain
condition on integral matrices into finite automata over base-q digit
tuples; witnesses fall out of shortest accepted words.

All values are immutable and all operations are pure functions, so the
library is safe to use from multiple threads without coordination.
"""

from .automata import (
    Alphabet,
    Automaton,
    accepts,
    complement,
    cylindrify,
    decode,
    determinize,
    encode,
    intersect,
    is_empty,
    language_equal,
    minimize,
    project,
    reorder_tracks,
    saturate_padding,
    shortest_accepted,
    to_dot,
    union,
)
from .atoms import (
    linear_automaton,
    power_automaton,
    shift_automaton,
    shift_from_power_formula,
    valuation_automaton,
)
from .compiler import (
    CompileLimits,
    compile_formula,
    environment,
    is_satisfiable,
    model,
)
from .errors import (
    AlphabetMismatchError,
    InternalSolverError,
    StateLimitError,
    TrackLimitError,
)
from .formula import (
    And,
    Exists,
    FalseF,
    Forall,
    LinearAtom,
    Not,
    Or,
    PowerAtom,
    ShiftAtom,
    Term,
    TermEquals,
    TermGeq,
    TrueF,
    ValuationAtom,
    clear_denominators,
    eval_formula,
    normalize,
    to_sexpr,
)
from .group import (
    GroupElement,
    QFraction,
    WordParseError,
    element,
    eval_word,
    identity,
    integral_shift,
    inverse,
    is_integral,
    multiply,
    parse_word,
    power,
    qfraction,
)
from .knapsack import (
    KnapsackInstance,
    KnapsackResult,
    WitnessChain,
    generator_step_formula,
    instance_formula,
    recover_exponents,
    solve,
    target_closing_formula,
    verify_witness,
)
from .oracle import OracleOutcome, brute_force, random_instance

__version__ = "0.1.0"
