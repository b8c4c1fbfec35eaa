"""Bounded brute-force solver and seeded instance generator.

Cross-validation infrastructure: the brute-force search uses only group
arithmetic (no automata) and cannot certify unsatisfiability, it only
reports that no witness exists within its bound.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .group import GroupElement, eval_word, identity, multiply, power
from .knapsack import KnapsackInstance, verify_witness


@dataclass(frozen=True)
class OracleOutcome:
    found: tuple | None
    searched_bound: int


def brute_force(inst: KnapsackInstance, bound: int) -> OracleOutcome:
    """First witness in lexicographic order over [0, bound]^n, or None."""
    if bound < 0:
        raise ValueError("bound must be a natural number")
    q = inst.q
    gens = inst.generators
    n = len(gens)
    if n == 0:
        found = () if inst.target == identity() else None
        return OracleOutcome(found, bound)

    def search(prefix: GroupElement, i: int, chosen: tuple):
        if i == n:
            return chosen if prefix == inst.target else None
        current = prefix
        for x in range(bound + 1):
            hit = search(current, i + 1, chosen + (x,))
            if hit is not None:
                return hit
            current = multiply(current, gens[i], q)
        return None

    found = search(identity(), 0, ())
    if found is not None:
        assert verify_witness(inst, found)
    return OracleOutcome(found, bound)


_WORD_TOKENS = ("a", "a^-1", "t", "t^-1")


def random_instance(q: int, n: int, max_word_len: int, seed: int,
                    max_exponent: int = 6):
    """Deterministic random instance; returns (instance, flag).

    Generators are random nonempty words of length up to max_word_len.
    With probability one half the target is a genuine power product with
    exponents up to max_exponent (flag "constructed-sat"), otherwise that
    product is perturbed by a random non-identity factor (flag "unknown";
    the perturbed instance may still be solvable)."""
    rng = random.Random(seed)
    gens = []
    for _ in range(n):
        length = rng.randint(1, max_word_len)
        word = tuple(rng.choice(_WORD_TOKENS) for _ in range(length))
        gens.append(eval_word(word, q))
    product = identity()
    exponents = []
    for g in gens:
        x = rng.randint(0, max_exponent)
        exponents.append(x)
        product = multiply(product, power(g, x, q), q)
    if rng.random() < 0.5:
        return KnapsackInstance(q, tuple(gens), product), "constructed-sat"
    while True:
        length = rng.randint(1, max_word_len)
        word = tuple(rng.choice(_WORD_TOKENS) for _ in range(length))
        factor = eval_word(word, q)
        if factor != identity():
            break
    target = multiply(product, factor, q)
    return KnapsackInstance(q, tuple(gens), target), "unknown"
