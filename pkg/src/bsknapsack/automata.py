"""Finite automata over tuples of base-q digits, least-significant digit first.

A word d0 d1 ... d(n-1) over one track (n >= 1) denotes the integer

    sum(d_i * q**i for i < n-1)  +  zeta(d_(n-1)) * q**(n-1)

where zeta(d) = d for 0 <= d <= q-2 and zeta(q-1) = -1.  The final digit
therefore doubles as a sign digit: a word ends in q-1 exactly when its value
is negative, and appending the matching sign digit (0 for non-negative
values, q-1 for negative ones) never changes the value.  Multi-track words
interpret each track independently; all tracks share one length.

Automata here never accept the empty word (encodings are non-empty), and
every public construction keeps languages closed under sign-digit padding.

Transition labels are per-track digit sets (None meaning "any digit"), so
an edge stands for a whole rectangle of letters.  This keeps products,
cylindrification and projection cheap even for wide alphabets; concrete
letters are only enumerated where the alphabet is small (exact minimization,
DOT export).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import AlphabetMismatchError, StateLimitError

# Alphabets with at most this many concrete letters get exact minimization
# and letter-by-letter DOT export.
DENSE_LETTER_CAP = 4096
DENSE_TABLE_CAP = 2_000_000
DEFAULT_STATE_CAP = 1_000_000


@dataclass(frozen=True)
class Alphabet:
    """Digit-tuple alphabet: letters are arity-tuples over {0, ..., q-1}."""

    q: int
    arity: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError("q must be at least 2")
        if self.arity < 0:
            raise ValueError("arity must be non-negative")

    @property
    def num_letters(self) -> int:
        return self.q ** self.arity

    def letters(self):
        return itertools.product(range(self.q), repeat=self.arity)


# ---------------------------------------------------------------------------
# Labels: per-track digit sets; None = all digits of the track.

Label = tuple  # tuple[frozenset[int] | None, ...]


def full_label(arity: int) -> Label:
    return (None,) * arity


def label_meet(a: Label, b: Label):
    if a is b:
        return a
    out = []
    for x, y in zip(a, b):
        if x is None:
            out.append(y)
        elif y is None or x is y:
            out.append(x)
        else:
            z = x & y
            if not z:
                return None
            out.append(z)
    return tuple(out)


def label_contains(label: Label, letter) -> bool:
    for entry, digit in zip(label, letter):
        if entry is not None and digit not in entry:
            return False
    return True


def label_min_letter(label: Label) -> tuple:
    return tuple(0 if entry is None else min(entry) for entry in label)


def label_letters(label: Label, q: int):
    ranges = [range(q) if entry is None else sorted(entry) for entry in label]
    return itertools.product(*ranges)


def label_count(label: Label, q: int) -> int:
    n = 1
    for entry in label:
        n *= q if entry is None else len(entry)
    return n


def label_key(label: Label):
    return tuple((1,) if e is None else (0, tuple(sorted(e))) for e in label)


def _norm_entry(entry, q: int):
    if entry is not None and len(entry) == q:
        return None
    return entry


def normalize_label(label: Label, q: int) -> Label:
    return tuple(_norm_entry(e, q) for e in label)


def _try_merge_labels(a: Label, b: Label, q: int):
    """Union of two rectangles when they differ in at most one track."""
    diff = -1
    for t, (x, y) in enumerate(zip(a, b)):
        if x == y:
            continue
        if diff >= 0:
            return None
        diff = t
    if diff < 0:
        return a
    x, y = a[diff], b[diff]
    merged = None if (x is None or y is None) else _norm_entry(x | y, q)
    return a[:diff] + (merged,) + a[diff + 1:]


def merge_parallel_edges(rows, q: int):
    """Per state, fuse edges to the same target whose labels union into a
    rectangle; cuts fan-out before products."""
    out = []
    for row in rows:
        groups: dict[int, list] = {}
        for label, t in row:
            groups.setdefault(t, []).append(label)
        new_row = []
        for t in sorted(groups):
            labels = groups[t]
            changed = True
            while changed and len(labels) > 1:
                changed = False
                merged: list = []
                used = [False] * len(labels)
                for i in range(len(labels)):
                    if used[i]:
                        continue
                    cur = labels[i]
                    for j in range(i + 1, len(labels)):
                        if used[j]:
                            continue
                        m = _try_merge_labels(cur, labels[j], q)
                        if m is not None:
                            cur = m
                            used[j] = True
                            changed = True
                    merged.append(cur)
                labels = merged
            for label in labels:
                new_row.append((label, t))
        out.append(tuple(sorted(new_row, key=lambda e: (label_key(e[0]), e[1]))))
    return tuple(out)


# ---------------------------------------------------------------------------
# Automaton


class Automaton:
    """Immutable NFA/DFA over an Alphabet.

    States are dense indices.  `edges[s]` is a tuple of (label, target)
    pairs.  `is_complete_dfa` marks automata with a single initial state and
    transitions that partition the alphabet at every state.
    """

    __slots__ = ("alphabet", "num_states", "initial", "finals", "edges",
                 "is_complete_dfa")

    def __init__(self, alphabet, num_states, initial, finals, edges,
                 is_complete_dfa=False):
        self.alphabet = alphabet
        self.num_states = num_states
        self.initial = frozenset(initial)
        self.finals = frozenset(finals)
        self.edges = edges
        self.is_complete_dfa = is_complete_dfa

    @property
    def num_edges(self) -> int:
        return sum(len(e) for e in self.edges)

    def __repr__(self):
        return (f"Automaton(q={self.alphabet.q}, arity={self.alphabet.arity}, "
                f"states={self.num_states}, edges={self.num_edges}, "
                f"finals={len(self.finals)})")


class AutomatonBuilder:
    """Mutable helper; `build()` produces a normalized Automaton."""

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self._edges: dict[int, set] = {}
        self._num = 0
        self.initial: set[int] = set()
        self.finals: set[int] = set()

    def add_state(self) -> int:
        s = self._num
        self._num += 1
        self._edges[s] = set()
        return s

    def add_edge(self, src: int, label: Label, dst: int) -> None:
        label = normalize_label(label, self.alphabet.q)
        self._edges[src].add((label, dst))

    def build(self, is_complete_dfa: bool = False) -> Automaton:
        edges = tuple(
            tuple(sorted(self._edges[s], key=lambda e: (label_key(e[0]), e[1])))
            for s in range(self._num)
        )
        return Automaton(self.alphabet, self._num, frozenset(self.initial),
                         frozenset(self.finals), edges, is_complete_dfa)


def empty_automaton(alphabet: Alphabet) -> Automaton:
    """Canonical automaton for the empty language: a single sink."""
    edges = ((  (full_label(alphabet.arity), 0), ),)
    return Automaton(alphabet, 1, frozenset({0}), frozenset(), edges, True)


def universal_automaton(alphabet: Alphabet) -> Automaton:
    """All non-empty words."""
    lab = full_label(alphabet.arity)
    edges = (((lab, 1),), ((lab, 1),))
    return Automaton(alphabet, 2, frozenset({0}), frozenset({1}), edges, True)


def _check_same_alphabet(a: Automaton, b: Automaton):
    if a.alphabet != b.alphabet:
        raise AlphabetMismatchError(
            f"alphabet mismatch: {a.alphabet} vs {b.alphabet}")


# ---------------------------------------------------------------------------
# Integer encoding


def sign_digit(value: int, q: int) -> int:
    return 0 if value >= 0 else q - 1


def encode_int(value: int, q: int) -> list[int]:
    """Shortest digit list denoting `value` (least significant first)."""
    if value >= 0:
        digits = []
        n = value
        while n:
            digits.append(n % q)
            n //= q
        if not digits or digits[-1] == q - 1:
            digits.append(0)
        return digits
    width = 0
    while q ** width < -value:
        width += 1
    rest = value + q ** width
    digits = []
    for _ in range(width):
        digits.append(rest % q)
        rest //= q
    digits.append(q - 1)
    return digits


def decode_int(digits, q: int) -> int:
    if not digits:
        raise ValueError("cannot decode an empty digit sequence")
    value = 0
    for i, d in enumerate(digits[:-1]):
        value += d * q ** i
    last = digits[-1]
    zeta = last if last <= q - 2 else -1
    return value + zeta * q ** (len(digits) - 1)


def encode(values, alphabet: Alphabet) -> tuple:
    """Shortest common-length word denoting the integer tuple `values`."""
    if len(values) != alphabet.arity:
        raise AlphabetMismatchError(
            f"expected {alphabet.arity} values, got {len(values)}")
    q = alphabet.q
    if alphabet.arity == 0:
        return ((),)
    tracks = [encode_int(v, q) for v in values]
    width = max(len(t) for t in tracks)
    for v, t in zip(values, tracks):
        t.extend([sign_digit(v, q)] * (width - len(t)))
    return tuple(zip(*tracks))


def decode(word, alphabet: Alphabet) -> tuple:
    if not word:
        raise ValueError("cannot decode an empty word")
    q = alphabet.q
    return tuple(decode_int([letter[t] for letter in word], q)
                 for t in range(alphabet.arity))


def pad_letter(last_letter, q: int) -> tuple:
    """The unique sign letter whose appending preserves all track values."""
    return tuple(q - 1 if d == q - 1 else 0 for d in last_letter)


# ---------------------------------------------------------------------------
# Runs and queries


def accepts(a: Automaton, word) -> bool:
    q = a.alphabet.q
    for letter in word:
        if len(letter) != a.alphabet.arity:
            raise AlphabetMismatchError("letter arity does not match")
        if any(d < 0 or d >= q for d in letter):
            raise AlphabetMismatchError("digit out of range")
    current = a.initial
    for letter in word:
        nxt = set()
        for s in current:
            for label, t in a.edges[s]:
                if label_contains(label, letter):
                    nxt.add(t)
        if not nxt:
            return False
        current = nxt
    return bool(current & a.finals) and len(word) > 0


def is_empty(a: Automaton) -> bool:
    """True iff no non-empty word is accepted."""
    frontier = {t for s in a.initial for _, t in a.edges[s]}
    seen = set(frontier)
    while frontier:
        if frontier & a.finals:
            return False
        nxt = set()
        for s in frontier:
            for _, t in a.edges[s]:
                if t not in seen:
                    seen.add(t)
                    nxt.add(t)
        frontier = nxt
    return True


def shortest_accepted(a: Automaton):
    """A minimum-length accepted word; lexicographically least among those.

    Letters are compared as digit tuples (track 0 first).  Returns None for
    the empty language.
    """
    if not a.finals or not a.initial:
        return None
    rev: list[list] = [[] for _ in range(a.num_states)]
    for s in range(a.num_states):
        for label, t in a.edges[s]:
            rev[t].append((s, label))
    # layers[j] = states with a length-j path to some final state
    layers = [set(a.finals)]
    length = None
    for j in range(1, a.num_states + 1):
        prev = layers[-1]
        layer = {s for t in prev for s, _ in rev[t]}
        layers.append(layer)
        if layer & a.initial:
            length = j
            break
    if length is None:
        return None
    current = set(a.initial) & layers[length]
    word = []
    for step in range(length):
        goal = layers[length - step - 1]
        best = None
        for s in current:
            for label, t in a.edges[s]:
                if t in goal:
                    letter = label_min_letter(label)
                    if best is None or letter < best:
                        best = letter
        nxt = {t for s in current for label, t in a.edges[s]
               if t in goal and label_contains(label, best)}
        word.append(best)
        current = nxt
    return tuple(word)


# ---------------------------------------------------------------------------
# Structural transforms


def trim(a: Automaton) -> Automaton:
    """Drop states that are unreachable or cannot reach a final state."""
    reach = set(a.initial)
    stack = list(a.initial)
    while stack:
        s = stack.pop()
        for _, t in a.edges[s]:
            if t not in reach:
                reach.add(t)
                stack.append(t)
    rev: list[list] = [[] for _ in range(a.num_states)]
    for s in reach:
        for _, t in a.edges[s]:
            rev[t].append(s)
    co = set(a.finals) & reach
    stack = list(co)
    while stack:
        t = stack.pop()
        for s in rev[t]:
            if s not in co:
                co.add(s)
                stack.append(s)
    live = reach & co
    if not live or not (live & a.initial):
        return empty_automaton(a.alphabet)
    order = sorted(live)
    remap = {s: i for i, s in enumerate(order)}
    edges = merge_parallel_edges(
        (tuple((label, remap[t]) for label, t in a.edges[s] if t in live)
         for s in order),
        a.alphabet.q,
    )
    return Automaton(a.alphabet, len(order),
                     frozenset(remap[s] for s in a.initial if s in live),
                     frozenset(remap[s] for s in a.finals if s in live),
                     edges, False)


def reduce_states(a: Automaton) -> Automaton:
    """Merge states with identical finality and outgoing structure.

    Sound for any NFA (merged states have equal forward behavior); not
    guaranteed to reach the minimal automaton.
    """
    block = list(range(a.num_states))
    while True:
        sigs = {}
        new_block = [0] * a.num_states
        for s in range(a.num_states):
            sig = (s in a.finals,
                   frozenset((label_key(l), block[t]) for l, t in a.edges[s]))
            if sig not in sigs:
                sigs[sig] = len(sigs)
            new_block[s] = sigs[sig]
        if new_block == block:
            break
        block = new_block
    if len(set(block)) == a.num_states:
        return a
    rep: dict[int, int] = {}
    for s in range(a.num_states):
        rep.setdefault(block[s], s)
    order = sorted(rep)
    remap = {b: i for i, b in enumerate(order)}
    builder = AutomatonBuilder(a.alphabet)
    for _ in order:
        builder.add_state()
    for b in order:
        s = rep[b]
        for label, t in a.edges[s]:
            builder.add_edge(remap[b], label, remap[block[t]])
    builder.initial = {remap[block[s]] for s in a.initial}
    builder.finals = {remap[block[s]] for s in a.finals}
    return builder.build()


def _cell_masks(edge_list, q, arity):
    """Per track: list of (digit cell, bitmask of edges compatible there)."""
    per_track = []
    for t in range(arity):
        sets = [label[t] for label, _ in edge_list]
        if all(s is None for s in sets):
            per_track.append([(None, (1 << len(edge_list)) - 1)])
            continue
        groups: dict[tuple, list[int]] = {}
        for d in range(q):
            sig = tuple(True if s is None else (d in s) for s in sets)
            groups.setdefault(sig, []).append(d)
        row = []
        for sig in sorted(groups):
            mask = 0
            for j, hit in enumerate(sig):
                if hit:
                    mask |= 1 << j
            row.append((frozenset(groups[sig]), mask))
        per_track.append(row)
    return per_track


def determinize(a: Automaton) -> Automaton:
    """Subset construction; the result is a complete DFA.

    Letter classes are rectangles built from per-track digit cells; edge
    incidence is tracked with bitmasks so a class's successor set is a few
    integer ANDs."""
    q = a.alphabet.q
    arity = a.alphabet.arity
    start = frozenset(a.initial)
    ids = {start: 0}
    worklist = [start]
    out_edges: list[list] = [[]]
    finals = set()
    sink = None
    full = (None,) * arity
    while worklist:
        subset = worklist.pop()
        sid = ids[subset]
        if subset & a.finals:
            finals.add(sid)
        edge_list = [(label, t) for s in sorted(subset)
                     for label, t in a.edges[s]]
        targets = [t for _, t in edge_list]
        rows = []
        if not edge_list:
            rows.append((full, frozenset()))
        else:
            per_track = _cell_masks(edge_list, q, arity)
            for combo in itertools.product(*per_track):
                mask = -1
                for _, m in combo:
                    mask &= m
                succ = set()
                while mask:
                    low = mask & -mask
                    succ.add(targets[low.bit_length() - 1])
                    mask ^= low
                label = tuple(c for c, _ in combo)
                rows.append((normalize_label(label, q), frozenset(succ)))
        for label, succ in rows:
            if not succ:
                if sink is None:
                    sink = frozenset()
                    ids[sink] = len(ids)
                    worklist.append(sink)
                    out_edges.append([])
                target = ids[sink]
            else:
                if succ not in ids:
                    ids[succ] = len(ids)
                    worklist.append(succ)
                    out_edges.append([])
                target = ids[succ]
            out_edges[sid].append((label, target))
    edges = tuple(
        tuple(sorted(row, key=lambda e: (label_key(e[0]), e[1])))
        for row in out_edges
    )
    return Automaton(a.alphabet, len(ids), frozenset({0}), frozenset(finals),
                     edges, True)


def _letter_index(letter, q):
    idx = 0
    for d in reversed(letter):
        idx = idx * q + d
    return idx


def _factor_letters(letters, q, arity):
    """Cover a set of concrete letters by disjoint rectangle labels."""
    if not letters:
        return []
    per_track = [sorted({lt[t] for lt in letters}) for t in range(arity)]
    size = 1
    for p in per_track:
        size *= len(p)
    if size == len(letters):
        return [normalize_label(tuple(frozenset(p) for p in per_track), q)]
    t = next(i for i, p in enumerate(per_track) if len(p) > 1)
    out = []
    for d in per_track[t]:
        sub = [lt for lt in letters if lt[t] == d]
        out.extend(_factor_letters(sub, q, arity))
    return out


def _minimize_dense(a: Automaton) -> Automaton:
    """Exact Moore minimization over the concrete letter table."""
    q = a.alphabet.q
    arity = a.alphabet.arity
    letters = list(a.alphabet.letters())
    num_letters = len(letters)
    succ = [[0] * num_letters for _ in range(a.num_states)]
    for s in range(a.num_states):
        for label, t in a.edges[s]:
            for letter in label_letters(label, q):
                succ[s][_letter_index(letter, q)] = t
    block = [1 if s in a.finals else 0 for s in range(a.num_states)]
    while True:
        sigs: dict[tuple, int] = {}
        new_block = [0] * a.num_states
        for s in range(a.num_states):
            row = succ[s]
            sig = (block[s],) + tuple(block[row[i]] for i in range(num_letters))
            if sig not in sigs:
                sigs[sig] = len(sigs)
            new_block[s] = sigs[sig]
        if new_block == block:
            break
        block = new_block
    init_block = block[next(iter(a.initial))]
    # Renumber blocks by BFS from the initial block for a canonical ordering.
    rep: dict[int, int] = {}
    for s in range(a.num_states):
        rep.setdefault(block[s], s)
    order = [init_block]
    remap = {init_block: 0}
    qi = 0
    while qi < len(order):
        b = order[qi]
        qi += 1
        s = rep[b]
        seen_targets = []
        for i in range(num_letters):
            tb = block[succ[s][i]]
            if tb not in remap:
                remap[tb] = len(remap)
                order.append(tb)
    builder = AutomatonBuilder(a.alphabet)
    for _ in order:
        builder.add_state()
    for b in order:
        s = rep[b]
        by_target: dict[int, list] = {}
        for i, letter in enumerate(letters):
            tb = block[succ[s][_letter_index(letter, q)]]
            by_target.setdefault(remap[tb], []).append(letter)
        for target in sorted(by_target):
            for label in _factor_letters(by_target[target], q, arity):
                builder.add_edge(remap[b], label, target)
    builder.initial = {0}
    builder.finals = {remap[block[s]] for s in range(a.num_states)
                      if s in a.finals and block[s] in remap}
    return builder.build(is_complete_dfa=True)


def minimize(a: Automaton) -> Automaton:
    """Minimal complete DFA for the language of `a`.

    Exact (unique up to isomorphism) whenever the alphabet is small enough
    to tabulate; above DENSE_LETTER_CAP the result is a determinized,
    structurally reduced DFA that may not be minimal.
    """
    t = trim(a)
    if not t.finals:
        return empty_automaton(a.alphabet)
    d = determinize(t)
    if (d.alphabet.num_letters <= DENSE_LETTER_CAP
            and d.num_states * d.alphabet.num_letters <= DENSE_TABLE_CAP):
        return _minimize_dense(d)
    return reduce_states(d)


def complement(a: Automaton) -> Automaton:
    """Words (non-empty) not accepted by `a`."""
    d = a if a.is_complete_dfa else determinize(a)
    finals = frozenset(range(d.num_states)) - d.finals
    comp = Automaton(d.alphabet, d.num_states, d.initial, finals, d.edges, True)
    init = next(iter(comp.initial))
    if init not in comp.finals:
        return comp
    # The initial state is final: a fresh copy keeps the empty word out
    # without disturbing words that revisit the old initial state.
    builder = AutomatonBuilder(comp.alphabet)
    for _ in range(comp.num_states + 1):
        builder.add_state()
    for s in range(comp.num_states):
        for label, t in comp.edges[s]:
            builder.add_edge(s, label, t)
    fresh = comp.num_states
    for label, t in comp.edges[init]:
        builder.add_edge(fresh, label, t)
    builder.initial = {fresh}
    builder.finals = set(comp.finals)
    return builder.build(is_complete_dfa=True)


# ---------------------------------------------------------------------------
# Products


class _AutomatonPart:
    """Adapter exposing an Automaton to the generic product.

    The automaton is trimmed first: complete DFAs carry a dead sink, and a
    sink component would let the product explore garbage joint states that
    only co-reachability could rule out afterwards.
    """

    __slots__ = ("automaton",)

    def __init__(self, automaton: Automaton):
        self.automaton = trim(automaton)

    def initials(self):
        return sorted(self.automaton.initial)

    def is_final(self, state) -> bool:
        return state in self.automaton.finals

    def edges(self, state):
        return self.automaton.edges[state]

    def branchiness(self) -> float:
        a = self.automaton
        return a.num_edges / max(1, a.num_states)


def product_intersection(parts, alphabet: Alphabet,
                         state_cap: int = DEFAULT_STATE_CAP) -> Automaton:
    """Reachable synchronous product; accepts words accepted by every part.

    `parts` expose initials()/is_final()/edges(); edges carry labels over
    the full alphabet.  Only reachable joint states are materialized.
    """
    parts = sorted(parts, key=lambda p: p.branchiness())
    initials = [tuple(c) for c in itertools.product(
        *[p.initials() for p in parts])]
    ids: dict[tuple, int] = {}
    worklist: list[tuple] = []
    for joint in initials:
        if joint not in ids:
            ids[joint] = len(ids)
            worklist.append(joint)
    out_edges: list[list] = [[] for _ in initials]
    finals = set()
    while worklist:
        joint = worklist.pop()
        sid = ids[joint]
        if all(p.is_final(s) for p, s in zip(parts, joint)):
            finals.add(sid)
        combos = [(full_label(alphabet.arity), ())]
        for p, s in zip(parts, joint):
            nxt = []
            part_edges = p.edges(s)
            for label, acc in combos:
                for elabel, t in part_edges:
                    m = label_meet(label, elabel)
                    if m is not None:
                        nxt.append((m, acc + (t,)))
            combos = nxt
            if not combos:
                break
        for label, targets in combos:
            if targets not in ids:
                if len(ids) >= state_cap:
                    raise StateLimitError(
                        f"product exceeded {state_cap} states")
                ids[targets] = len(ids)
                worklist.append(targets)
                out_edges.append([])
            out_edges[sid].append((label, ids[targets]))
    edges = tuple(
        tuple(sorted(row, key=lambda e: (label_key(e[0]), e[1])))
        for row in out_edges
    )
    result = Automaton(alphabet, len(ids),
                       frozenset(ids[j] for j in initials),
                       frozenset(finals), edges, False)
    return trim(result)


def intersect(a: Automaton, b: Automaton,
              state_cap: int = DEFAULT_STATE_CAP) -> Automaton:
    _check_same_alphabet(a, b)
    return product_intersection([_AutomatonPart(a), _AutomatonPart(b)],
                                a.alphabet, state_cap)


def union(a: Automaton, b: Automaton) -> Automaton:
    """Disjoint-sum NFA accepting the union of both languages."""
    _check_same_alphabet(a, b)
    builder = AutomatonBuilder(a.alphabet)
    for _ in range(a.num_states + b.num_states):
        builder.add_state()
    for s in range(a.num_states):
        for label, t in a.edges[s]:
            builder.add_edge(s, label, t)
    off = a.num_states
    for s in range(b.num_states):
        for label, t in b.edges[s]:
            builder.add_edge(off + s, label, off + t)
    builder.initial = set(a.initial) | {off + s for s in b.initial}
    builder.finals = set(a.finals) | {off + s for s in b.finals}
    return builder.build()


# ---------------------------------------------------------------------------
# Track surgery


def project(a: Automaton, track: int) -> Automaton:
    """Delete one track. Apply saturate_padding afterwards to recover the
    padding closure (the dropped track may need extra letters)."""
    if not 0 <= track < a.alphabet.arity:
        raise IndexError(f"track {track} out of range")
    alphabet = Alphabet(a.alphabet.q, a.alphabet.arity - 1)
    builder = AutomatonBuilder(alphabet)
    for _ in range(a.num_states):
        builder.add_state()
    for s in range(a.num_states):
        for label, t in a.edges[s]:
            builder.add_edge(s, label[:track] + label[track + 1:], t)
    builder.initial = set(a.initial)
    builder.finals = set(a.finals)
    return builder.build()


def cylindrify(a: Automaton, position: int) -> Automaton:
    """Insert an unconstrained track at `position`."""
    if not 0 <= position <= a.alphabet.arity:
        raise IndexError(f"position {position} out of range")
    alphabet = Alphabet(a.alphabet.q, a.alphabet.arity + 1)
    edges = tuple(
        tuple((label[:position] + (None,) + label[position:], t)
              for label, t in a.edges[s])
        for s in range(a.num_states)
    )
    return Automaton(alphabet, a.num_states, a.initial, a.finals, edges, False)


def reorder_tracks(a: Automaton, permutation) -> Automaton:
    """Track i of the result reads track permutation[i] of the input."""
    perm = tuple(permutation)
    if sorted(perm) != list(range(a.alphabet.arity)):
        raise ValueError(f"not a permutation of 0..{a.alphabet.arity - 1}")
    edges = tuple(
        tuple((tuple(label[p] for p in perm), t) for label, t in a.edges[s])
        for s in range(a.num_states)
    )
    return Automaton(a.alphabet, a.num_states, a.initial, a.finals, edges,
                     a.is_complete_dfa)


def embed_tracks(a: Automaton, positions, arity: int) -> Automaton:
    """Spread the tracks of `a` onto `positions` within a wider alphabet,
    leaving every other track unconstrained."""
    if len(positions) != a.alphabet.arity:
        raise ValueError("positions must match the automaton arity")
    alphabet = Alphabet(a.alphabet.q, arity)
    base = [None] * arity
    new_edges = []
    for s in range(a.num_states):
        row = []
        for label, t in a.edges[s]:
            wide = list(base)
            for entry, pos in zip(label, positions):
                wide[pos] = entry
            row.append((tuple(wide), t))
        new_edges.append(tuple(row))
    return Automaton(alphabet, a.num_states, a.initial, a.finals,
                     tuple(new_edges), False)


# ---------------------------------------------------------------------------
# Padding saturation


def _sign_letters_of_label(label: Label, q: int):
    """Sign letters (all digits in {0, q-1}) consistent with the label."""
    choices = []
    for entry in label:
        cands = [d for d in (0, q - 1) if entry is None or d in entry]
        if not cands:
            return
        choices.append(cands)
    yield from itertools.product(*choices)


def _sign_restrict(label: Label, sigma, q: int):
    """Restrict to letters whose padding letter is exactly `sigma`."""
    out = []
    for entry, sd in zip(label, sigma):
        if sd == q - 1:
            cell = frozenset({q - 1}) if entry is None else (entry & {q - 1})
        else:
            below = frozenset(range(q - 1))
            cell = below if entry is None else (entry & below)
        if not cell:
            return None
        out.append(cell)
    return normalize_label(tuple(out), q)


def saturate_padding(a: Automaton) -> Automaton:
    """Close the language under removal of trailing sign-digit padding:
    the result accepts w iff `a` accepts w followed by some (possibly empty)
    run of w's padding letter."""
    q = a.alphabet.q
    rev: list[list] = [[] for _ in range(a.num_states)]
    sigmas = set()
    for s in range(a.num_states):
        for label, t in a.edges[s]:
            rev[t].append((s, label))
            sigmas.update(_sign_letters_of_label(label, q))
    member: dict[tuple, set] = {}
    for sigma in sorted(sigmas):
        closure = set(a.finals)
        stack = list(a.finals)
        while stack:
            t = stack.pop()
            for s, label in rev[t]:
                if s not in closure and label_contains(label, sigma):
                    closure.add(s)
                    stack.append(s)
        member[sigma] = closure
    builder = AutomatonBuilder(a.alphabet)
    for _ in range(a.num_states + 1):
        builder.add_state()
    acc = a.num_states
    for s in range(a.num_states):
        for label, t in a.edges[s]:
            builder.add_edge(s, label, t)
            for sigma in member:
                if t in member[sigma]:
                    restricted = _sign_restrict(label, sigma, q)
                    if restricted is not None:
                        builder.add_edge(s, restricted, acc)
    builder.initial = set(a.initial)
    builder.finals = set(a.finals) | {acc}
    return trim(builder.build())


# ---------------------------------------------------------------------------
# Language equality via canonical forms


def isomorphic(a: Automaton, b: Automaton) -> bool:
    """Graph isomorphism of two complete DFAs, matching edges semantically."""
    if a.alphabet != b.alphabet or a.num_states != b.num_states:
        return False
    if len(a.finals) != len(b.finals):
        return False
    pair_map = {next(iter(a.initial)): next(iter(b.initial))}
    stack = [(next(iter(a.initial)), next(iter(b.initial)))]
    seen = set(stack)
    while stack:
        s, t = stack.pop()
        if (s in a.finals) != (t in b.finals):
            return False
        for la, sa in a.edges[s]:
            for lb, tb in b.edges[t]:
                if label_meet(la, lb) is None:
                    continue
                if s_mapped := pair_map.get(sa):
                    if s_mapped != tb:
                        return False
                else:
                    pair_map[sa] = tb
                if (sa, tb) not in seen:
                    seen.add((sa, tb))
                    stack.append((sa, tb))
    return True


def language_equal(a: Automaton, b: Automaton) -> bool:
    _check_same_alphabet(a, b)
    return isomorphic(minimize(a), minimize(b))


# ---------------------------------------------------------------------------
# DOT export


def to_dot(a: Automaton, name: str = "automaton") -> str:
    """Graphviz rendering. Small alphabets get one edge per concrete letter
    (digits colon-separated, track 0 first); wide ones keep set labels."""
    q = a.alphabet.q
    lines = [
        f"digraph {name} {{",
        '  // digit tuples are least-significant-digit first',
        "  rankdir=LR;",
        '  __start [shape=none, label=""];',
    ]
    for s in range(a.num_states):
        shape = "doublecircle" if s in a.finals else "circle"
        lines.append(f"  s{s} [shape={shape}, label=\"{s}\"];")
    for s in sorted(a.initial):
        lines.append(f"  __start -> s{s};")
    dense = a.alphabet.num_letters <= 1024
    for s in range(a.num_states):
        for label, t in a.edges[s]:
            if dense:
                for letter in label_letters(label, q):
                    text = ":".join(str(d) for d in letter)
                    lines.append(f'  s{s} -> s{t} [label="{text}"];')
            else:
                parts = []
                for entry in label:
                    if entry is None:
                        parts.append("*")
                    else:
                        parts.append("{" + ",".join(map(str, sorted(entry))) + "}")
                text = ":".join(parts)
                lines.append(f'  s{s} -> s{t} [label="{text}"];')
    lines.append("}")
    return "\n".join(lines)
