"""Finite automata over signed alphabets and the product with a grammar.

The three automata the equation pipeline needs (nonempty reduced words,
cyclically reduced words, cyclically reduced words with an exact count of
a marked generator) are all deterministic and total, with an explicit
absorbing dead state.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import AlphabetMismatchError
from .grammar import Grammar, Nt, Production, Symbol, ram, total_size, trim
from .words import Word

__all__ = [
    "Automaton",
    "accepts",
    "nonempty_reduced_dfa",
    "reduced_dfa",
    "cyclically_reduced_dfa",
    "cyclically_reduced_degree_dfa",
    "letter_count_dfa",
    "min_length_dfa",
    "complement_power_dfa",
    "drop_empty_word",
    "intersect",
]


def _letter_index(c: int, rank: int) -> int:
    """Dense index of a signed letter: +1..+m -> 0..m-1, -1..-m -> m..2m-1."""
    return c - 1 if c > 0 else rank - c - 1


def _index_letter(i: int, rank: int) -> int:
    return i + 1 if i < rank else rank - i - 1


@dataclass(frozen=True)
class Automaton:
    """Finite automaton ``(states, transitions, initial, final)``.

    ``transitions`` maps ``(state, letter)`` to a tuple of successor
    states; missing keys mean no move.  ``deterministic`` asserts a single
    initial state and singleton moves for every (state, letter) pair.
    """

    state_count: int
    alphabet_rank: int
    transitions: dict[tuple[int, int], tuple[int, ...]]
    initial: frozenset[int]
    final: frozenset[int]
    deterministic: bool = False

    def __post_init__(self) -> None:
        if self.deterministic:
            if len(self.initial) != 1:
                raise ValueError("deterministic automaton needs one initial state")
            for q in range(self.state_count):
                for c in self.letters():
                    if len(self.transitions.get((q, c), ())) != 1:
                        raise ValueError(
                            "deterministic automaton must have exactly one "
                            f"move for state {q}, letter {c}"
                        )

    def letters(self) -> list[int]:
        m = self.alphabet_rank
        return [c for i in range(1, m + 1) for c in (i, -i)]

    @cached_property
    def delta(self) -> list[list[int]]:
        """Deterministic transition table ``[state][letter_index] -> state``."""
        assert self.deterministic
        m = self.alphabet_rank
        table = [[0] * (2 * m) for _ in range(self.state_count)]
        for q in range(self.state_count):
            for c in self.letters():
                table[q][_letter_index(c, m)] = self.transitions[(q, c)][0]
        return table

    def step(self, states: frozenset[int], c: int) -> frozenset[int]:
        out: set[int] = set()
        for q in states:
            out.update(self.transitions.get((q, c), ()))
        return frozenset(out)


def accepts(aut: Automaton, w: Word) -> bool:
    states = aut.initial
    for c in w:
        states = aut.step(states, c)
        if not states:
            return False
    return bool(states & aut.final)


def _dfa(state_count: int, rank: int, move, initial: int, final) -> Automaton:
    transitions = {}
    letters = [c for i in range(1, rank + 1) for c in (i, -i)]
    for q in range(state_count):
        for c in letters:
            transitions[(q, c)] = (move(q, c),)
    return Automaton(
        state_count,
        rank,
        transitions,
        frozenset({initial}),
        frozenset(final),
        deterministic=True,
    )


def nonempty_reduced_dfa(rank: int) -> Automaton:
    """Accepts exactly the nonempty reduced words over ``2*rank`` letters.

    States: 0 start, 1..2m "last letter was c", 2m+1 dead.
    """
    if rank < 1:
        raise ValueError("rank must be >= 1")
    m = rank
    dead = 2 * m + 1

    def state_of(c: int) -> int:
        return c if c > 0 else m - c

    def move(q: int, c: int) -> int:
        if q == dead:
            return dead
        if q == 0:
            return state_of(c)
        last = q if q <= m else m - q
        return dead if c == -last else state_of(c)

    return _dfa(2 * m + 2, m, move, 0, range(1, 2 * m + 1))


def reduced_dfa(rank: int) -> Automaton:
    """Accepts all reduced words, including the empty one."""
    base = nonempty_reduced_dfa(rank)
    return Automaton(
        base.state_count,
        base.alphabet_rank,
        base.transitions,
        base.initial,
        base.final | base.initial,
        deterministic=True,
    )


def _cyc_dfa(rank: int, count_of, cap: int, accept_count, accept_empty: bool) -> Automaton:
    """Shared shape of the cyclically-reduced automata: states track
    (first letter, last letter, capped count)."""
    m = rank
    n_letters = 2 * m

    def sid(fi: int, li: int, c: int) -> int:
        return 2 + (fi * n_letters + li) * (cap + 1) + c

    dead = 1

    def move(q: int, c: int) -> int:
        ci = _letter_index(c, m)
        if q == dead:
            return dead
        if q == 0:
            return sid(ci, ci, min(cap, count_of(c)))
        fi, rest = divmod(q - 2, n_letters * (cap + 1))
        li, cnt = divmod(rest, cap + 1)
        last = _index_letter(li, m)
        if c == -last:
            return dead
        return sid(fi, ci, min(cap, cnt + count_of(c)))

    final = []
    if accept_empty:
        final.append(0)
    for fi in range(n_letters):
        for li in range(n_letters):
            first = _index_letter(fi, m)
            last = _index_letter(li, m)
            if first == -last:
                continue
            for c in range(cap + 1):
                if accept_count(c):
                    final.append(sid(fi, li, c))
    return _dfa(2 + n_letters * n_letters * (cap + 1), m, move, 0, final)


def cyclically_reduced_dfa(rank: int) -> Automaton:
    """All cyclically reduced words (the empty word counts as one)."""
    return _cyc_dfa(rank, lambda c: 0, 0, lambda c: True, accept_empty=True)


def cyclically_reduced_degree_dfa(rank: int, variable: int, d: int) -> Automaton:
    """Cyclically reduced words with exactly ``d`` occurrences of the
    marked generator (either sign).  The empty word is accepted only for
    ``d == 0``; callers that need to exclude it drop the start state from
    the finals."""
    if d < 0:
        raise ValueError("degree must be >= 0")
    cap = d + 1
    return _cyc_dfa(
        rank,
        lambda c: 1 if abs(c) == variable else 0,
        cap,
        lambda c: c == d,
        accept_empty=(d == 0),
    )


def letter_count_dfa(rank: int, marked: int, d: int) -> Automaton:
    """Words with exactly ``d`` occurrences of the marked generator
    (either sign); the count saturates one past ``d``."""
    if d < 0:
        raise ValueError("count must be >= 0")
    cap = d + 1

    def move(q: int, c: int) -> int:
        return min(cap, q + 1) if abs(c) == marked else q

    return _dfa(cap + 1, rank, move, 0, {d})


def min_length_dfa(rank: int, min_len: int = 1) -> Automaton:
    """Words of length at least ``min_len``."""
    last = min_len

    def move(q: int, c: int) -> int:
        return min(last, q + 1)

    return _dfa(min_len + 1, rank, move, 0, {last})


def complement_power_dfa(p: Word, rank: int) -> Automaton:
    """Complement of ``p*`` for a nonempty word ``p``: accepts every word
    that is not a (possibly zeroth) power of ``p``."""
    if not p:
        raise ValueError("p must be nonempty")
    k = len(p)
    dead = k

    def move(q: int, c: int) -> int:
        if q == dead:
            return dead
        return (q + 1) % k if c == p[q] else dead

    return _dfa(k + 1, rank, move, 0, list(range(1, k)) + [dead])


def drop_empty_word(aut: Automaton) -> Automaton:
    """Same language minus the empty word (initial states made non-final).

    Valid for the automata in this module, whose initial states have no
    incoming transitions."""
    for (q, _c), targets in aut.transitions.items():
        for t in targets:
            if t in aut.initial and (q != t):
                raise ValueError("initial state has incoming transitions")
    return Automaton(
        aut.state_count,
        aut.alphabet_rank,
        aut.transitions,
        aut.initial,
        aut.final - aut.initial,
        aut.deterministic,
    )


def _split_body(body: tuple[Symbol, ...]) -> tuple[tuple[Word, ...], tuple[int, ...]]:
    """Split a body into terminal runs and the nonterminals between them:
    ``w0 A1 w1 ... Ak wk`` gives (``(w0..wk)``, ``(A1..Ak)``)."""
    runs: list[Word] = []
    nts: list[int] = []
    current: list[int] = []
    for s in body:
        if isinstance(s, Nt):
            runs.append(tuple(current))
            current = []
            nts.append(s.id)
        else:
            current.append(s)
    runs.append(tuple(current))
    return tuple(runs), tuple(nts)


class _DetSegments:
    """Per-terminal-run transition and preimage tables for a deterministic
    automaton, computed once per distinct run."""

    def __init__(self, aut: Automaton):
        self.aut = aut
        self.rank = aut.alphabet_rank
        self.delta = aut.delta
        self._next: dict[Word, list[int]] = {}
        self._pre: dict[Word, list[list[int]]] = {}

    def next_table(self, run: Word) -> list[int]:
        table = self._next.get(run)
        if table is None:
            m = self.rank
            table = list(range(self.aut.state_count))
            for c in run:
                ci = _letter_index(c, m)
                table = [self.delta[q][ci] for q in table]
            self._next[run] = table
        return table

    def pre_table(self, run: Word) -> list[list[int]]:
        pre = self._pre.get(run)
        if pre is None:
            nxt = self.next_table(run)
            pre = [[] for _ in range(self.aut.state_count)]
            for p, q in enumerate(nxt):
                pre[q].append(p)
            self._pre[run] = pre
        return pre


def _reachability_masks(aut: Automaton) -> tuple[list[int], list[int]]:
    """Forward and backward reachability of each state as bitmasks."""
    n = aut.state_count
    adj: list[set[int]] = [set() for _ in range(n)]
    radj: list[set[int]] = [set() for _ in range(n)]
    for (q, _c), targets in aut.transitions.items():
        for t in targets:
            adj[q].add(t)
            radj[t].add(q)

    def closure(neigh: list[set[int]]) -> list[int]:
        masks = [1 << q for q in range(n)]
        changed = True
        while changed:
            changed = False
            for q in range(n):
                acc = masks[q]
                for t in neigh[q]:
                    acc |= masks[t]
                if acc != masks[q]:
                    masks[q] = acc
                    changed = True
        return masks

    return closure(adj), closure(radj)


def intersect(g: Grammar, aut: Automaton) -> Grammar:
    """Grammar for ``L(g)`` intersected with the automaton's language.

    Product nonterminals ``(N, p, q)`` are discovered lazily from the
    start pairs, splitting each body's terminal runs across states; the
    result is trimmed.  If ``g`` is unambiguous and the automaton
    deterministic, the product is unambiguous.
    """
    if g.alphabet_rank != aut.alphabet_rank:
        raise AlphabetMismatchError(
            f"grammar over rank {g.alphabet_rank}, automaton over rank "
            f"{aut.alphabet_rank}"
        )
    if aut.deterministic:
        product = _intersect_det(g, aut)
    else:
        product = _intersect_nfa(g, aut)
    start_rules = sum(2 for p in product.productions if p.head == product.start)
    body_rules = total_size(product) - start_rules
    bound = total_size(g) * aut.state_count ** (2 + 2 * ram(g))
    assert body_rules <= bound, "product exceeded its size bound"
    assert start_rules <= 2 * aut.state_count**2, "too many start rules"
    return trim(product)


def _intersect_det(g: Grammar, aut: Automaton) -> Grammar:
    segs = _DetSegments(aut)
    reach, coreach = _reachability_masks(aut)
    q0 = next(iter(aut.initial))

    split: list[tuple[tuple[Word, ...], tuple[int, ...]]] = [
        _split_body(p.body) for p in g.productions
    ]

    ids: dict[tuple[int, int, int], int] = {}
    worklist: list[tuple[int, int, int]] = []
    productions: list[Production] = []
    START = 0
    next_id = 1

    def get_id(triple: tuple[int, int, int]) -> int:
        nonlocal next_id
        pid = ids.get(triple)
        if pid is None:
            pid = next_id
            next_id += 1
            ids[triple] = pid
            worklist.append(triple)
        return pid

    for qf in sorted(aut.final):
        productions.append(Production(START, (Nt(get_id((g.start, q0, qf))),)))

    def emit(triple: tuple[int, int, int], runs, nts, states) -> None:
        body: list[Symbol] = []
        body.extend(runs[0])
        for idx, a in enumerate(nts):
            body.append(Nt(get_id((a, states[2 * idx], states[2 * idx + 1]))))
            body.extend(runs[idx + 1])
        productions.append(Production(ids[triple], tuple(body)))

    def iter_bits(mask: int):
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    while worklist:
        triple = worklist.pop()
        n, p, q = triple
        for pj in g.productions_of[n]:
            runs, nts = split[pj]
            k = len(nts)
            if k == 0:
                if segs.next_table(runs[0])[p] == q:
                    emit(triple, runs, nts, ())
                continue
            p1 = segs.next_table(runs[0])[p]
            last_pre = segs.pre_table(runs[k])[q]
            if not last_pre:
                continue
            if k == 1:
                for q1 in last_pre:
                    if (reach[p1] >> q1) & 1:
                        emit(triple, runs, nts, (p1, q1))
                continue
            # k >= 2: enumerate the intermediate states left to right,
            # pruning by forward reachability from p_i and backward
            # reachability into q.
            def expand(pos: int, p_cur: int, states: tuple[int, ...]) -> None:
                if pos == k - 1:
                    for q_last in last_pre:
                        if (reach[p_cur] >> q_last) & 1:
                            emit(triple, runs, nts, states + (p_cur, q_last))
                    return
                candidates = reach[p_cur] & coreach[q]
                for q_i in iter_bits(candidates):
                    p_nxt = segs.next_table(runs[pos + 1])[q_i]
                    expand(pos + 1, p_nxt, states + (p_cur, q_i))

            expand(0, p1, ())

    return Grammar(
        next_id,
        tuple(productions),
        START,
        g.alphabet_rank,
        unambiguous=g.unambiguous,
    )


def _intersect_nfa(g: Grammar, aut: Automaton) -> Grammar:
    """General (nondeterministic) product; same lazy scheme over state
    sets expanded elementwise."""
    n_states = aut.state_count
    seg_next: dict[Word, list[frozenset[int]]] = {}

    def next_sets(run: Word) -> list[frozenset[int]]:
        table = seg_next.get(run)
        if table is None:
            table = []
            for q in range(n_states):
                states = frozenset({q})
                for c in run:
                    states = aut.step(states, c)
                table.append(states)
            seg_next[run] = table
        return table

    reach, coreach = _reachability_masks(aut)
    split = [_split_body(p.body) for p in g.productions]

    ids: dict[tuple[int, int, int], int] = {}
    worklist: list[tuple[int, int, int]] = []
    productions: list[Production] = []
    START = 0
    next_id = 1

    def get_id(triple):
        nonlocal next_id
        pid = ids.get(triple)
        if pid is None:
            pid = next_id
            next_id += 1
            ids[triple] = pid
            worklist.append(triple)
        return pid

    for q0 in sorted(aut.initial):
        for qf in sorted(aut.final):
            productions.append(Production(START, (Nt(get_id((g.start, q0, qf))),)))

    while worklist:
        triple = worklist.pop()
        n, p, q = triple

        for pj in g.productions_of[n]:
            runs, nts = split[pj]
            k = len(nts)
            if k == 0:
                if q in next_sets(runs[0])[p]:
                    productions.append(Production(ids[triple], tuple(runs[0])))
                continue

            def expand(pos: int, p_cur: int, states: tuple[int, ...]) -> None:
                for q_i in range(n_states):
                    if not ((reach[p_cur] >> q_i) & 1 and (coreach[q] >> q_i) & 1):
                        continue
                    if pos == k - 1:
                        if q not in next_sets(runs[k])[q_i]:
                            continue
                        full = states + (p_cur, q_i)
                        body: list[Symbol] = list(runs[0])
                        for idx, a in enumerate(nts):
                            body.append(Nt(get_id((a, full[2 * idx], full[2 * idx + 1]))))
                            body.extend(runs[idx + 1])
                        productions.append(Production(ids[triple], tuple(body)))
                    else:
                        for p_nxt in next_sets(runs[pos + 1])[q_i]:
                            expand(pos + 1, p_nxt, states + (p_cur, q_i))

            for p1 in next_sets(runs[0])[p]:
                expand(0, p1, ())

    return Grammar(next_id, tuple(productions), START, g.alphabet_rank, unambiguous=False)
