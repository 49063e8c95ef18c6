"""Context-free grammars over signed alphabets.

Production bodies are flat tuples mixing terminal letters (nonzero ints,
same encoding as :mod:`eqfree.words`) and nonterminal references ``Nt(id)``.
Grammars are immutable after construction; analyses keep private scratch
state, so concurrent reads are safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Union

from .errors import GrammarCycleError, MalformedPlanError
from .words import Word

__all__ = [
    "Nt",
    "Symbol",
    "Production",
    "Grammar",
    "PlanStep",
    "DerivationPlan",
    "total_size",
    "ram",
    "trim",
    "replay",
    "plan_word_length",
    "parse_count",
]


@dataclass(frozen=True)
class Nt:
    """Reference to a nonterminal inside a production body."""

    id: int


Symbol = Union[int, Nt]


@dataclass(frozen=True)
class Production:
    head: int
    body: tuple[Symbol, ...]

    def nonterminals(self) -> list[int]:
        return [s.id for s in self.body if isinstance(s, Nt)]

    def terminal_count(self) -> int:
        return sum(1 for s in self.body if not isinstance(s, Nt))


@dataclass(frozen=True)
class Grammar:
    """A context-free grammar ``(nonterminals, productions, start)``.

    ``unambiguous`` is an assertion made by constructors that guarantee a
    unique leftmost derivation per word; it is never inferred.
    """

    nonterminal_count: int
    productions: tuple[Production, ...]
    start: int
    alphabet_rank: int
    unambiguous: bool = False

    def __post_init__(self) -> None:
        if not (0 <= self.start < self.nonterminal_count):
            raise ValueError("start symbol out of range")
        for p in self.productions:
            if not (0 <= p.head < self.nonterminal_count):
                raise ValueError(f"production head {p.head} out of range")
            for s in p.body:
                if isinstance(s, Nt):
                    if not (0 <= s.id < self.nonterminal_count):
                        raise ValueError(f"nonterminal {s.id} out of range")
                elif s == 0 or abs(s) > self.alphabet_rank:
                    raise ValueError(f"terminal {s} out of range")

    @cached_property
    def productions_of(self) -> tuple[tuple[int, ...], ...]:
        """Production indices grouped by head."""
        buckets: list[list[int]] = [[] for _ in range(self.nonterminal_count)]
        for j, p in enumerate(self.productions):
            buckets[p.head].append(j)
        return tuple(tuple(b) for b in buckets)

    @cached_property
    def nullable(self) -> frozenset[int]:
        """Nonterminals that derive the empty word (cached fixed point)."""
        known: set[int] = set()
        changed = True
        while changed:
            changed = False
            for p in self.productions:
                if p.head in known:
                    continue
                if all(isinstance(s, Nt) and s.id in known for s in p.body):
                    known.add(p.head)
                    changed = True
        return frozenset(known)

    def dump(self) -> str:
        """One production per line, ``N<id> -> sym sym ...``, ordered by
        production index; terminals use the letter syntax of the CLI."""
        from .cli import format_letter

        lines = []
        for p in self.productions:
            syms = [
                f"N{s.id}" if isinstance(s, Nt) else format_letter(s, self.alphabet_rank)
                for s in p.body
            ]
            lines.append(f"N{p.head} -> {' '.join(syms)}".rstrip())
        return "\n".join(lines)


def total_size(g: Grammar) -> int:
    """Sum of ``1 + len(body)`` over all productions."""
    return sum(1 + len(p.body) for p in g.productions)


def ram(g: Grammar) -> int:
    """Maximum number of nonterminal occurrences in a single body."""
    return max((len(p.nonterminals()) for p in g.productions), default=0)


def _productive(g: Grammar) -> list[bool]:
    # Same fixed point as the emptiness worklist, boolean-only.
    ok = [False] * g.nonterminal_count
    remaining = [len(p.nonterminals()) for p in g.productions]
    occurrences: list[list[int]] = [[] for _ in range(g.nonterminal_count)]
    for j, p in enumerate(g.productions):
        for a in p.nonterminals():
            occurrences[a].append(j)
    queue = [j for j, r in enumerate(remaining) if r == 0]
    while queue:
        j = queue.pop()
        head = g.productions[j].head
        if ok[head]:
            continue
        ok[head] = True
        for c in occurrences[head]:
            remaining[c] -= 1
            if remaining[c] == 0:
                queue.append(c)
    return ok


def trim(g: Grammar) -> Grammar:
    """Remove non-productive and unreachable nonterminals.

    Language and the ``unambiguous`` flag are preserved.  If the start
    symbol is non-productive the result keeps only the start and has no
    productions.
    """
    productive = _productive(g)
    if not productive[g.start]:
        return Grammar(1, (), 0, g.alphabet_rank, g.unambiguous)
    keep = [
        p
        for p in g.productions
        if productive[p.head] and all(productive[a] for a in p.nonterminals())
    ]
    by_head: dict[int, list[Production]] = {}
    for p in keep:
        by_head.setdefault(p.head, []).append(p)
    reachable = {g.start}
    stack = [g.start]
    while stack:
        n = stack.pop()
        for p in by_head.get(n, ()):
            for a in p.nonterminals():
                if a not in reachable:
                    reachable.add(a)
                    stack.append(a)
    order = sorted(reachable)
    renumber = {old: new for new, old in enumerate(order)}
    prods = tuple(
        Production(
            renumber[p.head],
            tuple(Nt(renumber[s.id]) if isinstance(s, Nt) else s for s in p.body),
        )
        for p in keep
        if p.head in reachable
    )
    return Grammar(len(order), prods, renumber[g.start], g.alphabet_rank, g.unambiguous)


@dataclass(frozen=True)
class PlanStep:
    """One entry of a derivation plan: a production index plus an optional
    integer annotation (the minimum size of the head, when produced by the
    weighted search)."""

    production: int
    annotation: int | None = None


DerivationPlan = tuple[PlanStep, ...]


def _check_plan(g: Grammar, plan: DerivationPlan) -> None:
    seen_heads: set[int] = set()
    for step in plan:
        if not (0 <= step.production < len(g.productions)):
            raise MalformedPlanError(f"production index {step.production} out of range")
        p = g.productions[step.production]
        for a in p.nonterminals():
            if a not in seen_heads:
                raise MalformedPlanError(
                    f"body of production {step.production} references N{a} "
                    "before a production for it appears"
                )
        if p.head in seen_heads:
            raise MalformedPlanError(f"two productions for head N{p.head}")
        seen_heads.add(p.head)
    if not plan or g.productions[plan[-1].production].head != g.start:
        raise MalformedPlanError("last plan entry must produce the start symbol")


def replay(g: Grammar, plan: DerivationPlan) -> Word:
    """Expand a derivation plan bottom-up into the terminal word it denotes."""
    _check_plan(g, plan)
    expansion: dict[int, Word] = {}
    for step in plan:
        p = g.productions[step.production]
        out: list[int] = []
        for s in p.body:
            if isinstance(s, Nt):
                out.extend(expansion[s.id])
            else:
                out.append(s)
        expansion[p.head] = tuple(out)
    return expansion[g.start]


def plan_word_length(g: Grammar, plan: DerivationPlan) -> int:
    """Length of ``replay(g, plan)`` without materializing the word."""
    _check_plan(g, plan)
    length: dict[int, int] = {}
    for step in plan:
        p = g.productions[step.production]
        length[p.head] = sum(
            length[s.id] if isinstance(s, Nt) else 1 for s in p.body
        )
    return length[g.start]


def _epsilon_counts(g: Grammar, cap: int) -> list[int]:
    """Number of distinct leftmost derivations of the empty word per
    nonterminal, saturating at ``cap``.

    Raises :class:`GrammarCycleError` when an epsilon-cycle makes some
    count infinite.
    """
    nullable = g.nullable
    # Edges of the epsilon-subgrammar: head -> body nonterminals of
    # productions whose body is entirely nullable.
    eps_prods: list[list[Production]] = [[] for _ in range(g.nonterminal_count)]
    edges: dict[int, set[int]] = {n: set() for n in nullable}
    for p in g.productions:
        if p.head in nullable and all(
            isinstance(s, Nt) and s.id in nullable for s in p.body
        ):
            eps_prods[p.head].append(p)
            edges[p.head].update(p.nonterminals())
    order: list[int] = []
    state: dict[int, int] = {}  # 1 = on stack, 2 = done

    for root in nullable:
        if state.get(root):
            continue
        stack: list[tuple[int, Iterable[int]]] = [(root, iter(edges[root]))]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if state.get(nxt) == 1:
                    raise GrammarCycleError(
                        "epsilon-cycle: infinitely many derivations of the empty word"
                    )
                if not state.get(nxt):
                    state[nxt] = 1
                    stack.append((nxt, iter(edges[nxt])))
                    advanced = True
                    break
            if not advanced:
                state[node] = 2
                order.append(node)
                stack.pop()
    counts = [0] * g.nonterminal_count
    for n in order:  # children before parents
        total = 0
        for p in eps_prods[n]:
            ways = 1
            for a in p.nonterminals():
                ways = min(cap, ways * counts[a])
            total = min(cap, total + ways)
        counts[n] = total
    return counts


def _check_context_unit_acyclic(g: Grammar) -> None:
    """Reject grammars where N -> alpha A beta with nullable alpha, beta
    forms a cycle: derivation counts of single words diverge."""
    nullable = g.nullable
    edges: dict[int, set[int]] = {}
    for p in g.productions:
        if p.terminal_count() > 0:
            continue
        nts = p.nonterminals()
        for idx, a in enumerate(nts):
            others = nts[:idx] + nts[idx + 1 :]
            if all(b in nullable for b in others):
                edges.setdefault(p.head, set()).add(a)
    color: dict[int, int] = {}

    def visit(n: int) -> None:
        stack = [(n, iter(edges.get(n, ())))]
        color[n] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color.get(nxt) == 1:
                    raise GrammarCycleError(
                        "unit-cycle through nullable context: derivation "
                        "counts diverge"
                    )
                if not color.get(nxt):
                    color[nxt] = 1
                    stack.append((nxt, iter(edges.get(nxt, ()))))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()

    for n in list(edges):
        if not color.get(n):
            visit(n)


def parse_count(g: Grammar, w: Word, cap: int = 2) -> int:
    """Number of distinct leftmost derivations of ``w``, saturating at
    ``cap``.

    Diverging epsilon/unit cycles raise :class:`GrammarCycleError` instead
    of hanging.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    eps = _epsilon_counts(g, cap)
    _check_context_unit_acyclic(g)
    n_w = len(w)

    # ways(N, i, j): derivations of w[i:j] from N.  Empty spans come from
    # the epsilon table, so the recursion strictly shrinks (span, symbols).
    memo: dict[tuple[int, int, int], int] = {}
    body_memo: dict[tuple[int, int, int, int], int] = {}

    def ways(n: int, i: int, j: int) -> int:
        if i == j:
            return eps[n]
        key = (n, i, j)
        if key in memo:
            return memo[key]
        memo[key] = 0  # provisional; true cycles were excluded above
        total = 0
        for pj in g.productions_of[n]:
            total = min(cap, total + body_ways(pj, 0, i, j))
        memo[key] = total
        return total

    def body_ways(pj: int, pos: int, i: int, j: int) -> int:
        body = g.productions[pj].body
        if pos == len(body):
            return 1 if i == j else 0
        key = (pj, pos, i, j)
        if key in body_memo:
            return body_memo[key]
        s = body[pos]
        total = 0
        if isinstance(s, Nt):
            for mid in range(i, j + 1):
                left = ways(s.id, i, mid)
                if left:
                    rest = body_ways(pj, pos + 1, mid, j)
                    total = min(cap, total + min(cap, left * rest))
        else:
            if i < j and w[i] == s:
                total = body_ways(pj, pos + 1, i + 1, j)
        body_memo[key] = total
        return total

    return ways(g.start, 0, n_w)
