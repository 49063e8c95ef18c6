"""Grammar analyses: emptiness, witness plans, weighted shortest
derivations, bounded-length words, exact census, growth classification.

The first four are worklist algorithms over the production table
(occurrence lists, per-production counters of unresolved nonterminals,
and a queue); they run in near-linear time in the total grammar size.
The census is an exact dynamic program over word lengths, valid for
unambiguous grammars where derivation counts equal word counts.  The
growth classifier decides the finite / polynomial-of-degree-k /
exponential trichotomy structurally and is cross-validated against the
census in the test suite.
"""

from __future__ import annotations

import heapq
import json
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from . import kernels
from .automata import complement_power_dfa, intersect, min_length_dfa
from .errors import AmbiguityError, EmptyLanguageError, GrammarCycleError
from .grammar import (
    DerivationPlan,
    Grammar,
    Nt,
    PlanStep,
    Production,
    replay,
    trim,
)
from .words import Word

__all__ = [
    "SizeFunction",
    "uniform_size",
    "letter_size",
    "GrowthClass",
    "Census",
    "is_empty",
    "witness_plan",
    "min_size_plan",
    "bounded_words",
    "census",
    "classify_growth",
]

SizeFunction = Mapping[int, int]


def uniform_size(rank: int, weight: int = 1) -> dict[int, int]:
    return {c: weight for i in range(1, rank + 1) for c in (i, -i)}


def letter_size(rank: int, marked: int, weight: int = 1) -> dict[int, int]:
    """Weight ``weight`` on the marked generator (both signs), 0 elsewhere."""
    sigma = uniform_size(rank, 0)
    sigma[marked] = weight
    sigma[-marked] = weight
    return sigma


@dataclass(frozen=True)
class GrowthClass:
    """Verdict of the growth trichotomy.

    ``finite`` carries the maximum word length (None for the empty
    language); ``polynomial`` carries the degree of the cumulative count.
    A finite language behaves like polynomial degree 0 wherever degrees
    are compared.
    """

    kind: str  # "finite" | "polynomial" | "exponential"
    max_length: int | None = None
    degree: int | None = None

    @classmethod
    def finite(cls, max_length: int | None) -> "GrowthClass":
        return cls("finite", max_length=max_length)

    @classmethod
    def polynomial(cls, degree: int) -> "GrowthClass":
        return cls("polynomial", degree=degree)

    @classmethod
    def exponential(cls) -> "GrowthClass":
        return cls("exponential")

    @property
    def polynomial_degree(self) -> int | None:
        if self.kind == "finite":
            return 0
        if self.kind == "polynomial":
            return self.degree
        return None

    def __str__(self) -> str:
        if self.kind == "finite":
            return f"Finite(max_length={self.max_length})"
        if self.kind == "polynomial":
            return f"Polynomial(degree={self.degree})"
        return "Exponential"


@dataclass(frozen=True)
class Census:
    """Exact per-length word counts ``counts[l] = #{w in L : len(w) = l}``."""

    counts: tuple[int, ...]

    def cumulative(self) -> tuple[int, ...]:
        out = []
        acc = 0
        for c in self.counts:
            acc += c
            out.append(acc)
        return tuple(out)

    def text_table(self) -> str:
        return "\n".join(f"{l} {c}" for l, c in enumerate(self.counts))

    def cumulative_json(self) -> str:
        return json.dumps(list(self.cumulative()))

    def __getitem__(self, l: int) -> int:
        return self.counts[l]

    def __len__(self) -> int:
        return len(self.counts)


# ---------------------------------------------------------------------------
# Worklist algorithms.


def _occurrence_lists(g: Grammar) -> tuple[list[list[int]], list[int]]:
    """Occurrence lists per nonterminal (production indices, one entry per
    occurrence) and the per-production count of nonterminal symbols."""
    occurrences: list[list[int]] = [[] for _ in range(g.nonterminal_count)]
    remaining = [0] * len(g.productions)
    for j, p in enumerate(g.productions):
        for a in p.nonterminals():
            occurrences[a].append(j)
            remaining[j] += 1
    return occurrences, remaining


def is_empty(g: Grammar) -> bool:
    """True iff the grammar derives no terminal word."""
    occurrences, remaining = _occurrence_lists(g)
    terminates = [False] * g.nonterminal_count
    queue = deque(j for j, r in enumerate(remaining) if r == 0)
    while queue:
        j = queue.popleft()
        head = g.productions[j].head
        if terminates[head]:
            continue
        terminates[head] = True
        for c in occurrences[head]:
            remaining[c] -= 1
            if remaining[c] == 0:
                queue.append(c)
    return not terminates[g.start]


def witness_plan(g: Grammar) -> DerivationPlan:
    """A derivation plan for some word of the language: heads pairwise
    distinct, each body only references earlier heads, the start comes
    last.  Raises :class:`EmptyLanguageError` on an empty language."""
    occurrences, remaining = _occurrence_lists(g)
    terminates = [False] * g.nonterminal_count
    queue = deque(j for j, r in enumerate(remaining) if r == 0)
    plan: list[PlanStep] = []
    while queue:
        j = queue.popleft()
        head = g.productions[j].head
        if terminates[head]:
            continue
        terminates[head] = True
        plan.append(PlanStep(j))
        if head == g.start:
            return tuple(plan)
        for c in occurrences[head]:
            remaining[c] -= 1
            if remaining[c] == 0:
                queue.append(c)
    raise EmptyLanguageError("no derivable word: the language is empty")


def min_size_plan(g: Grammar, sigma: SizeFunction) -> tuple[DerivationPlan, int]:
    """Derivation plan of a word of minimum total size under ``sigma``,
    with each step annotated by the minimum size of its head.

    Same worklist as the emptiness check, with the FIFO queue replaced by
    a priority queue on accumulated size, so heads are finalized in
    nondecreasing size order.
    """
    occurrences, remaining = _occurrence_lists(g)
    size = [0] * len(g.productions)
    for j, p in enumerate(g.productions):
        size[j] = sum(sigma[s] for s in p.body if not isinstance(s, Nt))
    terminates = [False] * g.nonterminal_count
    heap: list[tuple[int, int]] = [
        (size[j], j) for j, r in enumerate(remaining) if r == 0
    ]
    heapq.heapify(heap)
    plan: list[PlanStep] = []
    while heap:
        tau, j = heapq.heappop(heap)
        head = g.productions[j].head
        if terminates[head]:
            continue
        terminates[head] = True
        plan.append(PlanStep(j, tau))
        if head == g.start:
            return tuple(plan), tau
        for c in occurrences[head]:
            remaining[c] -= 1
            size[c] += tau
            if remaining[c] == 0:
                heapq.heappush(heap, (size[c], c))
    raise EmptyLanguageError("no derivable word: the language is empty")


def bounded_words(g: Grammar, r: int) -> dict[int, tuple[int, Word]]:
    """For every nonterminal that derives a word of length at most ``r``,
    the minimum such length and one word realizing it.

    Staged worklist over target lengths s = 0..r: a production becomes
    eligible at the stage equal to its body's resolved length.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    occurrences, remaining = _occurrence_lists(g)
    length_acc = [p.terminal_count() for p in g.productions]
    terminates = [False] * g.nonterminal_count
    min_len: dict[int, int] = {}
    word: dict[int, Word] = {}
    for s in range(r + 1):
        queue = deque(
            j
            for j, p in enumerate(g.productions)
            if remaining[j] == 0 and length_acc[j] == s and not terminates[p.head]
        )
        while queue:
            j = queue.popleft()
            p = g.productions[j]
            if terminates[p.head]:
                continue
            terminates[p.head] = True
            min_len[p.head] = s
            out: list[int] = []
            for sym in p.body:
                if isinstance(sym, Nt):
                    out.extend(word[sym.id])
                else:
                    out.append(sym)
            word[p.head] = tuple(out)
            for c in occurrences[p.head]:
                remaining[c] -= 1
                length_acc[c] += s
                if remaining[c] == 0 and length_acc[c] == s:
                    queue.append(c)
    return {n: (min_len[n], word[n]) for n in min_len}


# ---------------------------------------------------------------------------
# Census.


def _epsilon_info(g: Grammar) -> tuple[frozenset[int], dict[int, int]]:
    """Nullable set plus the exact number of derivations of the empty word
    per nullable symbol; cycles in the all-nullable subgrammar and
    multiple empty-word derivations are rejected."""
    nullable = g.nullable
    eps_prods: dict[int, list[Production]] = {n: [] for n in nullable}
    edges: dict[int, set[int]] = {n: set() for n in nullable}
    for p in g.productions:
        if p.head in nullable and all(
            isinstance(s, Nt) and s.id in nullable for s in p.body
        ):
            eps_prods[p.head].append(p)
            edges[p.head].update(p.nonterminals())
    order: list[int] = []
    state: dict[int, int] = {}
    for root in nullable:
        if state.get(root):
            continue
        stack = [(root, iter(edges[root]))]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if state.get(nxt) == 1:
                    raise GrammarCycleError(
                        "epsilon-cycle among nullable symbols: counts diverge"
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
    eps_count: dict[int, int] = {}
    for n in order:
        total = 0
        for p in eps_prods[n]:
            ways = 1
            for a in p.nonterminals():
                ways *= eps_count[a]
            total += ways
        eps_count[n] = total
        if total > 1:
            raise AmbiguityError(
                f"nonterminal N{n} has {total} derivations of the empty word"
            )
    return nullable, eps_count


def _nullable_variants(
    body: tuple, nullable: frozenset[int]
) -> Iterator[tuple]:
    """All bodies obtained by erasing a subset of the nullable
    occurrences (each erased occurrence has exactly one empty-word
    derivation, so every variant carries multiplicity one)."""
    positions = [
        i for i, s in enumerate(body) if isinstance(s, Nt) and s.id in nullable
    ]
    for mask in range(1 << len(positions)):
        dropped = {positions[b] for b in range(len(positions)) if (mask >> b) & 1}
        yield tuple(s for i, s in enumerate(body) if i not in dropped)


@dataclass
class _CensusProgram:
    nt_count: int
    start: int
    eps_start: int
    topo: list[int]
    # per nonterminal: non-unit bodies as (terminal_count, nt_ids)
    nonunit: list[list[tuple[int, tuple[int, ...]]]]
    unit: list[list[int]]
    max_body_nts: int


def _census_program(g: Grammar) -> _CensusProgram:
    g = trim(g)
    nullable, eps_count = _epsilon_info(g)
    nt = g.nonterminal_count
    nonunit: list[list[tuple[int, tuple[int, ...]]]] = [[] for _ in range(nt)]
    unit: list[list[int]] = [[] for _ in range(nt)]
    max_nts = 0
    for p in g.productions:
        for body in _nullable_variants(p.body, nullable):
            if not body:
                continue  # empty-word derivations handled by eps_start
            nts = tuple(s.id for s in body if isinstance(s, Nt))
            t = len(body) - len(nts)
            if t == 0 and len(nts) == 1:
                unit[p.head].append(nts[0])
            else:
                nonunit[p.head].append((t, nts))
                max_nts = max(max_nts, len(nts))
    # Unit graph must be acyclic; its topological order fixes the within-
    # length processing order of the dynamic program.
    color = [0] * nt
    order: list[int] = []
    for root in range(nt):
        if color[root]:
            continue
        stack = [(root, iter(unit[root]))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == 1:
                    raise GrammarCycleError("unit-production cycle: counts diverge")
                if not color[nxt]:
                    color[nxt] = 1
                    stack.append((nxt, iter(unit[nxt])))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                order.append(node)
                stack.pop()
    return _CensusProgram(
        nt_count=nt,
        start=g.start,
        eps_start=eps_count.get(g.start, 0),
        topo=order,
        nonunit=nonunit,
        unit=unit,
        max_body_nts=max_nts,
    )


def census(g: Grammar, max_len: int) -> Census:
    """Exact number of words of each length 0..``max_len``.

    Requires a grammar marked unambiguous: the dynamic program counts
    leftmost derivations, which then equal word counts.  Epsilon- and
    unit-cycles are reported as errors rather than looping.
    """
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    if not g.unambiguous:
        raise AmbiguityError("census requires a grammar marked unambiguous")
    return Census(tuple(derivation_census(g, max_len)))


def derivation_census(g: Grammar, max_len: int) -> list[int]:
    """Per-length counts of leftmost derivations (no unambiguity needed);
    equals the word census exactly when the grammar is unambiguous."""
    prog = _census_program(g)
    return kernels.census_dp(
        prog.nt_count,
        prog.start,
        prog.eps_start,
        prog.topo,
        prog.nonunit,
        prog.unit,
        prog.max_body_nts,
        max_len,
    )


# ---------------------------------------------------------------------------
# Growth classification.


def _scc(nt: int, edges: list[list[int]]) -> tuple[list[int], int]:
    """Tarjan strongly connected components, iterative.  Returns
    (component id per node, component count); ids are in reverse
    topological order (a component only references lower ids)."""
    index = [-1] * nt
    low = [0] * nt
    on_stack = [False] * nt
    stack: list[int] = []
    comp = [-1] * nt
    counter = 0
    comp_count = 0
    for root in range(nt):
        if index[root] != -1:
            continue
        work: list[tuple[int, int]] = [(root, 0)]
        while work:
            node, ei = work.pop()
            if ei == 0:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack[node] = True
            recurse = False
            for k in range(ei, len(edges[node])):
                nxt = edges[node][k]
                if index[nxt] == -1:
                    work.append((node, k + 1))
                    work.append((nxt, 0))
                    recurse = True
                    break
                if on_stack[nxt]:
                    low[node] = min(low[node], index[nxt])
            if recurse:
                continue
            if low[node] == index[node]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = comp_count
                    if w == node:
                        break
                comp_count += 1
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return comp, comp_count


def _pump_context_grammar(
    g: Grammar, comp_nodes: list[int], rep: int, left: bool
) -> Grammar:
    """Grammar of the left (or right) contexts of all derivations
    ``rep =>+ u rep v`` whose spine stays inside one strongly connected
    component.  Sibling symbols keep their full original languages."""
    comp_set = set(comp_nodes)
    base = g.nonterminal_count
    spine = {a: base + k for k, a in enumerate(sorted(comp_set))}
    prods: list[Production] = list(g.productions)
    for a in sorted(comp_set):
        for pj in g.productions_of[a]:
            body = g.productions[pj].body
            for pos, s in enumerate(body):
                if isinstance(s, Nt) and s.id in comp_set:
                    if left:
                        new = body[:pos] + (Nt(spine[s.id]),)
                    else:
                        new = (Nt(spine[s.id]),) + body[pos + 1 :]
                    prods.append(Production(spine[a], new))
    prods.append(Production(spine[rep], ()))
    return Grammar(
        base + len(spine), tuple(prods), spine[rep], g.alphabet_rank, False
    )


def _shortest_nonempty(g: Grammar) -> Word | None:
    """Shortest word of length >= 1, or None when the language is inside
    the singleton {empty word}."""
    positive = intersect(g, min_length_dfa(g.alphabet_rank, 1))
    if is_empty(positive):
        return None
    plan, _tau = min_size_plan(positive, uniform_size(positive.alphabet_rank))
    return replay(positive, plan)


def _primitive_root(w: Word) -> Word:
    n = len(w)
    for k in range(1, n + 1):
        if n % k == 0 and w[:k] * (n // k) == w:
            return w[:k]
    return w


def classify_growth(g: Grammar) -> GrowthClass:
    """Finite / polynomial(k) / exponential verdict for the language.

    Finite iff no strongly connected component of the nonterminal
    reference graph realizes a nonempty pump.  Exponential iff some
    pumping component is expansive (a body carries two symbols of the
    same component) or admits pump contexts on one side that are not all
    powers of a single primitive word.  Otherwise polynomial, with the
    degree accumulated over the condensation: one per pumping component
    plus the best sum over referenced lower components.
    """
    g = trim(g)
    if not g.productions or is_empty(g):
        return GrowthClass.finite(None)
    nt = g.nonterminal_count
    edges: list[list[int]] = [[] for _ in range(nt)]
    for p in g.productions:
        edges[p.head].extend(p.nonterminals())
    comp, comp_count = _scc(nt, edges)
    members: list[list[int]] = [[] for _ in range(comp_count)]
    for n in range(nt):
        members[comp[n]].append(n)
    cyclic = [False] * comp_count
    for c in range(comp_count):
        if len(members[c]) > 1:
            cyclic[c] = True
    for p in g.productions:
        if any(comp[a] == comp[p.head] for a in p.nonterminals()):
            cyclic[comp[p.head]] = True

    pumping = [False] * comp_count
    sides: dict[int, tuple[Word | None, Word | None]] = {}
    for c in range(comp_count):
        if not cyclic[c]:
            continue
        rep = members[c][0]
        u0 = _shortest_nonempty(_pump_context_grammar(g, members[c], rep, left=True))
        v0 = _shortest_nonempty(_pump_context_grammar(g, members[c], rep, left=False))
        if u0 is None and v0 is None:
            raise GrammarCycleError(
                "cycle with empty contexts only: the grammar repeats "
                "derivations of the same word"
            )
        pumping[c] = True
        sides[c] = (u0, v0)

    if not any(pumping):
        # Acyclic reference graph: finite language, longest word by DAG DP.
        max_len = [-1] * nt
        order = sorted(range(nt), key=lambda n: comp[n])
        for n in order:
            best = -1
            for pj in g.productions_of[n]:
                p = g.productions[pj]
                tot = p.terminal_count()
                ok = True
                for a in p.nonterminals():
                    if max_len[a] < 0:
                        ok = False
                        break
                    tot += max_len[a]
                if ok:
                    best = max(best, tot)
            max_len[n] = best
        return GrowthClass.finite(max_len[g.start])

    for c in range(comp_count):
        if not pumping[c]:
            continue
        for a in members[c]:
            for pj in g.productions_of[a]:
                in_comp = sum(
                    1 for b in g.productions[pj].nonterminals() if comp[b] == c
                )
                if in_comp >= 2:
                    return GrowthClass.exponential()
        rep = members[c][0]
        for left, w0 in zip((True, False), sides[c]):
            if w0 is None:
                continue
            p_root = _primitive_root(w0)
            context = _pump_context_grammar(g, members[c], rep, left=left)
            escapes = intersect(
                context, complement_power_dfa(p_root, g.alphabet_rank)
            )
            if not is_empty(escapes):
                return GrowthClass.exponential()

    # Degree over the condensation DAG (component ids are already in
    # reverse topological order: referenced components have lower ids).
    k = [0] * comp_count
    for c in range(comp_count):
        best = 0
        for a in members[c]:
            for pj in g.productions_of[a]:
                external = sum(
                    k[comp[b]]
                    for b in g.productions[pj].nonterminals()
                    if comp[b] != c
                )
                best = max(best, external)
        k[c] = (1 if pumping[c] else 0) + best
    return GrowthClass.polynomial(k[comp[g.start]])
