"""Independent ground-truth engines.

Everything here deliberately avoids the grammar pipeline: subgroup rank
comes from graph folding, language counts from exhaustive enumeration.
The test suite uses these as oracles for the grammar-based answers.
"""

from __future__ import annotations

from pathlib import Path

from . import kernels
from .errors import BudgetExceededError, InputError
from .grammar import Grammar, Nt
from .words import Homomorphism, Word, reduce_word

__all__ = [
    "FoldingGraph",
    "stallings_rank",
    "brute_census",
    "brute_min_degree",
    "hard_instance",
    "enumerate_words",
    "write_census_file",
    "read_census_file",
]

DEFAULT_BUDGET = 10**8


class FoldingGraph:
    """Labeled digraph with a basepoint; folding merges the endpoints of
    equally-labeled edges leaving (or entering) a common vertex until the
    labeling is injective at every vertex."""

    def __init__(self) -> None:
        self.basepoint = 0
        self.vertex_count = 1
        self.parent = [0]
        self.edges: list[tuple[int, int, int]] = []  # (source, label, target)

    def _find(self, v: int) -> int:
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def _new_vertex(self) -> int:
        v = self.vertex_count
        self.vertex_count += 1
        self.parent.append(v)
        return v

    def add_loop(self, word: Word) -> None:
        """Attach a cycle at the basepoint spelling ``word``."""
        if not word:
            return
        prev = self.basepoint
        for i, c in enumerate(word):
            nxt = self.basepoint if i == len(word) - 1 else self._new_vertex()
            if c > 0:
                self.edges.append((prev, c, nxt))
            else:
                self.edges.append((nxt, -c, prev))
            prev = nxt

    def fold(self) -> list[dict[tuple[int, int], int]]:
        """Union-find folding with small-into-large map merging; returns
        per-root adjacency keyed by (label, direction)."""
        maps: list[dict[tuple[int, int], int]] = [
            dict() for _ in range(self.vertex_count)
        ]
        queue: list[tuple[int, tuple[int, int], int]] = []
        for u, label, v in self.edges:
            queue.append((u, (label, 1), v))
            queue.append((v, (label, -1), u))

        while queue:
            u, key, v = queue.pop()
            ru, rv = self._find(u), self._find(v)
            existing = maps[ru].get(key)
            if existing is None:
                maps[ru][key] = rv
                continue
            rex = self._find(existing)
            if rex == rv:
                continue
            # Fold: the two endpoints must coincide.
            if len(maps[rex]) < len(maps[rv]):
                rex, rv = rv, rex
            self.parent[rv] = rex
            maps[ru][key] = rex
            for k2, tgt in maps[rv].items():
                queue.append((rex, k2, tgt))
            maps[rv] = {}
        return maps

    def rank(self) -> int:
        """First Betti number of the folded graph: edges - vertices + 1."""
        maps = self.fold()
        roots = {self._find(v) for v in range(self.vertex_count)}
        edge_keys = set()
        for r in roots:
            for (label, direction), tgt in maps[r].items():
                t = self._find(tgt)
                if direction == 1:
                    edge_keys.add((r, label, t))
                else:
                    edge_keys.add((t, label, r))
        return len(edge_keys) - len(roots) + 1


def stallings_rank(n: int, words) -> int:
    """Rank of the subgroup of the rank-``n`` free group generated by the
    given words, via a folded wedge of loops.  Deterministic; invariant
    under permutation and inversion of the inputs."""
    graph = FoldingGraph()
    for w in words:
        w = reduce_word(tuple(w))
        for c in w:
            if c == 0 or abs(c) > n:
                raise InputError(f"letter {c!r} out of range for rank {n}")
        graph.add_loop(w)
    return graph.rank()


class _ScanCache:
    """One exhaustive sweep per (images, max_len, var); every census mode
    reads from the same tables."""

    def __init__(self) -> None:
        self._data: dict = {}

    def get(self, hom: Homomorphism, max_len: int, var: int):
        key = (hom.images, max_len, var)
        hit = self._data.get(key)
        if hit is None:
            hit = kernels.scan_censuses(list(hom.images), hom.source_rank, max_len, var)
            if len(self._data) > 64:
                self._data.clear()
            self._data[key] = hit
        return hit


_scan_cache = _ScanCache()


def _check_budget(hom: Homomorphism, max_len: int, budget: int) -> None:
    leaves = 0
    width = 2 * hom.source_rank
    for l in range(max_len + 1):
        leaves += width**l
        if leaves > budget:
            raise BudgetExceededError(
                f"enumerating ({width} letters)^<= {max_len} exceeds the "
                f"budget of {budget} nodes"
            )


def brute_census(
    hom: Homomorphism,
    max_len: int,
    mode: str = "allWords",
    degree: int | None = None,
    variable: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> tuple[int, ...]:
    """Exact per-length counts of kernel words by exhaustive enumeration.

    ``mode`` is one of ``allWords``, ``reduced``, ``cyclicallyReduced``.
    A degree filter is only meaningful for cyclically reduced words,
    where the count of the marked letter equals the equation degree.
    ``variable`` defaults to the last source generator.
    """
    if mode not in ("allWords", "reduced", "cyclicallyReduced"):
        raise InputError(f"unknown census mode {mode!r}")
    if degree is not None and mode != "cyclicallyReduced":
        raise InputError("degree filter requires the cyclicallyReduced mode")
    if variable is None:
        variable = hom.source_rank
    _check_budget(hom, max_len, budget)
    all_counts, red_counts, cyc = _scan_cache.get(hom, max_len, variable)
    if mode == "allWords":
        return tuple(all_counts)
    if mode == "reduced":
        return tuple(red_counts)
    if degree is None:
        return tuple(sum(row) for row in cyc)
    return tuple(row[degree] if degree < len(row) else 0 for row in cyc)


def brute_min_degree(
    hom: Homomorphism,
    max_len: int,
    variable: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> int | None:
    """Minimum degree among nontrivial kernel words of length at most
    ``max_len``; None when no such word exists.  Every nontrivial kernel
    element has a cyclically reduced spelling, so scanning those words
    suffices."""
    if variable is None:
        variable = hom.source_rank
    _check_budget(hom, max_len, budget)
    _all, _red, cyc = _scan_cache.get(hom, max_len, variable)
    best = None
    for l in range(1, max_len + 1):
        for d, count in enumerate(cyc[l]):
            if count and (best is None or d < best):
                best = d
    return best


def hard_instance(n: int, p: int):
    """Instance family with small generators but large minimum degree.

    Ambient rank ``n + 1`` with a distinguished last generator b; the
    subgroup keeps ``a_i`` corrected by nested blocks
    ``u(y, x) = x y x^2 y x^3 ... y x^(p+1)``, plus the short word
    ``a_n^-1 b^-1``; the element is b.  Generators have length at most
    ``(p^2 + 5p + 6) / 2``.
    """
    if n < 2 or p < 1:
        raise InputError("hard instance needs n >= 2 and p >= 1")
    from .equations import build_instance

    b = n + 1

    def u(y: Word, x: Word) -> Word:
        out: list[int] = []
        for e in range(1, p + 2):
            out.extend(x * e)
            if e < p + 1:
                out.extend(y)
        return tuple(out)

    basis: list[Word] = [(1,)]
    for i in range(2, n + 1):
        block = u((i - 1,), (b,))
        basis.append((i,) + tuple(-c for c in reversed(block)))
    basis.append((-n, -b))
    return build_instance(n + 1, basis, (b,))


def enumerate_words(g: Grammar, max_len: int, limit: int = 2_000_000) -> list[Word]:
    """All words of the language up to ``max_len``, by brute bottom-up
    closure over (nonterminal, length) word sets; independent of the
    census and parser code paths."""
    sets: dict[tuple[int, int], set[Word]] = {
        (n, l): set() for n in range(g.nonterminal_count) for l in range(max_len + 1)
    }
    total = 0
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            partials: dict[int, set[Word]] = {0: {()}}
            for s in p.body:
                nxt: dict[int, set[Word]] = {}
                for l, words in partials.items():
                    if isinstance(s, Nt):
                        for l2 in range(0, max_len - l + 1):
                            for w2 in sets[(s.id, l2)]:
                                nxt.setdefault(l + l2, set()).update(
                                    w + w2 for w in words
                                )
                    else:
                        if l + 1 <= max_len:
                            nxt.setdefault(l + 1, set()).update(
                                w + (s,) for w in words
                            )
                partials = nxt
                if not partials:
                    break
            for l, words in partials.items():
                bucket = sets[(p.head, l)]
                before = len(bucket)
                bucket.update(words)
                total += len(bucket) - before
                if total > limit:
                    raise BudgetExceededError("language enumeration too large")
                if len(bucket) != before:
                    changed = True
    out: list[Word] = []
    for l in range(max_len + 1):
        out.extend(sorted(sets[(g.start, l)]))
    return out


def write_census_file(path: str | Path, counts) -> None:
    """Two-column snapshot ``length count``, one line per length."""
    lines = [f"{l} {c}" for l, c in enumerate(counts)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_census_file(path: str | Path) -> tuple[int, ...]:
    counts: list[int] = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        l, c = line.split()
        assert int(l) == len(counts)
        counts.append(int(c))
    return tuple(counts)
