"""Explicit unambiguous grammars for free-group kernels.

Two constructions: the grammar of all words spelling the identity of a
free group, and its generalization to the full preimage of the identity
under a homomorphism (the kernel language).  Both have ramification 2 and
a unique leftmost derivation per word.

Kernel nonterminals are indexed by final segments (suffixes) of the
letter images and their inverses.  Sink symbols that provably have no
productions are never materialized; the worklist closure only creates
what the start symbol reaches.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable

from .grammar import Grammar, Nt, Production, trim
from .words import Homomorphism, Word, inverse

__all__ = [
    "SuffixTable",
    "KernelConstruction",
    "trivial_word_grammar",
    "kernel_grammar",
    "build_kernel_grammar",
]


def trivial_word_grammar(n: int) -> Grammar:
    """Unambiguous grammar of all words over ``2n`` letters that freely
    reduce to the empty word.

    One start symbol plus a pair of symbols per generator: ``A_i`` derives
    the words equivalent to ``a_i`` none of whose proper prefixes is, and
    symmetrically for the inverse.  Total size is linear in ``n``.
    """
    if n < 1:
        raise ValueError("rank must be >= 1")
    S = 0

    def pos(i: int) -> int:  # symbol deriving spellings of a_i
        return 2 * i - 1

    def neg(i: int) -> int:  # symbol deriving spellings of a_i^-1
        return 2 * i

    prods: list[Production] = [Production(S, ())]
    for j in range(1, n + 1):
        prods.append(Production(S, (j, Nt(neg(j)), Nt(S))))
        prods.append(Production(S, (-j, Nt(pos(j)), Nt(S))))
    for i in range(1, n + 1):
        prods.append(Production(pos(i), (i,)))
        prods.append(Production(pos(i), (-i, Nt(pos(i)), Nt(pos(i)))))
        for j in range(1, n + 1):
            if j != i:
                prods.append(Production(pos(i), (j, Nt(neg(j)), Nt(pos(i)))))
                prods.append(Production(pos(i), (-j, Nt(pos(j)), Nt(pos(i)))))
        prods.append(Production(neg(i), (-i,)))
        prods.append(Production(neg(i), (i, Nt(neg(i)), Nt(neg(i)))))
        for j in range(1, n + 1):
            if j != i:
                prods.append(Production(neg(i), (j, Nt(neg(j)), Nt(neg(i)))))
                prods.append(Production(neg(i), (-j, Nt(pos(j)), Nt(neg(i)))))
    return Grammar(2 * n + 1, tuple(prods), S, n, unambiguous=True)


@dataclass(frozen=True)
class SuffixTable:
    """All final segments of the letter images and their inverses,
    deduplicated by content; always contains the empty word."""

    words: tuple[Word, ...]

    @classmethod
    def of(cls, hom: Homomorphism) -> "SuffixTable":
        seen: set[Word] = {()}
        for im in hom.images:
            for w in (im, inverse(im)):
                for k in range(len(w)):
                    seen.add(w[k:])
        return cls(tuple(sorted(seen, key=lambda w: (len(w), w))))

    def __contains__(self, w: Word) -> bool:
        return w in set(self.words)

    def __len__(self) -> int:
        return len(self.words)


# Nonterminal tags: ("S", suffix) | ("A", i, suffix, suffix) with i signed:
# +i tracks spellings of a_i, -i spellings of its inverse.
Tag = tuple[Hashable, ...]


@dataclass(frozen=True)
class KernelConstruction:
    """Kernel grammar plus the tag <-> dense id tables, kept so tests can
    re-root the grammar at inner symbols."""

    grammar: Grammar
    suffixes: SuffixTable
    id_of: dict[Tag, int]

    def rerooted(self, tag: Tag) -> Grammar:
        g = self.grammar
        return trim(
            Grammar(
                g.nonterminal_count,
                g.productions,
                self.id_of[tag],
                g.alphabet_rank,
                g.unambiguous,
            )
        )


def _dead(tag: Tag) -> bool:
    """Tags of the shape A_i^{a_i lambda, mu} with mu != lambda have no
    productions; skip bodies that reference them."""
    if tag[0] != "A":
        return False
    _, i, lam, mu = tag
    return bool(lam) and lam[0] == i and mu != lam[1:]


def build_kernel_grammar(hom: Homomorphism) -> KernelConstruction:
    """Unambiguous grammar for the words over the source alphabet whose
    image under ``hom`` freely reduces to the identity.

    ``S^lambda`` derives u iff ``lambda . psi(u)`` reduces to 1; the
    symbol ``A_i^{lambda,mu}`` derives u iff ``lambda . psi(u)`` splits as
    ``alpha . mu`` with alpha a minimal spelling of the i-th target
    letter.  Productions peel one letter of the pending suffix at a time,
    so every body has at most two nonterminals.
    """
    m = hom.source_rank
    suffixes = SuffixTable.of(hom)
    all_suffixes = suffixes.words

    id_of: dict[Tag, int] = {}
    worklist: list[Tag] = []

    def get_id(tag: Tag) -> int:
        nid = id_of.get(tag)
        if nid is None:
            nid = len(id_of)
            id_of[tag] = nid
            worklist.append(tag)
        return nid

    def ref(tag: Tag) -> Nt:
        return Nt(get_id(tag))

    prods: list[Production] = []

    def emit(tag: Tag, *body_parts) -> None:
        body: list = []
        for part in body_parts:
            if isinstance(part, tuple):
                if _dead(part):
                    return
                body.append(ref(part))
            else:
                body.append(part)
        prods.append(Production(id_of[tag], tuple(body)))

    start = get_id(("S", ()))
    while worklist:
        tag = worklist.pop(0)
        kind = tag[0]
        if kind == "S":
            lam = tag[1]
            if lam == ():
                emit(tag)
                for k in range(1, m + 1):
                    emit(tag, k, ("S", hom.images[k - 1]))
                    emit(tag, -k, ("S", inverse(hom.images[k - 1])))
            else:
                head, rest = lam[0], lam[1:]
                for nu in all_suffixes:
                    emit(tag, ("A", -head, rest, nu), ("S", nu))
        else:
            _, i, lam, mu = tag
            if _dead(tag):
                continue
            if lam == ():
                for k in range(1, m + 1):
                    emit(tag, k, ("A", i, hom.images[k - 1], mu))
                    emit(tag, -k, ("A", i, inverse(hom.images[k - 1]), mu))
            else:
                head, rest = lam[0], lam[1:]
                if head == i:
                    # mu == rest guaranteed: other cases are dead tags.
                    emit(tag)
                else:
                    for nu in all_suffixes:
                        emit(tag, ("A", -head, rest, nu), ("A", i, nu, mu))

    grammar = Grammar(
        len(id_of), tuple(prods), start, m, unambiguous=True
    )
    return KernelConstruction(grammar, suffixes, id_of)


def kernel_grammar(hom: Homomorphism) -> Grammar:
    """Trimmed unambiguous grammar of the kernel language of ``hom``."""
    return trim(build_kernel_grammar(hom).grammar)
