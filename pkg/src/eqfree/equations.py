"""Equations over a free group: dependence, witnesses, degree strata,
minimum degree, and the growth partition of the degree set.

An instance fixes the ambient free group, a subgroup basis
``h_1, ..., h_r``, and an element g.  Equation words live over the
``r + 1`` letter alphabet ``h_1, ..., h_r, x``; the evaluation map sends
``h_i`` to itself and x to g, and the equations satisfied by g are
exactly the kernel words of that map.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from . import oracle
from .analysis import (
    Census,
    GrowthClass,
    census,
    classify_growth,
    is_empty,
    letter_size,
    min_size_plan,
    witness_plan,
)
from .automata import (
    cyclically_reduced_dfa,
    drop_empty_word,
    intersect,
    min_length_dfa,
    nonempty_reduced_dfa,
    reduced_dfa,
    _dfa,
)
from .errors import EmptyLanguageError, InputError, NotABasisError
from .grammar import (
    DerivationPlan,
    Grammar,
    Nt,
    PlanStep,
    Production,
    plan_word_length,
    replay,
    trim,
)
from .kernel import kernel_grammar
from .words import Homomorphism, Word, check_letters, degree, reduce_word

__all__ = [
    "Instance",
    "EquationReport",
    "DgPartitionReport",
    "build_instance",
    "ideal_grammar",
    "analyze_dependence",
    "min_degree",
    "degree_stratum_grammar",
    "has_degree_d",
    "growth_of_degree",
    "saturate_conjugation",
    "partition_Dg",
    "WITNESS_EXPANSION_CAP",
]

WITNESS_EXPANSION_CAP = 10_000


@dataclass(frozen=True)
class Instance:
    """A dependence problem: subgroup basis plus an element of ``F_n``.

    The basis property is verified at construction by the folding
    oracle.  ``hom`` maps the equation alphabet (r basis letters plus the
    variable as letter ``r + 1``) into the ambient group.
    """

    ambient_rank: int
    basis: tuple[Word, ...]
    element: Word

    def __post_init__(self) -> None:
        for w in self.basis:
            check_letters(w, self.ambient_rank)
        check_letters(self.element, self.ambient_rank)
        object.__setattr__(self, "basis", tuple(reduce_word(w) for w in self.basis))
        object.__setattr__(self, "element", reduce_word(self.element))
        r = len(self.basis)
        if oracle.stallings_rank(self.ambient_rank, self.basis) != r:
            raise NotABasisError(
                "the subgroup words do not form a free basis (their folded "
                "rank is smaller)"
            )

    @property
    def subgroup_rank(self) -> int:
        return len(self.basis)

    @property
    def equation_rank(self) -> int:
        """Rank of the equation alphabet: basis letters plus the variable."""
        return len(self.basis) + 1

    @property
    def variable(self) -> int:
        return len(self.basis) + 1

    @cached_property
    def hom(self) -> Homomorphism:
        return Homomorphism(
            self.equation_rank, self.ambient_rank, self.basis + (self.element,)
        )

    @property
    def norm(self) -> int:
        return self.hom.norm


def build_instance(n: int, basis, element) -> Instance:
    return Instance(n, tuple(tuple(w) for w in basis), tuple(element))


# Per-instance grammar caches: instances are immutable, so the derived
# grammars are shared freely.
_grammar_cache: dict[tuple, Grammar] = {}


def _cached(key: tuple, build) -> Grammar:
    g = _grammar_cache.get(key)
    if g is None:
        g = build()
        if len(_grammar_cache) > 256:
            _grammar_cache.clear()
        _grammar_cache[key] = g
    return g


def _key(inst: Instance, tag: str, *extra) -> tuple:
    return (inst.ambient_rank, inst.basis, inst.element, tag, *extra)


def ideal_grammar(inst: Instance) -> Grammar:
    """Unambiguous grammar of every word over the equation alphabet that
    evaluates to the identity (the full equation ideal, unreduced
    spellings included)."""
    return _cached(_key(inst, "ideal"), lambda: kernel_grammar(inst.hom))


def nontrivial_reduced_grammar(inst: Instance) -> Grammar:
    """Ideal restricted to nonempty reduced words: empty iff g does not
    depend on the subgroup."""
    return _cached(
        _key(inst, "nontrivial"),
        lambda: intersect(ideal_grammar(inst), nonempty_reduced_dfa(inst.equation_rank)),
    )


def cyclically_reduced_ideal_grammar(inst: Instance) -> Grammar:
    """Ideal restricted to cyclically reduced words (the census of this
    grammar is the growth function of the equation set)."""
    return _cached(
        _key(inst, "cyc"),
        lambda: intersect(ideal_grammar(inst), cyclically_reduced_dfa(inst.equation_rank)),
    )


def _count_dfa(rank: int, variable: int, d: int):
    """Counter over the marked letter: accepts exactly d occurrences."""
    cap = d + 1

    def move(q: int, c: int) -> int:
        return min(cap, q + 1) if abs(c) == variable else q

    return _dfa(cap + 1, rank, move, 0, {d})


def degree_stratum_grammar(inst: Instance, d: int) -> Grammar:
    """Cyclically reduced equation words with exactly ``d`` variable
    occurrences.  The empty word is excluded, so the ``d = 0`` stratum is
    empty (the evaluation map is injective on subgroup-only words)."""
    if d < 0:
        raise InputError("degree must be >= 0")

    def build() -> Grammar:
        cyc = intersect(
            ideal_grammar(inst),
            drop_empty_word(cyclically_reduced_dfa(inst.equation_rank)),
        )
        return intersect(cyc, _count_dfa(inst.equation_rank, inst.variable, d))

    return _cached(_key(inst, "stratum", d), build)


@dataclass(frozen=True)
class EquationReport:
    """Outcome of the dependence analysis."""

    dependent: bool
    witness_plan: DerivationPlan | None = None
    witness_word: Word | None = None
    min_degree: int | None = None

    def to_dict(self) -> dict:
        return {
            "dependent": self.dependent,
            "witness_plan": None
            if self.witness_plan is None
            else [[s.production, s.annotation] for s in self.witness_plan],
            "witness_word": None
            if self.witness_word is None
            else list(self.witness_word),
            "min_degree": self.min_degree,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EquationReport":
        plan = data.get("witness_plan")
        word = data.get("witness_word")
        return cls(
            dependent=data["dependent"],
            witness_plan=None
            if plan is None
            else tuple(PlanStep(p, a) for p, a in plan),
            witness_word=None if word is None else tuple(word),
            min_degree=data.get("min_degree"),
        )


def _expand_if_small(g: Grammar, plan: DerivationPlan, cap: int) -> Word | None:
    if plan_word_length(g, plan) <= cap:
        return replay(g, plan)
    return None


def analyze_dependence(
    inst: Instance, witness_cap: int = WITNESS_EXPANSION_CAP
) -> EquationReport:
    """Decide whether the element depends on the subgroup; on dependence,
    attach a witness plan (expanded to a word when small) and the minimum
    equation degree."""
    g = nontrivial_reduced_grammar(inst)
    if is_empty(g):
        return EquationReport(dependent=False)
    plan = witness_plan(g)
    return EquationReport(
        dependent=True,
        witness_plan=plan,
        witness_word=_expand_if_small(g, plan, witness_cap),
        min_degree=min_degree(inst),
    )


def min_degree(inst: Instance) -> int:
    """Smallest degree of a nontrivial equation.

    Weighted shortest-derivation search over the nonempty reduced ideal
    with weight 1 on the variable letter: a reduced nontrivial word's
    variable count bounds its degree from above, and cyclically reduced
    witnesses attain it, so the minimum size is exactly the minimum
    degree."""
    g = nontrivial_reduced_grammar(inst)
    if is_empty(g):
        raise EmptyLanguageError("independent instance: no nontrivial equations")
    _plan, tau = min_size_plan(g, letter_size(inst.equation_rank, inst.variable))
    return tau


def has_degree_d(inst: Instance, d: int) -> tuple[bool, DerivationPlan | None]:
    """Is the degree-``d`` stratum nonempty?  On success also a witness
    plan for one of its words."""
    if d < 1:
        raise InputError("degree must be >= 1")
    g = degree_stratum_grammar(inst, d)
    if is_empty(g):
        return False, None
    return True, witness_plan(g)


def growth_of_degree(inst: Instance, d: int) -> GrowthClass:
    """Growth of the count of cyclically reduced degree-``d`` equation
    words as a function of their length."""
    if d < 1:
        raise InputError("degree must be >= 1")
    return classify_growth(degree_stratum_grammar(inst, d))


def stratum_census(inst: Instance, d: int, max_len: int) -> Census:
    return census(degree_stratum_grammar(inst, d), max_len)


def ideal_census(inst: Instance, max_len: int) -> Census:
    """Census of all equation spellings (the kernel language itself)."""
    return census(ideal_grammar(inst), max_len)


def cyclically_reduced_census(inst: Instance, max_len: int) -> Census:
    return census(cyclically_reduced_ideal_grammar(inst), max_len)


def saturate_conjugation(g: Grammar, rank: int | None = None) -> Grammar:
    """Reduced words representing conjugates of elements of ``L(g)``.

    Precondition: ``L(g)`` consists of reduced words.  A fresh start
    wraps derivations in conjugating letter pairs; intersecting with the
    reduced-word automaton removes the cancelling spellings."""
    if rank is None:
        rank = g.alphabet_rank
    wrapper = g.nonterminal_count
    prods = list(g.productions)
    for i in range(1, rank + 1):
        prods.append(Production(wrapper, (i, Nt(wrapper), -i)))
        prods.append(Production(wrapper, (-i, Nt(wrapper), i)))
    prods.append(Production(wrapper, (Nt(g.start),)))
    extended = Grammar(
        g.nonterminal_count + 1, tuple(prods), wrapper, g.alphabet_rank, False
    )
    return intersect(extended, reduced_dfa(rank))


@dataclass(frozen=True)
class DgPartitionReport:
    """Growth classification of every degree up to a bound, plus the
    degrees certified exponential beyond it.

    ``per_degree`` maps d to None (not a degree of any equation) or its
    growth class.  ``tail_even`` / ``tail_odd`` are thresholds such that
    every even (odd) degree at or above is certified exponential by the
    combination lemma; they require subgroup rank at least 2."""

    bound: int
    per_degree: dict[int, GrowthClass | None] = field(default_factory=dict)
    tail_even: int | None = None
    tail_odd: int | None = None
    note: str = ""

    def to_dict(self) -> dict:
        def enc(gc: GrowthClass | None):
            if gc is None:
                return None
            return {"kind": gc.kind, "max_length": gc.max_length, "degree": gc.degree}

        return {
            "bound": self.bound,
            "per_degree": {str(d): enc(gc) for d, gc in self.per_degree.items()},
            "tail_even": self.tail_even,
            "tail_odd": self.tail_odd,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DgPartitionReport":
        def dec(obj):
            if obj is None:
                return None
            return GrowthClass(obj["kind"], obj["max_length"], obj["degree"])

        return cls(
            bound=data["bound"],
            per_degree={int(d): dec(gc) for d, gc in data["per_degree"].items()},
            tail_even=data.get("tail_even"),
            tail_odd=data.get("tail_odd"),
            note=data.get("note", ""),
        )


_PARTITION_NOTE = (
    "classification is complete for degrees up to the bound; beyond it only "
    "the exponential tail certificate is available, so degrees outside the "
    "certified parities/thresholds remain undecided by this scan"
)


def partition_Dg(inst: Instance, bound: int) -> DgPartitionReport:
    """Classify every degree 1..bound as absent, polynomial of some
    degree, finite, or exponential; for subgroups of rank at least 2,
    certify the exponential tail generated by combining found degrees
    (sums plus arbitrary even padding)."""
    if bound < 1:
        raise InputError("bound must be >= 1")
    per_degree: dict[int, GrowthClass | None] = {}
    found: list[int] = []
    for d in range(1, bound + 1):
        nonempty, _plan = has_degree_d(inst, d)
        if not nonempty:
            per_degree[d] = None
            continue
        found.append(d)
        per_degree[d] = growth_of_degree(inst, d)
    tail_even = tail_odd = None
    if inst.subgroup_rank >= 2 and found:
        sums = sorted({d1 + d2 for d1 in found for d2 in found})
        evens = [s for s in sums if s % 2 == 0]
        odds = [s for s in sums if s % 2 == 1]
        tail_even = evens[0] if evens else None
        tail_odd = odds[0] if odds else None
    return DgPartitionReport(
        bound=bound,
        per_degree=per_degree,
        tail_even=tail_even,
        tail_odd=tail_odd,
        note=_PARTITION_NOTE,
    )


def witness_word_for_degree(
    inst: Instance, d: int, witness_cap: int = WITNESS_EXPANSION_CAP
) -> tuple[DerivationPlan, Word | None]:
    """Witness plan for the degree-``d`` stratum, expanded when small."""
    nonempty, plan = has_degree_d(inst, d)
    if not nonempty:
        raise EmptyLanguageError(f"no equation of degree {d}")
    g = degree_stratum_grammar(inst, d)
    return plan, _expand_if_small(g, plan, witness_cap)
