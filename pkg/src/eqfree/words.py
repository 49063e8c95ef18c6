"""Words over signed generator alphabets and free-group arithmetic.

A letter is a nonzero int: ``+i`` is the i-th generator, ``-i`` its inverse
(1-based, ``1 <= i <= rank``).  A word is a tuple of letters; the empty
tuple is the identity.  All values are immutable and all operations are
pure functions, so everything here is safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InputError

Word = tuple[int, ...]

EPSILON: Word = ()


def inverse_letter(c: int) -> int:
    return -c


def inverse(w: Word) -> Word:
    """Formal inverse: reverse the word and invert each letter."""
    return tuple(-c for c in reversed(w))


def check_letters(w: Word, rank: int) -> None:
    for c in w:
        if not isinstance(c, int) or c == 0 or abs(c) > rank:
            raise InputError(f"letter {c!r} out of range for rank {rank}")


def reduce_word(w: Word) -> Word:
    """Freely reduce: cancel adjacent inverse pairs until none remain.

    Single linear stack scan; idempotent and length-nonincreasing.
    """
    out: list[int] = []
    for c in w:
        if out and out[-1] == -c:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


def is_reduced(w: Word) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def is_cyclically_reduced(w: Word) -> bool:
    return is_reduced(w) and (len(w) < 2 or w[0] != -w[-1])


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split ``w`` as ``conjugator . core . conjugator^-1`` with a
    cyclically reduced core.  Returns ``(conjugator, core)``."""
    r = reduce_word(w)
    lo, hi = 0, len(r)
    while hi - lo >= 2 and r[lo] == -r[hi - 1]:
        lo += 1
        hi -= 1
    return r[:lo], r[lo:hi]


def degree(w: Word, variables: frozenset[int] | set[int]) -> int:
    """Number of letters of the cyclic reduction whose generator index is
    one of ``variables`` (indices are positive; both signs count)."""
    _, core = cyclic_reduce(w)
    return sum(1 for c in core if abs(c) in variables)


def concat(*words: Word) -> Word:
    out: list[int] = []
    for w in words:
        out.extend(w)
    return tuple(out)


@dataclass(frozen=True)
class Homomorphism:
    """Map from a source free group to a target one, letter by letter.

    ``images[k-1]`` is the reduced image of the k-th positive source
    letter; the image of ``-k`` is its formal inverse.  ``norm`` is the
    maximum image length.
    """

    source_rank: int
    target_rank: int
    images: tuple[Word, ...] = field(default=())

    def __post_init__(self) -> None:
        if len(self.images) != self.source_rank:
            raise InputError(
                f"expected {self.source_rank} images, got {len(self.images)}"
            )
        reduced = []
        for im in self.images:
            check_letters(im, self.target_rank)
            reduced.append(reduce_word(im))
        object.__setattr__(self, "images", tuple(reduced))

    @property
    def norm(self) -> int:
        return max((len(im) for im in self.images), default=0)

    def image_of_letter(self, c: int) -> Word:
        if c == 0 or abs(c) > self.source_rank:
            raise InputError(f"letter {c!r} out of range for rank {self.source_rank}")
        im = self.images[abs(c) - 1]
        return im if c > 0 else inverse(im)

    def apply(self, w: Word) -> Word:
        """Evaluate on a word; the result is reduced."""
        out: list[int] = []
        for c in w:
            for t in self.image_of_letter(c):
                if out and out[-1] == -t:
                    out.pop()
                else:
                    out.append(t)
        return tuple(out)


def evaluate(hom: Homomorphism, w: Word) -> Word:
    """Reduced image of ``w`` under ``hom``."""
    return hom.apply(w)
