"""Exact Baker-Campbell-Hausdorff products on nilpotent algebras.

log(exp x exp y) is computed from the Dynkin series.  For each word w
over the letters {x, y} the series contributes c_w * [w], where [w] is
the right-nested bracket of the word and the rational coefficient c_w
sums (-1)^(n-1) / (n * |w| * prod r_i! s_i!) over all ways to cut w into
n consecutive blocks of the shape x^r y^s.  Nilpotency truncates the
series at words of length step, so the whole computation is exact.

The coefficient table is derived here from the combinatorial formula and
is *validated* by the associativity tests rather than trusted as a
transcription.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial

from .lie_core import LieVector, StructureConstants

__all__ = [
    "bch_word_coefficients",
    "bch_product",
    "GroupElement",
    "Word",
    "word_eval",
    "difference",
]

MAX_STEP = 6


def _block_coefficient(word):
    """Sum over decompositions of word into x^r y^s blocks."""
    L = len(word)
    total = Fraction(0)
    # a cut pattern is a subset of the L-1 gaps; a block is valid iff its
    # letters never step from y (1) back to x (0)
    for mask in range(1 << (L - 1)):
        blocks = []
        start = 0
        for g in range(L - 1):
            if mask & (1 << g):
                blocks.append(word[start : g + 1])
                start = g + 1
        blocks.append(word[start:])
        ok = True
        denom = L
        for b in blocks:
            r = 0
            while r < len(b) and b[r] == 0:
                r += 1
            if any(ch == 0 for ch in b[r:]):
                ok = False
                break
            s = len(b) - r
            denom *= factorial(r) * factorial(s)
        if not ok:
            continue
        n = len(blocks)
        total += Fraction((-1) ** (n - 1), n * denom)
    return total


@lru_cache(maxsize=None)
def bch_word_coefficients(max_len: int):
    """{word: coefficient} for words of length 2..max_len.

    Words ending in a doubled letter are dropped (their right-nested
    bracket starts with [l, l] = 0), as are words whose coefficient
    vanishes.
    """
    if max_len > MAX_STEP:
        raise ValueError(f"series table only built up to depth {MAX_STEP}")
    table = {}
    for L in range(2, max_len + 1):
        for word in product((0, 1), repeat=L):
            if word[-1] == word[-2]:
                continue
            c = _block_coefficient(word)
            if c:
                table[word] = c
    return table


def bch_coords(sc: StructureConstants, xs, ys):
    """Dynkin series on raw coordinate sequences (generic scalars)."""
    step = sc.step
    out = [a + b for a, b in zip(xs, ys)]
    if step < 2:
        return out
    vecs = (xs, ys)
    suffix_cache = {}

    def nested(word):
        if word in suffix_cache:
            return suffix_cache[word]
        if len(word) == 1:
            v = list(vecs[word[0]])
        else:
            v = sc.bracket_coords(vecs[word[0]], nested(word[1:]))
        suffix_cache[word] = v
        return v

    for word, c in bch_word_coefficients(step).items():
        v = nested(word)
        for k in range(sc.dim):
            if v[k]:
                out[k] = out[k] + c * v[k]
    return out


def bch_product(sc: StructureConstants, x: LieVector, y: LieVector) -> LieVector:
    """log(exp x * exp y), exact."""
    return LieVector(bch_coords(sc, x.coords, y.coords))


@dataclass(frozen=True)
class GroupElement:
    """Group element of the simply connected group, stored by its log."""

    log: LieVector

    @classmethod
    def identity(cls, dim):
        return cls(LieVector.zero(dim))

    @classmethod
    def exp(cls, vec: LieVector):
        return cls(vec)

    def inverse(self):
        # (exp x)^(-1) = exp(-x)
        return GroupElement(-self.log)

    def mul(self, sc: StructureConstants, other: "GroupElement") -> "GroupElement":
        return GroupElement(bch_product(sc, self.log, other.log))


@dataclass(frozen=True)
class Word:
    """Finite sequence of generator indices (0-based)."""

    letters: tuple

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(l) for l in self.letters))
        if any(l < 0 for l in self.letters):
            raise ValueError("letters must be nonnegative generator indices")

    def __len__(self):
        return len(self.letters)

    def counts(self, m: int):
        """Occurrences of each generator 0..m-1."""
        if any(l >= m for l in self.letters):
            raise ValueError("letter out of range for m generators")
        c = [0] * m
        for l in self.letters:
            c[l] += 1
        return tuple(c)

    def probability(self, probs):
        p = Fraction(1)
        for l in self.letters:
            p *= probs[l]
        return p

    def __add__(self, other):
        return Word(self.letters + other.letters)


def word_eval(sc: StructureConstants, word: Word, generators) -> GroupElement:
    """Left-to-right product of the generators named by the word."""
    acc = LieVector.zero(sc.dim)
    for l in word.letters:
        if l >= len(generators):
            raise ValueError(f"letter {l} out of range")
        acc = bch_product(sc, acc, generators[l].log)
    return GroupElement(acc)


def difference(sc: StructureConstants, w1: Word, w2: Word, generators) -> LieVector:
    """log(W2 * W1^(-1)) for the two evaluated words."""
    g1 = word_eval(sc, w1, generators)
    g2 = word_eval(sc, w2, generators)
    return bch_product(sc, g2.log, -g1.log)
