"""Word pairs whose quotient realizes a nested bracket, and their
Diophantine quality.

Starting from seed words w0, w0' and fillers w1..wp, set

    L_0 = w0,  R_0 = w0',  L_q = L_{q-1} w_q R_{q-1},  R_q = R_{q-1} w_q L_{q-1}.

Writing V_j for the generator logs and k_0 = counts(w0) - counts(w0'),
k_q = counts(R_{q-1} w_q) for q >= 1, the group identity

    L_p (R_p)^(-1) = [ L_{p-1}(R_{p-1})^(-1), R_{p-1} w_p ]

unrolls to log(L_p R_p^(-1)) = [ ... [k_0 V, k_1 V], ..., k_p V ] modulo
g^(p+1), which verify_word_bracket_identity checks exactly, level by
level.  The counts satisfy k_q >= k_{q-1} componentwise for q >= 2; k_0
and k_1 are unconstrained.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bch import Word, bch_product, word_eval
from .lie_core import LieVector, StructureConstants, project

__all__ = [
    "WordPair",
    "build_lr",
    "verify_word_bracket_identity",
    "IdentityCheck",
    "diophantine_estimate",
    "DiophantineReport",
    "nice_pair_search",
    "NicePairSearch",
]


@dataclass(frozen=True)
class WordPair:
    """The pair (W1, W2) = (L_p, R_p) with its construction data."""

    w1: Word
    w2: Word
    level: int
    m: int
    k_sequence: tuple  # p+1 integer tuples of length m
    seeds: tuple  # (w0, w0', w1, ..., wp)

    def __post_init__(self):
        if self.level >= 1 and len(self.w1) != len(self.w2):
            raise AssertionError("constructed words must have equal length")


def build_lr(p: int, seeds, m: int) -> WordPair:
    """Run the L/R recursion to depth p.

    seeds = (w0, w0', w1, ..., wp): the first two are the base words, the
    rest are the fillers (possibly empty).  At p = 0 the base words must
    have equal length for the pair to have a well-defined level; a pair
    of empty base words degenerates (the quotient is the identity for
    every filler choice) and is rejected.
    """
    seeds = tuple(w if isinstance(w, Word) else Word(tuple(w)) for w in seeds)
    if len(seeds) != p + 2:
        raise ValueError(f"need {p + 2} seed words for level {p}, got {len(seeds)}")
    if m < 1:
        raise ValueError("m must be positive")
    for w in seeds:
        if any(l >= m for l in w.letters):
            raise ValueError("seed letter out of range")
    w0, w0p = seeds[0], seeds[1]
    if not w0.letters and not w0p.letters:
        raise ValueError("both base words empty: construction degenerates")
    if p == 0 and len(w0) != len(w0p):
        raise ValueError("level-0 pairs need base words of equal length")

    c0 = w0.counts(m)
    c0p = w0p.counts(m)
    k_seq = [tuple(a - b for a, b in zip(c0, c0p))]
    left, right = w0, w0p
    right_counts = c0p
    for q in range(1, p + 1):
        wq = seeds[q + 1]
        k_seq.append(tuple(a + b for a, b in zip(right_counts, wq.counts(m))))
        left, right = left + wq + right, right + wq + left
        right_counts = right.counts(m)
    return WordPair(
        w1=left, w2=right, level=p, m=m, k_sequence=tuple(k_seq), seeds=seeds
    )


@dataclass(frozen=True)
class IdentityCheck:
    ok: bool
    residual: tuple  # coordinates of (log difference - nested bracket), levels <= p
    word_log: LieVector
    bracket_log: LieVector


def _combo(generators, coeffs):
    acc = LieVector.zero(generators[0].dim)
    for c, g in zip(coeffs, generators):
        if c:
            acc = acc + Fraction(c) * g
    return acc


def word_pair_logs(sc: StructureConstants, pair: WordPair, generators):
    """Exact logs of (W1, W2), via the recursion rather than letterwise.

    Combining sub-word logs with a handful of group products per level is
    an order of magnitude cheaper than folding over the full words; the
    test suite cross-checks it against word_eval on small cases.
    """
    gens = list(generators)
    seed_logs = [word_eval(sc, w, _as_group(gens, sc)).log for w in pair.seeds]
    logL, logR = seed_logs[0], seed_logs[1]
    for q in range(1, pair.level + 1):
        logw = seed_logs[q + 1]
        newL = bch_product(sc, bch_product(sc, logL, logw), logR)
        newR = bch_product(sc, bch_product(sc, logR, logw), logL)
        logL, logR = newL, newR
    return logL, logR


def _as_group(generators, sc):
    from .bch import GroupElement

    out = []
    for g in generators:
        if isinstance(g, GroupElement):
            out.append(g)
        else:
            out.append(GroupElement(g if isinstance(g, LieVector) else LieVector(g)))
    return out


def verify_word_bracket_identity(
    sc: StructureConstants, pair: WordPair, generators
) -> IdentityCheck:
    """Check log(W1 W2^(-1)) == [ ... [k_0 V, k_1 V], ..., k_p V] mod g^(p+1).

    generators is a sequence of LieVector logs (exact rationals).  The
    residual lists the coordinates of the discrepancy on levels 0..p; the
    identity holds iff they are all exactly zero.
    """
    gens = [g if isinstance(g, LieVector) else LieVector(g) for g in generators]
    if len(gens) < pair.m:
        raise ValueError("not enough generators for the pair's alphabet")
    logL, logR = word_pair_logs(sc, pair, gens)
    word_log = bch_product(sc, logL, -logR)

    acc = _combo(gens, pair.k_sequence[0])
    for kq in pair.k_sequence[1:]:
        acc = sc.bracket(acc, _combo(gens, kq))

    diff = word_log - acc
    residual = []
    for q in range(pair.level + 1):
        if q >= sc.step:
            break
        residual.extend(project(sc, diff, q))
    residual = tuple(residual)
    return IdentityCheck(
        ok=not any(residual),
        residual=residual,
        word_log=word_log,
        bracket_log=acc,
    )


# -- Diophantine quality -------------------------------------------------------


@dataclass(frozen=True)
class DiophantineReport:
    """Result of the truncated scan min |n.v - m| * |n|^tau.

    |n| is the max norm, m the nearest integer to n.v, and the scan runs
    over 0 < |n| <= q_max.  float_error_bound estimates the rounding in
    each scanned value; gamma_hat is monotone nonincreasing in q_max.
    """

    vector: tuple
    tau: float
    q_max: int
    gamma_hat: float
    worst_n: tuple
    float_error_bound: float


def diophantine_estimate(vector, tau: float, q_max: int) -> DiophantineReport:
    v = np.asarray([float(x) for x in vector], dtype=float)
    d = v.size
    if d == 0:
        raise ValueError("empty vector")
    if q_max < 1:
        raise ValueError("q_max must be positive")
    rng1 = np.arange(-q_max, q_max + 1)

    best = math.inf
    best_n = None
    if d == 1:
        n = rng1[rng1 != 0].astype(float)
        r = n * v[0]
        dist = np.abs(r - np.round(r))
        vals = dist * np.abs(n) ** tau
        i = int(np.argmin(vals))
        best = float(vals[i])
        best_n = (int(n[i]),)
    else:
        # chunk over the leading coordinate to bound memory
        tail = None
        for n1 in rng1:
            if tail is None:
                grids = np.meshgrid(*([rng1] * (d - 1)), indexing="ij")
                tail = np.stack([g.ravel() for g in grids], axis=1)
            block = np.concatenate(
                [np.full((tail.shape[0], 1), n1), tail], axis=1
            ).astype(float)
            norms = np.max(np.abs(block), axis=1)
            mask = norms > 0
            block, norms = block[mask], norms[mask]
            r = block @ v
            dist = np.abs(r - np.round(r))
            vals = dist * norms**tau
            i = int(np.argmin(vals))
            if vals[i] < best:
                best = float(vals[i])
                best_n = tuple(int(x) for x in block[i])
    eps = np.finfo(float).eps
    err = eps * (1.0 + q_max * float(np.sum(np.abs(v)))) * float(q_max) ** tau
    return DiophantineReport(
        vector=tuple(float(x) for x in v),
        tau=float(tau),
        q_max=int(q_max),
        gamma_hat=best,
        worst_n=best_n,
        float_error_bound=float(err),
    )


def default_q_max(dim: int) -> int:
    return 10_000 if dim <= 2 else 100


# -- search for well-distributed pairs -----------------------------------------


@dataclass(frozen=True)
class NicePairSearch:
    found: bool
    pair: WordPair | None
    report: DiophantineReport | None
    level_vector: tuple | None
    tried: int
    zero_count: int


def _seed_words(m, allow_empty):
    words = []
    if allow_empty:
        words.append(())
    words.extend((i,) for i in range(m))
    words.extend((i, j) for i in range(m) for j in range(m))
    return words


def nice_pair_search(
    sc: StructureConstants,
    generators,
    p: int,
    tau: float | None = None,
    q_max: int | None = None,
    budget: int = 500,
) -> NicePairSearch:
    """Enumerate short seed words and keep the best-quality pair at level p.

    Seeds run over words of length 1..2 for the base pair and length 0..2
    for the fillers, in a fixed lexicographic order, capped at budget.
    For every candidate the exact level-p block of log(W1 W2^(-1)) is
    computed; zero blocks are skipped (for a two-degenerate level every
    candidate lands there, and the search reports failure), nonzero
    blocks are scanned and the largest gamma_hat wins.  Ties keep the
    earliest candidate, so results are reproducible.
    """
    gens = [g if isinstance(g, LieVector) else LieVector(g) for g in generators]
    m = len(gens)
    if not (1 <= p < sc.step):
        raise ValueError(f"level must be in 1..{sc.step - 1}")
    n_p = sc.dims[p]
    if tau is None:
        tau = float(n_p)
    if q_max is None:
        q_max = default_q_max(n_p)

    bases = _seed_words(m, allow_empty=False)
    fillers = _seed_words(m, allow_empty=True)
    tried = 0
    zeros = 0
    best = None  # (gamma_hat, pair, report, vec)
    for seeds in itertools.product(bases, bases, *([fillers] * p)):
        if tried >= budget:
            break
        tried += 1
        pair = build_lr(p, seeds, m)
        logL, logR = word_pair_logs(sc, pair, gens)
        h = bch_product(sc, logL, -logR)
        block = project(sc, h, p)
        if not any(block):
            zeros += 1
            continue
        vec = tuple(float(x) for x in block)
        rep = diophantine_estimate(vec, tau, q_max)
        if best is None or rep.gamma_hat > best[0]:
            best = (rep.gamma_hat, pair, rep, vec)
    if best is None:
        return NicePairSearch(
            found=False,
            pair=None,
            report=None,
            level_vector=None,
            tried=tried,
            zero_count=zeros,
        )
    return NicePairSearch(
        found=True,
        pair=best[1],
        report=best[2],
        level_vector=best[3],
        tried=tried,
        zero_count=zeros,
    )
