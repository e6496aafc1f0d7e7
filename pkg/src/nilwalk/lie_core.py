"""Exact nilpotent Lie algebras given by rational structure constants.

A StructureConstants object stores the bracket table of a finite
dimensional Lie algebra over Q in a fixed basis.  All arithmetic in this
module is exact (fractions.Fraction); nothing here touches floating
point.  The basis is required to be adapted to the lower central series:
writing g^(0) = g and g^(j) = [g^(j-1), g], each g^(j) must be spanned by
a trailing block of basis vectors.  Adaptedness is *verified*, never
repaired: supplying a basis that does not have this shape raises
NotAdaptedError.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from . import linalg

__all__ = [
    "LieVector",
    "StructureConstants",
    "CentralSeries",
    "JacobiReport",
    "LieAlgebraError",
    "NotNilpotentError",
    "NotAdaptedError",
    "check_jacobi",
    "lower_central_series",
    "project",
    "quotient_algebra",
    "direct_product",
    "algebra_from_json",
    "algebra_to_json",
    "load_algebra",
    "save_algebra",
]


class LieAlgebraError(Exception):
    pass


class NotNilpotentError(LieAlgebraError):
    """The lower central series stabilized at a nonzero subalgebra."""


class NotAdaptedError(LieAlgebraError):
    """Some g^(j) is not the span of a trailing block of basis vectors."""


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected a rational, got {type(x).__name__}")


class LieVector:
    """Vector of exact rational coordinates in the fixed basis."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        self.coords = tuple(_frac(c) for c in coords)

    @classmethod
    def zero(cls, dim):
        return cls([Fraction(0)] * dim)

    @classmethod
    def basis(cls, dim, i):
        c = [Fraction(0)] * dim
        c[i] = Fraction(1)
        return cls(c)

    @property
    def dim(self):
        return len(self.coords)

    def is_zero(self):
        return not any(self.coords)

    def __add__(self, other):
        self._check(other)
        return LieVector(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other):
        self._check(other)
        return LieVector(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self):
        return LieVector(-a for a in self.coords)

    def __mul__(self, scalar):
        s = _frac(scalar)
        return LieVector(s * a for a in self.coords)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, LieVector) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __repr__(self):
        return f"LieVector({list(self.coords)})"

    def _check(self, other):
        if not isinstance(other, LieVector):
            raise TypeError("expected a LieVector")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")


@dataclass(frozen=True)
class JacobiReport:
    ok: bool
    triple: tuple | None = None
    residual: LieVector | None = None


@dataclass(frozen=True)
class CentralSeries:
    """Lower central series of an adapted algebra.

    levels[j] is an exact spanning basis (rref rows) of g^(j); dims[p] is
    the dimension of the quotient g^(p)/g^(p+1); starts[p] is the index of
    the first basis vector belonging to level p.  step is the smallest s
    with g^(s) = 0.
    """

    levels: tuple
    dims: tuple
    starts: tuple
    step: int

    def level_of(self, i):
        """Level of basis vector i."""
        for p in range(self.step - 1, -1, -1):
            if i >= self.starts[p]:
                return p
        raise IndexError(i)

    def level_indices(self, p):
        end = self.starts[p + 1] if p + 1 < self.step else sum(self.dims)
        return range(self.starts[p], end)


class StructureConstants:
    """Bracket table c_{ij}^k of a rational nilpotent Lie algebra.

    brackets maps (i, j) with i < j (0-based) to {k: coefficient}; the
    (j, i) entries are implied by antisymmetry.  Values are immutable
    after construction by convention: no method mutates them.
    """

    def __init__(self, dim, brackets, names=None):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = dim
        table = {}
        for (i, j), out in brackets.items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise ValueError(f"bracket index out of range: ({i}, {j})")
            if i == j:
                raise ValueError(f"diagonal bracket entry ({i}, {i})")
            if i > j:
                i, j, out = j, i, {k: -_frac(v) for k, v in out.items()}
            merged = table.setdefault((i, j), {})
            for k, v in out.items():
                if not (0 <= k < dim):
                    raise ValueError(f"bracket output index out of range: {k}")
                merged[k] = merged.get(k, Fraction(0)) + _frac(v)
        self._table = {
            ij: tuple(sorted((k, v) for k, v in out.items() if v))
            for ij, out in table.items()
        }
        self._table = {ij: out for ij, out in self._table.items() if out}
        if names is None:
            names = [f"X{i + 1}" for i in range(dim)]
        if len(names) != dim:
            raise ValueError("names length must equal dim")
        self.names = tuple(str(n) for n in names)
        self._series = None

    # -- bracket ---------------------------------------------------------

    def bracket_coords(self, xs, ys):
        """Bilinear bracket on raw coordinate sequences.

        Generic over the scalar type: Fractions, symbolic polynomials and
        anything else supporting ring arithmetic with Fraction
        coefficients all work.  Exact callers go through bracket().
        """
        if len(xs) != self.dim or len(ys) != self.dim:
            raise ValueError("dimension mismatch in bracket")
        out = [0] * self.dim
        for (i, j), pairs in self._table.items():
            c = xs[i] * ys[j] - xs[j] * ys[i]
            if not c:
                continue
            for k, w in pairs:
                out[k] = out[k] + w * c
        return out

    def bracket(self, x: LieVector, y: LieVector) -> LieVector:
        return LieVector(self.bracket_coords(x.coords, y.coords))

    def bracket_table(self):
        """Read-only view {(i, j): ((k, c), ...)} with i < j."""
        return dict(self._table)

    # -- derived structure ------------------------------------------------

    @property
    def series(self) -> CentralSeries:
        if self._series is None:
            self._series = lower_central_series(self)
        return self._series

    @property
    def step(self):
        return self.series.step

    @property
    def dims(self):
        return self.series.dims

    def __eq__(self, other):
        return (
            isinstance(other, StructureConstants)
            and self.dim == other.dim
            and self._table == other._table
        )

    def __repr__(self):
        return f"StructureConstants(dim={self.dim}, brackets={len(self._table)})"


def check_jacobi(sc: StructureConstants) -> JacobiReport:
    """Exact Jacobi check over all basis triples.

    Reports the first violating triple (i, j, k) together with the
    residual [[Xi,Xj],Xk] + [[Xj,Xk],Xi] + [[Xk,Xi],Xj].
    """
    n = sc.dim
    basis = [LieVector.basis(n, i) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            bij = sc.bracket(basis[i], basis[j])
            for k in range(j + 1, n):
                r = (
                    sc.bracket(bij, basis[k])
                    + sc.bracket(sc.bracket(basis[j], basis[k]), basis[i])
                    + sc.bracket(sc.bracket(basis[k], basis[i]), basis[j])
                )
                if not r.is_zero():
                    return JacobiReport(False, (i, j, k), r)
    return JacobiReport(True)


def lower_central_series(sc: StructureConstants) -> CentralSeries:
    """Compute g = g^(0) > g^(1) > ... exactly and verify adaptedness.

    Raises NotNilpotentError if the series stabilizes at nonzero
    dimension, NotAdaptedError if some g^(j) is not a trailing
    coordinate subspace.
    """
    n = sc.dim
    spans = [[[Fraction(int(i == j)) for j in range(n)] for i in range(n)]]
    current = spans[0]
    while True:
        nxt = []
        for v in current:
            for i in range(n):
                e = [Fraction(0)] * n
                e[i] = Fraction(1)
                w = sc.bracket_coords(v, e)
                if any(w):
                    nxt.append([_frac(x) for x in w])
        echelon, _ = linalg.rref(nxt)
        if len(echelon) == len(current):
            raise NotNilpotentError(
                f"series stabilized at dimension {len(echelon)}"
            )
        if not echelon:
            break
        spans.append(echelon)
        current = echelon

    step = len(spans)
    # verify suffix shape: g^(j) == span(e_k : k >= n - dim g^(j))
    starts = [0]
    for j in range(1, step):
        d = len(spans[j])
        start = n - d
        for row in spans[j]:
            if any(row[:start]):
                raise NotAdaptedError(
                    f"g^({j}) is not spanned by the last {d} basis vectors"
                )
        # rref of a full trailing coordinate subspace must be the identity
        # pattern on those coordinates
        for idx, row in enumerate(spans[j]):
            expect = [Fraction(int(c == start + idx)) for c in range(n)]
            if row != expect:
                raise NotAdaptedError(
                    f"g^({j}) is not the full span of basis vectors {start}..{n - 1}"
                )
        starts.append(start)
    if any(starts[a] > starts[a + 1] for a in range(len(starts) - 1)):
        raise NotAdaptedError("levels are not in increasing basis order")
    dims = []
    for p in range(step):
        end = starts[p + 1] if p + 1 < step else n
        dims.append(end - starts[p])
    levels = tuple(tuple(LieVector(row) for row in span) for span in spans)
    return CentralSeries(levels, tuple(dims), tuple(starts), step)


def project(sc: StructureConstants, x: LieVector, p: int):
    """Coordinates of x on the level-p block (the quotient g^(p)/g^(p+1)).

    Linear in x; vanishes on g^(p+1) by the adapted-basis shape.
    """
    ser = sc.series
    if not (0 <= p < ser.step):
        raise ValueError(f"level {p} out of range for step {ser.step}")
    idx = ser.level_indices(p)
    return tuple(x.coords[i] for i in idx)


def quotient_algebra(sc: StructureConstants, p: int) -> StructureConstants:
    """Structure constants of g / g^(p+1), in the inherited basis."""
    ser = sc.series
    if not (0 <= p < ser.step):
        raise ValueError(f"level {p} out of range for step {ser.step}")
    keep = ser.starts[p + 1] if p + 1 < ser.step else sc.dim
    brackets = {}
    for (i, j), pairs in sc._table.items():
        if i >= keep or j >= keep:
            continue
        out = {k: v for k, v in pairs if k < keep}
        if out:
            brackets[(i, j)] = out
    return StructureConstants(keep, brackets, names=sc.names[:keep])


def rescale_levels(sc: StructureConstants, factors) -> StructureConstants:
    """Change basis to Y_i = X_i / f_level(i), one positive factor per level.

    [Y_i, Y_j] picks up f_level(k) / (f_level(i) f_level(j)) on each output
    coordinate.  Dilating deep levels this way can clear the denominators
    that keep integer coordinate tuples from forming a subgroup.
    """
    ser = sc.series
    factors = [Fraction(f) for f in factors]
    if len(factors) != ser.step or any(f <= 0 for f in factors):
        raise ValueError(f"need {ser.step} positive factors")
    lv = ser.level_of
    brackets = {}
    for (i, j), pairs in sc._table.items():
        scale = Fraction(1, factors[lv(i)] * factors[lv(j)])
        brackets[(i, j)] = {k: v * scale * factors[lv(k)] for k, v in pairs}
    return StructureConstants(sc.dim, brackets, names=sc.names)


def direct_product(a: StructureConstants, b: StructureConstants) -> StructureConstants:
    """Direct product with basis re-interleaved level by level.

    Blocks of equal level are placed next to each other (all of a's
    level-p vectors, then b's) so the product basis is adapted again.
    """
    sa, sb = a.series, b.series
    step = max(sa.step, sb.step)
    order = []  # (source, original index)
    for p in range(step):
        if p < sa.step:
            order.extend(("a", i) for i in sa.level_indices(p))
        if p < sb.step:
            order.extend(("b", i) for i in sb.level_indices(p))
    pos = {key: t for t, key in enumerate(order)}
    brackets = {}
    for src, sc_src in (("a", a), ("b", b)):
        for (i, j), pairs in sc_src._table.items():
            ii, jj = pos[(src, i)], pos[(src, j)]
            out = {pos[(src, k)]: v for k, v in pairs}
            brackets[(ii, jj)] = out
    names = []
    for src, i in order:
        base = a.names[i] if src == "a" else b.names[i]
        names.append(f"{src}.{base}")
    return StructureConstants(len(order), brackets, names=names)


# -- JSON wire format ------------------------------------------------------
#
# {"dim": 3, "names": ["X1","X2","X3"], "levels": [[1,2],[3]],
#  "brackets": [{"i": 1, "j": 2, "out": [{"k": 3, "num": 1, "den": 1}]}]}
#
# Indices are 1-based on the wire.  num/den round-trip bit exactly.


def algebra_to_json(sc: StructureConstants) -> dict:
    ser = sc.series
    levels = [[i + 1 for i in ser.level_indices(p)] for p in range(ser.step)]
    brackets = []
    for (i, j) in sorted(sc._table):
        out = [
            {"k": k + 1, "num": v.numerator, "den": v.denominator}
            for k, v in sc._table[(i, j)]
        ]
        brackets.append({"i": i + 1, "j": j + 1, "out": out})
    return {
        "dim": sc.dim,
        "names": list(sc.names),
        "levels": levels,
        "brackets": brackets,
    }


def algebra_from_json(data: dict, verify: bool = True) -> StructureConstants:
    dim = data["dim"]
    brackets = {}
    for ent in data.get("brackets", []):
        i, j = ent["i"] - 1, ent["j"] - 1
        out = {o["k"] - 1: Fraction(o["num"], o.get("den", 1)) for o in ent["out"]}
        if (i, j) in brackets:
            raise ValueError(f"duplicate bracket entry for ({i + 1}, {j + 1})")
        brackets[(i, j)] = out
    sc = StructureConstants(dim, brackets, names=data.get("names"))
    if verify:
        ser = sc.series  # raises if not nilpotent / adapted
        claimed = data.get("levels")
        if claimed is not None:
            actual = [[i + 1 for i in ser.level_indices(p)] for p in range(ser.step)]
            try:
                claimed = [list(lv) for lv in claimed]
            except TypeError:
                raise ValueError(f"malformed level lists: {claimed!r}") from None
            if claimed != actual:
                raise NotAdaptedError(
                    f"declared levels {claimed} do not match computed levels {actual}"
                )
    return sc


def save_algebra(sc: StructureConstants, path):
    with open(path, "w") as fh:
        json.dump(algebra_to_json(sc), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_algebra(path, verify: bool = True) -> StructureConstants:
    with open(path) as fh:
        return algebra_from_json(json.load(fh), verify=verify)
