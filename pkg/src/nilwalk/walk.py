"""Random walks on compact nilmanifolds and their character statistics.

A walk is driven by finitely many group elements g_j picked i.i.d. with
rational probabilities; the state is the reduced coordinate tuple of
x_n = g_{j_n} x_{n-1} in the unit box.  Observables are characters
A(t) = exp(2 pi i lam.t) with integer frequency lam; those supported on
the top-level block descend to the abelianized torus, where they are
exact eigenfunctions of the transfer operator with eigenvalue
c = sum_j p_j A(g_j).  Every observable is validated at runtime against
the two properties the analysis actually uses, lattice invariance and
generator equivariance, instead of trusting the support heuristic.

Correlations are estimated over independent sample paths started at the
identity, so the mean of A(x_N) should track c^N; gap_profile lists c
over a frequency box, flagging resonant frequencies with |c| = 1, and
tame_decay_fit measures the sup-norm decay of the transfer operator on
a Sobolev-weighted character sum.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

import numpy as np

from .coords import SecondKindSystem
from .lie_core import LieVector, StructureConstants

__all__ = [
    "WalkConfig",
    "walk_config",
    "golden_heisenberg_config",
    "Character",
    "ObservableError",
    "validate_observable",
    "abelianized_lambda_box",
    "GapEntry",
    "gap_profile",
    "CorrelationPoint",
    "correlation_sweep",
    "DecayFit",
    "tame_decay_fit",
    "advance",
    "worker_count",
]

CHUNK = 8192  # fixed sample chunking so results never depend on worker count


def worker_count():
    raw = os.environ.get("NILWALK_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


class ObservableError(Exception):
    """The proposed observable fails invariance or equivariance."""


@dataclass(frozen=True)
class WalkConfig:
    sc: StructureConstants
    generators: tuple  # LieVector logs, exact
    probs: tuple  # Fractions, positive, summing to 1
    system: SecondKindSystem

    @property
    def dim(self):
        return self.sc.dim


def walk_config(sc: StructureConstants, generators, probs) -> WalkConfig:
    """Validate and freeze a walk: exact generators, exact probabilities.

    Float coordinates are converted through their exact binary values,
    so a config built from floats is still an exact object.  The integer
    lattice is verified here once; walks on an algebra whose lattice
    does not close fail loudly (rescale_levels can often fix the basis).
    """
    gens = []
    for g in generators:
        if isinstance(g, LieVector):
            gens.append(g)
        else:
            gens.append(LieVector([Fraction(c) for c in g]))
    if not gens:
        raise ValueError("need at least one generator")
    if any(g.dim != sc.dim for g in gens):
        raise ValueError("generator dimension mismatch")
    ps = [Fraction(p) for p in probs]
    if len(ps) != len(gens):
        raise ValueError("one probability per generator")
    if any(p <= 0 for p in ps) or sum(ps) != 1:
        raise ValueError("probabilities must be positive and sum to 1")
    system = SecondKindSystem(sc)
    system.verify_lattice()
    return WalkConfig(sc=sc, generators=tuple(gens), probs=tuple(ps), system=system)


def golden_heisenberg_config() -> WalkConfig:
    """Lazy Heisenberg walk: stay put or translate by exp(phi X1 + sig X2).

    phi is the golden mean conjugate and sig = sqrt(2) - 1, so (1, phi,
    sig) are rationally independent and no low frequency resonates.
    """
    from .catalog import heisenberg

    sc = heisenberg()
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    sig = math.sqrt(2.0) - 1.0
    g1 = LieVector.zero(3)
    g2 = LieVector([Fraction(phi), Fraction(sig), Fraction(0)])
    return walk_config(sc, [g1, g2], [Fraction(1, 2), Fraction(1, 2)])


# -- characters ----------------------------------------------------------------


class Character:
    """A(t) = exp(2 pi i lam.t) for an integer frequency tuple lam."""

    def __init__(self, lam):
        self.lam = tuple(int(v) for v in lam)
        if not any(self.lam):
            raise ValueError("the trivial frequency is not an observable")

    @property
    def norm(self):
        return math.sqrt(sum(v * v for v in self.lam))

    def is_abelianized(self, sc: StructureConstants):
        n0 = sc.series.dims[0]
        return not any(self.lam[n0:])

    def phase_of(self, system: SecondKindSystem, g: LieVector) -> Fraction:
        """Exact phase lam . sk(g) mod 1."""
        t = system.sk_from_log(g)
        s = sum((l * v for l, v in zip(self.lam, t)), Fraction(0))
        return s - math.floor(s)

    def values(self, t):
        """Evaluate on an (N, dim) batch of coordinate tuples."""
        t = np.asarray(t, dtype=float)
        lam = np.asarray(self.lam, dtype=float)
        phase = t @ lam if t.ndim > 1 else float(t @ lam)
        return np.exp(2j * np.pi * phase)

    def __repr__(self):
        return f"Character({self.lam})"

    def __eq__(self, other):
        return isinstance(other, Character) and other.lam == self.lam

    def __hash__(self):
        return hash(self.lam)


def transfer_eigenvalue(config: WalkConfig, char: Character):
    """c = sum_j p_j A(g_j), with exact rational phases.

    Returns (c, resonant): resonant means every generator phase agrees
    mod 1, which forces |c| = 1 and kills all decay at this frequency.
    """
    phases = [char.phase_of(config.system, g) for g in config.generators]
    c = sum(
        float(p) * cmath.exp(2j * math.pi * float(ph))
        for p, ph in zip(config.probs, phases)
    )
    resonant = len(set(phases)) == 1
    return c, resonant


def validate_observable(
    config: WalkConfig, char: Character, samples: int = 64, tol: float = 1e-9, seed: int = 2
):
    """Reject characters that do not descend to walk observables.

    Checks, on random points: invariance under reduction (A must factor
    through the lattice quotient) and exact equivariance under every
    generator (A(g_j x) = A(g_j) A(x), same constant at every x).  On
    the Heisenberg group, for instance, a frequency on the central
    coordinate passes neither, because translation mixes the center with
    a bilinear term.
    """
    rng = np.random.default_rng(seed)
    t = rng.uniform(-3.0, 3.0, size=(samples, config.dim))
    a = char.values(t)
    red = char.values(config.system.reduce_batch(t))
    inv_err = float(np.max(np.abs(a - red)))
    if inv_err > tol:
        raise ObservableError(
            f"character {char.lam} is not lattice invariant (err {inv_err:.2e})"
        )
    box = config.system.reduce_batch(t)
    base = char.values(box)
    eq_err = 0.0
    for g in config.generators:
        moved = char.values(config.system.translation_map(g)(box))
        ratio = moved / base
        eq_err = max(eq_err, float(np.max(np.abs(ratio - ratio[0]))))
        eq_err = max(eq_err, abs(float(np.max(np.abs(ratio))) - 1.0))
    if eq_err > tol:
        raise ObservableError(
            f"character {char.lam} is not generator equivariant (err {eq_err:.2e})"
        )
    return inv_err, eq_err


def abelianized_lambda_box(sc: StructureConstants, radius: int):
    """All nonzero integer frequencies on the top block with sup norm <= radius."""
    n0 = sc.series.dims[0]
    rest = sc.dim - n0
    out = []
    for head in iproduct(range(-radius, radius + 1), repeat=n0):
        if not any(head):
            continue
        out.append(Character(head + (0,) * rest))
    out.sort(key=lambda ch: (ch.norm, ch.lam))
    return out


@dataclass(frozen=True)
class GapEntry:
    lam: tuple
    norm: float
    eigenvalue: complex
    modulus: float
    resonant: bool


def gap_profile(config: WalkConfig, radius: int):
    """Transfer eigenvalues over the abelianized frequency box."""
    entries = []
    for ch in abelianized_lambda_box(config.sc, radius):
        c, resonant = transfer_eigenvalue(config, ch)
        entries.append(
            GapEntry(
                lam=ch.lam,
                norm=ch.norm,
                eigenvalue=c,
                modulus=abs(c),
                resonant=resonant,
            )
        )
    return entries


# -- simulation ----------------------------------------------------------------


def advance(config: WalkConfig, t, gen_idx):
    """One walk step on a batch: translate by the drawn generator, reduce."""
    out = np.empty_like(t)
    for j, g in enumerate(config.generators):
        mask = gen_idx == j
        if mask.any():
            out[mask] = config.system.translation_map(g)(t[mask])
    return config.system.reduce_batch(out)


def _chunk_sizes(samples):
    sizes = [CHUNK] * (samples // CHUNK)
    if samples % CHUNK:
        sizes.append(samples % CHUNK)
    return sizes


def _correlation_chunk(args):
    config, chars, checkpoints, size, state = args
    rng = np.random.default_rng(np.random.PCG64(state))
    pfloat = np.asarray([float(p) for p in config.probs])
    t = np.zeros((size, config.dim))
    lams = [np.asarray(ch.lam, dtype=float) for ch in chars]
    out = {}  # (char index, N) -> (sum, sum of squared moduli)
    last = max(checkpoints)
    want = set(checkpoints)
    for n in range(1, last + 1):
        idx = rng.choice(len(pfloat), size=size, p=pfloat)
        t = advance(config, t, idx)
        if n in want:
            for ci, lam in enumerate(lams):
                z = np.exp(2j * np.pi * (t @ lam))
                out[(ci, n)] = (complex(z.sum()), size)
    return out


@dataclass(frozen=True)
class CorrelationPoint:
    N: int
    estimate: complex
    stderr: float
    samples: int


def correlation_sweep(config: WalkConfig, characters, checkpoints, samples, seed):
    """Mean of each character at the given walk times, over sample paths.

    All paths start at the identity and are advanced jointly; chunked
    deterministically so the output depends only on the seed, never on
    NILWALK_WORKERS.  stderr is the root mean square error of the
    complex mean (characters are unit modulus, so the population second
    moment is exactly 1).
    """
    chars = list(characters)
    for ch in chars:
        validate_observable(config, ch)
    checkpoints = sorted(set(int(n) for n in checkpoints))
    if not checkpoints or checkpoints[0] < 1:
        raise ValueError("checkpoints must be positive walk times")
    sizes = _chunk_sizes(samples)
    states = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(config, chars, checkpoints, sz, st) for sz, st in zip(sizes, states)]
    workers = worker_count()
    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_correlation_chunk, jobs))
    else:
        results = [_correlation_chunk(j) for j in jobs]
    sweep = {}
    for ci, ch in enumerate(chars):
        pts = []
        for n in checkpoints:
            total = 0j
            count = 0
            for res in results:
                s, m = res[(ci, n)]
                total += s
                count += int(m)
            mean = total / count
            # var of the complex mean: E|z|^2 - |Ez|^2 = 1 - |mean|^2
            var = max(0.0, 1.0 - abs(mean) ** 2)
            pts.append(
                CorrelationPoint(
                    N=n,
                    estimate=mean,
                    stderr=math.sqrt(var / count),
                    samples=count,
                )
            )
        sweep[ch] = pts
    return sweep


# -- operator decay -------------------------------------------------------------


@dataclass(frozen=True)
class DecayFit:
    r: float
    radius: int
    times: tuple
    sups: tuple
    slope: float
    intercept: float


def tame_decay_fit(
    config: WalkConfig, r: float, radius: int, times, grid: int = 512
) -> DecayFit:
    """Sup-norm decay of L^N applied to a Sobolev-weighted character sum.

    The test function is A = sum_lam |lam|^(-r) chi_lam over the nonzero
    abelianized box; the transfer operator scales each term by c_lam^N,
    so sup |L^N A| is evaluated directly on a grid of the abelianized
    torus and fitted with a log-log slope.  Resonant frequencies would
    freeze the sup at a constant, so their presence is an error here.
    """
    times = sorted(set(int(n) for n in times))
    if len(times) < 3:
        raise ValueError("need at least three times for a slope")
    entries = gap_profile(config, radius)
    bad = [e.lam for e in entries if e.resonant]
    if bad:
        raise ValueError(f"resonant frequencies in the box: {bad[:4]}")
    n0 = config.sc.series.dims[0]
    if grid**n0 > 4_000_000:
        raise ValueError("grid too fine for this torus dimension")
    axes = [np.arange(grid) / grid] * n0
    mesh = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    lams = np.asarray([e.lam[:n0] for e in entries], dtype=float)
    phases = np.exp(2j * np.pi * (mesh @ lams.T))  # (grid^n0, n_lam)
    w = np.asarray([e.norm ** (-float(r)) for e in entries])
    c = np.asarray([e.eigenvalue for e in entries])
    sups = []
    for n in times:
        coeff = w * c**n
        sups.append(float(np.max(np.abs(phases @ coeff))))
    slope, intercept = np.polyfit(np.log(times), np.log(sups), 1)
    return DecayFit(
        r=float(r),
        radius=radius,
        times=tuple(times),
        sups=tuple(sups),
        slope=float(slope),
        intercept=float(intercept),
    )
