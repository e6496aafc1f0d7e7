"""Central limit statistics for character sums along walk paths.

For a validated character chi with transfer eigenvalue c, |c| < 1, the
observable A = Re chi has the explicit Poisson solution B = Re(chi/(1-c)),
so S_N = N^(-1/2) sum_{n<=N} A(x_n) decomposes into a martingale plus a
bounded boundary term.  The limit variance has the closed form

    sigma^2 = (1 - |c|^2) / (2 |1 - c|^2),

and can also be estimated path-wise from the conditional increment
variance q_n = sum_j p_j B(g_j x_{n-1})^2 - (sum_j p_j B(g_j x_{n-1}))^2;
clt_experiment measures both and runs a Kolmogorov-Smirnov comparison of
the empirical S_N distribution against the predicted normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as spstats

from .walk import (
    CHUNK,
    Character,
    WalkConfig,
    advance,
    transfer_eigenvalue,
    validate_observable,
    worker_count,
)

__all__ = [
    "ResonanceError",
    "closed_form_sigma",
    "CLTReport",
    "clt_experiment",
    "lemma_a1_check",
    "LemmaReport",
]


class ResonanceError(Exception):
    """|c| = 1: no spectral gap at this frequency, no CLT normalization."""


def closed_form_sigma(c: complex) -> float:
    """Limit standard deviation of S_N for the observable Re chi."""
    gap = abs(1 - c)
    if gap < 1e-12 or abs(c) > 1 - 1e-12:
        raise ResonanceError(f"eigenvalue {c} leaves no spectral gap")
    return math.sqrt((1 - abs(c) ** 2) / (2 * gap**2))


@dataclass(frozen=True)
class CLTReport:
    N: int
    trials: int
    eigenvalue: complex
    sigma_model: float
    sigma_martingale: float
    sigma_empirical: float
    ks_statistic: float
    ks_pvalue: float
    mean: float
    degenerate: bool


def _clt_chunk(args):
    config, char, N, size, state, weight = args
    rng = np.random.default_rng(np.random.PCG64(state))
    pfloat = np.asarray([float(p) for p in config.probs])
    lam = np.asarray(char.lam, dtype=float)
    c, _ = transfer_eigenvalue(config, char)
    w = 1.0 / (1.0 - c)
    t = np.zeros((size, config.dim))
    path_sum = np.zeros(size)
    q_total = 0.0
    tmaps = [config.system.translation_map(g) for g in config.generators]
    for _ in range(N):
        # conditional variance of the next martingale increment, using the
        # supports of all proposed moves (chi is reduction invariant, so the
        # proposals need no lattice reduction)
        b1 = np.zeros(size)
        b2 = np.zeros(size)
        for j, tm in enumerate(tmaps):
            z = np.exp(2j * np.pi * (tm(t) @ lam))
            b = np.real(w * z)
            b1 += pfloat[j] * b
            b2 += pfloat[j] * b * b
        q_total += float(np.sum(b2 - b1 * b1))
        idx = rng.choice(len(pfloat), size=size, p=pfloat)
        t = advance(config, t, idx)
        path_sum += np.real(np.exp(2j * np.pi * (t @ lam)))
    s = path_sum / math.sqrt(N) if weight else path_sum
    return s, q_total


def clt_experiment(
    config: WalkConfig, char: Character, N: int, trials: int, seed: int
) -> CLTReport:
    """Distribution of S_N over independent paths started at the identity.

    The Kolmogorov-Smirnov statistic compares the empirically centered
    S_N sample with Normal(0, sigma_model); sigma_martingale averages
    the conditional increment variances over all paths and steps, which
    converges to the same limit when the walk equidistributes.
    """
    if trials < 100:
        raise ValueError("too few trials for a distributional test")
    validate_observable(config, char)
    c, resonant = transfer_eigenvalue(config, char)
    if resonant:
        raise ResonanceError(f"character {char.lam} is resonant for these generators")
    sigma_model = closed_form_sigma(c)

    sizes = []
    left = trials
    while left > 0:
        take = min(CHUNK, left)
        sizes.append(take)
        left -= take
    states = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(config, char, N, sz, st, True) for sz, st in zip(sizes, states)]
    workers = worker_count()
    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_clt_chunk, jobs))
    else:
        results = [_clt_chunk(j) for j in jobs]
    samples = np.concatenate([s for s, _ in results])
    q_mean = sum(q for _, q in results) / (trials * N)
    sigma_mart = math.sqrt(max(0.0, q_mean))

    mean = float(np.mean(samples))
    centered = samples - mean
    sigma_emp = float(np.std(centered))
    degenerate = sigma_model < 1e-9
    if degenerate:
        ks_stat, ks_p = 1.0, 0.0
    else:
        ks_stat, ks_p = spstats.kstest(centered, "norm", args=(0.0, sigma_model))
    return CLTReport(
        N=N,
        trials=trials,
        eigenvalue=c,
        sigma_model=sigma_model,
        sigma_martingale=sigma_mart,
        sigma_empirical=sigma_emp,
        ks_statistic=float(ks_stat),
        ks_pvalue=float(ks_p),
        mean=mean,
        degenerate=degenerate,
    )


# -- the elementary cosine bound ------------------------------------------------


@dataclass(frozen=True)
class LemmaReport:
    ok: bool
    min_residual: float
    argmin: float
    grid: int


def lemma_a1_check(grid: int = 1_000_001, tol: float = 1e-12) -> LemmaReport:
    """Verify |1 + e(theta)| <= 2 - 8 theta^2 on [-1/2, 1/2] numerically.

    |1 + e^(2 pi i theta)| = 2 cos(pi theta) there, so the residual
    (2 - 8 theta^2) - 2 cos(pi theta) must be nonnegative up to rounding;
    equality holds at theta = 0 and theta = +-1/2.
    """
    theta = np.linspace(-0.5, 0.5, grid)
    residual = (2.0 - 8.0 * theta**2) - np.abs(1.0 + np.exp(2j * np.pi * theta))
    i = int(np.argmin(residual))
    return LemmaReport(
        ok=bool(residual[i] >= -tol),
        min_residual=float(residual[i]),
        argmin=float(theta[i]),
        grid=grid,
    )
