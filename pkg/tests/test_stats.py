import math
from fractions import Fraction

import pytest

from nilwalk import catalog
from nilwalk.lie_core import LieVector
from nilwalk.stats import (
    ResonanceError,
    closed_form_sigma,
    clt_experiment,
    lemma_a1_check,
)
from nilwalk.walk import (
    Character,
    golden_heisenberg_config,
    transfer_eigenvalue,
    walk_config,
)

F = Fraction


def quarters_config():
    """Jumps of 1/4 and 3/4: the frequency-1 eigenvalue is exactly zero,
    so successive observations decorrelate in one step."""
    return walk_config(
        catalog.abelian(1),
        [LieVector([F(1, 4)]), LieVector([F(3, 4)])],
        [F(1, 2), F(1, 2)],
    )


def test_closed_form_sigma_values():
    assert closed_form_sigma(0.0) == pytest.approx(math.sqrt(0.5))
    # real c: sigma^2 = (1 - c^2) / (2 (1 - c)^2) = (1 + c) / (2 (1 - c))
    assert closed_form_sigma(0.5) == pytest.approx(math.sqrt(1.5))
    assert closed_form_sigma(-0.5) == pytest.approx(math.sqrt(1.0 / 6.0))


def test_closed_form_sigma_resonance():
    # anywhere on the unit circle the gap vanishes, including c = -1
    for c in (1.0, -1.0, complex(math.cos(1.0), math.sin(1.0))):
        with pytest.raises(ResonanceError):
            closed_form_sigma(c)


def test_lazy_walks_have_half_variance():
    # c = (1 + e(theta))/2 satisfies Re c = |c|^2, so sigma^2 = 1/2 always
    cfg = golden_heisenberg_config()
    for lam in ((1, 0, 0), (0, 1, 0), (3, -2, 0)):
        c, _ = transfer_eigenvalue(cfg, Character(lam))
        assert closed_form_sigma(c) == pytest.approx(math.sqrt(0.5), abs=1e-12)


def test_clt_iid_control():
    rep = clt_experiment(quarters_config(), Character((1,)), N=256, trials=1000, seed=3)
    assert rep.sigma_model == pytest.approx(math.sqrt(0.5))
    # on the four-point orbit the increment variance is exactly 1/2
    assert rep.sigma_martingale == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert rep.ks_statistic < 0.05
    assert not rep.degenerate


def test_clt_heisenberg_golden():
    cfg = golden_heisenberg_config()
    rep = clt_experiment(cfg, Character((1, 0, 0)), N=512, trials=1500, seed=5)
    assert rep.ks_statistic < 0.05
    assert abs(rep.sigma_martingale / rep.sigma_model - 1.0) < 0.05
    assert abs(rep.sigma_empirical / rep.sigma_model - 1.0) < 0.10
    assert abs(rep.mean) < 0.1


def test_clt_rejects_resonance_and_small_samples():
    cfg = walk_config(
        catalog.abelian(1),
        [LieVector([F(1, 3)]), LieVector([F(1, 3)])],
        [F(1, 2), F(1, 2)],
    )
    with pytest.raises(ResonanceError):
        clt_experiment(cfg, Character((3,)), N=16, trials=200, seed=1)
    with pytest.raises(ValueError):
        clt_experiment(quarters_config(), Character((1,)), N=16, trials=50, seed=1)


def test_clt_deterministic():
    cfg = quarters_config()
    a = clt_experiment(cfg, Character((1,)), N=64, trials=300, seed=9)
    b = clt_experiment(cfg, Character((1,)), N=64, trials=300, seed=9)
    assert a == b


def test_lemma_quadratic_cosine_bound():
    rep = lemma_a1_check(grid=100_001)
    assert rep.ok
    assert rep.min_residual >= -1e-12
    # equality is attained at the center and the endpoints
    assert abs(rep.argmin) in (0.0, 0.5)
