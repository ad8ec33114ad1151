import math

import numpy as np
import pytest
from scipy import integrate as sci
from scipy.special import i0e

from d2dmotif.errors import DomainError
from d2dmotif.interference import (
    KINDS,
    LaplaceContext,
    LaplaceTable,
    laplace_chain_inter,
    laplace_chain_intra,
    laplace_star_inter,
    laplace_star_intra,
    laplace_transform,
)
from d2dmotif.motifstats import joint_motif_probability
from d2dmotif.pointprocess import NetworkConfig
from d2dmotif.simulator import empirical_laplace


def load_for(config, r, delta=1.0):
    return delta * r ** config.pathloss_exponent / config.device_power_w


def ctx_for(config, p_ss=None):
    if p_ss is None:
        p_ss = joint_motif_probability(config.max_link_distance_m, config.scatter_variance)
    return LaplaceContext.from_config(config, p_ss)


# Independent quadrature oracles built on scipy.

def rayleigh(v, var):
    return v / var * np.exp(-v * v / (2 * var))


def rician(v, c, var):
    return v / var * np.exp(-(v - c) ** 2 / (2 * var)) * i0e(v * c / var)


def blocked(v, q, alpha):
    return q / (q + v ** alpha)


def oracle_intra(s, ctx, var, centre=0.0):
    q = s * ctx.transmit_power_w
    dens = (lambda v: rayleigh(v, var)) if centre == 0 else (lambda v: rician(v, centre, var))
    sd = math.sqrt(var)
    d = sum(sci.quad(lambda v: dens(v) * blocked(v, q, ctx.alpha), a, b, epsabs=0, epsrel=1e-11,
                     limit=200)[0]
            for a, b in [(0, centre + sd), (centre + sd, centre + 15 * sd)])
    return (1 - ctx.p_ss * d) ** (ctx.n_m - 1)


def oracle_inter(s, ctx, var):
    q = s * ctx.transmit_power_w
    sd = math.sqrt(var)

    def deficit(t):
        lo = max(0.0, t - 12 * sd)
        return sci.quad(lambda v: rician(v, t, var) * blocked(v, q, ctx.alpha), lo, t + 12 * sd,
                        epsabs=1e-15, epsrel=1e-10, limit=200)[0]

    def outer(t):
        return -math.expm1(ctx.n_m * math.log1p(-ctx.p_ss * deficit(t))) * t

    scale = sd + q ** (1 / ctx.alpha)
    edges = [0, scale, 5 * scale, 30 * scale, 300 * scale]
    total = sum(sci.quad(outer, a, b, epsabs=0, epsrel=1e-9, limit=200)[0]
                for a, b in zip(edges, edges[1:]))
    # Beyond the last edge the deficit is Q t^-alpha to leading order.
    r = edges[-1]
    total += ctx.n_m * ctx.p_ss * q * r ** (2 - ctx.alpha) / (ctx.alpha - 2)
    return math.exp(-2 * math.pi * ctx.density * total)


@pytest.mark.parametrize("r", [5.0, 20.0, 60.0])
def test_star_intra_matches_quadrature_oracle(default_ctx, r):
    s = load_for(default_ctx.config, r)
    ref = oracle_intra(s, default_ctx, 2 * default_ctx.variance)
    assert laplace_star_intra(s, default_ctx) == pytest.approx(ref, rel=1e-7)


@pytest.mark.parametrize("r,s_r", [(5.0, 3.0), (20.0, 15.0), (40.0, 60.0)])
def test_chain_intra_matches_quadrature_oracle(default_ctx, r, s_r):
    s = load_for(default_ctx.config, r)
    ref = oracle_intra(s, default_ctx, default_ctx.variance, centre=s_r)
    assert laplace_chain_intra(s, s_r, default_ctx) == pytest.approx(ref, rel=1e-7)


@pytest.mark.parametrize("kind,fn", [("star_inter", laplace_star_inter),
                                     ("chain_inter", laplace_chain_inter)])
@pytest.mark.parametrize("r", [10.0, 30.0])
def test_inter_matches_quadrature_oracle(default_ctx, kind, fn, r):
    s = load_for(default_ctx.config, r)
    ref = oracle_inter(s, default_ctx, default_ctx.distance_variance(kind))
    assert fn(s, default_ctx) == pytest.approx(ref, rel=1e-6)


def test_chain_intra_zero_offset_is_rayleigh_form(default_ctx):
    s = load_for(default_ctx.config, 20.0)
    ref = oracle_intra(s, default_ctx, default_ctx.variance)
    assert laplace_chain_intra(s, 0.0, default_ctx) == pytest.approx(ref, rel=1e-7)


@pytest.mark.parametrize("kind", KINDS)
def test_zero_load_is_one(default_ctx, kind):
    assert laplace_transform(kind, 0.0, default_ctx, s_r=10.0) == 1.0


@pytest.mark.parametrize("kind", KINDS)
def test_no_interferers_is_one(kind):
    ctx = ctx_for(NetworkConfig(), p_ss=0.0)
    s = load_for(ctx.config, 30.0)
    assert laplace_transform(kind, s, ctx, s_r=10.0) == 1.0


@pytest.mark.parametrize("kind", ["star_inter", "chain_inter"])
def test_vanishing_cluster_density_is_one(kind):
    ctx = ctx_for(NetworkConfig(parent_density=1e-12))
    s = load_for(ctx.config, 30.0)
    assert laplace_transform(kind, s, ctx) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("kind", KINDS)
def test_strictly_decreasing_in_unit_interval(default_ctx, kind):
    loads = np.geomspace(1e-3, 1e5, 10) * load_for(default_ctx.config, 1.0)
    values = laplace_transform(kind, loads, default_ctx, s_r=10.0)
    assert values.shape == loads.shape
    assert np.all(values > 0) and np.all(values <= 1)
    assert np.all(np.diff(values) < 0)


@pytest.mark.parametrize("kind", KINDS)
def test_more_motifs_means_more_interference(kind):
    cfg = NetworkConfig()
    s = load_for(cfg, 20.0)
    low = laplace_transform(kind, s, ctx_for(cfg, 0.2), s_r=10.0)
    high = laplace_transform(kind, s, ctx_for(cfg, 0.6), s_r=10.0)
    assert high < low


@pytest.mark.parametrize("kind", ["star_intra", "chain_intra"])
def test_larger_clusters_lower_intra_transform(kind):
    s = load_for(NetworkConfig(), 20.0)
    small = laplace_transform(kind, s, ctx_for(NetworkConfig(devices_per_cluster=25), 0.4), s_r=5.0)
    big = laplace_transform(kind, s, ctx_for(NetworkConfig(devices_per_cluster=50), 0.4), s_r=5.0)
    assert big < small


def test_context_validation():
    cfg = NetworkConfig()
    with pytest.raises(DomainError):
        LaplaceContext.from_config(cfg, 1.5)
    with pytest.raises(DomainError):
        LaplaceContext(cfg, 0.4, 3, cfg.device_power_w)
    with pytest.raises(DomainError):
        laplace_star_intra(-1.0, ctx_for(cfg))
    with pytest.raises(DomainError):
        laplace_transform("other", 1.0, ctx_for(cfg))


def test_table_matches_direct_evaluation(default_ctx, default_table):
    loads = np.geomspace(1e-4, 1e6, 13) * load_for(default_ctx.config, 1.0)
    for kind in ("star_intra", "star_inter", "chain_inter"):
        direct = laplace_transform(kind, loads, default_ctx)
        np.testing.assert_allclose(default_table.laplace(kind, loads), direct, rtol=1e-5,
                                   atol=1e-12)
    for s_r in (0.0, 7.3, 22.0, 61.0):
        direct = laplace_chain_intra(loads, s_r, default_ctx)
        np.testing.assert_allclose(default_table.laplace("chain_intra", loads, s_r), direct,
                                   rtol=1e-5, atol=1e-12)


def test_trivial_table():
    table = LaplaceTable(ctx_for(NetworkConfig(), 0.0))
    assert np.all(table.laplace("star_inter", np.array([1.0, 1e9])) == 1.0)


# Monte Carlo oracles that follow the independent-thinning structure.

def test_star_intra_monte_carlo():
    cfg = NetworkConfig(devices_per_cluster=25)
    ctx = ctx_for(cfg)
    s = load_for(cfg, 20.0)
    est, se = empirical_laplace(s, "star_intra", cfg, 1_000_000, 3)
    assert abs(est - laplace_star_intra(s, ctx)) <= 3 * se


def test_chain_intra_monte_carlo():
    cfg = NetworkConfig(devices_per_cluster=25)
    ctx = ctx_for(cfg)
    s = load_for(cfg, 20.0)
    est, se = empirical_laplace(s, "chain_intra", cfg, 1_000_000, 4, s_r=15.0)
    assert abs(est - laplace_chain_intra(s, 15.0, ctx)) <= 3 * se


@pytest.mark.parametrize("kind", ["star_inter", "chain_inter"])
def test_inter_monte_carlo(default_config, default_ctx, kind):
    s = load_for(default_config, 20.0)
    est, se = empirical_laplace(s, kind, default_config, 100_000, 5)
    assert abs(est - laplace_transform(kind, s, default_ctx)) <= 3 * se


def test_monte_carlo_trivial_cases(default_config):
    assert empirical_laplace(0.0, "star_inter", default_config, 10, 0) == (1.0, 0.0)
    assert empirical_laplace(1.0, "star_intra", default_config, 10, 0, p_ss=0.0) == (1.0, 0.0)
    with pytest.raises(DomainError):
        empirical_laplace(-1.0, "star_intra", default_config, 10, 0)
