import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d2dmotif.errors import DomainError, NoMotifError, UndefinedZError
from d2dmotif.interference import LaplaceContext
from d2dmotif.motifstats import joint_motif_probability, motif_statistics
from d2dmotif.performance import outage_chain_correlated, outage_chain_uncorrelated
from d2dmotif.pointprocess import NetworkConfig, NetworkRealization, sample_tcp
from d2dmotif.simulator import (
    _ratio,
    empirical_z_score,
    form_motif_groups,
    guard_sensitivity,
    simulate,
    simulate_slots,
)


def groups_for(config, n_clusters, seed):
    cfg = config.with_(parent_density=n_clusters / (2 * config.region_half_width_m) ** 2 * 1e6)
    real = sample_tcp(cfg, guard_margin_m=0.0, seed=seed)
    return real, form_motif_groups(real, cfg, seed)


def test_groups_are_disjoint_triples(default_config):
    real, groups = groups_for(default_config, 20, 1)
    n_m = default_config.n_motifs
    assert len(groups) == real.n_parents * n_m
    for c in range(real.n_parents):
        members = [m for g in groups if g.cluster_index == c for m in g.member_indices]
        assert len(members) == 3 * n_m == len(set(members))
    for g in groups:
        assert g.hub_index in g.member_indices and g.seed_index in g.member_indices
        if g.kind == "star":
            assert g.seed_index == g.hub_index and g.relay_index is None
        elif g.kind == "chain":
            assert g.relay_index == g.hub_index != g.seed_index


def test_groups_qualify_only_within_reach(default_config):
    real, groups = groups_for(default_config, 20, 2)
    pos = real.device_positions()
    s_th = default_config.max_link_distance_m
    for g in groups:
        hub = pos[g.cluster_index, g.hub_index]
        reach = [np.hypot(*(pos[g.cluster_index, m] - hub)) for m in g.member_indices
                 if m != g.hub_index]
        assert (g.kind != "none") == all(r <= s_th for r in reach)


def test_tiny_reach_gives_no_motifs(default_config):
    _, groups = groups_for(default_config.with_(max_link_distance_m=1e-9), 20, 3)
    assert all(g.kind == "none" for g in groups)


def test_huge_reach_labels_follow_star_fraction(default_config):
    cfg = default_config.with_(max_link_distance_m=1e6)
    _, groups = groups_for(cfg, 700, 4)
    assert len(groups) >= 10_000
    assert all(g.kind != "none" for g in groups)
    theta = cfg.star_fraction
    frac = np.mean([g.kind == "star" for g in groups])
    assert abs(frac - theta) <= 3 * math.sqrt(theta * (1 - theta) / len(groups))


def test_qualifying_fraction_matches_motif_probability(default_config):
    _, groups = groups_for(default_config, 6300, 5)
    assert len(groups) >= 100_000
    frac = np.mean([g.kind != "none" for g in groups])
    p = joint_motif_probability(20.0, 100.0)
    assert abs(frac - p) <= 3 * math.sqrt(p * (1 - p) / len(groups))


def test_simulation_is_deterministic(default_config):
    a = simulate(default_config, 5, 99)
    b = simulate(default_config, 5, 99)
    assert a.report == b.report
    c = simulate(default_config, 5, 100)
    assert c.report.e_star != a.report.e_star


def test_no_transmitters():
    cfg = NetworkConfig(max_link_distance_m=1e-9)
    res = simulate(cfg, 5, 0)
    assert res.report.outage_star == 0.0 and res.report.outage_chain == 0.0
    assert math.isnan(res.report.e_star) and math.isnan(res.report.e_chain_first)
    assert res.report.e_seeding > 0


def test_isolated_star_never_fails(default_config):
    cfg = default_config.with_(max_link_distance_m=1e6)
    rng = np.random.default_rng(6)
    real = NetworkRealization(np.zeros((1, 2)),
                              rng.normal(0, 10, size=(1, cfg.devices_per_cluster, 2)), 6)
    groups = form_motif_groups(real, cfg, 6)
    groups = [groups[0]] + [replace(g, kind="none") for g in groups[1:]]
    groups[0] = replace(groups[0], kind="star", seed_index=groups[0].hub_index, relay_index=None)
    res = simulate_slots(real, groups, cfg, 20, 6)
    assert res.report.outage_star == 0.0
    # With no interferer the receiver is limited by thermal noise alone.
    assert math.isfinite(res.report.e_star)
    assert res.report.e_star > 10 * cfg.d2d_bandwidth_hz


def test_slot_samples(default_config):
    res = simulate(default_config, 3, 7, collect_samples=True)
    slots = res.samples["slots"]
    assert [s.slot_parity for s in slots] == ["first", "second"] * 3
    for s in slots:
        assert np.all(s.sir >= 0) and np.all(s.rate >= 0) and np.all(s.fades > 0)
    half = default_config.d2d_bandwidth_hz / 2
    np.testing.assert_allclose(slots[0].rate[: len(res.samples["star_sir"]) // 6],
                               half * np.log2(1 + slots[0].sir[: len(res.samples["star_sir"]) // 6]))


def test_stderr_shrinks_with_trials(default_config):
    one = simulate(default_config, 1, 8)
    many = simulate(default_config, 200, 8)
    assert math.isinf(one.stderr["e_star"])
    assert many.stderr["e_star"] < 0.05 * many.report.e_star


def test_guard_margin_is_sufficient(default_config):
    assert guard_sensitivity(default_config, 200, 9) < 0.01


@given(st.lists(st.tuples(st.floats(0, 1e9), st.integers(1, 50)), min_size=2, max_size=40),
       st.randoms(use_true_random=False))
@settings(max_examples=50, deadline=None)
def test_pooling_is_order_independent(rows, rnd):
    totals = [{"s": s, "c": float(c)} for s, c in rows]
    shuffled = totals[:]
    rnd.shuffle(shuffled)
    a, b = _ratio(totals, "s", "c"), _ratio(shuffled, "s", "c")
    assert a[0] == pytest.approx(b[0], rel=1e-12)
    assert a[1] == pytest.approx(b[1], rel=1e-9, abs=1e-12)


def test_rejects_bad_arguments(default_config):
    with pytest.raises(DomainError):
        simulate(default_config, 0, 0)
    with pytest.raises(NoMotifError):
        simulate(default_config.with_(devices_per_cluster=2), 1, 0)
    with pytest.raises(DomainError):
        empirical_z_score(default_config, 50, 100, 0)


# Chain outage against the correlated and uncorrelated predictions.

@pytest.mark.parametrize("s_th", [10.0, 20.0, 30.0, 40.0])
def test_chain_outage_between_predictions(s_th):
    cfg = NetworkConfig(devices_per_cluster=25, max_link_distance_m=s_th)
    ctx = LaplaceContext.from_config(cfg, motif_statistics(cfg).p_ss)
    corr, se_corr = outage_chain_correlated(1.0, ctx, seed=3)
    uncorr = outage_chain_uncorrelated(1.0, ctx)
    sim = simulate(cfg, 4000, 14)
    value, se = sim.report.outage_chain, sim.report.stderr["outage_chain"]
    lo, hi = sorted((corr, uncorr))
    within = lo <= value <= hi
    near = min(abs(value - corr), abs(value - uncorr)) <= 2 * math.hypot(se, se_corr)
    assert within or near, (value, corr, uncorr)


# Empirical Z-scores.

def test_empirical_z_undefined_without_motifs(default_config):
    with pytest.raises(UndefinedZError):
        empirical_z_score(default_config.with_(max_link_distance_m=1e-9), 100, 100, 0)


@pytest.mark.parametrize("n,s_th", [(50, 15.0), (50, 25.0), (100, 20.0)])
def test_empirical_z_matches_analytic(n, s_th):
    cfg = NetworkConfig(devices_per_cluster=n, max_link_distance_m=s_th)
    stats = motif_statistics(cfg)
    (zs, se_s), (zc, se_c) = empirical_z_score(cfg, 1000, 300, 10)
    assert abs(zs - stats.z_star) <= 3 * se_s, (zs, se_s, stats.z_star)
    assert abs(zc - stats.z_chain) <= 3 * se_c, (zc, se_c, stats.z_chain)
