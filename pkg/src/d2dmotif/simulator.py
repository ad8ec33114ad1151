"""Monte Carlo ground truth: realize networks, form groups, measure SIR and rates.

Every trial draws a fresh network from its own stream,
``SeedSequence(seed, spawn_key=(trial,))``, so any trial can be replayed alone
and trial order never changes a result. Totals are accumulated per trial and
combined with ``math.fsum``, which is exact and hence order independent.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import D2DError, DomainError, NoMotifError, UndefinedZError
from .interference import KINDS
from .motifstats import (
    MotifStatistics,
    baseline_link_probability,
    baseline_stats,
    expected_occurrences,
    joint_motif_probability,
    z_scores,
)
from .performance import ThroughputReport
from .pointprocess import _sample_with

NONE, STAR, CHAIN = 0, 1, 2
KIND_NAMES = {NONE: "none", STAR: "star", CHAIN: "chain"}


@dataclass(frozen=True)
class MotifGroup:
    cluster_index: int
    member_indices: tuple
    kind: str
    hub_index: int
    seed_index: int
    relay_index: int = None


@dataclass(frozen=True)
class SlotSample:
    """SIRs and rates of one slot's receivers."""

    slot_parity: str
    sir: np.ndarray
    rate: np.ndarray
    fades: np.ndarray


@dataclass
class _Groups:
    kind: np.ndarray  # (n, Nm)
    members: np.ndarray  # (n, Nm, 3)
    hub: np.ndarray
    seed: np.ndarray
    peer_a: np.ndarray  # star receiver / chain end device
    peer_b: np.ndarray  # star receiver / chain seed
    extra_seed: np.ndarray  # (n,)


def trial_generator(seed, trial):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def _form_groups(positions, config, rng):
    n, n_dev = positions.shape[:2]
    n_m = n_dev // 3
    shape = (n, n_m)
    order = rng.permuted(np.tile(np.arange(n_dev), (n, 1)), axis=1)
    members = order[:, : 3 * n_m].reshape(n, n_m, 3)
    hub_slot = rng.integers(3, size=shape)
    star_draw = rng.random(shape)
    seed_pick = rng.integers(2, size=shape)
    extra_score = rng.random((n, n_dev))

    def pick(offset):
        return np.take_along_axis(members, ((hub_slot + offset) % 3)[..., None], -1)[..., 0]

    hub, first, second = pick(0), pick(1), pick(2)
    rows = np.arange(n)[:, None]
    hub_pos = positions[rows, hub]
    reach1 = np.hypot(*(positions[rows, first] - hub_pos).transpose(2, 0, 1))
    reach2 = np.hypot(*(positions[rows, second] - hub_pos).transpose(2, 0, 1))
    qualifies = (reach1 <= config.max_link_distance_m) & (reach2 <= config.max_link_distance_m)
    kind = np.where(qualifies, np.where(star_draw < config.star_fraction, STAR, CHAIN), NONE)

    # Star: the hub seeds both peers. Chain: the hub relays from one peer to the other.
    chain_seed = np.where(seed_pick == 0, first, second)
    chain_end = np.where(seed_pick == 0, second, first)
    is_chain = kind == CHAIN
    seed = np.where(is_chain, chain_seed, hub)
    peer_a = np.where(is_chain, chain_end, first)
    peer_b = np.where(is_chain, chain_seed, second)

    # One extra seeding device per cluster, drawn among devices that seed nothing.
    seeds_mask = np.zeros((n, n_dev), dtype=bool)
    active = kind != NONE
    cl = np.broadcast_to(rows, shape)
    seeds_mask[cl[active], seed[active]] = True
    extra_seed = np.argmin(np.where(seeds_mask, 2.0, extra_score), axis=1)
    return _Groups(kind, members, hub, seed, peer_a, peer_b, extra_seed)


def form_motif_groups(realization, config, seed):
    """Partition each cluster into disjoint triples and classify them."""
    config.require_motifs()
    rng = np.random.default_rng(seed)
    g = _form_groups(realization.device_positions(), config, rng)
    out = []
    n, n_m = g.kind.shape
    for c in range(n):
        for m in range(n_m):
            kind = int(g.kind[c, m])
            relay = int(g.hub[c, m]) if kind == CHAIN else None
            out.append(MotifGroup(
                cluster_index=c,
                member_indices=tuple(int(v) for v in g.members[c, m]),
                kind=KIND_NAMES[kind],
                hub_index=int(g.hub[c, m]),
                seed_index=int(g.seed[c, m]),
                relay_index=relay,
            ))
    return out


def _groups_from_list(groups, n, n_dev):
    n_m = n_dev // 3
    kind = np.zeros((n, n_m), dtype=int)
    members = np.zeros((n, n_m, 3), dtype=int)
    hub = np.zeros((n, n_m), dtype=int)
    seed = np.zeros((n, n_m), dtype=int)
    peer_a = np.zeros((n, n_m), dtype=int)
    peer_b = np.zeros((n, n_m), dtype=int)
    slot = np.zeros(n, dtype=int)
    used = [set() for _ in range(n)]
    name_to_kind = {v: k for k, v in KIND_NAMES.items()}
    for g in groups:
        c = g.cluster_index
        m = slot[c]
        slot[c] += 1
        kind[c, m] = name_to_kind[g.kind]
        members[c, m] = g.member_indices
        hub[c, m] = g.hub_index
        seed[c, m] = g.seed_index
        others = [v for v in g.member_indices if v != g.hub_index]
        if g.kind == "chain":
            end = [v for v in others if v != g.seed_index][0]
            peer_a[c, m], peer_b[c, m] = end, g.seed_index
        else:
            peer_a[c, m], peer_b[c, m] = others
        if g.kind != "none":
            used[c].add(g.seed_index)
    extra = np.array([min(set(range(n_dev)) - used[c]) for c in range(n)], dtype=int)
    return _Groups(kind, members, hub, seed, peer_a, peer_b, extra)


_FIELDS = (
    "star_rate", "star_rx", "star_ok", "star_links", "star_fail", "star_motifs",
    "relay_rate", "relay_ok", "relay_n", "end_rate", "end_n", "chain_fail", "chain_n",
    "seed_rate", "seed_n", "cluster_rate", "clusters", "groups", "qualifying",
    "stars", "chains",
)


def _slot_sir(rx_pos, tx_pos, intended, config, rng, noise, include_noise):
    """SIR of each receiver against every active transmitter, fresh fades.

    Noise enters only when enabled, or for a receiver that hears no
    interferer at all, whose ratio would otherwise be unbounded.
    """
    if len(rx_pos) == 0:
        return np.zeros(0), np.zeros((0, len(tx_pos)))
    diff = rx_pos[:, None, :] - tx_pos[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    fades = rng.exponential(1.0, size=dist.shape)
    with np.errstate(divide="ignore"):
        power = config.device_power_w * fades * np.power(dist, -config.pathloss_exponent)
    rows = np.arange(len(rx_pos))
    signal = power[rows, intended]
    power[rows, intended] = 0.0
    interference = power.sum(axis=1)
    floor = noise if include_noise else np.where(interference > 0.0, 0.0, noise)
    return signal / (interference + floor), fades


def _run_trial(positions, parents, groups, config, rng, include_noise, collect=None):
    """Measure one slot pair on a fixed realization; returns per-trial totals."""
    totals = dict.fromkeys(_FIELDS, 0.0)
    n = len(parents)
    if n == 0:
        return totals
    n_dev = positions.shape[1]
    L = config.region_half_width_m
    inside = np.all(np.abs(parents) <= L, axis=1)
    rows = np.broadcast_to(np.arange(n)[:, None], groups.kind.shape)
    star = groups.kind == STAR
    chain = groups.kind == CHAIN
    in_star = star & inside[:, None]
    in_chain = chain & inside[:, None]

    totals["clusters"] = float(inside.sum())
    totals["groups"] = float(groups.kind[inside].size)
    totals["qualifying"] = float((groups.kind[inside] != NONE).sum())
    totals["stars"] = float(in_star.sum())
    totals["chains"] = float(in_chain.sum())

    def xy(cl, dev):
        return positions[cl, dev]

    w1 = config.d2d_bandwidth_hz
    noise_half = config.d2d_noise_power_w / 2.0
    noise_full = config.d2d_noise_power_w
    delta = config.sir_threshold

    star_tx = xy(rows[star], groups.hub[star])
    chain_seed_tx = xy(rows[chain], groups.seed[chain])
    relay_tx = xy(rows[chain], groups.hub[chain])
    # Index of each in-region star within the global star transmitter list.
    star_index = np.cumsum(star.ravel()).reshape(star.shape) - 1
    chain_index = np.cumsum(chain.ravel()).reshape(chain.shape) - 1
    n_star = len(star_tx)

    star_cl = rows[in_star]
    star_rx_a = xy(star_cl, groups.peer_a[in_star])
    star_rx_b = xy(star_cl, groups.peer_b[in_star])
    star_idx = star_index[in_star]
    n_in_star = len(star_idx)
    star_rates = np.zeros((2, n_in_star, 2))
    star_fail = np.zeros(n_in_star)

    chain_cl = rows[in_chain]
    relay_rx = xy(chain_cl, groups.hub[in_chain])
    end_rx = xy(chain_cl, groups.peer_a[in_chain])
    c_idx = chain_index[in_chain]

    for slot, chain_tx in enumerate((chain_seed_tx, relay_tx)):
        tx = np.concatenate([star_tx, chain_tx])
        chain_rx = relay_rx if slot == 0 else end_rx
        rx = np.concatenate([star_rx_a, star_rx_b, chain_rx])
        intended = np.concatenate([star_idx, star_idx, n_star + c_idx])
        noise = np.concatenate([np.full(2 * n_in_star, noise_half),
                                np.full(len(c_idx), noise_full)])
        sir, fades = _slot_sir(rx, tx, intended, config, rng, noise, include_noise)
        s_a, s_b = sir[:n_in_star], sir[n_in_star:2 * n_in_star]
        s_chain = sir[2 * n_in_star:]
        star_rates[slot, :, 0] = w1 / 2.0 * np.log2(1.0 + s_a)
        star_rates[slot, :, 1] = w1 / 2.0 * np.log2(1.0 + s_b)
        star_fail += ((s_a < delta) | (s_b < delta))
        totals["star_ok"] += float(np.sum(s_a >= delta) + np.sum(s_b >= delta))
        if slot == 0:
            sir_first = s_chain
        else:
            sir_second = s_chain
        if collect is not None:
            collect.setdefault("star_sir", []).append(np.concatenate([s_a, s_b]))
            collect.setdefault("chain_sir", []).append(s_chain)
            collect.setdefault("slots", []).append(SlotSample(
                "first" if slot == 0 else "second", sir,
                np.concatenate([star_rates[slot, :, 0], star_rates[slot, :, 1],
                                w1 * np.log2(1.0 + s_chain)]), fades))

    star_device = star_rates.mean(axis=0)  # per receiver, averaged over both slots
    totals["star_rate"] = math.fsum(star_device.ravel())
    totals["star_rx"] = float(star_device.size)
    totals["star_links"] = float(4 * n_in_star)
    totals["star_fail"] = float(star_fail.sum())
    totals["star_motifs"] = float(2 * n_in_star)

    relay_rate = w1 * np.log2(1.0 + sir_first)
    end_rate = 0.5 * np.minimum(relay_rate, w1 * np.log2(1.0 + sir_second))
    totals["relay_rate"] = math.fsum(relay_rate)
    totals["relay_ok"] = float(np.sum(sir_first >= delta))
    totals["relay_n"] = float(len(relay_rate))
    totals["end_rate"] = math.fsum(end_rate)
    totals["end_n"] = float(len(end_rate))
    totals["chain_fail"] = float(np.sum((sir_first < delta) | (sir_second < delta)))
    totals["chain_n"] = float(len(relay_rate))

    # Seeding devices: motif seeds plus the extra device, served by the BS at the origin.
    active_in = (groups.kind != NONE) & inside[:, None]
    seed_pos = np.concatenate([xy(rows[active_in], groups.seed[active_in]),
                               xy(np.nonzero(inside)[0], groups.extra_seed[inside])])
    r = np.hypot(seed_pos[:, 0], seed_pos[:, 1])
    h = rng.exponential(1.0, size=len(r))
    snr = config.bs_power_w * h * np.power(r, -config.pathloss_exponent) / config.cellular_noise_power_w
    seed_rate = config.cellular_bandwidth_hz * np.log2(1.0 + snr)
    totals["seed_rate"] = math.fsum(seed_rate)
    totals["seed_n"] = float(len(seed_rate))

    per_cluster = np.zeros(n)
    np.add.at(per_cluster, star_cl, star_device.sum(axis=1))
    np.add.at(per_cluster, chain_cl, relay_rate + end_rate)
    seed_cl = np.concatenate([rows[active_in], np.nonzero(inside)[0]])
    np.add.at(per_cluster, seed_cl, seed_rate)
    totals["cluster_rate"] = math.fsum(per_cluster[inside] / n_dev)
    return totals


@dataclass(frozen=True)
class SimulationResult:
    report: ThroughputReport
    link_success_star: float
    link_success_chain_first: float
    p_ss: float
    trials: int
    stderr: dict = field(default_factory=dict)
    samples: dict = field(default_factory=dict)


def _ratio(totals, num, den):
    """Pooled ratio and its standard error across trials (ratio estimator)."""
    s = np.array([t[num] for t in totals])
    c = np.array([t[den] for t in totals])
    total_c = math.fsum(c)
    if total_c == 0:
        return math.nan, math.nan
    est = math.fsum(s) / total_c
    k = len(totals)
    if k < 2:
        return est, math.inf
    resid = (s - est * c) / (total_c / k)
    return est, math.sqrt(math.fsum(resid * resid) / (k * (k - 1)))


def _summarize(totals, config, collect):
    e_star, se_star = _ratio(totals, "star_rate", "star_rx")
    e_relay, se_relay = _ratio(totals, "relay_rate", "relay_n")
    e_end, se_end = _ratio(totals, "end_rate", "end_n")
    e_seed, se_seed = _ratio(totals, "seed_rate", "seed_n")
    e_avg, se_avg = _ratio(totals, "cluster_rate", "clusters")
    out_star, se_out_star = _ratio(totals, "star_fail", "star_motifs")
    out_chain, se_out_chain = _ratio(totals, "chain_fail", "chain_n")
    ls_star, se_ls_star = _ratio(totals, "star_ok", "star_links")
    ls_chain, se_ls_chain = _ratio(totals, "relay_ok", "relay_n")
    p_ss, se_p = _ratio(totals, "qualifying", "groups")
    stats = _empirical_stats(config, p_ss)
    report = ThroughputReport(
        e_star=e_star, e_chain_first=e_relay, e_chain_second=e_end, e_seeding=e_seed,
        e_avg=e_avg,
        outage_star=0.0 if math.isnan(out_star) else out_star,
        outage_chain=0.0 if math.isnan(out_chain) else out_chain,
        z_star=stats.z_star if stats else math.nan,
        z_chain=stats.z_chain if stats else math.nan,
        truncation_bounds=(),
        stats=stats,
        stderr={
            "e_star": se_star, "e_chain_first": se_relay, "e_chain_second": se_end,
            "e_seeding": se_seed, "e_avg": se_avg, "outage_star": se_out_star,
            "outage_chain": se_out_chain, "p_ss": se_p,
        },
    )
    samples = {}
    if collect is not None:
        samples = {k: np.concatenate(v) for k, v in collect.items() if k != "slots"}
        samples["slots"] = collect.get("slots", [])
    return SimulationResult(report, ls_star, ls_chain, p_ss, len(totals),
                            {"link_success_star": se_ls_star,
                             "link_success_chain_first": se_ls_chain, **report.stderr},
                            samples)


def _empirical_stats(config, p_ss):
    """Occurrence and baseline statistics from a measured motif probability."""
    if math.isnan(p_ss):
        return None
    n_m = config.n_motifs
    try:
        c_o, c_star, c_chain = expected_occurrences(config.devices_per_cluster, p_ss,
                                                    config.star_fraction)
        p_r = baseline_link_probability(p_ss, n_m)
        c_r_star, c_r_chain, eps_star, eps_chain = baseline_stats(p_ss, n_m, config.star_fraction)
        stats = MotifStatistics(p_ss, c_o, c_star, c_chain, p_r, c_r_star, c_r_chain,
                                eps_star, eps_chain)
        z_star, z_chain = z_scores(stats)
    except D2DError:
        return None
    return MotifStatistics(p_ss, c_o, c_star, c_chain, p_r, c_r_star, c_r_chain,
                           eps_star, eps_chain, z_star, z_chain)


def simulate_slots(realization, groups, config, n_trials, seed, include_noise=False,
                   collect_samples=False):
    """Redraw fades ``n_trials`` times on one fixed realization and grouping."""
    if n_trials < 1:
        raise DomainError("n_trials must be at least 1")
    positions = realization.device_positions()
    garr = groups if isinstance(groups, _Groups) else _groups_from_list(
        groups, realization.n_parents, config.devices_per_cluster)
    collect = {} if collect_samples else None
    totals = [_run_trial(positions, realization.parent_points, garr, config,
                         trial_generator(seed, t), include_noise, collect)
              for t in range(n_trials)]
    return _summarize(totals, config, collect)


def simulate(config, n_trials, seed, include_noise=False, guard_margin_m=None,
             collect_samples=False):
    """Draw a fresh network with its grouping in every trial."""
    config.require_motifs()
    if n_trials < 1:
        raise DomainError("n_trials must be at least 1")
    guard = config.guard_margin_m if guard_margin_m is None else guard_margin_m
    collect = {} if collect_samples else None
    totals = []
    for t in range(n_trials):
        rng = trial_generator(seed, t)
        real = _sample_with(config, guard, rng, seed)
        positions = real.device_positions()
        garr = _form_groups(positions, config, rng)
        totals.append(_run_trial(positions, real.parent_points, garr, config, rng,
                                 include_noise, collect))
    return _summarize(totals, config, collect)


def _other_cluster_power(config, n_trials, seed, guard_margin_m, inner_margin_m):
    """Slot-one other-cluster power at one receiver of every in-region cluster.

    Returns totals over all transmitters and over those whose parent lies
    within ``inner_margin_m`` of the region, from the same realizations.
    """
    full, inner = [], []
    L = config.region_half_width_m
    for t in range(n_trials):
        rng = trial_generator(seed, t)
        real = _sample_with(config, guard_margin_m, rng, seed)
        if real.n_parents == 0:
            continue
        pos = real.device_positions()
        g = _form_groups(pos, config, rng)
        parents = real.parent_points
        inside = np.all(np.abs(parents) <= L, axis=1)
        near = np.all(np.abs(parents) <= L + inner_margin_m, axis=1)
        tx_mask = g.kind != NONE
        rows = np.broadcast_to(np.arange(real.n_parents)[:, None], g.kind.shape)
        tx_cl = rows[tx_mask]
        tx = pos[tx_cl, g.seed[tx_mask]]
        for c in np.nonzero(inside)[0]:
            other = tx_cl != c
            d = np.hypot(*(tx[other] - pos[c, 0]).T)
            power = config.device_power_w * np.power(d, -config.pathloss_exponent)
            full.append(math.fsum(power))
            inner.append(math.fsum(power[near[tx_cl[other]]]))
    return np.array(full), np.array(inner)


def inter_cluster_interference_mean(config, n_trials, seed, guard_margin_m):
    """Mean other-cluster power at a receiver of an in-region cluster, slot one."""
    full, _ = _other_cluster_power(config, n_trials, seed, guard_margin_m, guard_margin_m)
    return float(np.mean(full)) if full.size else 0.0


def guard_sensitivity(config, n_trials, seed):
    """Relative change of mean other-cluster interference when the guard doubles.

    Both guards are read off one realization drawn with the doubled guard;
    restricting a Poisson process to the smaller square is exact, so the
    comparison carries no independent sampling noise.
    """
    g = config.guard_margin_m
    full, inner = _other_cluster_power(config, n_trials, seed, 2.0 * g, g)
    base = math.fsum(inner)
    return (math.fsum(full) - base) / base if base else 0.0


# Empirical Z-scores ---------------------------------------------------------

def empirical_z_score(config, n_realizations, n_rewires, seed):
    """Z-scores from simulated clusters against a rewired random baseline.

    Each realization is one cluster. Its star and chain counts give the
    observed occurrence; its ``2 * count`` links are rewired uniformly over
    distinct pairs of ``N_m`` nodes, and ``N_m`` random triples of the
    rewired graph are inspected. A triple with exactly two links is a
    star with probability ``theta`` and a chain otherwise.

    Returns ``((z_star, se_star), (z_chain, se_chain))``; standard errors come
    from ten batches of realizations.
    """
    if n_realizations < 100 or n_rewires < 100:
        raise DomainError("n_realizations and n_rewires must both be at least 100")
    n_m = config.require_motifs()
    if n_m < 3:
        raise NoMotifError("the rewired baseline needs at least three groups")
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))
    base_rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))
    sd = math.sqrt(config.scatter_variance)
    n_dev = config.devices_per_cluster

    obs = np.zeros((n_realizations, 2))
    for k in range(n_realizations):
        positions = rng.normal(0.0, sd, size=(1, n_dev, 2))
        g = _form_groups(positions, config, rng)
        obs[k] = ((g.kind == STAR).sum(), (g.kind == CHAIN).sum())

    n_pairs = n_m * (n_m - 1) // 2
    pair_index = np.zeros((n_m, n_m), dtype=int)
    iu = np.triu_indices(n_m, 1)
    pair_index[iu] = np.arange(n_pairs)
    pair_index[iu[::-1]] = np.arange(n_pairs)
    reps = np.arange(n_rewires)[:, None]
    base = np.zeros((n_realizations, n_rewires, 2))
    for k in range(n_realizations):
        links = min(int(2 * obs[k].sum()), n_pairs)
        # Distinct pairs: the ``links`` smallest of i.i.d. keys, no loops or repeats.
        keys = base_rng.random((n_rewires, n_pairs))
        adj = np.zeros((n_rewires, n_pairs), dtype=bool)
        if links:
            cut = np.partition(keys, links - 1, axis=1)[:, links - 1:links]
            adj = keys <= cut
        tri = np.argsort(base_rng.random((n_rewires, n_m, n_m)), axis=2)[..., :3]
        edges = (adj[reps, pair_index[tri[..., 0], tri[..., 1]]].astype(int)
                 + adj[reps, pair_index[tri[..., 0], tri[..., 2]]]
                 + adj[reps, pair_index[tri[..., 1], tri[..., 2]]])
        two = edges == 2
        star = base_rng.random((n_rewires, n_m)) < config.star_fraction
        base[k, :, 0] = (two & star).sum(axis=1)
        base[k, :, 1] = (two & ~star).sum(axis=1)

    def z_of(idx):
        c_o = obs[idx].mean(axis=0)
        pooled = base[idx].reshape(-1, 2)
        mean = pooled.mean(axis=0)
        std = pooled.std(axis=0, ddof=1)
        if np.any(std == 0):
            raise UndefinedZError("rewired baseline has zero variance")
        return (c_o - mean) / std

    z = z_of(np.arange(n_realizations))
    batches = np.array_split(np.arange(n_realizations), 10)
    zb = np.array([z_of(b) for b in batches])
    se = zb.std(axis=0, ddof=1) / math.sqrt(len(batches))
    return (float(z[0]), float(se[0])), (float(z[1]), float(se[1]))


# Monte Carlo Laplace transforms ---------------------------------------------

def _inter_radius(load, p, n_m, density, alpha, tolerance=1e-5):
    # Other-cluster exponent beyond radius R is about
    # 2 pi density n_m p load R^(2-alpha) / (alpha-2).
    need = 2.0 * math.pi * density * n_m * p * load / ((alpha - 2.0) * tolerance)
    return min(max(1000.0, need ** (1.0 / (alpha - 2.0))), 5000.0)


def empirical_laplace(s, interference_kind, config, n_draws, seed, s_r=0.0, p_ss=None,
                      chunk=2000):
    """Sample mean of ``exp(-s I)`` with ``I`` built from independently thinned
    interferers at the distance laws the analytic transforms assume.

    Returns ``(estimate, stderr)``.
    """
    if interference_kind not in KINDS:
        raise DomainError(f"unknown interference kind {interference_kind!r}")
    if s < 0:
        raise DomainError("s must be nonnegative")
    n_m = config.require_motifs()
    p = joint_motif_probability(config.max_link_distance_m, config.scatter_variance) \
        if p_ss is None else p_ss
    if s == 0 or p == 0:
        return 1.0, 0.0
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(2,)))
    alpha = config.pathloss_exponent
    load = s * config.device_power_w
    v = config.scatter_variance
    values = []
    remaining = n_draws
    while remaining > 0:
        m = min(chunk, remaining)
        remaining -= m
        if interference_kind in ("star_intra", "chain_intra"):
            k = n_m - 1
            if interference_kind == "star_intra":
                offset = rng.normal(0.0, math.sqrt(2.0 * v), size=(m, k, 2))
            else:
                offset = rng.normal(0.0, math.sqrt(v), size=(m, k, 2))
                offset[..., 0] += s_r
            dist = np.hypot(offset[..., 0], offset[..., 1])
            active = rng.random((m, k)) < p
            fades = rng.exponential(1.0, size=(m, k))
            total = np.sum(active * fades * np.power(dist, -alpha), axis=1)
        else:
            var = 3.0 * v if interference_kind == "star_inter" else v
            density = config.parent_density_m2
            radius = _inter_radius(load, p, n_m, density, alpha)
            counts = rng.poisson(density * math.pi * radius * radius, size=m)
            total = np.zeros(m)
            n_par = int(counts.sum())
            if n_par:
                owner = np.repeat(np.arange(m), counts)
                t = radius * np.sqrt(rng.random(n_par))
                offset = rng.normal(0.0, math.sqrt(var), size=(n_par, n_m, 2))
                offset[..., 0] += t[:, None]
                dist = np.hypot(offset[..., 0], offset[..., 1])
                active = rng.random((n_par, n_m)) < p
                fades = rng.exponential(1.0, size=(n_par, n_m))
                per_parent = np.sum(active * fades * np.power(dist, -alpha), axis=1)
                np.add.at(total, owner, per_parent)
        values.append(np.exp(-load * total))
    values = np.concatenate(values)
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(len(values)))
