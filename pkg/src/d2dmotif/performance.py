"""Link success and expected throughput for star and chain motifs.

Rate integrals use ``x = ln(1 + delta)`` so a rate ``R`` on bandwidth ``b``
maps to ``R = b * x / ln 2`` and the integral over rates becomes
``b / ln 2 * integral of P(e^x - 1) dx``. That integral is cut where the
success probability drops below ``SURVIVAL_CUTOFF`` and the discarded tail is
bounded from the local exponential decay rate.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.ndimage import map_coordinates
from scipy.signal import fftconvolve

from .errors import DivergentIntegralError, DomainError
from .interference import RICIAN_WINDOW, LaplaceContext, LaplaceTable
from .motifstats import MotifStatistics, motif_statistics
from .pointprocess import bs_distance_pdf, rayleigh_pdf, rician_pdf
from .quadrature import DEFAULT_SPEC, QuadratureSpec, fixed_rule, integrate

SURVIVAL_CUTOFF = 1e-10
LOG2 = math.log(2.0)
# Largest x = ln(1 + delta) tried when searching for the truncation point.
MAX_LOG_THRESHOLD = 600.0


@dataclass(frozen=True)
class ThroughputReport:
    e_star: float
    e_chain_first: float
    e_chain_second: float
    e_seeding: float
    e_avg: float
    outage_star: float
    outage_chain: float
    outage_chain_correlated: float = math.nan
    z_star: float = math.nan
    z_chain: float = math.nan
    truncation_bounds: tuple = ()
    stats: MotifStatistics = None
    stderr: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RateIntegral:
    """Expected rate in bit/s with the bound on the discarded tail."""

    value: float
    truncation_bound: float
    cutoff: float


def _inner(q):
    return QuadratureSpec(
        relative_tolerance=q.relative_tolerance * 0.1,
        absolute_tolerance=min(q.absolute_tolerance, 1e-14),
        max_subdivisions=max(q.max_subdivisions, 400),
        semi_infinite_map=q.semi_infinite_map,
        mc_samples=q.mc_samples,
    )


def laplace_table(ctx, q=None):
    """Shared interpolation table for one context; cached per (context, spec)."""
    return _cached_table(ctx, q or DEFAULT_SPEC)


@lru_cache(maxsize=16)
def _cached_table(ctx, q):
    return LaplaceTable(ctx, q)


def _thresholds(delta_th):
    d = np.atleast_1d(np.asarray(delta_th, dtype=float))
    if np.any(d < 0) or np.any(np.isnan(d)):
        raise DomainError("delta_th must be nonnegative")
    return d


def _scalar_or_array(like, values):
    values = np.clip(np.atleast_1d(values), 0.0, 1.0)
    return float(values[0]) if np.ndim(like) == 0 else values


def _distance_scale(deltas, sd, alpha):
    # The decodable distance shrinks like delta^(-1/alpha); scaling each
    # component keeps the integrand's features near unit argument.
    return sd * np.minimum(1.0, np.power(np.maximum(deltas, 1e-300), -1.0 / alpha))


def star_success(deltas, ctx, q=DEFAULT_SPEC, table=None):
    """Probability a star receiver decodes at each SIR threshold in ``deltas``."""
    deltas = np.asarray(deltas, dtype=float)
    if ctx.p_ss == 0.0:
        return np.ones(deltas.shape)
    table = table or laplace_table(ctx, q)
    variance = 2.0 * ctx.variance
    alpha = ctx.alpha
    scale = _distance_scale(deltas, math.sqrt(variance), alpha)

    def integrand(rho):
        r = rho[:, None] * scale[None, :]
        loads = deltas[None, :] * np.power(r, alpha)
        neg = table.neg_log("star_inter", loads) + table.neg_log("star_intra", loads)
        return rayleigh_pdf(r, variance) * scale[None, :] * np.exp(-neg)

    value, _ = integrate(integrand, 0.0, np.inf, _inner(q), initial_panels=8)
    return value


def chain_first_success(deltas, ctx, q=DEFAULT_SPEC, table=None):
    """Probability the relay of a chain decodes the seed, per threshold."""
    deltas = np.asarray(deltas, dtype=float)
    if ctx.p_ss == 0.0:
        return np.ones(deltas.shape)
    table = table or laplace_table(ctx, q)
    variance = ctx.variance
    sd = math.sqrt(variance)
    alpha = ctx.alpha
    inner_q = _inner(q)
    scale = _distance_scale(deltas, sd, alpha)

    def over_offset(s_r):
        def over_distance(rho):
            r2 = rho[:, None, None] * scale[None, None, :]
            loads = deltas[None, None, :] * np.power(r2, alpha)
            neg = (table.neg_log("chain_inter", loads)
                   + table.chain_intra_neg_log(loads, s_r[None, :, None]))
            dens = rician_pdf(r2, s_r[None, :, None], variance) * scale[None, None, :]
            return dens * np.exp(-neg)

        inner, _ = integrate(over_distance, 0.0, np.inf, inner_q, initial_panels=8)
        return rayleigh_pdf(s_r, variance)[:, None] * inner

    value, _ = integrate(over_offset, 0.0, np.inf, inner_q, scale=sd, initial_panels=4)
    return value


def link_success_star(delta_th, ctx, q=DEFAULT_SPEC):
    return _scalar_or_array(delta_th, star_success(_thresholds(delta_th), ctx, q))


def link_success_chain_first(delta_th, ctx, q=DEFAULT_SPEC):
    return _scalar_or_array(delta_th, chain_first_success(_thresholds(delta_th), ctx, q))


def outage_star(delta_th, ctx, q=DEFAULT_SPEC):
    success = link_success_star(delta_th, ctx, q)
    return _scalar_or_array(delta_th, 1.0 - np.square(success))


def outage_chain_uncorrelated(delta_th, ctx, q=DEFAULT_SPEC):
    product = link_success_star(delta_th, ctx, q) * link_success_chain_first(delta_th, ctx, q)
    return _scalar_or_array(delta_th, 1.0 - product)


def throughput_cdf_star(rate, ctx, q=DEFAULT_SPEC):
    """CDF of one star receiver's rate; each receiver holds half the D2D band."""
    rate = np.asarray(rate, dtype=float)
    if np.any(rate < 0):
        raise DomainError("rate must be nonnegative")
    half_band = ctx.config.d2d_bandwidth_hz / 2.0
    with np.errstate(over="ignore"):
        deltas = np.expm1(np.atleast_1d(rate) / half_band * LOG2)
    # A threshold that overflows cannot be met.
    success = np.zeros(deltas.shape)
    finite = np.isfinite(deltas)
    if np.any(finite):
        success[finite] = star_success(deltas[finite], ctx, q)
    return _scalar_or_array(rate, 1.0 - success)


LOG_GRID_STEP = 0.5
LOG_GRID_CHUNK = 40
RATE_PANELS = 4


def rate_integral(success, bandwidth_hz, q=DEFAULT_SPEC, vectorized=True):
    """``integral_0^inf success(2^(R/b) - 1) dR`` with its truncation bound.

    ``success`` maps an array of SIR thresholds to probabilities. It is
    scanned on a uniform grid in ``x = ln(1 + delta)`` until it falls below
    ``SURVIVAL_CUTOFF`` and integrated adaptively in ``sqrt(x)`` up to that
    point. The rest
    is bounded assuming the decay rate seen on the last step.
    """
    def evaluate(x):
        deltas = np.expm1(x)
        if vectorized:
            return np.asarray(success(deltas), dtype=float)
        return np.array([float(np.asarray(success(np.array([d])))[0]) for d in deltas])

    xs, values = [], []
    start = 0.0
    cut_index = None
    while cut_index is None:
        if start > MAX_LOG_THRESHOLD:
            raise DivergentIntegralError(
                f"success probability stays at {values[-1][-1]:.3g} up to "
                f"ln(1+delta)={MAX_LOG_THRESHOLD}; the rate integral does not converge",
                estimate=math.inf)
        chunk = start + LOG_GRID_STEP * np.arange(LOG_GRID_CHUNK)
        vals = np.clip(evaluate(chunk), 0.0, 1.0)
        xs.append(chunk)
        values.append(vals)
        below = np.nonzero(vals < SURVIVAL_CUTOFF)[0]
        if below.size:
            cut_index = sum(len(c) for c in xs[:-1]) + int(below[0])
        start = chunk[-1] + LOG_GRID_STEP
    x = np.concatenate(xs)[: cut_index + 1]
    s = np.concatenate(values)[: cut_index + 1]
    log_s = np.log(np.maximum(s, 1e-300))
    cutoff = float(x[-1])

    decay = (log_s[-2] - log_s[-1]) / LOG_GRID_STEP if len(x) > 1 else 0.0
    tail = s[-1] / decay if decay > 0 else math.inf

    # Near delta = 0 the failure probability grows like a fractional power of
    # delta, so integrate in u = sqrt(x) where the integrand stays smooth.
    value, _ = integrate(lambda u: np.clip(evaluate(u * u), 0.0, 1.0) * 2.0 * u,
                         0.0, math.sqrt(cutoff), q, initial_panels=RATE_PANELS)
    prefactor = bandwidth_hz / LOG2
    return RateIntegral(prefactor * float(value), prefactor * tail, cutoff)


def _star_rate(ctx, q, bandwidth_hz):
    table = laplace_table(ctx, q)
    return rate_integral(lambda d: star_success(d, ctx, q, table), bandwidth_hz, q)


def expected_throughput_star(ctx, q=DEFAULT_SPEC):
    return _star_rate(ctx, q, ctx.config.d2d_bandwidth_hz / 2.0).value


def _chain_rate(ctx, q):
    table = laplace_table(ctx, q)
    return rate_integral(lambda d: chain_first_success(d, ctx, q, table),
                         ctx.config.d2d_bandwidth_hz, q, vectorized=False)


def expected_throughput_chain_first(ctx, q=DEFAULT_SPEC):
    return _chain_rate(ctx, q).value


def chain_second_rate(full_band_star, chain_first):
    """Two-hop rule: half the smaller of the two hop rates."""
    return 0.5 * min(full_band_star, chain_first)


def expected_throughput_chain_second(ctx, q=DEFAULT_SPEC):
    full = _star_rate(ctx, q, ctx.config.d2d_bandwidth_hz).value
    return chain_second_rate(full, expected_throughput_chain_first(ctx, q))


def seeding_distance_density(r, config, q=DEFAULT_SPEC):
    """Density of the BS-to-device distance: uniform parent in the square plus scatter."""
    r = np.asarray(r, dtype=float)
    L = config.region_half_width_m
    variance = config.scatter_variance
    sd = math.sqrt(variance)
    z_max = math.sqrt(2.0) * L
    lo = np.clip(r - RICIAN_WINDOW * sd, 0.0, z_max)
    hi = np.clip(r + RICIAN_WINDOW * sd, 0.0, z_max)
    out = np.zeros_like(r)
    for a, b in ((lo, np.minimum(hi, L)), (np.maximum(lo, L), hi)):
        span = np.maximum(b - a, 0.0)
        if not np.any(span > 0):
            continue

        def integrand(u, a=a, span=span):
            z = a[None, :] + span[None, :] * u[:, None]
            return bs_distance_pdf(z, L) * rician_pdf(r[None, :], z, variance) * span[None, :]

        value, _ = integrate(integrand, 0.0, 1.0, _inner(q), initial_panels=4)
        out += value
    return out


# Geometric refinement toward r = 0 spans this many halvings of the scatter sd.
SEEDING_GRADING_LEVELS = 40


@lru_cache(maxsize=8)
def _seeding_rule(half_width, variance, q):
    sd = math.sqrt(variance)
    r_max = math.sqrt(2.0) * half_width + RICIAN_WINDOW * sd
    graded = sd * 2.0 ** -np.arange(SEEDING_GRADING_LEVELS, 0, -1)
    uniform = np.arange(sd, r_max, sd)
    edges = np.concatenate([[0.0], graded, uniform, [r_max]])
    nodes, wk, wg = fixed_rule(edges)
    config = _DistanceGeometry(half_width, variance)
    dens = seeding_distance_density(nodes, config, q)
    return nodes, wk * dens, wg * dens


@dataclass(frozen=True)
class _DistanceGeometry:
    region_half_width_m: float
    scatter_variance: float


def seeding_success(deltas, config, q=DEFAULT_SPEC, with_error=False):
    """``E[exp(-delta * P_n * r^alpha / P_b)]``: probability the BS link clears ``delta``.

    The distance integral uses one composite rule graded toward ``r = 0``, so
    huge thresholds, which only the nearest devices meet, stay resolved.
    """
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    coeff = config.cellular_noise_power_w / config.bs_power_w
    alpha = config.pathloss_exponent
    nodes, wk, wg = _seeding_rule(config.region_half_width_m, config.scatter_variance, q)
    decay = np.exp(-coeff * deltas[None, :] * np.power(nodes, alpha)[:, None])
    value = np.clip(wk @ decay, 0.0, 1.0)
    if with_error:
        return value, np.abs(value - wg @ decay)
    return value


def _seeding_rate(config, q):
    return rate_integral(lambda d: seeding_success(d, config, q),
                         config.cellular_bandwidth_hz, q)


def expected_throughput_seeding(ctx, q=DEFAULT_SPEC):
    return _seeding_rate(ctx.config, q).value


def average_rate(c_o, c_o_star, c_o_chain, n_devices, e_star, e_chain, e_chain_second, e_seeding):
    """Per-device mean: two star receivers, one relay and one end device per chain,
    plus ``c_o + 1`` seeding devices."""
    return (2.0 * c_o_star * e_star + c_o_chain * e_chain + c_o_chain * e_chain_second
            + (c_o + 1.0) * e_seeding) / n_devices


def average_throughput_per_device(ctx, q=DEFAULT_SPEC, stats=None, correlated=False,
                                  correlated_seed=0):
    config = ctx.config
    stats = stats or motif_statistics(config)
    star_half = _star_rate(ctx, q, config.d2d_bandwidth_hz / 2.0)
    star_full = _star_rate(ctx, q, config.d2d_bandwidth_hz)
    chain = _chain_rate(ctx, q)
    seed = _seeding_rate(config, q)
    second = chain_second_rate(star_full.value, chain.value)
    e_avg = average_rate(stats.c_o, stats.c_o_star, stats.c_o_chain, config.devices_per_cluster,
                         star_half.value, chain.value, second, seed.value)

    delta = config.sir_threshold
    table = laplace_table(ctx, q)
    ps = float(star_success(np.array([delta]), ctx, q, table)[0])
    pc = float(chain_first_success(np.array([delta]), ctx, q, table)[0])
    corr = math.nan
    stderr = {}
    if correlated:
        corr, se = outage_chain_correlated(delta, ctx, q, seed=correlated_seed)
        stderr["outage_chain_corr"] = se
    bounds = (star_half.truncation_bound, chain.truncation_bound, seed.truncation_bound)
    return ThroughputReport(
        e_star=star_half.value,
        e_chain_first=chain.value,
        e_chain_second=second,
        e_seeding=seed.value,
        e_avg=e_avg,
        outage_star=min(max(1.0 - ps * ps, 0.0), 1.0),
        outage_chain=min(max(1.0 - ps * pc, 0.0), 1.0),
        outage_chain_correlated=corr,
        z_star=stats.z_star,
        z_chain=stats.z_chain,
        truncation_bounds=bounds,
        stats=stats,
        stderr=stderr,
    )


def analytic_report(config, q=DEFAULT_SPEC, correlated=False, seed=0, std_form="binomial"):
    """Full analytic report for one configuration."""
    stats = motif_statistics(config, std_form=std_form)
    ctx = LaplaceContext.from_config(config, stats.p_ss)
    return average_throughput_per_device(ctx, q, stats, correlated, seed)


# Correlated chain outage ---------------------------------------------------

CORRELATED_FORMS = ("pgfl", "printed")


def outage_chain_correlated(delta_th, ctx, q=DEFAULT_SPEC, seed=0, form="pgfl",
                            distance_nodes=25, cell_fraction=0.125):
    """Chain outage with the relay and end device sharing one interferer field.

    Returns ``(estimate, stderr)``. Link distances and the relay's cluster
    offset are sampled; for each pair of link distances the per-cluster
    factor ``h(x) = E_y[g1(x + y) g2(x + y)]`` is built on a grid by FFT
    smoothing, where ``g`` is the chance an interferer leaves one link intact.

    ``form="pgfl"`` raises each other cluster's factor to the cluster size and
    includes the relay's own cluster (``N - 3`` candidate interferers);
    ``form="printed"`` uses a single factor per cluster and no own-cluster
    term.
    """
    if form not in CORRELATED_FORMS:
        raise DomainError(f"unknown correlated form {form!r}")
    delta = float(delta_th)
    if delta < 0:
        raise DomainError("delta_th must be nonnegative")
    config = ctx.config
    n = config.devices_per_cluster
    p = ctx.n_m * ctx.p_ss / n
    if delta == 0.0 or p == 0.0:
        return 0.0, 0.0

    sd = math.sqrt(ctx.variance)
    rng = np.random.default_rng(seed)
    m = q.mc_samples
    relay_offset = rng.normal(0.0, sd, size=(m, 2))  # parent relative to the relay
    seed_pos = relay_offset + rng.normal(0.0, sd, size=(m, 2))
    end_pos = relay_offset + rng.normal(0.0, sd, size=(m, 2))
    d1 = np.hypot(*seed_pos.T)
    d2 = np.hypot(*end_pos.T)

    # Rotate each sample so the end device sits on the positive x axis.
    angle = np.arctan2(end_pos[:, 1], end_pos[:, 0])
    c, s = np.cos(-angle), np.sin(-angle)
    xr = c * relay_offset[:, 0] - s * relay_offset[:, 1]
    yr = s * relay_offset[:, 0] + c * relay_offset[:, 1]

    d_max = 6.0 * math.sqrt(2.0) * sd
    grid = np.linspace(0.0, d_max, distance_nodes)
    step = grid[1] - grid[0]
    f1 = np.clip(d1 / step, 0.0, distance_nodes - 1 - 1e-9)
    f2 = np.clip(d2 / step, 0.0, distance_nodes - 1 - 1e-9)
    i1, i2 = f1.astype(int), f2.astype(int)
    w1, w2 = f1 - i1, f2 - i2

    log_success = np.zeros(m)
    spacing = cell_fraction * sd
    for a in range(distance_nodes):
        for b in range(distance_nodes):
            sel = []
            weights = []
            for da, wa in ((0, 1.0 - w1), (1, w1)):
                for db, wb in ((0, 1.0 - w2), (1, w2)):
                    hit = (i1 + da == a) & (i2 + db == b)
                    if np.any(hit):
                        sel.append(hit)
                        weights.append(np.where(hit, wa * wb, 0.0))
            if not sel:
                continue
            mask = np.logical_or.reduce(sel)
            weight = np.sum(weights, axis=0)[mask]
            value = _correlated_log_success(grid[a], grid[b], xr[mask], yr[mask], delta, p,
                                            ctx, spacing, form)
            log_success[mask] += weight * value

    success = np.exp(log_success)
    estimate = 1.0 - float(np.mean(success))
    stderr = float(np.std(success, ddof=1) / math.sqrt(m)) if m > 1 else math.inf
    return min(max(estimate, 0.0), 1.0), stderr


def _correlated_log_success(d1, d2, xr, yr, delta, p, ctx, spacing, form):
    alpha = ctx.alpha
    sd = math.sqrt(ctx.variance)
    n = ctx.config.devices_per_cluster
    lam = ctx.density
    half = 8.0 * sd + 3.0 * max(d1, d2) + 20.0
    k = int(math.ceil(half / spacing))
    axis = np.arange(-k, k + 1) * spacing
    # Average each cell over a 2x2 sub-grid so narrow dips near a receiver are kept.
    sub = np.array([-0.25, 0.25]) * spacing
    deficit = np.zeros((axis.size, axis.size))
    for ox in sub:
        for oy in sub:
            gx = axis[:, None] + ox
            gy = axis[None, :] + oy
            g1 = _keep(np.hypot(gx, gy), d1, delta, p, alpha)
            g2 = _keep(np.hypot(gx - d2, gy), d2, delta, p, alpha)
            deficit += 0.25 * (1.0 - g1 * g2)

    cell = spacing * spacing
    # Tail beyond the grid: linearized, unsmoothed deficit of both receivers.
    outer = n * p * delta * (d1 ** alpha + d2 ** alpha) * 2.0 * math.pi * half ** (2.0 - alpha) / (alpha - 2.0)
    if form == "printed":
        exponent = lam * (deficit.sum() * cell + outer / n)
        return np.full(xr.shape, -exponent)

    kr = int(math.ceil(5.0 * sd / spacing))
    ker_axis = np.arange(-kr, kr + 1) * spacing
    kernel = np.exp(-0.5 * (ker_axis[:, None] ** 2 + ker_axis[None, :] ** 2) / ctx.variance)
    kernel /= kernel.sum()
    smoothed = np.clip(fftconvolve(deficit, kernel, mode="same"), 0.0, 1.0)
    factor = 1.0 - smoothed
    exponent = lam * (np.sum(-np.expm1(n * np.log(np.maximum(factor, 1e-300)))) * cell + outer)
    coords = np.vstack([(xr + k * spacing) / spacing, (yr + k * spacing) / spacing])
    own = map_coordinates(factor, coords, order=1, mode="nearest")
    return (n - 3) * np.log(np.maximum(own, 1e-300)) - exponent


def _keep(dist, link, delta, p, alpha):
    # 1 - p + p * L_h(delta * (link / dist)^alpha) with L_h(s) = 1 / (1 + s)
    with np.errstate(divide="ignore"):
        ratio = np.where(dist > 0, link / np.maximum(dist, 1e-300), np.inf)
    load = delta * np.power(ratio, alpha)
    return 1.0 - p + p / (1.0 + load)
