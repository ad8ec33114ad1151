"""Acceptance matrix: analytic results checked against independent oracles and simulation.

Each criterion returns ``Check`` rows carrying the analytic value, the value it
is compared with, the allowed band and the verdict. Tolerances come from
``DEFAULT_TOLERANCES`` scaled by one factor, so a scale of zero turns every
banded comparison into an exact-equality test.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from .interference import KINDS, LaplaceContext, laplace_transform
from .motifstats import joint_motif_probability, motif_statistics
from .performance import (
    analytic_report,
    expected_throughput_seeding,
    outage_chain_uncorrelated,
    outage_star,
)
from .pointprocess import bs_distance_pdf, rayleigh_pdf, rician_pdf
from .quadrature import QuadratureSpec, integrate
from .simulator import empirical_laplace, simulate

DEFAULT_TOLERANCES = {
    "p_ss_abs": 0.05,
    "saturation_m": 10.0,
    "sigma_multiple": 3.0,
    "outage_star_abs": 0.03,
    "outage_chain_abs": 0.10,
    "lambda_rel": 0.10,
    "unimodal_step_rel": 0.02,
    "z_band_rel": 0.15,
    "seeding_rel": 0.02,
    "normalization_abs": 1e-8,
}

CRITERIA_TITLES = {
    1: "joint motif probability targets",
    2: "joint motif probability vs Gaussian triple sampling",
    3: "interference transforms vs Monte Carlo",
    4: "star and chain outage vs simulation",
    5: "Z-scores decrease with scatter variance",
    6: "simulated throughput unimodal in Z",
    7: "cluster density effect on average throughput",
    8: "bandwidth split effect",
    9: "seeding throughput vs Monte Carlo",
    10: "normalization, transform shape, determinism, exit codes",
}


@dataclass(frozen=True)
class Check:
    criterion: int
    name: str
    analytic: float
    simulated: float
    band: str
    passed: bool

    def line(self):
        verdict = "PASS" if self.passed else "FAIL"
        return (f"[{verdict}] c{self.criterion} {self.name}: analytic={_fmt(self.analytic)} "
                f"compared={_fmt(self.simulated)} band={self.band}")


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{x:.6g}" if x is not None else "-"


def tolerances(scale=1.0, overrides=None):
    tol = {k: v * scale for k, v in DEFAULT_TOLERANCES.items()}
    tol.update(overrides or {})
    return tol


def is_unimodal(values, step_rel):
    """True if some peak index splits the sequence into a rise and a fall,
    each step allowed to move against its trend by ``step_rel`` relative."""
    v = list(values)
    n = len(v)

    def up(i):
        return v[i + 1] >= v[i] - step_rel * abs(v[i])

    def down(i):
        return v[i + 1] <= v[i] + step_rel * abs(v[i])

    return any(all(up(i) for i in range(m)) and all(down(i) for i in range(m, n - 1))
               for m in range(n))


def _first_reaching(variance, level, lo=1.0, hi=500.0):
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        if joint_motif_probability(mid, variance) >= level:
            hi = mid
        else:
            lo = mid
    return hi


# Criterion 1 ---------------------------------------------------------------

def criterion_1(base, trials, seed, tol):
    out = []
    targets = {50.0: (0.75, 40.0), 100.0: (0.45, 50.0), 150.0: (0.28, 60.0)}
    for variance, (p_target, s_target) in targets.items():
        p = joint_motif_probability(20.0, variance)
        out.append(Check(1, f"p_ss(s_th=20, sigma2={variance:g})", p, p_target,
                         f"+-{tol['p_ss_abs']:g}", abs(p - p_target) <= tol["p_ss_abs"]))
        s99 = _first_reaching(variance, 0.99)
        out.append(Check(1, f"s_th reaching 0.99 (sigma2={variance:g})", s99, s_target,
                         f"+-{tol['saturation_m']:g} m", abs(s99 - s_target) <= tol["saturation_m"]))
    return out


# Criterion 2 ---------------------------------------------------------------

def gaussian_triple_fraction(s_th, variance, n, rng):
    """Fraction of hub offsets x and peer offsets y1, y2 with both |x + y| within s_th."""
    sd = math.sqrt(variance)
    x = rng.normal(0.0, sd, size=(n, 2))
    y1 = rng.normal(0.0, sd, size=(n, 2))
    y2 = rng.normal(0.0, sd, size=(n, 2))
    hit = (np.hypot(*(x + y1).T) <= s_th) & (np.hypot(*(x + y2).T) <= s_th)
    frac = float(hit.mean())
    return frac, math.sqrt(max(frac * (1.0 - frac), 1.0 / n) / n)


def criterion_2(base, trials, seed, tol, samples=1_000_000):
    out = []
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(2, 0)))
    for variance in (50.0, 100.0, 150.0):
        for s_th in (10.0, 20.0, 40.0):
            p = joint_motif_probability(s_th, variance)
            frac, se = gaussian_triple_fraction(s_th, variance, samples, rng)
            band = tol["sigma_multiple"] * se
            out.append(Check(2, f"p_ss(s_th={s_th:g}, sigma2={variance:g})", p, frac,
                             f"+-{band:.3g}", abs(p - frac) <= band))
    return out


# Criterion 3 ---------------------------------------------------------------

LAPLACE_LINK_DISTANCES = (8.0, 14.0, 20.0)
LAPLACE_CHAIN_OFFSET = 10.0


def criterion_3(base, trials, seed, tol, draws=None):
    out = []
    config = base.with_(devices_per_cluster=50, scatter_variance=100.0, parent_density=10.0,
                        max_link_distance_m=20.0)
    p_ss = joint_motif_probability(config.max_link_distance_m, config.scatter_variance)
    ctx = LaplaceContext.from_config(config, p_ss)
    draws = draws or {"star_intra": 200_000, "chain_intra": 200_000,
                      "star_inter": 20_000, "chain_inter": 20_000}
    for kind in KINDS:
        for r in LAPLACE_LINK_DISTANCES:
            s = r ** config.pathloss_exponent / config.device_power_w
            a = laplace_transform(kind, s, ctx, s_r=LAPLACE_CHAIN_OFFSET)
            e, se = empirical_laplace(s, kind, config, draws[kind], seed, s_r=LAPLACE_CHAIN_OFFSET,
                                      p_ss=p_ss)
            band = tol["sigma_multiple"] * se
            out.append(Check(3, f"{kind}(link {r:g} m)", a, e, f"+-{band:.3g}", abs(a - e) <= band))
    return out


# Criterion 4 ---------------------------------------------------------------

OUTAGE_THRESHOLDS = (10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)


def outage_config(base, s_th):
    return base.with_(devices_per_cluster=25, scatter_variance=100.0, parent_density=20.0,
                      sir_threshold_db=0.0, max_link_distance_m=s_th)


def criterion_4(base, trials, seed, tol):
    out = []
    for s_th in OUTAGE_THRESHOLDS:
        config = outage_config(base, s_th)
        stats = motif_statistics(config, with_z=False)
        ctx = LaplaceContext.from_config(config, stats.p_ss)
        a_star = outage_star(config.sir_threshold, ctx)
        a_chain = outage_chain_uncorrelated(config.sir_threshold, ctx)
        sim = simulate(config, trials, seed).report
        out.append(Check(4, f"star outage s_th={s_th:g}", a_star, sim.outage_star,
                         f"+-{tol['outage_star_abs']:g}",
                         abs(a_star - sim.outage_star) <= tol["outage_star_abs"]))
        gap = a_chain - sim.outage_chain
        out.append(Check(4, f"chain outage s_th={s_th:g} (gap {gap:+.4f})", a_chain,
                         sim.outage_chain, f"+-{tol['outage_chain_abs']:g}",
                         abs(gap) <= tol["outage_chain_abs"]))
    return out


# Criterion 5 ---------------------------------------------------------------

Z_VARIANCES = (50.0, 75.0, 100.0, 125.0, 150.0)
Z_SETTING = {"devices_per_cluster": 100, "max_link_distance_m": 20.0}


def criterion_5(base, trials, seed, tol):
    zs = [motif_statistics(base.with_(scatter_variance=v, **Z_SETTING)) for v in Z_VARIANCES]
    star = [s.z_star for s in zs]
    chain = [s.z_chain for s in zs]
    out = []
    for name, seq in (("z_star", star), ("z_chain", chain)):
        ok = all(b < a for a, b in zip(seq, seq[1:]))
        out.append(Check(5, f"{name} strictly decreasing over sigma2", seq[0], seq[-1],
                         "strict decrease", ok))
    for v, s in zip(Z_VARIANCES, zs):
        out.append(Check(5, f"z_chain > z_star at sigma2={v:g}", s.z_star, s.z_chain,
                         "chain above star", s.z_chain > s.z_star))
    return out


# Criterion 6 ---------------------------------------------------------------

UNIMODAL_THRESHOLDS = tuple(float(s) for s in range(5, 55, 5))
OPTIMUM_Z_CHAIN_BAND = (21.71, 21.92)


def unimodal_sweep(base, trials, seed):
    rows = []
    for s_th in UNIMODAL_THRESHOLDS:
        config = base.with_(parent_density=10.0, scatter_variance=100.0, devices_per_cluster=50,
                            max_link_distance_m=s_th)
        stats = motif_statistics(config)
        sim = simulate(config, trials, seed).report
        rows.append((s_th, stats.z_star, stats.z_chain, sim.e_avg))
    return rows


def criterion_6(base, trials, seed, tol):
    rows = unimodal_sweep(base, trials, seed)
    out = []
    for axis, name in ((1, "z_star"), (2, "z_chain")):
        ordered = sorted(rows, key=lambda r: r[axis])
        rates = [r[3] for r in ordered]
        out.append(Check(6, f"E_R unimodal along {name}", ordered[0][axis], ordered[-1][axis],
                         f"{tol['unimodal_step_rel']:g} per step",
                         is_unimodal(rates, tol["unimodal_step_rel"])))
    best = max(rows, key=lambda r: r[3])
    lo = OPTIMUM_Z_CHAIN_BAND[0] * (1.0 - tol["z_band_rel"])
    hi = OPTIMUM_Z_CHAIN_BAND[1] * (1.0 + tol["z_band_rel"])
    out.append(Check(6, f"z_chain at throughput optimum (s_th={best[0]:g})", best[2],
                     0.5 * (OPTIMUM_Z_CHAIN_BAND[0] + OPTIMUM_Z_CHAIN_BAND[1]), f"[{lo:.4g}, {hi:.4g}]",
                     lo <= best[2] <= hi))
    return out


# Criterion 7 ---------------------------------------------------------------

DENSITIES = (5.0, 10.0, 20.0)


def criterion_7(base, trials, seed, tol):
    out = []
    cfg = base.with_(scatter_variance=100.0, devices_per_cluster=50)
    for s_th in (5.0, 10.0):
        lo = analytic_report(cfg.with_(parent_density=5.0, max_link_distance_m=s_th)).e_avg
        hi = analytic_report(cfg.with_(parent_density=20.0, max_link_distance_m=s_th)).e_avg
        out.append(Check(7, f"E_R(lambda=5) > E_R(lambda=20) at s_th={s_th:g}", lo, hi,
                         "strictly greater", lo > hi))
    for s_th in (30.0, 40.0, 50.0):
        values = [analytic_report(cfg.with_(parent_density=d, max_link_distance_m=s_th)).e_avg
                  for d in DENSITIES]
        spread = (max(values) - min(values)) / max(values)
        out.append(Check(7, f"E_R spread over lambda at s_th={s_th:g}", min(values), max(values),
                         f"rel {tol['lambda_rel']:g}", spread <= tol["lambda_rel"]))
    return out


# Criterion 8 ---------------------------------------------------------------

BETAS = (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8)


def d2d_side_mean(report):
    """Mean throughput over devices served by D2D links."""
    s = report.stats
    receivers = 2.0 * s.c_o_star + 2.0 * s.c_o_chain
    if receivers == 0:
        return 0.0
    total = (2.0 * s.c_o_star * report.e_star
             + s.c_o_chain * (report.e_chain_first + report.e_chain_second))
    return total / receivers


def criterion_8(base, trials, seed, tol):
    cfg = base.with_(scatter_variance=100.0, max_link_distance_m=15.0, parent_density=10.0,
                     devices_per_cluster=50)
    reports = [analytic_report(cfg.with_(d2d_fraction=b)) for b in BETAS]
    d2d = [d2d_side_mean(r) for r in reports]
    cell = [r.e_seeding for r in reports]
    return [
        Check(8, "D2D-side mean nondecreasing in beta", d2d[0], d2d[-1], "nondecreasing",
              all(b >= a for a, b in zip(d2d, d2d[1:]))),
        Check(8, "seeding-side mean nonincreasing in beta", cell[0], cell[-1], "nonincreasing",
              all(b <= a for a, b in zip(cell, cell[1:]))),
    ]


# Criterion 9 ---------------------------------------------------------------

def seeding_rate_samples(config, n, rng):
    """Rates of devices at a uniform parent in the square plus Gaussian scatter, BS at the origin."""
    L = config.region_half_width_m
    parent = rng.uniform(-L, L, size=(n, 2))
    device = parent + rng.normal(0.0, math.sqrt(config.scatter_variance), size=(n, 2))
    r = np.hypot(device[:, 0], device[:, 1])
    h = rng.exponential(1.0, size=n)
    snr = config.bs_power_w * h * r ** (-config.pathloss_exponent) / config.cellular_noise_power_w
    return config.cellular_bandwidth_hz * np.log2(1.0 + snr)


def criterion_9(base, trials, seed, tol, samples=1_000_000):
    config = base
    p_ss = joint_motif_probability(config.max_link_distance_m, config.scatter_variance)
    ctx = LaplaceContext.from_config(config, p_ss)
    a = expected_throughput_seeding(ctx)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(9, 0)))
    mc = float(np.mean(seeding_rate_samples(config, samples, rng)))
    rel = abs(a - mc) / mc
    return [Check(9, "seeding throughput", a, mc, f"rel {tol['seeding_rel']:g}",
                  rel <= tol["seeding_rel"])]


# Criterion 10 --------------------------------------------------------------

TIGHT = QuadratureSpec(relative_tolerance=1e-12, absolute_tolerance=1e-14, max_subdivisions=2000)


def bs_distance_mass(half_width):
    """Total mass of the square-distance density; the corner part uses
    ``z = L / cos(t)``, which removes the square-root kink at ``z = L``."""
    L = half_width
    disk = integrate(lambda z: bs_distance_pdf(z, L), 0.0, L, TIGHT)[0]

    def corner(t):
        c = np.cos(t)
        return bs_distance_pdf(L / c, L) * L * np.sin(t) / (c * c)

    return disk + integrate(corner, 0.0, math.pi / 4.0, TIGHT)[0]


def normalization_errors(variance=100.0, half_width=500.0):
    sd = math.sqrt(variance)
    errs = {}
    errs["rayleigh"] = integrate(lambda d: rayleigh_pdf(d, variance), 0.0, math.inf, TIGHT,
                                 scale=sd)[0] - 1.0
    for s in (0.0, sd, 3.0 * sd, 5.0 * sd):
        # Split at the mode so the bulk is resolved before the tail map takes over.
        hi = s + 40.0 * sd
        body = integrate(lambda d: rician_pdf(d, s, variance), 0.0, hi, TIGHT)[0]
        tail = integrate(lambda d: rician_pdf(d, s, variance), hi, math.inf, TIGHT, scale=sd)[0]
        errs[f"rician(s={s:g})"] = body + tail - 1.0
    errs["bs_distance"] = bs_distance_mass(half_width) - 1.0
    return errs


def transform_shape_ok(ctx):
    ok = True
    loads = np.concatenate([[0.0], np.geomspace(1e-12, 1e-2, 25)]) / ctx.transmit_power_w * 1e6
    for kind in KINDS:
        values = np.array([laplace_transform(kind, s, ctx, s_r=LAPLACE_CHAIN_OFFSET) for s in loads])
        ok &= values[0] == 1.0 and bool(np.all(np.diff(values) < 0))
    return ok


def exit_code_table():
    """Run the command line on inputs that trigger each error class."""
    import contextlib
    import io
    import os
    import tempfile

    from .cli import main

    cases = {
        "generic": ("bogus_key = 1\n", ["analytic"], 1),
        "no motif": ("devices_per_cluster = 2\n", ["analytic"], 2),
        "invalid regime": ("devices_per_cluster = 6\n", ["analytic"], 3),
        "convergence": ("max_link_distance_m = 0.001\nparent_density_per_km2 = 1e-9\n",
                        ["analytic"], 4),
        "validation": ("", ["validate", "--quick", "--tolerance-scale", "0"], 5),
    }
    results = {}
    with tempfile.TemporaryDirectory() as tmp:
        for name, (text, args, expected) in cases.items():
            path = os.path.join(tmp, f"{name.replace(' ', '_')}.cfg")
            with open(path, "w") as fh:
                fh.write(text)
            sink = io.StringIO()
            with contextlib.redirect_stdout(sink), contextlib.redirect_stderr(sink):
                code = main(args + ["--config", path])
            results[name] = (code, expected)
    return results


def criterion_10(base, trials, seed, tol):
    import io

    from .report import report_row, write_rows

    out = []
    for name, err in normalization_errors(base.scatter_variance, base.region_half_width_m).items():
        out.append(Check(10, f"normalization {name}", 1.0 + err, 1.0,
                         f"+-{tol['normalization_abs']:g}", abs(err) <= tol["normalization_abs"]))
    p_ss = joint_motif_probability(base.max_link_distance_m, base.scatter_variance)
    ctx = LaplaceContext.from_config(base, p_ss)
    out.append(Check(10, "transforms equal 1 at s=0 and strictly decrease", 1.0, 1.0,
                     "exact", transform_shape_ok(ctx)))

    def csv_bytes():
        buf = io.StringIO()
        write_rows([report_row(base, simulate(base, 20, seed).report, "simulated")], buf)
        return buf.getvalue().encode()

    first, second = csv_bytes(), csv_bytes()
    out.append(Check(10, "identical seeds give identical CSV bytes", len(first), len(second),
                     "byte equal", first == second))
    for name, (code, expected) in exit_code_table().items():
        out.append(Check(10, f"exit code for {name}", expected, code, "equal", code == expected))
    return out


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
}
QUICK_CRITERIA = (1, 2)


def criterion_trials(number, trials):
    """Criterion 4 uses the full trial count; the throughput sweep a tenth of it."""
    if number == 6:
        return max(100, trials // 10)
    return trials


def run_validate(config, trials, seed, tolerance=None, quick=False, criteria=None, log=None):
    """Run the selected criteria; ``log`` receives each line as it is produced."""
    tol = tolerance or tolerances()
    selected = criteria or (QUICK_CRITERIA if quick else tuple(CRITERIA))
    checks = []
    for number in selected:
        start = time.perf_counter()
        rows = CRITERIA[number](config, criterion_trials(number, trials), seed, tol)
        elapsed = time.perf_counter() - start
        checks.extend(rows)
        if log:
            for row in rows:
                log(row.line())
            verdict = "PASS" if all(r.passed for r in rows) else "FAIL"
            log(f"criterion {number} ({CRITERIA_TITLES[number]}): {verdict} in {elapsed:.1f} s")
    return checks
