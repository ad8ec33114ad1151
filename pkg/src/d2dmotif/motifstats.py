"""Motif probabilities, expected counts, the rewired-graph baseline and Z-scores."""

import math
from dataclasses import dataclass, fields

from .errors import (ConvergenceError, DomainError, InvalidRegimeError, NoMotifError,
                     UndefinedZError)
from .specfun import SeriesControl, regularized_lower_gamma

# Correlation between the two hub-peer offsets; both share the hub's own offset.
LINK_CORRELATION = 0.5

CLAMP_SLACK = 1e-9


@dataclass(frozen=True)
class MotifStatistics:
    p_ss: float
    c_o: float
    c_o_star: float
    c_o_chain: float
    p_r: float
    c_r_star: float
    c_r_chain: float
    eps_star: float
    eps_chain: float
    z_star: float = math.nan
    z_chain: float = math.nan

    @classmethod
    def columns(cls):
        return [f.name for f in fields(cls)]

    def as_row(self):
        return [getattr(self, name) for name in self.columns()]


def joint_motif_probability(s_th, variance, control=None):
    """Probability that a hub reaches both of its peers within ``s_th``.

    Each term of the series is a squared regularized incomplete gamma weighted
    by a power of the link correlation.
    """
    control = control or SeriesControl()
    if not (s_th > 0 and math.isfinite(s_th)):
        raise DomainError(f"s_th must be positive and finite, got {s_th}")
    if not (variance > 0 and math.isfinite(variance)):
        raise DomainError(f"variance must be positive and finite, got {variance}")
    rho2 = LINK_CORRELATION * LINK_CORRELATION
    # Each hub-peer vector has per-axis variance 2 * variance.
    x = s_th * s_th / (4.0 * variance * (1.0 - rho2))
    total = 0.0
    for k in range(control.max_terms):
        # gamma(1+k, x)/k! is the regularized P(1+k, x). Later terms shrink by
        # at least rho2 each, so the tail is below a third of the current term.
        term = (LINK_CORRELATION ** k * regularized_lower_gamma(1.0 + k, x)) ** 2
        total += term
        if term <= control.relative_tolerance * total:
            break
    else:
        raise ConvergenceError(
            f"joint motif series did not converge in {control.max_terms} terms "
            f"(s_th={s_th}, variance={variance})"
        )
    value = (1.0 - rho2) * total
    if value > 1.0:
        if value - 1.0 >= CLAMP_SLACK:
            raise ConvergenceError(f"joint motif probability overshoots 1 by {value - 1.0:.3g}")
        value = 1.0
    return value


def expected_occurrences(n_devices, p_ss, theta):
    if n_devices < 3:
        raise NoMotifError(f"n_devices={n_devices} leaves no three-device group")
    _check_probability("p_ss", p_ss)
    if not 0.0 < theta < 1.0:
        raise DomainError(f"theta must lie in (0, 1), got {theta}")
    n_m = n_devices // 3
    c_o = n_m * p_ss
    return c_o, theta * c_o, (1.0 - theta) * c_o


def baseline_link_probability(p_ss, n_m):
    _check_probability("p_ss", p_ss)
    if n_m < 2:
        raise InvalidRegimeError(f"baseline needs at least two groups, got n_m={n_m}")
    p_r = 4.0 * p_ss / (n_m - 1)
    if p_r > 1.0:
        raise InvalidRegimeError(
            f"baseline link probability {p_r:.6g} exceeds 1 (p_ss={p_ss}, n_m={n_m})"
        )
    return p_r


STD_FORMS = ("binomial", "printed")


def baseline_stats(p_ss, n_m, theta, std_form="binomial"):
    """Mean and standard deviation of star and chain counts in the rewired graph.

    The mean counts a Binomial(n_m, P) variable with
    ``P = 3 * theta' * p_r**2 * (1 - p_r)``. ``std_form="binomial"`` uses its
    standard deviation ``sqrt(mean * (1 - P))``; ``"printed"`` uses
    ``sqrt(mean * (1 - mean))``, which is only defined while the mean is at
    most one.
    """
    if std_form not in STD_FORMS:
        raise DomainError(f"unknown std_form {std_form!r}")
    p_r = baseline_link_probability(p_ss, n_m)
    out = []
    for share in (theta, 1.0 - theta):
        mean = _baseline_mean(p_ss, n_m, share)
        per_group = 3.0 * share * p_r * p_r * (1.0 - p_r)
        if std_form == "binomial":
            radicand = mean * (1.0 - per_group)
        else:
            radicand = mean * (1.0 - mean)
        if radicand < 0:
            raise InvalidRegimeError(
                f"baseline variance radicand {radicand:.6g} < 0 "
                f"(p_ss={p_ss}, n_m={n_m}, share={share:.6g}, mean={mean:.6g})"
            )
        out.append((mean, math.sqrt(radicand)))
    (c_star, eps_star), (c_chain, eps_chain) = out
    return c_star, c_chain, eps_star, eps_chain


def _baseline_mean(p_ss, n_m, share):
    m1 = n_m - 1
    return 48.0 * share * n_m * p_ss * p_ss * (m1 - 4.0 * p_ss) / m1 ** 3


def z_scores(stats):
    if not stats.eps_star > 0 or not stats.eps_chain > 0:
        raise UndefinedZError(
            f"baseline standard deviation is zero (eps_star={stats.eps_star}, "
            f"eps_chain={stats.eps_chain})"
        )
    return ((stats.c_o_star - stats.c_r_star) / stats.eps_star,
            (stats.c_o_chain - stats.c_r_chain) / stats.eps_chain)


def motif_statistics(config, control=None, std_form="binomial", with_z=True):
    """Full pipeline from a ``NetworkConfig`` to a filled ``MotifStatistics``."""
    n_m = config.require_motifs()
    p_ss = joint_motif_probability(config.max_link_distance_m, config.scatter_variance, control)
    c_o, c_o_star, c_o_chain = expected_occurrences(
        config.devices_per_cluster, p_ss, config.star_fraction)
    p_r = baseline_link_probability(p_ss, n_m)
    c_r_star, c_r_chain, eps_star, eps_chain = baseline_stats(
        p_ss, n_m, config.star_fraction, std_form)
    stats = MotifStatistics(p_ss, c_o, c_o_star, c_o_chain, p_r,
                            c_r_star, c_r_chain, eps_star, eps_chain)
    if not with_z:
        return stats
    z_star, z_chain = z_scores(stats)
    return MotifStatistics(p_ss, c_o, c_o_star, c_o_chain, p_r,
                           c_r_star, c_r_chain, eps_star, eps_chain, z_star, z_chain)


def _check_probability(name, value):
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")
