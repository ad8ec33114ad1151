"""Laplace transforms of intra- and inter-cluster D2D interference.

Every transform is a function of ``s * P_t`` only, called the load ``Q``
below: an interferer at distance ``v`` with unit-mean exponential fade
contributes the factor ``1 / (1 + Q v**-alpha)``. Each of the potential
interferers is active independently with the joint motif probability.

:class:`LaplaceTable` tabulates ``log(-log L)`` against ``log Q`` so the
success-probability and rate integrals can evaluate the transforms at
thousands of loads cheaply.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline, RectBivariateSpline

from .errors import DivergentIntegralError, DomainError
from .pointprocess import rayleigh_pdf, rician_pdf
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate

KINDS = ("star_intra", "star_inter", "chain_intra", "chain_inter")

# Standardized half-width of the window used for Rician inner integrals.
RICIAN_WINDOW = 12.0


@dataclass(frozen=True)
class LaplaceContext:
    config: object
    p_ss: float
    n_m: int
    transmit_power_w: float

    def __post_init__(self):
        if not 0.0 <= self.p_ss <= 1.0:
            raise DomainError(f"p_ss must lie in [0, 1], got {self.p_ss}")
        if self.n_m < 1:
            raise DomainError(f"n_m must be at least 1, got {self.n_m}")
        if self.n_m != self.config.n_motifs:
            raise DomainError(f"n_m={self.n_m} disagrees with the config ({self.config.n_motifs})")
        if not self.transmit_power_w > 0:
            raise DomainError("transmit_power_w must be positive")

    @classmethod
    def from_config(cls, config, p_ss):
        return cls(config, p_ss, config.require_motifs(), config.device_power_w)

    @property
    def alpha(self):
        return self.config.pathloss_exponent

    @property
    def variance(self):
        return self.config.scatter_variance

    @property
    def density(self):
        return self.config.parent_density_m2

    def distance_variance(self, kind):
        """Per-axis variance of the interferer-distance law for each transform."""
        v = self.variance
        return {"star_intra": 2.0 * v, "star_inter": 3.0 * v,
                "chain_intra": v, "chain_inter": v}[kind]


def _inner_tolerance(q):
    return QuadratureSpec(
        relative_tolerance=q.relative_tolerance * 0.1,
        absolute_tolerance=min(q.absolute_tolerance, 1e-14),
        max_subdivisions=max(q.max_subdivisions, 400),
        semi_infinite_map=q.semi_infinite_map,
        mc_samples=q.mc_samples,
    )


def _as_loads(s, ctx):
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise DomainError("s must be finite and nonnegative")
    return s * ctx.transmit_power_w


def _blocked(v, loads, alpha):
    # Q / (Q + v^alpha): the probability-like deficit one interferer causes.
    va = np.power(v, alpha)
    return loads[None, :] / (loads[None, :] + va[:, None])


def rayleigh_deficit(loads, variance, alpha, q):
    """``1 - E[1 / (1 + Q V**-alpha)]`` with ``V`` Rayleigh, for each load."""
    loads = np.asarray(loads, dtype=float)
    out = np.zeros_like(loads)
    pos = loads > 0
    if not np.any(pos):
        return out
    lp = loads[pos]
    value, _ = integrate(lambda v: rayleigh_pdf(v, variance)[:, None] * _blocked(v, lp, alpha),
                         0.0, np.inf, _inner_tolerance(q), scale=math.sqrt(variance),
                         initial_panels=8)
    out[pos] = value
    return out


def rician_deficit(load, centres, variance, alpha, q):
    """``1 - E[1 / (1 + Q V**-alpha)]`` with ``V`` Rician about each centre."""
    centres = np.asarray(centres, dtype=float)
    sd = math.sqrt(variance)
    lower = np.maximum(-centres / sd, -RICIAN_WINDOW)
    span = RICIAN_WINDOW - lower

    def integrand(u):
        x = lower[None, :] + span[None, :] * u[:, None]
        v = centres[None, :] + sd * x
        va = np.power(v, alpha)
        dens = rician_pdf(v, centres[None, :], variance)
        return dens * (load / (load + va)) * (sd * span[None, :])

    value, _ = integrate(integrand, 0.0, 1.0, _inner_tolerance(q), initial_panels=8)
    return np.clip(value, 0.0, 1.0)


def intra_log(deficit, p_ss, exponent):
    """``log L`` for ``exponent`` independently thinned interferers."""
    return exponent * np.log1p(-p_ss * np.asarray(deficit))


def laplace_star_intra(s, ctx, q=DEFAULT_SPEC):
    loads = _as_loads(s, ctx)
    d = rayleigh_deficit(loads, ctx.distance_variance("star_intra"), ctx.alpha, q)
    return _shape_like(s, np.exp(intra_log(d, ctx.p_ss, ctx.n_m - 1)))


def laplace_chain_intra(s, s_r, ctx, q=DEFAULT_SPEC):
    if not (s_r >= 0 and math.isfinite(s_r)):
        raise DomainError("s_r must be finite and nonnegative")
    loads = _as_loads(s, ctx)
    variance = ctx.distance_variance("chain_intra")
    out = np.zeros_like(loads)
    for i, load in enumerate(loads):
        if load > 0:
            out[i] = rician_deficit(load, np.array([s_r]), variance, ctx.alpha, q)[0]
    return _shape_like(s, np.exp(intra_log(out, ctx.p_ss, ctx.n_m - 1)))


def laplace_star_inter(s, ctx, q=DEFAULT_SPEC):
    return _shape_like(s, np.exp(-_inter_exponent(_as_loads(s, ctx), ctx, "star_inter", q)))


def laplace_chain_inter(s, ctx, q=DEFAULT_SPEC):
    return _shape_like(s, np.exp(-_inter_exponent(_as_loads(s, ctx), ctx, "chain_inter", q)))


def _shape_like(s, values):
    return float(values[0]) if np.ndim(s) == 0 else values


def _inter_exponent(loads, ctx, kind, q):
    """``-log L`` of the other-cluster interference for each load."""
    variance = ctx.distance_variance(kind)
    out = np.zeros_like(loads)
    if ctx.p_ss == 0.0:
        return out
    for i, load in enumerate(loads):
        if load > 0:
            out[i] = _inter_exponent_one(load, variance, ctx, q)
    return out


def _inter_exponent_one(load, variance, ctx, q):
    alpha, p, n = ctx.alpha, ctx.p_ss, ctx.n_m
    scale = math.sqrt(variance) + load ** (1.0 / alpha)

    # The other-cluster integrand only decays if a far cluster stops blocking.
    far = np.array([1e3, 1e4]) * scale
    deficit_far = rician_deficit(load, far, variance, alpha, q)
    if not (deficit_far[1] < deficit_far[0] < 1e-6):
        raise DivergentIntegralError(
            f"inter-cluster integrand does not decay (load={load:.6g})")

    def integrand(t):
        d = rician_deficit(load, t, variance, alpha, q)
        return -np.expm1(n * np.log1p(-p * d)) * t

    value, _ = integrate(integrand, 0.0, np.inf, q, scale=scale, initial_panels=8)
    return 2.0 * math.pi * ctx.density * float(value)


def laplace_transform(kind, s, ctx, q=DEFAULT_SPEC, s_r=0.0):
    if kind == "star_intra":
        return laplace_star_intra(s, ctx, q)
    if kind == "star_inter":
        return laplace_star_inter(s, ctx, q)
    if kind == "chain_intra":
        return laplace_chain_intra(s, s_r, ctx, q)
    if kind == "chain_inter":
        return laplace_chain_inter(s, ctx, q)
    raise DomainError(f"unknown interference kind {kind!r}")


class LaplaceTable:
    """Interpolated transforms over a logarithmic load grid.

    Each transform is stored as ``log(-log L)`` against ``log Q``, which is
    close to linear at both ends; beyond the grid the end slopes are used.
    The chain-intra transform is tabulated on an extra axis in ``s_r``.
    """

    def __init__(self, ctx, q=DEFAULT_SPEC, points_per_decade=10, decades=(-12.0, 12.0),
                 chain_offsets=48, kinds=KINDS):
        self.ctx = ctx
        self.q = q
        unit = ctx.variance ** (ctx.alpha / 2.0)
        lo, hi = decades
        n = int(round((hi - lo) * points_per_decade)) + 1
        self.log_loads = np.log(unit) + np.linspace(lo, hi, n) * math.log(10.0)
        loads = np.exp(self.log_loads)
        self.kinds = tuple(kinds)
        self._curves = {}
        self.trivial = ctx.p_ss == 0.0
        if self.trivial:
            return
        for kind in self.kinds:
            if kind == "star_intra":
                d = rayleigh_deficit(loads, ctx.distance_variance(kind), ctx.alpha, q)
                self._curves[kind] = self._fit(-intra_log(d, ctx.p_ss, ctx.n_m - 1))
            elif kind in ("star_inter", "chain_inter"):
                self._curves[kind] = self._fit(_inter_exponent(loads, ctx, kind, q))
        if "chain_intra" in self.kinds:
            sd = math.sqrt(ctx.variance)
            # s_r is Rayleigh(variance); 9 sd leaves a tail below 1e-17.
            self.offsets = np.linspace(0.0, 9.0 * sd, chain_offsets)
            grid = np.empty((len(self.offsets), len(loads)))
            for j, load in enumerate(loads):
                d = rician_deficit(load, self.offsets, ctx.distance_variance("chain_intra"),
                                   ctx.alpha, q)
                grid[:, j] = -intra_log(d, ctx.p_ss, ctx.n_m - 1)
            self._chain_grid = np.log(np.maximum(grid, 1e-300))
            self._chain_spline = RectBivariateSpline(self.offsets, self.log_loads,
                                                     self._chain_grid, kx=3, ky=3)
            lo_slope = (self._chain_grid[:, 1] - self._chain_grid[:, 0]) / (
                self.log_loads[1] - self.log_loads[0])
            hi_slope = (self._chain_grid[:, -1] - self._chain_grid[:, -2]) / (
                self.log_loads[-1] - self.log_loads[-2])
            self._chain_slopes = (lo_slope, hi_slope)

    def _fit(self, neg_log):
        y = np.log(np.maximum(neg_log, 1e-300))
        spline = CubicSpline(self.log_loads, y)
        x = self.log_loads
        lo_slope = (y[1] - y[0]) / (x[1] - x[0])
        hi_slope = (y[-1] - y[-2]) / (x[-1] - x[-2])
        return spline, (y[0], lo_slope), (y[-1], hi_slope)

    def neg_log(self, kind, loads):
        """``-log L`` at arbitrary loads (array), excluding the chain-intra kind."""
        loads = np.asarray(loads, dtype=float)
        if self.trivial:
            return np.zeros_like(loads)
        spline, (y0, s0), (y1, s1) = self._curves[kind]
        x = np.log(np.maximum(loads, 1e-300))
        x0, x1 = self.log_loads[0], self.log_loads[-1]
        y = np.where(x < x0, y0 + s0 * (x - x0),
                     np.where(x > x1, y1 + s1 * (x - x1), spline(np.clip(x, x0, x1))))
        return np.where(loads > 0, np.exp(y), 0.0)

    def chain_intra_neg_log(self, loads, offsets):
        """``-log L`` of the chain intra transform; ``loads`` and ``offsets`` broadcast."""
        loads, offsets = np.broadcast_arrays(np.asarray(loads, float), np.asarray(offsets, float))
        if self.trivial:
            return np.zeros(loads.shape)
        x = np.log(np.maximum(loads, 1e-300))
        x0, x1 = self.log_loads[0], self.log_loads[-1]
        o = np.clip(offsets, self.offsets[0], self.offsets[-1])
        xc = np.clip(x, x0, x1)
        y = self._chain_spline.ev(o, xc)
        lo_slope = np.interp(o, self.offsets, self._chain_slopes[0])
        hi_slope = np.interp(o, self.offsets, self._chain_slopes[1])
        y = y + np.where(x < x0, lo_slope * (x - x0), 0.0) + np.where(x > x1, hi_slope * (x - x1), 0.0)
        return np.where(loads > 0, np.exp(y), 0.0)

    def laplace(self, kind, s, s_r=None):
        loads = np.asarray(s, dtype=float) * self.ctx.transmit_power_w
        if kind == "chain_intra":
            return np.exp(-self.chain_intra_neg_log(loads, 0.0 if s_r is None else s_r))
        return np.exp(-self.neg_log(kind, loads))
