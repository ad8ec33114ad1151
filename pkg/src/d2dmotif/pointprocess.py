"""Network configuration, Thomas cluster process sampling and distance laws.

Distances are meters and powers watts internally. Cluster densities are
given per km^2 and converted once through ``NetworkConfig.parent_density_m2``.
"""

import configparser
import hashlib
import math
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .errors import DomainError, NoMotifError
from .specfun import i0e_array


def dbm_to_watts(dbm):
    return 10.0 ** ((dbm - 30.0) / 10.0)


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def per_km2_to_per_m2(density):
    return density * 1e-6


# Config file key -> dataclass field. Most keys map to themselves.
_FILE_KEYS = {
    "bs_power_dbm": "bs_power_dbm",
    "device_power_dbm": "device_power_dbm",
    "devices_per_cluster": "devices_per_cluster",
    "scatter_variance_m2": "scatter_variance",
    "parent_density_per_km2": "parent_density",
    "total_bandwidth_hz": "total_bandwidth_hz",
    "d2d_fraction": "d2d_fraction",
    "pathloss_exponent": "pathloss_exponent",
    "sir_threshold_db": "sir_threshold_db",
    "max_link_distance_m": "max_link_distance_m",
    "star_fraction": "star_fraction",
    "region_half_width_m": "region_half_width_m",
    "noise_density_dbm_hz": "noise_density_dbm_hz",
    "guard_margin_m": "guard_margin_m",
}


@dataclass(frozen=True)
class NetworkConfig:
    bs_power_dbm: float = 46.0
    device_power_dbm: float = 23.0
    devices_per_cluster: int = 50
    scatter_variance: float = 100.0
    parent_density: float = 10.0
    total_bandwidth_hz: float = 2e7
    d2d_fraction: float = 0.6
    pathloss_exponent: float = 4.0
    sir_threshold_db: float = 0.0
    max_link_distance_m: float = 20.0
    star_fraction: float = 1.0 / 3.0
    region_half_width_m: float = 500.0
    noise_density_dbm_hz: float = -174.0
    guard_margin_m: float = 200.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise DomainError(f"{f.name} must be finite, got {value}")
        n = self.devices_per_cluster
        if int(n) != n or n < 1:
            raise DomainError(f"devices_per_cluster must be a positive integer, got {n}")
        object.__setattr__(self, "devices_per_cluster", int(n))
        positive = ("scatter_variance", "parent_density", "total_bandwidth_hz",
                    "max_link_distance_m", "region_half_width_m")
        for name in positive:
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("d2d_fraction", "star_fraction"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise DomainError(f"{name} must lie in (0, 1), got {value}")
        if self.pathloss_exponent <= 2:
            raise DomainError(f"pathloss_exponent must exceed 2, got {self.pathloss_exponent}")
        if self.guard_margin_m < 0:
            raise DomainError(f"guard_margin_m must be nonnegative, got {self.guard_margin_m}")

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    @classmethod
    def from_text(cls, text):
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        parser.optionxform = str
        try:
            parser.read_string("[network]\n" + text)
        except configparser.Error as exc:
            raise DomainError(f"malformed config: {exc}") from exc
        values = {}
        for key, raw in parser["network"].items():
            if key not in _FILE_KEYS:
                raise DomainError(f"unknown config key {key!r}")
            try:
                values[_FILE_KEYS[key]] = float(raw)
            except ValueError as exc:
                raise DomainError(f"config key {key!r} is not a number: {raw!r}") from exc
        if "devices_per_cluster" in values:
            n = values["devices_per_cluster"]
            if n != int(n):
                raise DomainError(f"devices_per_cluster must be an integer, got {n}")
            values["devices_per_cluster"] = int(n)
        return cls(**values)

    def to_text(self):
        reverse = {v: k for k, v in _FILE_KEYS.items()}
        return "".join(f"{reverse[k]} = {v!r}\n" for k, v in asdict(self).items())

    def with_(self, **changes):
        return replace(self, **changes)

    @property
    def n_motifs(self):
        """Maximum number of disjoint three-device groups per cluster."""
        return self.devices_per_cluster // 3

    def require_motifs(self):
        if self.devices_per_cluster < 3:
            raise NoMotifError(
                f"devices_per_cluster={self.devices_per_cluster} leaves no three-device group"
            )
        return self.n_motifs

    @property
    def d2d_bandwidth_hz(self):
        return self.d2d_fraction * self.total_bandwidth_hz

    @property
    def cellular_bandwidth_hz(self):
        return (1.0 - self.d2d_fraction) * self.total_bandwidth_hz

    @property
    def bs_power_w(self):
        return dbm_to_watts(self.bs_power_dbm)

    @property
    def device_power_w(self):
        return dbm_to_watts(self.device_power_dbm)

    @property
    def parent_density_m2(self):
        return per_km2_to_per_m2(self.parent_density)

    @property
    def sir_threshold(self):
        return db_to_linear(self.sir_threshold_db)

    @property
    def cellular_noise_power_w(self):
        return dbm_to_watts(self.noise_density_dbm_hz) * self.cellular_bandwidth_hz

    @property
    def d2d_noise_power_w(self):
        return dbm_to_watts(self.noise_density_dbm_hz) * self.d2d_bandwidth_hz

    def config_hash(self):
        return hashlib.sha256(self.to_text().encode("ascii")).hexdigest()[:12]


@dataclass(frozen=True, eq=False)
class NetworkRealization:
    parent_points: np.ndarray  # (n_parents, 2)
    offsets: np.ndarray  # (n_parents, N, 2)
    seed: int

    @property
    def n_parents(self):
        return len(self.parent_points)

    def device_positions(self):
        return self.parent_points[:, None, :] + self.offsets


def _check_variance(variance):
    if not variance > 0:
        raise DomainError(f"variance must be positive, got {variance}")


def _check_nonnegative(name, x):
    if np.any(np.asarray(x) < 0) or not np.all(np.isfinite(x)):
        raise DomainError(f"{name} must be finite and nonnegative")


def rayleigh_pdf(s, variance):
    _check_variance(variance)
    s = np.asarray(s, dtype=float)
    _check_nonnegative("s", s)
    return s / variance * np.exp(-0.5 * s * s / variance)


def rician_pdf(d, s, variance):
    """Density of the distance from a point at range ``s`` to a Gaussian scatter.

    The exponential is merged with the exponentially scaled Bessel factor so
    large ``d * s / variance`` never overflows.
    """
    _check_variance(variance)
    d = np.asarray(d, dtype=float)
    s = np.asarray(s, dtype=float)
    _check_nonnegative("d", d)
    _check_nonnegative("s", s)
    diff = d - s
    return d / variance * np.exp(-0.5 * diff * diff / variance) * i0e_array(d * s / variance)


def bs_distance_cdf(z, half_width):
    """CDF of the distance from the centre of a square of side ``2 * half_width``."""
    if not half_width > 0:
        raise DomainError("half_width must be positive")
    z = np.asarray(z, dtype=float)
    _check_nonnegative("z", z)
    L = float(half_width)
    area = 4.0 * L * L
    zc = np.clip(z, L, math.sqrt(2.0) * L)
    corner = (np.pi * zc * zc - 4.0 * (zc * zc * np.arccos(L / zc) - L * np.sqrt(zc * zc - L * L))) / area
    out = np.where(z <= L, np.pi * z * z / area, corner)
    return np.where(z >= math.sqrt(2.0) * L, 1.0, out)


def bs_distance_pdf(z, half_width):
    if not half_width > 0:
        raise DomainError("half_width must be positive")
    z = np.asarray(z, dtype=float)
    _check_nonnegative("z", z)
    L = float(half_width)
    scale = 2.0 * L * L
    zc = np.clip(z, L, math.sqrt(2.0) * L)
    corner = (np.pi * zc - 4.0 * zc * np.arccos(L / zc)) / scale
    out = np.where(z <= L, np.pi * z / scale, corner)
    return np.where(z > math.sqrt(2.0) * L, 0.0, out)


def sample_tcp(config, guard_margin_m=None, seed=0):
    """Draw parents on the guarded square and ``N`` Gaussian offsets per parent."""
    if guard_margin_m is None:
        guard_margin_m = config.guard_margin_m
    if guard_margin_m < 0:
        raise DomainError("guard_margin_m must be nonnegative")
    rng = np.random.default_rng(seed)
    return _sample_with(config, guard_margin_m, rng, seed)


def _sample_with(config, guard_margin_m, rng, seed):
    half = config.region_half_width_m + guard_margin_m
    mean = config.parent_density_m2 * (2.0 * half) ** 2
    n = rng.poisson(mean)
    parents = rng.uniform(-half, half, size=(n, 2))
    offsets = rng.normal(0.0, math.sqrt(config.scatter_variance),
                         size=(n, config.devices_per_cluster, 2))
    return NetworkRealization(parents, offsets, seed)
