"""CSV rows for analytic and simulated throughput reports."""

import csv
import math

from .motifstats import MotifStatistics

REPORT_COLUMNS = [
    "config_hash", "s_th", "sigma2", "lambda_p", "N", "beta",
    "e_star", "e_chain_first", "e_chain_second", "e_seeding", "e_avg",
    "outage_star", "outage_chain", "outage_chain_corr", "z_star", "z_chain",
    "truncation_bounds", "source",
]
STDERR_KEYS = [
    "e_star", "e_chain_first", "e_chain_second", "e_seeding", "e_avg",
    "outage_star", "outage_chain", "outage_chain_corr", "p_ss",
]
COLUMNS = REPORT_COLUMNS + MotifStatistics.columns() + [f"stderr_{k}" for k in STDERR_KEYS]
SOURCES = ("analytic", "simulated")


def format_value(value):
    """Text and integers verbatim, floats at nine significant digits, absent values empty."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.9g}"


def report_row(config, report, source):
    if source not in SOURCES:
        raise ValueError(f"source must be one of {SOURCES}")
    head = [
        config.config_hash(),
        config.max_link_distance_m,
        config.scatter_variance,
        config.parent_density,
        config.devices_per_cluster,
        config.d2d_fraction,
        report.e_star,
        report.e_chain_first,
        report.e_chain_second,
        report.e_seeding,
        report.e_avg,
        report.outage_star,
        report.outage_chain,
        None if math.isnan(report.outage_chain_correlated) else report.outage_chain_correlated,
        report.z_star,
        report.z_chain,
    ]
    row = [format_value(v) for v in head]
    row.append(";".join(format_value(b) for b in report.truncation_bounds))
    row.append(source)
    stats = report.stats
    row.extend(format_value(v) for v in (stats.as_row() if stats else [None] * len(MotifStatistics.columns())))
    stderr = report.stderr or {}
    row.extend(format_value(stderr.get(k)) for k in STDERR_KEYS)
    return row


def write_rows(rows, stream):
    """Header first, then rows; Unix line endings so bytes match across platforms."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(COLUMNS)
    writer.writerows(rows)
