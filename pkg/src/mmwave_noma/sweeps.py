"""Named comparison sweeps over operating points, emitted as CSV tables.

Scheme conventions shared by all sweeps: noise power sigma^2 from the config
(transmission SNR excludes beam gain), the NOMA power split assigns the first
fraction to the stronger user, and the TDMA baseline divides the power budget
equally across users, each transmitting in an equal time slice.
"""

import csv

import numpy as np

from .arrays import ArrayGeometry
from .config import ScenarioConfig, SweepSpec
from .errors import ConfigError
from .ideal_beams import ideal_gain
from .rates import NomaGroup, noma_rates, tdma_rates


def format_value(x) -> str:
    """Nine significant digits, the fixed interchange format for all CSVs."""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.9g}"


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(x) for x in row])


def _noma_sum_rate(channel_powers, beam_gains, total_power, split, noise_power):
    """Two-user NOMA sum rate with the (strong, weak) fixed power split."""
    gammas = [h * g / noise_power for h, g in zip(channel_powers, beam_gains)]
    weak = 0 if (gammas[0], 0) <= (gammas[1], 1) else 1
    strong = 1 - weak
    powers = [0.0, 0.0]
    powers[strong] = split[0] * total_power
    powers[weak] = split[1] * total_power
    group = NomaGroup(tuple(zip(range(2), gammas, powers)), total_power)
    return noma_rates(group).sum_rate


def _tdma_sum_rate(channel_powers, n_antennas, total_power, noise_power):
    """Equal time slices, power budget divided equally, full steering gain."""
    k = len(channel_powers)
    gammas = [h * n_antennas / noise_power for h in channel_powers]
    report = tdma_rates(gammas, [1.0 / k] * k, total_power / k)
    return report.sum_rate


def _two_user_powers(config: ScenarioConfig):
    if len(config.users) != 2:
        raise ConfigError("this sweep needs exactly two users")
    return [u.avg_power for u in config.users]


def _beta_channel_powers(beta: float, total: float = 2.0):
    """Channel powers at ratio beta with their sum held fixed."""
    return [total * beta / (1.0 + beta), total / (1.0 + beta)]


def sweep_snr(config: ScenarioConfig):
    """NOMA under one shared flat-top beam of width B versus TDMA, across SNR.

    One row per (SNR point, beam width); widths are the config's multiples of
    the minimal width 2/N. Header: snr_db,B_over_2N,noma_sum_rate,tdma_sum_rate.
    """
    powers = _two_user_powers(config)
    N = config.n_antennas
    sweep = config.sweep or SweepSpec("snr_db", start=0.0, stop=30.0, points=16)
    if sweep.variable != "snr_db":
        raise ConfigError("sweep-snr needs a snr_db sweep")
    rows = []
    for snr_db in sweep.grid():
        p_total = 10.0 ** (snr_db / 10.0) * config.noise_power
        tdma = _tdma_sum_rate(powers, N, p_total, config.noise_power)
        for mult in config.beam_widths_over_min:
            width = mult * 2.0 / N
            gain = ideal_gain(width)
            noma = _noma_sum_rate(powers, [gain, gain], p_total,
                                  config.power_split, config.noise_power)
            rows.append((snr_db, mult, noma, tdma))
    header = ["snr_db", "B_over_2N", "noma_sum_rate", "tdma_sum_rate"]
    return header, rows


def sweep_beta(config: ScenarioConfig):
    """Per-user narrow beams with an equal gain split versus TDMA, across the
    channel-gain ratio. Total channel power is held fixed so only the ratio
    moves. Header: beta,noma_sum_rate,tdma_sum_rate.
    """
    N = config.n_antennas
    sweep = config.sweep or SweepSpec("beta", values=(1.0, 2.0, 4.0, 8.0))
    if sweep.variable != "beta":
        raise ConfigError("sweep-beta needs a beta sweep")
    p_total = 10.0 ** (config.snr_db / 10.0) * config.noise_power
    gain = N / 2.0
    rows = []
    for beta in sweep.grid():
        powers = _beta_channel_powers(beta)
        noma = _noma_sum_rate(powers, [gain, gain], p_total,
                              config.power_split, config.noise_power)
        tdma = _tdma_sum_rate(powers, N, p_total, config.noise_power)
        rows.append((beta, noma, tdma))
    return ["beta", "noma_sum_rate", "tdma_sum_rate"], rows


def sweep_gain(config: ScenarioConfig):
    """Sum rate along the G1 + G2 = N gain-split line at a fixed channel ratio.

    The second user's beam gain G2 runs over the sweep grid (descending by
    default); the first user is the stronger channel by the config's beta.
    Header: g2,noma_sum_rate.
    """
    N = config.n_antennas
    default = tuple(N * f for f in (1 / 2, 3 / 8, 1 / 4, 1 / 8, 1 / 16))
    sweep = config.sweep or SweepSpec("g2", values=default)
    if sweep.variable != "g2":
        raise ConfigError("sweep-gain needs a g2 sweep")
    p_total = 10.0 ** (config.snr_db / 10.0) * config.noise_power
    powers = _beta_channel_powers(config.beta)
    rows = []
    for g2 in sweep.grid():
        if not 0.0 <= g2 <= N:
            raise ConfigError(f"g2 value {g2} outside [0, N]")
        noma = _noma_sum_rate(powers, [N - g2, g2], p_total,
                              config.power_split, config.noise_power)
        rows.append((g2, noma))
    return ["g2", "noma_sum_rate"], rows
