"""Command line front end: named experiments in, deterministic CSVs out.

Every command reads one scenario config (JSON) and writes fixed-header CSV
files into --out. Identical config and seed give byte-identical files.
Exit codes: 0 success, 2 config problem, 3 infeasible scenario.
"""

import argparse
import os
import sys

import numpy as np

from . import hybrid, pairing, sweeps
from .arrays import ArrayGeometry, UserSpec, pattern, sample_channel
from .beam_design import BeamTarget, cm_optimize_multibeam
from .config import ScenarioConfig, UserConfig, from_dict, load_config
from .errors import ConfigError, InfeasibleScenarioError, SearchSpaceError

COMMANDS = ("sweep-snr", "sweep-beta", "sweep-gain",
            "pairing-demo", "hybrid-demo", "design-beam")

DEFAULT_TWO_USER = {
    "users": [
        {"avg_power_db": 6.0, "direction_cos": 0.0},
        {"avg_power_db": 0.0, "direction_cos": 0.3},
    ],
}

# two strong users near broadside plus two weak users out wide
DEFAULT_FOUR_USER = {
    "users": [
        {"avg_power_db": 8.0, "direction_cos": -0.05},
        {"avg_power_db": 7.0, "direction_cos": 0.10},
        {"avg_power_db": 0.0, "direction_cos": -0.70},
        {"avg_power_db": 1.0, "direction_cos": 0.65},
    ],
}


def default_config(command: str) -> ScenarioConfig:
    base = DEFAULT_TWO_USER if command.startswith("sweep") else DEFAULT_FOUR_USER
    return from_dict(dict(base))


def _channels(config: ScenarioConfig, seed: int):
    out = {}
    for uid, user in enumerate(config.users):
        spec = UserSpec(uid, user.direction_cos, user.avg_power)
        out[uid] = sample_channel(spec, [seed, uid])
    return out


def _total_power(config: ScenarioConfig) -> float:
    return 10.0 ** (config.snr_db / 10.0) * config.noise_power


def _plan_rows(plan_id, plan):
    rows = []
    for gid, ev in enumerate(plan.evals):
        rows.append((
            plan_id, gid,
            ";".join(str(u) for u in ev.user_ids),
            ";".join(sweeps.format_value(w) for w in ev.widths),
            ";".join(sweeps.format_value(g) for g in ev.gains),
            plan.objective,
        ))
    return rows


def _run_pairing_demo(config, out_dir, seed):
    channels = _channels(config, seed)
    instance = pairing.PairingInstance(
        users=tuple(channels[u] for u in sorted(channels)),
        geom=ArrayGeometry(config.n_antennas),
        beam_style="multi",
        realization=config.beam_mode,
        group_power=_total_power(config),
        noise_power=config.noise_power,
        power_split=config.power_split,
    )
    best = pairing.exhaustive_pairing(instance)
    heur = pairing.strong_weak_heuristic(instance)
    merged = pairing.angle_merge(instance, best)
    rows = (_plan_rows("exhaustive", best) + _plan_rows("strong_weak", heur)
            + _plan_rows("merged", merged))
    path = os.path.join(out_dir, "pairing_plans.csv")
    sweeps.write_csv(path, ["plan_id", "group_id", "user_ids", "beam_width",
                            "beam_gains", "objective"], rows)
    return [path]


def _hybrid_rows(config_h, channels, report, interference):
    rows = []
    for chain in config_h.chains:
        for uid in chain.group.user_ids():
            rows.append((config_h.mode, chain.chain_id, uid,
                         report.rate_of(uid), interference.get(uid, 0.0)))
    return rows


def _run_hybrid_demo(config, out_dir, seed, ignore_mui):
    channels = _channels(config, seed)
    if len(channels) < 2:
        raise ConfigError("hybrid-demo needs at least two users")
    geom = ArrayGeometry(config.n_antennas)
    instance = pairing.PairingInstance(
        users=tuple(channels[u] for u in sorted(channels)),
        geom=geom, beam_style="multi", realization=config.beam_mode,
        group_power=_total_power(config), noise_power=config.noise_power,
        power_split=config.power_split,
    )
    plan = pairing.strong_weak_heuristic(instance)
    p_chain = _total_power(config) / len(plan.groups)
    chains = [hybrid.design_chain(geom, cid, group, channels, p_chain,
                                  config.noise_power, config.power_split)
              for cid, group in enumerate(plan.groups)]

    cfg1 = hybrid.HybridConfig(mode=1, chains=tuple(chains))
    mui = hybrid.mode1_interference(cfg1, channels)
    on = hybrid.mode1_evaluate(cfg1, channels, config.noise_power,
                               ignore_mui=ignore_mui)
    off = hybrid.mode1_evaluate(cfg1, channels, config.noise_power, ignore_mui=True)
    zero = {uid: 0.0 for uid in mui}

    cfg2 = hybrid.HybridConfig(mode=2, chains=tuple(chains),
                               digital_precoder="zero_forcing")
    two = hybrid.mode2_evaluate(cfg2, channels, config.noise_power)
    mui2 = hybrid.mode2_interference(cfg2, channels)

    header = ["mode", "chain_id", "user_id", "rate", "mui_power"]
    paths = []
    for name, rows in (
            ("hybrid_mode1.csv", _hybrid_rows(cfg1, channels, on,
                                              zero if ignore_mui else mui)),
            ("hybrid_mode1_nomui.csv", _hybrid_rows(cfg1, channels, off, zero)),
            ("hybrid_mode2.csv", _hybrid_rows(cfg2, channels, two, mui2))):
        path = os.path.join(out_dir, name)
        sweeps.write_csv(path, header, rows)
        paths.append(path)
    return paths


def _run_design_beam(config, out_dir, grid):
    geom = ArrayGeometry(config.n_antennas)
    share = geom.n_antennas / len(config.users)
    targets = [BeamTarget(u.direction_cos, share) for u in config.users]
    result = cm_optimize_multibeam(geom, targets)

    weights_path = os.path.join(out_dir, "design_weights.csv")
    sweeps.write_csv(weights_path, ["index", "phase_rad"],
                     [(i, float(np.angle(w))) for i, w in enumerate(result.awv.weights)])
    targets_path = os.path.join(out_dir, "design_targets.csv")
    sweeps.write_csv(targets_path, ["phi", "target_gain", "achieved_gain"],
                     list(zip(result.directions, result.target_gains,
                              result.achieved_gains)))
    phis, gains = pattern(result.awv, grid)
    floor = np.maximum(gains, 1e-30)
    pattern_path = os.path.join(out_dir, "design_pattern.csv")
    sweeps.write_csv(pattern_path, ["phi", "gain_linear", "gain_db"],
                     list(zip(phis, gains, 10.0 * np.log10(floor))))
    return [weights_path, targets_path, pattern_path]


def run_named(command: str, config: ScenarioConfig, out_dir: str,
              seed=None, ignore_mui: bool = False, grid: int = 1024):
    """Run one named experiment; returns the list of files written."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; choose from {COMMANDS}")
    os.makedirs(out_dir, exist_ok=True)
    seed = config.seed if seed is None else int(seed)

    if command == "sweep-snr":
        header, rows = sweeps.sweep_snr(config)
        path = os.path.join(out_dir, "snr_sweep.csv")
        sweeps.write_csv(path, header, rows)
        return [path]
    if command == "sweep-beta":
        header, rows = sweeps.sweep_beta(config)
        path = os.path.join(out_dir, "beta_sweep.csv")
        sweeps.write_csv(path, header, rows)
        return [path]
    if command == "sweep-gain":
        header, rows = sweeps.sweep_gain(config)
        path = os.path.join(out_dir, "gain_sweep.csv")
        sweeps.write_csv(path, header, rows)
        return [path]
    if command == "pairing-demo":
        return _run_pairing_demo(config, out_dir, seed)
    if command == "hybrid-demo":
        return _run_hybrid_demo(config, out_dir, seed, ignore_mui)
    return _run_design_beam(config, out_dir, grid)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmwave-noma",
        description="mmWave NOMA experiments: rate sweeps, pairing, hybrid modes, beam design.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="scenario config JSON (defaults per command)")
    parser.add_argument("--out", default=".", help="output directory for CSV files")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--ignore-mui", action="store_true",
                        help="evaluate hybrid mode 1 without inter-chain interference")
    parser.add_argument("--grid", type=int, default=1024,
                        help="pattern grid size for design-beam")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is None:
            config = default_config(args.command)
        else:
            config = load_config(args.config)
        written = run_named(args.command, config, args.out, seed=args.seed,
                            ignore_mui=args.ignore_mui, grid=args.grid)
    except (ConfigError, SearchSpaceError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleScenarioError as exc:
        print(f"infeasible scenario: {exc}", file=sys.stderr)
        return 3
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
