"""End-to-end acceptance checks.

Each test prints one PASS/FAIL line; tolerances and runtime budgets are fixed
here, not tuned elsewhere. Run with ``pytest -s tests/test_acceptance.py`` to
see the per-criterion lines.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from mmwave_noma.allocation import (
    AllocationProblem,
    alternating_optimize,
    brute_force_alloc_oracle,
    joint_power_gain_2user,
)
from mmwave_noma.arrays import ArrayGeometry, Awv, ChannelState, average_gain
from mmwave_noma.beam_design import (
    BeamTarget,
    cm_optimize_multibeam,
    exhaustive_cm_oracle,
    subarray_multibeam,
)
from mmwave_noma.config import from_dict
from mmwave_noma.hybrid import HybridConfig, design_chain, mode1_evaluate, mode2_evaluate
from mmwave_noma.pairing import (
    PairingInstance,
    angle_merge,
    exhaustive_pairing,
    strong_weak_heuristic,
)
from mmwave_noma.rates import NomaGroup, noma_rates
from mmwave_noma.sweeps import sweep_beta, sweep_gain, sweep_snr

TWO_USER_6DB = {"users": [{"avg_power_db": 6.0, "direction_cos": 0.0},
                          {"avg_power_db": 0.0, "direction_cos": 0.3}]}


@contextmanager
def criterion(label):
    t0 = time.perf_counter()
    try:
        yield
    except Exception:
        print(f"[{label}] FAIL ({time.perf_counter() - t0:.2f} s)")
        raise
    print(f"[{label}] PASS ({time.perf_counter() - t0:.2f} s)")


def test_01_single_beam_snr_sweep():
    with criterion("01 single-beam NOMA vs TDMA across the SNR sweep"):
        t0 = time.perf_counter()
        config = from_dict({**TWO_USER_6DB, "sweep": {
            "variable": "snr_db", "start": 0.0, "stop": 30.0, "points": 16}})
        _, rows = sweep_snr(config)
        narrow = [r for r in rows if r[1] == 1.0]
        wide = [r for r in rows if r[1] == 8.0]
        assert len(narrow) == 16 and len(wide) == 16
        for _, _, noma, tdma in narrow:
            assert noma > tdma
        losing = [noma < tdma for _, _, noma, tdma in wide]
        assert any(losing), "wide-beam NOMA should eventually fall behind"
        threshold = losing.index(True)
        assert all(losing[threshold:]), "once behind, it stays behind"
        assert time.perf_counter() - t0 < 1.0


def test_02_equal_split_multibeam_beta_sweep():
    with criterion("02 equal-gain multibeam NOMA vs TDMA over the gain ratio"):
        t0 = time.perf_counter()
        config = from_dict({**TWO_USER_6DB, "sweep": {
            "variable": "beta", "values": [1.0, 2.0, 4.0, 8.0]}})
        _, rows = sweep_beta(config)
        gaps = []
        for beta, noma, tdma in rows:
            assert noma >= tdma - 1e-9, f"NOMA fell below TDMA at beta={beta}"
            gaps.append(noma - tdma)
        assert all(b > a for a, b in zip(gaps, gaps[1:])), "gap must grow with beta"
        assert time.perf_counter() - t0 < 1.0


def test_03_gain_split_sweep():
    with criterion("03 shrinking returns along the gain-split line"):
        t0 = time.perf_counter()
        config = from_dict({**TWO_USER_6DB, "beta": 3.0, "sweep": {
            "variable": "g2", "values": [16.0, 12.0, 8.0, 4.0, 2.0]}})
        _, rows = sweep_gain(config)
        rates = [r[1] for r in rows]
        increments = [b - a for a, b in zip(rates, rates[1:])]
        assert all(i >= -1e-12 for i in increments), "sum rate must not drop"
        assert all(b < a for a, b in zip(increments, increments[1:])), \
            "improvements must shrink"
        assert time.perf_counter() - t0 < 1.0


def test_04_gain_conservation():
    with criterion("04 beam-gain conservation over 1000 random AWVs"):
        t0 = time.perf_counter()
        rng = np.random.default_rng(2718)
        for _ in range(1000):
            w = rng.standard_normal(32) + 1j * rng.standard_normal(32)
            awv = Awv(w / np.linalg.norm(w))
            assert abs(average_gain(awv, 4096) - 1.0) <= 1e-3
        assert time.perf_counter() - t0 < 10.0


def test_05_equal_gain_sum_rate_identity():
    with criterion("05 equal-gain NOMA sum-rate identity"):
        rng = np.random.default_rng(577)
        for _ in range(1000):
            gamma = rng.uniform(0.01, 100.0)
            power = rng.uniform(0.1, 50.0)
            frac = rng.uniform(0.0, 1.0)
            group = NomaGroup(((0, gamma, frac * power),
                               (1, gamma, (1.0 - frac) * power)), power)
            expected = math.log2(1.0 + power * gamma)
            assert abs(noma_rates(group).sum_rate - expected) <= 1e-12


def test_06_designers_vs_exhaustive_oracle():
    with criterion("06 optimizing designer within 10% of the exhaustive oracle"):
        t0 = time.perf_counter()
        geom = ArrayGeometry(8)
        rng = np.random.default_rng(42)
        for _ in range(20):
            phis = np.sort(rng.uniform(-1.0, 1.0, 2))
            while phis[1] - phis[0] < 2.0 / 8:
                phis = np.sort(rng.uniform(-1.0, 1.0, 2))
            gains = rng.uniform(1.0, 3.5, 2)
            targets = [BeamTarget(p, g) for p, g in zip(phis, gains)]
            oracle = exhaustive_cm_oracle(geom, targets, 16)
            optimized = cm_optimize_multibeam(geom, targets)
            heuristic = subarray_multibeam(geom, targets)
            assert optimized.min_ratio >= 0.9 * oracle.min_ratio, \
                f"optimizer {optimized.min_ratio:.4f} vs oracle {oracle.min_ratio:.4f}"
            assert heuristic.min_ratio <= oracle.min_ratio + 1e-9, \
                "oracle must dominate the sub-array heuristic"
        assert time.perf_counter() - t0 < 60.0


def test_07_allocation_solver_vs_grid_oracle():
    with criterion("07 joint allocation within 1e-3 bits of the grid oracle"):
        rng = np.random.default_rng(1234)
        checked = 0
        for _ in range(20):
            problem = AllocationProblem(
                channel_powers=(rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0)),
                directions=(-0.3, 0.4),
                total_power=rng.uniform(1.0, 20.0),
                geom=ArrayGeometry(32),
                min_rates=(rng.uniform(0.0, 0.5), rng.uniform(0.0, 0.5)))
            solver = joint_power_gain_2user(problem)
            oracle = brute_force_alloc_oracle(problem, 200, 200)
            if not oracle.feasible:
                assert not solver.feasible
                continue
            checked += 1
            assert solver.feasible
            assert solver.objective >= oracle.objective - 1e-3, \
                f"solver {solver.objective:.6f} below oracle {oracle.objective:.6f}"
        assert checked >= 10, "instance family too often infeasible to be a test"


def test_08_pairing_dominance_and_merge():
    with criterion("08 exhaustive pairing dominance; merge idempotent, no loss"):
        rng = np.random.default_rng(31)
        for _ in range(100):
            users = tuple(
                ChannelState(i, rng.uniform(-1, 1), math.sqrt(h), h)
                for i, h in enumerate(rng.uniform(0.2, 4.0, 6)))
            inst = PairingInstance(users=users, geom=ArrayGeometry(32),
                                   beam_style="multi", realization="ideal")
            best = exhaustive_pairing(inst)
            heur = strong_weak_heuristic(inst)
            assert best.objective >= heur.objective - 1e-9
            merged = angle_merge(inst, best)
            assert merged.objective >= best.objective - 1e-9
            assert angle_merge(inst, merged) == merged


def test_09_alternating_optimization_monotone():
    with criterion("09 alternating optimization monotone, converges in 30 steps"):
        rng = np.random.default_rng(99)
        for k in range(50):
            problem = AllocationProblem(
                channel_powers=(rng.uniform(0.3, 3.0), rng.uniform(0.3, 3.0)),
                directions=tuple(np.sort(rng.uniform(-0.9, 0.9, 2))),
                total_power=rng.uniform(1.0, 20.0),
                geom=ArrayGeometry(32),
                min_rates=(rng.uniform(0.0, 0.3), rng.uniform(0.0, 0.3)))
            designer = subarray_multibeam if k % 2 else None
            sol = alternating_optimize(problem, designer=designer)
            history = [h for h in sol.objective_history if np.isfinite(h)]
            assert len(sol.objective_history) <= 30
            assert all(b >= a - 1e-9 for a, b in zip(history, history[1:]))


def test_10_hybrid_sanity():
    with criterion("10 hybrid checks: M=1 equivalence, MUI dominance, ZF=identity"):
        geom = ArrayGeometry(32)

        # one chain is exactly plain NOMA
        channels = {0: ChannelState(0, -0.1, 2.0, 4.0),
                    1: ChannelState(1, 0.2, 1.0, 1.0)}
        chain = design_chain(geom, 0, [0, 1], channels, 1.0)
        config = HybridConfig(mode=1, chains=(chain,))
        assert mode1_evaluate(config, channels, 1.0) == noma_rates(chain.group)

        # paired two-chain layout: MUI never helps, row by row
        channels4 = {
            0: ChannelState(0, -0.05, 2.0, 4.0),
            1: ChannelState(1, -0.70, 1.0, 1.0),
            2: ChannelState(2, 0.10, math.sqrt(3.0), 3.0),
            3: ChannelState(3, 0.65, math.sqrt(1.2), 1.2),
        }
        chains = (design_chain(geom, 0, [0, 1], channels4, 1.0),
                  design_chain(geom, 1, [2, 3], channels4, 1.0))
        config4 = HybridConfig(mode=1, chains=chains)
        on = mode1_evaluate(config4, channels4, 1.0)
        off = mode1_evaluate(config4, channels4, 1.0, ignore_mui=True)
        for uid in channels4:
            assert on.rate_of(uid) <= off.rate_of(uid) + 1e-12

        # null-aligned singleton chains: zero forcing changes nothing
        phi0, phi1 = 0.0, 8.0 / 32
        channels2 = {0: ChannelState(0, phi0, math.sqrt(2.0), 2.0),
                     1: ChannelState(1, phi1, 1.0, 1.0)}
        chains2 = (design_chain(geom, 0, [0], channels2, 1.0),
                   design_chain(geom, 1, [1], channels2, 1.0))
        ident = HybridConfig(mode=2, chains=chains2, digital_precoder="identity")
        zf = HybridConfig(mode=2, chains=chains2, digital_precoder="zero_forcing")
        r_i = mode2_evaluate(ident, channels2, 1.0)
        r_z = mode2_evaluate(zf, channels2, 1.0)
        for uid in channels2:
            assert abs(r_z.rate_of(uid) - r_i.rate_of(uid)) <= 1e-6
