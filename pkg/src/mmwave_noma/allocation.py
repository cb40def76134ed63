"""Power allocation and joint power / beam-gain optimization for two NOMA users.

Beam gains enter the rates only through the effective gains
Gamma_i = |g_i|^2 * G_i / sigma^2, so the joint problem over powers and gains
decomposes: for fixed gains the optimal powers have a closed form, and the
remaining one-dimensional gain split along G1 + G2 = N is searched directly.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .arrays import ArrayGeometry
from .beam_design import BeamTarget, cm_optimize_multibeam

POWER_SUM_TOL = 1e-9


def fixed_split(total_power: float, fractions) -> tuple:
    """Split a power budget by fixed fractions (nonnegative, summing to one)."""
    fr = np.asarray(fractions, dtype=float)
    if np.any(fr < 0) or abs(fr.sum() - 1.0) > 1e-9:
        raise ValueError("fractions must be nonnegative and sum to 1")
    return tuple(float(f) * float(total_power) for f in fr)


@dataclass(frozen=True)
class AllocationProblem:
    """Two users, a power budget, optional minimum rates, gains on the N-line."""

    channel_powers: tuple          # |g_i|^2 per user
    directions: tuple
    total_power: float
    geom: ArrayGeometry
    min_rates: tuple = (0.0, 0.0)
    noise_power: float = 1.0
    fixed_gains: tuple = None      # set to pin (G1, G2) instead of searching

    def __post_init__(self):
        if len(self.channel_powers) != 2 or len(self.directions) != 2:
            raise ValueError("exactly two users expected")
        if self.total_power <= 0:
            raise ValueError("total power must be positive")
        if any(r < 0 for r in self.min_rates):
            raise ValueError("minimum rates must be nonnegative")

    def effective_gains(self, beam_gains) -> tuple:
        return tuple(h * g / self.noise_power
                     for h, g in zip(self.channel_powers, beam_gains))


@dataclass(frozen=True)
class AllocationSolution:
    """Powers, gains, and the sum-rate objective they achieve."""

    powers: tuple
    gains: tuple
    rates: tuple
    objective: float
    feasible: bool
    awv: object = None
    achieved_gains: tuple = None
    objective_history: tuple = field(default_factory=tuple)


def two_user_sic_rates(gamma_0: float, gamma_1: float, p_0: float, p_1: float) -> tuple:
    """SIC rates for two users; ties in effective gain decode user 0 first."""
    if (gamma_0, 0) <= (gamma_1, 1):
        weak = (gamma_0, p_0, p_1)
        r_weak = math.log2(1.0 + weak[0] * weak[1] / (weak[0] * weak[2] + 1.0))
        r_strong = math.log2(1.0 + gamma_1 * p_1)
        return (r_weak, r_strong)
    r_weak = math.log2(1.0 + gamma_1 * p_1 / (gamma_1 * p_0 + 1.0))
    r_strong = math.log2(1.0 + gamma_0 * p_0)
    return (r_strong, r_weak)


def max_sum_rate_2user(gamma_strong: float, gamma_weak: float, total_power: float,
                       min_rate_weak: float = 0.0,
                       min_rate_strong: float = 0.0) -> AllocationSolution:
    """Sum-rate-optimal split for fixed effective gains (gamma_strong >= gamma_weak).

    The weak user gets exactly the power its minimum rate needs,
    p_w = (2^r - 1) (P Gamma_w + 1) / (Gamma_w 2^r), everything else goes to
    the strong user. Returned powers/rates are ordered (strong, weak).
    Infeasibility is reported through the flag, not an exception.
    """
    if gamma_weak > gamma_strong:
        raise ValueError("gamma_strong must be at least gamma_weak")
    if gamma_weak < 0:
        raise ValueError("effective gains must be nonnegative")
    P = float(total_power)
    r = float(min_rate_weak)
    if r == 0.0:
        p_w = 0.0
    elif gamma_weak == 0.0:
        p_w = P
    else:
        grow = 2.0 ** r
        p_w = (grow - 1.0) * (P * gamma_weak + 1.0) / (gamma_weak * grow)
        p_w = min(max(p_w, 0.0), P)
    p_s = P - p_w

    r_weak = math.log2(1.0 + gamma_weak * p_w / (gamma_weak * p_s + 1.0))
    r_strong = math.log2(1.0 + gamma_strong * p_s)
    feasible = (r_weak >= r - 1e-9) and (r_strong >= min_rate_strong - 1e-9)
    return AllocationSolution(
        powers=(p_s, p_w), gains=None, rates=(r_strong, r_weak),
        objective=r_strong + r_weak, feasible=feasible,
    )


def _golden_max(f, lo, hi, tol=1e-6, max_iter=200):
    """Golden-section maximization of a scalar function on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = c if fc >= fd else d
    return x, max(fc, fd)


def _evaluate_gain_point(problem: AllocationProblem, gains) -> AllocationSolution:
    """Optimal powers for one (G1, G2) point, mapped back to user order."""
    gammas = problem.effective_gains(gains)
    weak = 0 if (gammas[0], 0) <= (gammas[1], 1) else 1
    strong = 1 - weak
    split = max_sum_rate_2user(gammas[strong], gammas[weak], problem.total_power,
                               min_rate_weak=problem.min_rates[weak],
                               min_rate_strong=problem.min_rates[strong])
    powers = [0.0, 0.0]
    rates = [0.0, 0.0]
    powers[strong], powers[weak] = split.powers
    rates[strong], rates[weak] = split.rates
    return AllocationSolution(tuple(powers), tuple(gains), tuple(rates),
                              split.objective, split.feasible)


def joint_power_gain_2user(problem: AllocationProblem, coarse_points: int = 51,
                           tol: float = 1e-6, attach_awv: bool = False,
                           designer=None) -> AllocationSolution:
    """Search the gain split G2 on G1 + G2 = N, allocating powers in closed form.

    A coarse grid locates the best region (guarding against local maxima),
    then golden-section refines between its neighbors. ``attach_awv`` designs
    a physical CM beamformer for the winning gains and re-reports the solution
    at the achieved (rather than ideal) gains.
    """
    N = problem.geom.n_antennas
    if problem.fixed_gains is not None:
        best = _evaluate_gain_point(problem, problem.fixed_gains)
    else:
        g2_grid = np.linspace(0.0, N, coarse_points)
        sols = [_evaluate_gain_point(problem, (N - g2, g2)) for g2 in g2_grid]
        objs = [s.objective if s.feasible else -np.inf for s in sols]
        i = int(np.argmax(objs))
        if not np.isfinite(objs[i]):
            worst = sols[i]
            return AllocationSolution(worst.powers, worst.gains, worst.rates,
                                      worst.objective, False)
        lo = g2_grid[max(i - 1, 0)]
        hi = g2_grid[min(i + 1, coarse_points - 1)]

        def f(g2):
            s = _evaluate_gain_point(problem, (N - g2, g2))
            return s.objective if s.feasible else -np.inf

        g2_best, _ = _golden_max(f, lo, hi, tol=tol)
        cands = [sols[i], _evaluate_gain_point(problem, (N - g2_best, g2_best))]
        best = max((s for s in cands if s.feasible), key=lambda s: s.objective)

    if attach_awv and best.feasible:
        design_fn = designer or cm_optimize_multibeam
        targets = [BeamTarget(problem.directions[0], best.gains[0]),
                   BeamTarget(problem.directions[1], best.gains[1])]
        design = design_fn(problem.geom, targets)
        achieved = tuple(design.achieved_gains)
        gammas = problem.effective_gains(achieved)
        rates = two_user_sic_rates(gammas[0], gammas[1], *best.powers)
        feas = all(r >= m - 1e-9 for r, m in zip(rates, problem.min_rates))
        return AllocationSolution(best.powers, achieved, rates, sum(rates), feas,
                                  awv=design.awv, achieved_gains=achieved)
    return best


def alternating_optimize(problem: AllocationProblem, designer=None,
                         max_iter: int = 30, tol: float = 1e-6,
                         init_g2: float = None, init_powers=None) -> AllocationSolution:
    """Alternate optimal powers at the current gains with a gain-split re-search.

    ``designer`` maps (geom, targets) to a DesignResult; None evaluates on
    ideal gains (achieved == target). Starts from the equal-gain split with
    the 1/4 / 3/4 power rule unless an initial point is given. A step is
    accepted only when the sum rate improves, so the recorded objective
    history is non-decreasing by construction; starting at an optimum
    terminates after a single unchanged iteration.
    """
    N = problem.geom.n_antennas

    def design_gains(g2):
        targets = (N - g2, g2)
        if designer is None:
            return targets, None
        spec = [BeamTarget(problem.directions[0], targets[0]),
                BeamTarget(problem.directions[1], targets[1])]
        result = designer(problem.geom, spec)
        return tuple(result.achieved_gains), result

    def objective_at(gains, powers):
        gammas = problem.effective_gains(gains)
        rates = two_user_sic_rates(gammas[0], gammas[1], *powers)
        feas = all(r >= m - 1e-9 for r, m in zip(rates, problem.min_rates))
        return (sum(rates) if feas else -np.inf), rates, feas

    g2 = float(N) / 2.0 if init_g2 is None else float(init_g2)
    gains, design = design_gains(g2)
    if init_powers is None:
        gammas = problem.effective_gains(gains)
        weak = 0 if (gammas[0], 0) <= (gammas[1], 1) else 1
        base = fixed_split(problem.total_power, (0.25, 0.75))
        powers = [0.0, 0.0]
        powers[1 - weak], powers[weak] = base
        powers = tuple(powers)
    else:
        powers = tuple(float(p) for p in init_powers)
    objective, rates, feasible = objective_at(gains, powers)

    history = []
    awv = design.awv if design is not None else None
    for _ in range(max_iter):
        obj_before = objective

        # (a) closed-form powers at the current achieved gains
        cand = _evaluate_gain_point(problem, gains)
        if cand.feasible and cand.objective > objective:
            powers, rates, objective, feasible = (cand.powers, cand.rates,
                                                  cand.objective, True)

        # (b) one golden-section pass over the gain split at fixed powers
        def f(g2_try):
            gains_try, _ = design_gains(g2_try)
            obj, _, _ = objective_at(gains_try, powers)
            return obj

        g2_new, obj_new = _golden_max(f, 0.0, float(N), tol=max(tol, 1e-4))
        if np.isfinite(obj_new) and obj_new > objective:
            gains_new, design_new = design_gains(g2_new)
            obj_chk, rates_chk, feas_chk = objective_at(gains_new, powers)
            if feas_chk and obj_chk > objective:
                g2, gains, rates, objective, feasible = (g2_new, gains_new,
                                                         rates_chk, obj_chk, True)
                if design_new is not None:
                    awv = design_new.awv

        history.append(objective)
        if np.isfinite(obj_before) and objective - obj_before < tol:
            break
        if not np.isfinite(obj_before) and not np.isfinite(objective):
            break

    return AllocationSolution(powers, gains, rates,
                              objective if np.isfinite(objective) else 0.0,
                              bool(feasible), awv=awv,
                              objective_history=tuple(history))


def brute_force_alloc_oracle(problem: AllocationProblem, grid_p: int,
                             grid_g: int, gain_pairs=None) -> AllocationSolution:
    """Exhaustive scan over the weak-user power fraction and the gain split.

    Ties break toward the smaller weak-user power, then the smaller G2.
    ``gain_pairs`` substitutes an explicit list of (G1, G2) points for the
    default uniform grid on the G1 + G2 = N line.
    """
    if grid_p > 10_000 or grid_g > 10_000:
        raise ValueError("oracle grids capped at 10^4 points per axis")
    N = problem.geom.n_antennas
    P = problem.total_power
    if gain_pairs is None:
        if problem.fixed_gains is not None:
            gain_pairs = [problem.fixed_gains]
        else:
            gain_pairs = [(N - g2, g2) for g2 in np.linspace(0.0, N, grid_g)]
    fractions = np.linspace(0.0, 1.0, grid_p)

    obj = np.full((grid_p, len(gain_pairs)), -np.inf)
    meta = {}
    for j, gains in enumerate(gain_pairs):
        gammas = problem.effective_gains(gains)
        weak = 0 if (gammas[0], 0) <= (gammas[1], 1) else 1
        strong = 1 - weak
        p_w = fractions * P
        p_s = P - p_w
        r_w = np.log2(1.0 + gammas[weak] * p_w / (gammas[weak] * p_s + 1.0))
        r_s = np.log2(1.0 + gammas[strong] * p_s)
        ok = (r_w >= problem.min_rates[weak] - 1e-9) & \
             (r_s >= problem.min_rates[strong] - 1e-9)
        total = np.where(ok, r_w + r_s, -np.inf)
        obj[:, j] = total
        meta[j] = (weak, strong, p_w, p_s, r_w, r_s)

    flat = int(np.argmax(obj))      # C-order: smallest p_w first, then smallest G2
    i, j = divmod(flat, len(gain_pairs))
    if not np.isfinite(obj[i, j]):
        return AllocationSolution((0.0, 0.0), tuple(gain_pairs[0]), (0.0, 0.0),
                                  0.0, False)
    weak, strong, p_w, p_s, r_w, r_s = meta[j]
    powers = [0.0, 0.0]
    rates = [0.0, 0.0]
    powers[weak], powers[strong] = float(p_w[i]), float(p_s[i])
    rates[weak], rates[strong] = float(r_w[i]), float(r_s[i])
    return AllocationSolution(tuple(powers), tuple(gain_pairs[j]), tuple(rates),
                              float(obj[i, j]), True)
