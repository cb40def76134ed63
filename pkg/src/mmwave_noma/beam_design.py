"""Constant-modulus AWV synthesis: steered beams, sub-array multibeams,
relaxed convex optimization with CM projection, and an exhaustive oracle.

All designers return unit-norm constant-modulus weights; achieved gains are
always re-measured with arrays.beam_gain rather than taken from the design
math, so reported numbers survive any synthesis shortcut.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .arrays import ArrayGeometry, Awv, beam_gain, check_direction, steering_vector
from .errors import InfeasibleTargetsError, SearchSpaceError

EXHAUSTIVE_THETA_CAP = 1 << 18     # combos above this use coordinate descent
ORACLE_COMBO_CAP = 400_000_000     # admits 16 phase levels on an 8-element array
SHORTFALL_FRACTION = 0.1


@dataclass(frozen=True)
class BeamTarget:
    """Desired power gain toward one direction."""

    direction: float
    target_gain: float

    def __post_init__(self):
        check_direction(self.direction)
        if self.target_gain < 0:
            raise ValueError("target gain must be nonnegative")


@dataclass(frozen=True)
class DesignResult:
    """Outcome of a multibeam design: weights plus measured per-target gains."""

    awv: Awv
    directions: tuple
    target_gains: tuple
    achieved_gains: tuple
    alpha: float                  # final max-|weight| objective
    iterations: int
    shortfall: bool = False       # any achieved gain below (1 - 0.1) * target
    alpha_history: tuple = field(default_factory=tuple)

    @property
    def min_ratio(self) -> float:
        """Worst achieved/target ratio across targets (inf for zero targets)."""
        ratios = [a / t if t > 0 else np.inf
                  for a, t in zip(self.achieved_gains, self.target_gains)]
        return float(min(ratios))


def _measure(geom, w, directions, target_gains, alpha, iterations, alpha_history=()):
    awv = Awv(w, cm=True)
    achieved = tuple(beam_gain(awv, p) for p in directions)
    short = any(a < (1.0 - SHORTFALL_FRACTION) * t for a, t in zip(achieved, target_gains))
    return DesignResult(awv, tuple(directions), tuple(target_gains), achieved,
                        float(alpha), int(iterations), short, tuple(alpha_history))


def steer_single(geom: ArrayGeometry, phi: float) -> Awv:
    """Narrow beam toward phi: w = a(phi)/sqrt(N), peak gain N."""
    a = steering_vector(geom, phi)
    return Awv(a / np.sqrt(geom.n_antennas), cm=True)


# ---------------------------------------------------------------------------
# sub-array composition and the per-sub-array coefficient search


def _partition(n_antennas, sizes):
    bounds = np.concatenate([[0], np.cumsum(sizes)])
    if bounds[-1] != n_antennas:
        raise ValueError("sub-array sizes must sum to the antenna count")
    return bounds.astype(int)


def _subarray_responses(geom, steer_dirs, bounds, eval_dirs):
    """Rows r[m] = w_m^H a(eval) for sub-array m steered at steer_dirs[m]."""
    N = geom.n_antennas
    k = len(steer_dirs)
    R = np.zeros((k, len(eval_dirs)), dtype=np.complex128)
    for m in range(k):
        ns = np.arange(bounds[m], bounds[m + 1])
        wm = np.exp(1j * np.pi * ns * steer_dirs[m]) / np.sqrt(N)
        R[m] = wm.conj() @ np.exp(1j * np.pi * np.outer(ns, eval_dirs))
    return R


def _theta_objective(R, weights):
    """min over eval points of |sum_m e^{-j theta_m} R[m]|^2 * weights."""
    def f(thetas):
        resp = np.exp(-1j * thetas) @ R
        return float((np.abs(resp) ** 2 * weights).min())
    return f


def _theta_exhaustive(R, weights, n_theta):
    k = R.shape[0]
    cand = 2.0 * np.pi * np.arange(n_theta) / n_theta
    grids = np.meshgrid(*([cand] * (k - 1)), indexing="ij")
    combos = np.stack([g.ravel() for g in grids], axis=1)
    combos = np.concatenate([np.zeros((combos.shape[0], 1)), combos], axis=1)
    vals = ((np.abs(np.exp(-1j * combos) @ R) ** 2) * weights[None, :]).min(axis=1)
    j = int(np.argmax(vals))  # first maximum = lexicographically smallest thetas
    return combos[j], float(vals[j])


def _theta_descent(R, weights, n_theta, theta0, sweeps=10):
    k = R.shape[0]
    cand = 2.0 * np.pi * np.arange(n_theta) / n_theta
    phases = np.exp(-1j * cand)
    theta = np.asarray(theta0, dtype=float).copy()
    resp = np.exp(-1j * theta) @ R
    best = float((np.abs(resp) ** 2 * weights).min())
    for _ in range(sweeps):
        improved = False
        for m in range(1, k):
            partial = resp - np.exp(-1j * theta[m]) * R[m]
            trial = partial[None, :] + phases[:, None] * R[m][None, :]
            vals = ((np.abs(trial) ** 2) * weights[None, :]).min(axis=1)
            j = int(np.argmax(vals))
            if vals[j] > best + 1e-12:
                theta[m] = cand[j]
                resp = partial + phases[j] * R[m]
                best = float(vals[j])
                improved = True
        if not improved:
            break
    return theta, best


def _compose(geom, steer_dirs, bounds, thetas):
    N = geom.n_antennas
    w = np.zeros(N, dtype=np.complex128)
    for m in range(len(steer_dirs)):
        ns = np.arange(bounds[m], bounds[m + 1])
        w[ns] = np.exp(1j * (np.pi * ns * steer_dirs[m] + thetas[m])) / np.sqrt(N)
    return w


def _default_sizes(n_antennas, target_gains):
    """Antenna counts proportional to sqrt(target gain), each at least one."""
    amps = np.sqrt(np.maximum(np.asarray(target_gains, dtype=float), 1e-12))
    raw = amps / amps.sum() * n_antennas
    sizes = np.maximum(1, np.round(raw).astype(int))
    while sizes.sum() > n_antennas:
        sizes[int(np.argmax(sizes - raw))] -= 1
    while sizes.sum() < n_antennas:
        sizes[int(np.argmin(sizes - raw))] += 1
    return sizes


def subarray_multibeam(geom: ArrayGeometry, targets, sizes=None, n_theta: int = 64) -> DesignResult:
    """Split the array into contiguous sub-arrays, one steered at each target.

    Per-sub-array phase coefficients are chosen to maximize the minimum
    achieved/target gain ratio, exhaustively over an n_theta grid when the
    combination count permits, by cyclic descent otherwise.
    """
    targets = list(targets)
    if not targets:
        raise ValueError("need at least one target")
    if len(targets) > geom.n_antennas:
        raise ValueError("more targets than antennas")
    dirs = [t.direction for t in targets]
    gains = [t.target_gain for t in targets]
    if len(set(dirs)) != len(dirs):
        raise ValueError("target directions must be pairwise distinct")

    if sizes is None:
        sizes = _default_sizes(geom.n_antennas, gains)
    else:
        sizes = np.asarray(sizes, dtype=int)
        if len(sizes) != len(targets) or np.any(sizes < 1):
            raise ValueError("need one positive size per target")
    bounds = _partition(geom.n_antennas, sizes)

    R = _subarray_responses(geom, dirs, bounds, np.asarray(dirs))
    weights = 1.0 / np.maximum(np.asarray(gains, dtype=float), 1e-12)
    k = len(targets)
    if k == 1:
        thetas = np.zeros(1)
    elif n_theta ** (k - 1) <= EXHAUSTIVE_THETA_CAP:
        thetas, _ = _theta_exhaustive(R, weights, n_theta)
    else:
        thetas, _ = _theta_descent(R, weights, n_theta, np.zeros(k))
    w = _compose(geom, dirs, bounds, thetas)
    return _measure(geom, w, dirs, gains, 1.0 / np.sqrt(geom.n_antennas), 1)


# ---------------------------------------------------------------------------
# wide flat-top beams


def _flat_top_seed(geom, center, width, iters=200, grid_n=1024):
    """Iterative magnitude shaping toward a flat 2/B top, CM-projected each round."""
    N = geom.n_antennas
    full = np.linspace(-1.0, 1.0, grid_n, endpoint=False)
    dist = np.abs(((full - center + 1.0) % 2.0) - 1.0)
    target = np.where(dist <= width / 2.0, np.sqrt(2.0 / width), 0.05)
    A = np.exp(1j * np.pi * np.outer(np.arange(N), full))
    n = np.arange(N)
    w = np.exp(1j * (np.pi * (center - width / 2.0) * n
                     + np.pi * width * n ** 2 / (2.0 * N))) / np.sqrt(N)
    for _ in range(iters):
        resp = w.conj() @ A
        desired = target * np.exp(1j * np.angle(resp))
        w_ls = (A @ desired.conj()) / grid_n  # A A^H is grid_n * I on this grid
        w = np.exp(1j * np.angle(w_ls)) / np.sqrt(N)
    return w


def wide_beam(geom: ArrayGeometry, center: float, width: float, n_theta: int = 64) -> Awv:
    """CM beam covering [center - B/2, center + B/2] with gain near 2/B.

    Built from k = ceil(B*N/2) contiguous sub-arrays steered at equally spaced
    directions across the interval. The minimum gain over the covered user
    span (the interval less a 2/N guard at each edge, matching the
    required_width convention) is at least half the flat-top ideal 2/B.
    """
    N = geom.n_antennas
    check_direction(center)
    if not (2.0 / N - 1e-12 <= width <= 2.0 + 1e-12):
        raise ValueError(f"width {width} outside [2/N, 2]")
    if center - width / 2.0 < -1.0 - 1e-9 or center + width / 2.0 > 1.0 + 1e-9:
        raise ValueError("beam interval extends outside the cosine-angle domain")
    k = int(math.ceil(width * N / 2.0 - 1e-9))
    if k <= 1:
        return steer_single(geom, center)

    sizes = np.full(k, N // k)
    sizes[: N % k] += 1
    bounds = _partition(N, sizes)
    lo = center - width / 2.0
    steer_dirs = np.clip(lo + (np.arange(k) + 0.5) * width / k, -1.0, 1.0)

    inner = max(width - 2.0 / N, 0.0)
    eval_dirs = np.linspace(center - inner / 2.0, center + inner / 2.0, 257)
    R = _subarray_responses(geom, steer_dirs, bounds, eval_dirs)
    weights = np.ones(eval_dirs.size)

    mids = (bounds[:-1] + bounds[1:] - 1) / 2.0
    chirp = np.pi * (lo * mids + width * mids ** 2 / (2.0 * N)) - np.pi * mids * steer_dirs
    inits = [chirp - chirp[0]]
    if n_theta ** (k - 1) > EXHAUSTIVE_THETA_CAP:
        # project the magnitude- shaped seed onto the sub-array phase structure
        seed = _flat_top_seed(geom, center, width)
        proj = np.zeros(k)
        for m in range(k):
            ns = np.arange(bounds[m], bounds[m + 1])
            template = np.exp(1j * np.pi * ns * steer_dirs[m]) / np.sqrt(N)
            proj[m] = np.angle(np.vdot(template, seed[ns]))
        inits.append(proj - proj[0])

    best_theta, best_val = None, -np.inf
    for theta0 in inits:
        theta, val = _theta_descent(R, weights, n_theta, theta0)
        if val > best_val:
            best_theta, best_val = theta, val
    if n_theta ** (k - 1) <= EXHAUSTIVE_THETA_CAP:
        theta, val = _theta_exhaustive(R, weights, n_theta)
        if val > best_val:
            best_theta, best_val = theta, val

    return Awv(_compose(geom, steer_dirs, bounds, best_theta), cm=True)


# ---------------------------------------------------------------------------
# relaxed convex optimization with CM projection


def _solve_relaxed(geom, A_rows, sqrt_gains, psi):
    """min alpha s.t. |w_n| <= alpha, Re(e^{-j psi_i} a_i^H w) >= sqrt(G_i)."""
    import cvxpy as cp

    N = geom.n_antennas
    w = cp.Variable(N, complex=True)
    alpha = cp.Variable()
    cons = [cp.abs(w) <= alpha]
    for i in range(len(sqrt_gains)):
        cons.append(cp.real(np.exp(-1j * psi[i]) * (A_rows[i].conj() @ w)) >= sqrt_gains[i])
    prob = cp.Problem(cp.Minimize(alpha), cons)
    prob.solve(solver=cp.CLARABEL)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise InfeasibleTargetsError(f"convex step returned status {prob.status}")
    return np.asarray(w.value), float(alpha.value)


def _cm_single_run(geom, dirs, gains, psi0, tol, max_iter):
    A_rows = [steering_vector(geom, p) for p in dirs]
    sqrt_gains = np.sqrt(np.asarray(gains, dtype=float))
    psi = np.asarray(psi0, dtype=float).copy()
    alpha_hist = []
    w = None
    prev = np.inf
    for _ in range(max_iter):
        w, alpha = _solve_relaxed(geom, A_rows, sqrt_gains, psi)
        alpha_hist.append(alpha)
        psi = np.angle(np.array([r.conj() @ w for r in A_rows]))
        if abs(prev - alpha) < tol:
            break
        prev = alpha
    w_cm = np.exp(1j * np.angle(w)) / np.sqrt(geom.n_antennas)
    return w_cm, alpha_hist


def cm_optimize_multibeam(geom: ArrayGeometry, targets, tol: float = 1e-6,
                          max_iter: int = 50, n_restarts: int = 8,
                          restart_seed: int = 0) -> DesignResult:
    """Multibeam design by alternating convex relaxation and phase update.

    Fixing auxiliary phases psi makes the gain constraints linear, so the
    max-|weight| objective is a small SOCP; psi is then re-aligned to the
    achieved response phases and the pair iterates until alpha settles.
    The final weights are projected onto the CM set, keeping element phases.

    The psi = 0 start plus ``n_restarts`` seeded random starts are all
    evaluated and the best post-projection worst-case gain ratio wins.
    """
    targets = list(targets)
    if not targets:
        raise ValueError("need at least one target")
    dirs = [t.direction for t in targets]
    gains = [t.target_gain for t in targets]
    if len(set(dirs)) != len(dirs):
        raise ValueError("target directions must be pairwise distinct")
    budget = sum(gains) * (2.0 / geom.n_antennas)
    if budget > 2.0 * (1.0 + tol):
        raise InfeasibleTargetsError(
            f"gain-width budget {budget:.4f} exceeds 2: targets ask more than the array carries"
        )

    rng = np.random.default_rng(restart_seed)
    starts = [np.zeros(len(targets))]
    starts += [rng.uniform(0.0, 2.0 * np.pi, len(targets)) for _ in range(n_restarts)]

    best = None
    for psi0 in starts:
        w_cm, alpha_hist = _cm_single_run(geom, dirs, gains, psi0, tol, max_iter)
        result = _measure(geom, w_cm, dirs, gains, alpha_hist[-1],
                          len(alpha_hist), alpha_hist)
        if best is None or result.min_ratio > best.min_ratio:
            best = result
    return best


# ---------------------------------------------------------------------------
# exhaustive oracle for small arrays

_SCAN_KERNEL = None


def _scan_kernel():
    """Compile-on-first-use numba kernel for the phase-combination scan."""
    global _SCAN_KERNEL
    if _SCAN_KERNEL is None:
        import numba
        from numba import njit, prange

        # the image's TBB is too old for numba; workqueue avoids the warning
        numba.config.THREADING_LAYER = "workqueue"

        @njit(parallel=True, cache=True)
        def scan(SAre, SAim, SBre, SBim, g):
            nt, P = SAre.shape
            Qn = SBre.shape[1]
            best_val = np.full(P, -1.0)
            best_q = np.full(P, -1, dtype=np.int64)
            for p in prange(P):
                bv = -1.0
                bq = -1
                for q in range(Qn):
                    m = 1e300
                    for i in range(nt):
                        re = SAre[i, p] + SBre[i, q]
                        im = SAim[i, p] + SBim[i, q]
                        r = (re * re + im * im) / g[i]
                        if r < m:
                            m = r
                    if m > bv:
                        bv = m
                        bq = q
                best_val[p] = bv
                best_q[p] = bq
            return best_val, best_q

        _SCAN_KERNEL = scan
    return _SCAN_KERNEL


def _half_sums(geom, dirs, n_lo, n_hi, phase_levels, fix_first):
    """Partial responses for every phase combination of antennas n_lo..n_hi-1.

    Combination index orders earlier antennas as more significant digits, so
    ascending index is ascending lexicographic phase tuple.
    """
    N = geom.n_antennas
    S = np.zeros((len(dirs), 1), dtype=np.complex128)
    for n in range(n_lo, n_hi):
        base = np.exp(1j * np.pi * n * np.asarray(dirs)) / np.sqrt(N)
        if n == 0 and fix_first:
            contrib = base[:, None]
        else:
            ks = np.arange(phase_levels)
            contrib = base[:, None] * np.exp(-2j * np.pi * ks / phase_levels)[None, :]
        S = (S[:, :, None] + contrib[:, None, :]).reshape(len(dirs), -1)
    return S


def exhaustive_cm_oracle(geom: ArrayGeometry, targets, phase_levels: int,
                         max_combos: int = ORACLE_COMBO_CAP) -> DesignResult:
    """Enumerate every CM AWV on a phase grid; return the max-min-ratio one.

    Phases are 2*pi*k/Q with the first antenna fixed at zero. Ties resolve to
    the lexicographically smallest phase index tuple. Only small arrays are
    admissible; the combination count Q^(N-1) must stay under ``max_combos``.
    """
    targets = list(targets)
    if not targets:
        raise ValueError("need at least one target")
    N = geom.n_antennas
    if N > 10:
        raise SearchSpaceError("oracle supports at most 10 antennas")
    Q = int(phase_levels)
    combos = Q ** (N - 1)
    if combos > max_combos:
        raise SearchSpaceError(f"{combos} phase combinations exceed the cap {max_combos}")
    dirs = [t.direction for t in targets]
    gains = np.asarray([t.target_gain for t in targets], dtype=float)

    n_inner = -(-(N - 1) // 2)   # ceil((N-1)/2) antennas in the fast-varying half
    split = N - n_inner
    SA = _half_sums(geom, dirs, 0, split, Q, fix_first=True)
    SB = _half_sums(geom, dirs, split, N, Q, fix_first=False)
    scan = _scan_kernel()
    bv, bq = scan(np.ascontiguousarray(SA.real), np.ascontiguousarray(SA.imag),
                  np.ascontiguousarray(SB.real), np.ascontiguousarray(SB.imag),
                  np.maximum(gains, 1e-12))
    p = int(np.argmax(bv))     # first max: smallest index, lexicographic tiebreak
    q = int(bq[p])

    ks = np.zeros(N, dtype=int)
    rem = p
    for n in range(split - 1, 0, -1):
        ks[n] = rem % Q
        rem //= Q
    rem = q
    for n in range(N - 1, split - 1, -1):
        ks[n] = rem % Q
        rem //= Q
    w = np.exp(2j * np.pi * ks / Q) / np.sqrt(N)
    return _measure(geom, w, dirs, gains, 1.0 / np.sqrt(N), 1)
