"""User pairing for hybrid multiple access: exhaustive matching, the
strong-with-weak heuristic, and the small-angle merge rule.

Groups share the band via equal time slices; inside a group the fixed
quarter / three-quarter power rule applies (strong user gets the quarter).
Group beams are either the idealized flat-top model or physically designed
constant-modulus weights, and either one wide beam per group or one narrow
beam per user.
"""

from dataclasses import dataclass

import numpy as np

from .arrays import ArrayGeometry, beam_gain
from .beam_design import BeamTarget, steer_single, subarray_multibeam, wide_beam
from .ideal_beams import ideal_gain, required_width
from .rates import NomaGroup, noma_rates

BEAM_STYLES = ("single", "multi")
REALIZATIONS = ("ideal", "physical")


@dataclass(frozen=True)
class PairingInstance:
    """Users to group, the array, and how group beams are formed."""

    users: tuple                      # ChannelState per user
    geom: ArrayGeometry
    beam_style: str = "multi"
    realization: str = "ideal"
    group_power: float = 1.0
    noise_power: float = 1.0
    power_split: tuple = (0.25, 0.75)   # (strong, weak)

    def __post_init__(self):
        object.__setattr__(self, "users", tuple(self.users))
        if len(self.users) < 2:
            raise ValueError("need at least two users to pair")
        if self.beam_style not in BEAM_STYLES:
            raise ValueError(f"beam_style must be one of {BEAM_STYLES}")
        if self.realization not in REALIZATIONS:
            raise ValueError(f"realization must be one of {REALIZATIONS}")
        ids = [u.user_id for u in self.users]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate user ids")

    def user(self, uid):
        for u in self.users:
            if u.user_id == uid:
                return u
        raise KeyError(uid)


@dataclass(frozen=True)
class GroupEval:
    """One group's beams and rates (rates already include the time share)."""

    user_ids: tuple
    widths: tuple
    gains: tuple          # aligned with user_ids
    rates: tuple
    sum_rate: float
    merged: bool = False


@dataclass(frozen=True)
class PairingPlan:
    groups: tuple         # sorted tuples of user ids, lexicographically ordered
    evals: tuple
    objective: float

    def group_of(self, uid):
        for g in self.groups:
            if uid in g:
                return g
        raise KeyError(uid)


def _canonical(groups):
    return tuple(sorted(tuple(sorted(g)) for g in groups))


def _fit_center(center, width):
    half = width / 2.0
    return float(np.clip(center, -1.0 + half, 1.0 - half))


def _group_beams(instance, uids, merged):
    """Beam widths and per-user gains for one group (size 1 or 2)."""
    geom = instance.geom
    users = [instance.user(u) for u in uids]
    phis = [u.direction for u in users]
    narrow = geom.min_beam_width

    if merged or len(uids) == 1:
        center = _fit_center(float(np.mean(phis)), narrow)
        if instance.realization == "ideal":
            gains = [float(geom.n_antennas)] * len(uids)
        else:
            awv = steer_single(geom, center)
            gains = [beam_gain(awv, p) for p in phis]
        return (narrow,), tuple(gains)

    if instance.beam_style == "single":
        width = required_width(phis, geom)
        center = _fit_center(float(np.mean(phis)), width)
        if instance.realization == "ideal":
            g = ideal_gain(width)
            gains = [g] * len(uids)
        else:
            awv = wide_beam(geom, center, min(width, 2.0))
            gains = [beam_gain(awv, p) for p in phis]
        return (width,), tuple(gains)

    per_user_gain = geom.n_antennas / len(uids)
    if instance.realization == "ideal":
        gains = [per_user_gain] * len(uids)
    else:
        targets = [BeamTarget(p, per_user_gain) for p in phis]
        design = subarray_multibeam(geom, targets)
        gains = list(design.achieved_gains)
    return tuple([narrow] * len(uids)), tuple(gains)


def _evaluate_group(instance, uids, time_share, merged=False):
    uids = tuple(sorted(uids))
    widths, gains = _group_beams(instance, uids, merged)
    users = [instance.user(u) for u in uids]
    gammas = [u.power * g / instance.noise_power for u, g in zip(users, gains)]

    if len(uids) == 1:
        powers = [instance.group_power]
    else:
        order = sorted(range(2), key=lambda i: (gammas[i], uids[i]))
        weak, strong = order[0], order[1]
        powers = [0.0, 0.0]
        powers[strong] = instance.power_split[0] * instance.group_power
        powers[weak] = instance.power_split[1] * instance.group_power
    group = NomaGroup(tuple(zip(uids, gammas, powers)), instance.group_power)
    report = noma_rates(group)
    rates = tuple(time_share * report.rate_of(u) for u in uids)
    return GroupEval(uids, widths, gains, rates, float(sum(rates)), merged)


def evaluate_plan(instance, groups, merge=False) -> PairingPlan:
    """Score a grouping; ``merge`` collapses close pairs onto one narrow beam."""
    groups = _canonical(groups)
    seen = [u for g in groups for u in g]
    if sorted(seen) != sorted(u.user_id for u in instance.users):
        raise ValueError("groups must partition the user set")
    tau = 1.0 / len(groups)
    thresh = instance.geom.min_beam_width
    evals = []
    for g in groups:
        merged = False
        if merge and len(g) == 2:
            gap = abs(instance.user(g[0]).direction - instance.user(g[1]).direction)
            merged = gap < thresh
        evals.append(_evaluate_group(instance, g, tau, merged))
    return PairingPlan(groups, tuple(evals), float(sum(e.sum_rate for e in evals)))


def _matchings(ids):
    """All partitions into pairs (plus one singleton when the count is odd)."""
    ids = sorted(ids)
    if not ids:
        yield ()
        return
    if len(ids) % 2 == 1:
        for i, lone in enumerate(ids):
            rest = ids[:i] + ids[i + 1:]
            for rest_match in _pair_matchings(rest):
                yield ((lone,),) + rest_match
    else:
        yield from _pair_matchings(ids)


def _pair_matchings(ids):
    if not ids:
        yield ()
        return
    head = ids[0]
    for j in range(1, len(ids)):
        partner = ids[j]
        rest = [x for x in ids[1:] if x != partner]
        for rest_match in _pair_matchings(rest):
            yield ((head, partner),) + rest_match


def exhaustive_pairing(instance: PairingInstance) -> PairingPlan:
    """Best plan over all perfect matchings; ties pick the lexicographically
    smallest grouping. Enumeration is only admissible up to ten users."""
    ids = [u.user_id for u in instance.users]
    if len(ids) > 10:
        raise ValueError("exhaustive pairing supports at most 10 users")
    best = None
    for groups in _matchings(ids):
        plan = evaluate_plan(instance, groups)
        if best is None or plan.objective > best.objective or (
                plan.objective == best.objective and plan.groups < best.groups):
            best = plan
    return best


def strong_weak_heuristic(instance: PairingInstance) -> PairingPlan:
    """Pair the strongest remaining user with the weakest remaining one."""
    by_power = sorted(instance.users, key=lambda u: (-u.power, u.user_id))
    ids = [u.user_id for u in by_power]
    groups = []
    lo, hi = 0, len(ids) - 1
    while lo < hi:
        groups.append((ids[lo], ids[hi]))
        lo += 1
        hi -= 1
    if lo == hi:
        groups.append((ids[lo],))
    return evaluate_plan(instance, groups)


def angle_merge(instance: PairingInstance, plan: PairingPlan) -> PairingPlan:
    """Re-evaluate a plan, serving any pair closer than 2/N with one narrow beam.

    Both users of a merged pair see the full steering gain instead of a split
    multibeam, so in the ideal multibeam model the objective never decreases.
    Applying the merge twice changes nothing.
    """
    return evaluate_plan(instance, plan.groups, merge=True)
