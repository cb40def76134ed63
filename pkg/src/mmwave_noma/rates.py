"""Achievable rates for downlink NOMA with SIC, TDMA, and multi-group MUI settings.

Convention: effective gain Gamma_i = |g_i|^2 * G_i / sigma^2 folds channel power,
beam gain, and noise together, so rates depend only on (Gamma_i, p_i).
Noise power defaults to 1, making transmission SNR equal to total power.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

POWER_SUM_TOL = 1e-9


class GroupMember(NamedTuple):
    user_id: int
    gamma: float  # effective gain |g|^2 * G / sigma^2
    power: float


@dataclass(frozen=True)
class NomaGroup:
    """Users superposed on one resource block with their powers."""

    members: tuple
    total_power: float

    def __post_init__(self):
        members = tuple(GroupMember(*m) for m in self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise ValueError("group needs at least one member")
        for m in members:
            if m.gamma < 0:
                raise ValueError("effective gains must be nonnegative")
            if m.power < 0:
                raise ValueError("powers must be nonnegative")
        used = sum(m.power for m in members)
        if used > self.total_power * (1.0 + POWER_SUM_TOL) + POWER_SUM_TOL:
            raise ValueError(f"member powers {used} exceed total power {self.total_power}")

    def user_ids(self):
        return [m.user_id for m in self.members]


@dataclass(frozen=True)
class RateReport:
    """Per-user rates in bits/s/Hz plus their sum and minimum."""

    per_user: tuple
    sum_rate: float
    min_rate: float

    @classmethod
    def from_rates(cls, per_user):
        per_user = tuple((int(u), float(r)) for u, r in per_user)
        rates = [r for _, r in per_user]
        return cls(per_user, float(sum(rates)), float(min(rates)))

    def rate_of(self, user_id: int) -> float:
        for u, r in self.per_user:
            if u == user_id:
                return r
        raise KeyError(user_id)


def _sic_order(members):
    """Decode order: ascending effective gain, ties broken by ascending user id."""
    return sorted(range(len(members)), key=lambda i: (members[i].gamma, members[i].user_id))


def _ordered_rates(members, order):
    """SIC rate formula for a fixed decode order (weakest first)."""
    rates = [0.0] * len(members)
    stronger_power = sum(members[i].power for i in order)
    for i in order:
        m = members[i]
        stronger_power -= m.power
        rates[i] = float(np.log2(1.0 + m.power * m.gamma / (m.gamma * stronger_power + 1.0)))
    return rates


def noma_rates(group: NomaGroup) -> RateReport:
    """Rates under superposition coding with perfect SIC.

    Users are ordered by effective gain; each user decodes (and cancels) all
    weaker-ordered signals first and treats stronger-ordered ones as noise:
    R_k = log2(1 + p_k*Gamma_k / (Gamma_k * sum_{j>k} p_j + 1)).
    """
    members = group.members
    rates = _ordered_rates(members, _sic_order(members))
    return RateReport.from_rates((m.user_id, r) for m, r in zip(members, rates))


def tdma_rates(gammas, time_shares, power, user_ids=None) -> RateReport:
    """Orthogonal baseline: R_i = tau_i * log2(1 + P * Gamma_i).

    ``power`` is the transmit power during a user's slot; Gamma_i should be the
    full steering gain N times channel power over noise.
    """
    gammas = np.asarray(gammas, dtype=float)
    taus = np.asarray(time_shares, dtype=float)
    if np.any(taus < 0) or taus.sum() > 1.0 + POWER_SUM_TOL:
        raise ValueError("time shares must be nonnegative and sum to at most 1")
    if np.any(gammas < 0):
        raise ValueError("effective gains must be nonnegative")
    if user_ids is None:
        user_ids = range(len(gammas))
    rates = taus * np.log2(1.0 + power * gammas)
    return RateReport.from_rates(zip(user_ids, rates))


def mui_rates(groups, channels, noise_power: float, ignore_mui: bool = False) -> RateReport:
    """NOMA rates per group with inter-group leakage folded into the noise.

    ``groups`` is a list of (NomaGroup, Awv, chain_power); ``channels`` maps
    user_id -> ChannelState. User u in group m sees interference
    I_u = sum_{m' != m} chain_power_{m'} * |g_u|^2 * beam_gain(w_{m'}, phi_u),
    which rescales its effective gain by sigma^2 / (sigma^2 + I_u).

    The SIC decode order inside each group is the one the group was formed
    with (from its stored gains); leakage lowers SINRs but does not
    renegotiate the order, so no user's rate can rise when MUI is added.
    """
    from .arrays import beam_gain  # local import to keep module deps one-way

    seen = set()
    for g, _, _ in groups:
        for uid in g.user_ids():
            if uid in seen:
                raise ValueError(f"user {uid} appears in more than one group")
            seen.add(uid)

    per_user = []
    for m, (group, _, _) in enumerate(groups):
        order = _sic_order(group.members)
        scaled = []
        for member in group.members:
            chan = channels[member.user_id]
            interference = 0.0
            if not ignore_mui:
                for mp, (_, awv_p, chain_power_p) in enumerate(groups):
                    if mp == m:
                        continue
                    leak = chain_power_p * chan.power * beam_gain(awv_p, chan.direction)
                    interference += leak
            scale = noise_power / (noise_power + interference)
            scaled.append(GroupMember(member.user_id, member.gamma * scale, member.power))
        rates = _ordered_rates(scaled, order)
        per_user.extend((mem.user_id, r) for mem, r in zip(scaled, rates))
    return RateReport.from_rates(per_user)
